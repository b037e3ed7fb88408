/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <vector>

#include "dcran/common.hpp"
#include "dcran/sim_config.hpp"

namespace dcran {

/// Static deployment geometry. Positions in km inside [0, area_side]^2.
struct NetworkTopology {
  int n_rrh = 0;
  int n_pairs = 0;
  int n_antennas = 0;
  std::vector<Eigen::Vector2d> rrh_pos;
  std::vector<Eigen::Vector2d> tx_pos;
  std::vector<Eigen::Vector2d> rx_pos;
  double area_side = 0.0;
  double max_pair_dist = 0.0;

  int dim() const { return n_rrh * n_antennas; }
};

/// Per-slot channel state. Amplitude gains are linear; per-RRH antenna block
/// n of g_cran[k] occupies indices [n*M, (n+1)*M).
struct ChannelRealization {
  std::vector<CVec> g_cran;  // K vectors of dimension N*M
  CMat g_d2d;                // K x K, (j, i) = Tx of pair j -> Rx of pair i
  double noise_power = 0.0;  // mW
};

/// Returns antenna block n of a network-wide vector.
inline CVec rrh_block(const CVec& v, int n, int n_antennas) {
  return v.segment(static_cast<Eigen::Index>(n) * n_antennas, n_antennas);
}

/// 128.1 + 37.6 log10(d); d in km, d > 0.
double pathloss_cran_db(double d_km);

/// 148 + 40 log10(d); d in km, d > 0.
double pathloss_d2d_db(double d_km);

/// Uniform RRH/Tx placement in the square; Rx uniform in the disc of radius
/// max_pair_dist around its Tx, clipped to the square.
NetworkTopology place_random(const SimConfig& cfg, Rng& rng);

/// Unit-variance complex Gaussian fading scaled by sqrt of the linear
/// pathloss attenuation; fresh i.i.d. draw per call.
ChannelRealization draw_channels(const NetworkTopology& topo, double noise_mw,
                                 Rng& rng);

}  // namespace dcran
