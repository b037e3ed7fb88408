/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "dcran/common.hpp"
#include "dcran/net_model.hpp"
#include "dcran/sim_config.hpp"

namespace dcran::test {

/// Hand-rolled channel container builder for small synthetic instances.
inline ChannelRealization make_channels(const std::vector<CVec>& g_cran,
                                        const CMat& g_d2d, double noise) {
  ChannelRealization ch;
  ch.g_cran = g_cran;
  ch.g_d2d = g_d2d;
  ch.noise_power = noise;
  return ch;
}

/// Scalar recomputation of the uplink SINR with plain loops, independent of
/// the production linear-algebra path.
inline double sinr_cran_oracle(const CVec& w, int k, const Vec& p,
                               const ChannelRealization& ch) {
  const int n_pairs = static_cast<int>(ch.g_cran.size());
  const int dim = static_cast<int>(w.size());
  double w_norm2 = 0.0;
  for (int i = 0; i < dim; ++i) w_norm2 += std::norm(w(i));
  double interference = 0.0;
  double signal = 0.0;
  for (int l = 0; l < n_pairs; ++l) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < dim; ++i)
      acc += std::conj(w(i)) * ch.g_cran[l](i);
    const double gain = std::norm(acc);
    if (l == k)
      signal = p(l) * gain;
    else
      interference += p(l) * gain;
  }
  return signal / (interference + ch.noise_power * w_norm2);
}

inline double rate_d2d_oracle(int i, const Vec& p,
                              const ChannelRealization& ch) {
  const int n_pairs = static_cast<int>(ch.g_cran.size());
  double interference = 0.0;
  for (int j = 0; j < n_pairs; ++j)
    if (j != i) interference += p(j) * std::norm(ch.g_d2d(j, i));
  const double sinr =
      p(i) * std::norm(ch.g_d2d(i, i)) / (interference + ch.noise_power);
  return std::log2(1.0 + sinr);
}

/// Random physical instance: geometry from the production placement, one
/// channel draw.
struct RandomInstance {
  SimConfig cfg;
  NetworkTopology topo;
  ChannelRealization ch;
};

inline RandomInstance random_instance(std::uint64_t seed, int n_pairs = 6,
                                      int n_rrh = 3, int n_antennas = 2,
                                      double max_pair_dist = 0.12) {
  RandomInstance inst;
  inst.cfg.n_pairs = n_pairs;
  inst.cfg.n_rrh = n_rrh;
  inst.cfg.n_antennas = n_antennas;
  inst.cfg.max_pair_dist = max_pair_dist;
  inst.cfg.seed = seed;
  Rng topo_rng(seed, 0);
  Rng chan_rng(seed, 1);
  inst.topo = place_random(inst.cfg, topo_rng);
  inst.ch = draw_channels(inst.topo, inst.cfg.noise_mw(), chan_rng);
  return inst;
}

/// Geometrically separated pairs: short direct links, far cross links. The
/// own-rate water-filling update is exact in this regime, which is where
/// grid-oracle comparisons are meaningful.
inline RandomInstance separated_instance(std::uint64_t seed, int n_pairs,
                                         int n_rrh = 2, int n_antennas = 2) {
  RandomInstance inst;
  inst.cfg.n_pairs = n_pairs;
  inst.cfg.n_rrh = n_rrh;
  inst.cfg.n_antennas = n_antennas;
  inst.cfg.seed = seed;
  inst.topo.n_rrh = n_rrh;
  inst.topo.n_pairs = n_pairs;
  inst.topo.n_antennas = n_antennas;
  inst.topo.area_side = 1.0;
  inst.topo.max_pair_dist = 0.02;
  Rng rng(seed, 40);
  for (int n = 0; n < n_rrh; ++n)
    inst.topo.rrh_pos.emplace_back(rng.uniform(0.3, 0.7),
                                   rng.uniform(0.3, 0.7));
  // Tx anchors on a coarse grid, at least ~0.3 km apart.
  const double anchors[6][2] = {{0.1, 0.1}, {0.9, 0.1}, {0.5, 0.9},
                                {0.1, 0.9}, {0.9, 0.9}, {0.5, 0.1}};
  for (int k = 0; k < n_pairs; ++k) {
    Eigen::Vector2d tx(anchors[k % 6][0] + rng.uniform(-0.03, 0.03),
                       anchors[k % 6][1] + rng.uniform(-0.03, 0.03));
    inst.topo.tx_pos.push_back(tx);
    const double r = 0.02 * std::sqrt(rng.uniform01());
    const double th = 2.0 * M_PI * rng.uniform01();
    inst.topo.rx_pos.emplace_back(tx.x() + r * std::cos(th),
                                  tx.y() + r * std::sin(th));
  }
  Rng chan_rng(seed, 41);
  inst.ch = draw_channels(inst.topo, inst.cfg.noise_mw(), chan_rng);
  return inst;
}

}  // namespace dcran::test
