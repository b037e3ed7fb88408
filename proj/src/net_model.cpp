/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcran {

namespace {

// Pathloss models are not meaningful below ~1 m; link distances are floored
// here so co-located pairs (max_pair_dist = 0) stay well defined.
constexpr double kMinLinkDistKm = 1e-3;

double clamp01(double v, double hi) { return std::min(std::max(v, 0.0), hi); }

}  // namespace

double pathloss_cran_db(double d_km) {
  if (!(d_km > 0.0)) throw std::invalid_argument("pathloss: distance must be > 0");
  return 128.1 + 37.6 * std::log10(d_km);
}

double pathloss_d2d_db(double d_km) {
  if (!(d_km > 0.0)) throw std::invalid_argument("pathloss: distance must be > 0");
  return 148.0 + 40.0 * std::log10(d_km);
}

NetworkTopology place_random(const SimConfig& cfg, Rng& rng) {
  if (cfg.n_rrh < 1 || cfg.n_pairs < 1 || cfg.n_antennas < 1)
    throw std::invalid_argument("place_random: counts must be >= 1");
  if (cfg.area_side <= 0.0)
    throw std::invalid_argument("place_random: area_side must be > 0");
  if (cfg.max_pair_dist < 0.0)
    throw std::invalid_argument("place_random: max_pair_dist must be >= 0");

  NetworkTopology topo;
  topo.n_rrh = cfg.n_rrh;
  topo.n_pairs = cfg.n_pairs;
  topo.n_antennas = cfg.n_antennas;
  topo.area_side = cfg.area_side;
  topo.max_pair_dist = cfg.max_pair_dist;

  const double side = cfg.area_side;
  topo.rrh_pos.reserve(cfg.n_rrh);
  for (int n = 0; n < cfg.n_rrh; ++n)
    topo.rrh_pos.emplace_back(rng.uniform(0.0, side), rng.uniform(0.0, side));

  topo.tx_pos.reserve(cfg.n_pairs);
  for (int k = 0; k < cfg.n_pairs; ++k)
    topo.tx_pos.emplace_back(rng.uniform(0.0, side), rng.uniform(0.0, side));

  // Polar sampling keeps the draw count independent of the radius, so
  // topologies with different max_pair_dist share RRH/Tx positions per seed.
  topo.rx_pos.reserve(cfg.n_pairs);
  for (int k = 0; k < cfg.n_pairs; ++k) {
    const double r = cfg.max_pair_dist * std::sqrt(rng.uniform01());
    const double th = 2.0 * M_PI * rng.uniform01();
    Eigen::Vector2d rx = topo.tx_pos[k] +
                         Eigen::Vector2d(r * std::cos(th), r * std::sin(th));
    rx.x() = clamp01(rx.x(), side);
    rx.y() = clamp01(rx.y(), side);
    topo.rx_pos.push_back(rx);
  }
  return topo;
}

ChannelRealization draw_channels(const NetworkTopology& topo, double noise_mw,
                                 Rng& rng) {
  if (topo.n_rrh < 1 || topo.n_pairs < 1 || topo.n_antennas < 1)
    throw std::invalid_argument("draw_channels: invalid topology");
  if (!(noise_mw > 0.0))
    throw std::invalid_argument("draw_channels: noise power must be > 0");

  const int n_rrh = topo.n_rrh;
  const int n_pairs = topo.n_pairs;
  const int m = topo.n_antennas;

  ChannelRealization ch;
  ch.noise_power = noise_mw;
  ch.g_cran.resize(n_pairs);
  for (int k = 0; k < n_pairs; ++k) {
    CVec g(n_rrh * m);
    for (int n = 0; n < n_rrh; ++n) {
      const double d =
          std::max((topo.tx_pos[k] - topo.rrh_pos[n]).norm(), kMinLinkDistKm);
      const double amp = std::sqrt(db_to_linear(-pathloss_cran_db(d)));
      for (int a = 0; a < m; ++a) g(n * m + a) = amp * rng.cgauss();
    }
    ch.g_cran[k] = std::move(g);
  }

  ch.g_d2d.resize(n_pairs, n_pairs);
  for (int j = 0; j < n_pairs; ++j) {
    for (int i = 0; i < n_pairs; ++i) {
      const double d =
          std::max((topo.tx_pos[j] - topo.rx_pos[i]).norm(), kMinLinkDistKm);
      const double amp = std::sqrt(db_to_linear(-pathloss_d2d_db(d)));
      ch.g_d2d(j, i) = amp * rng.cgauss();
    }
  }
  return ch;
}

}  // namespace dcran
