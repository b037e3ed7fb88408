/* SPDX-License-Identifier: Apache-2.0 */
#include <doctest.h>

#include <cmath>

#include "dcran/net_model.hpp"
#include "test_support.hpp"

using namespace dcran;

TEST_SUITE("net_model") {

TEST_CASE("pathloss formulas") {
  CHECK(pathloss_cran_db(1.0) == doctest::Approx(128.1));
  CHECK(pathloss_cran_db(0.1) == doctest::Approx(90.5));
  CHECK(pathloss_cran_db(0.01) == doctest::Approx(52.9));
  CHECK(pathloss_d2d_db(1.0) == doctest::Approx(148.0));
  CHECK(pathloss_d2d_db(0.1) == doctest::Approx(108.0));
  CHECK(pathloss_d2d_db(0.05) == doctest::Approx(95.9588).epsilon(1e-5));
  CHECK_THROWS_AS(pathloss_cran_db(0.0), std::invalid_argument);
  CHECK_THROWS_AS(pathloss_cran_db(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(pathloss_d2d_db(0.0), std::invalid_argument);
}

TEST_CASE("place_random respects geometry invariants") {
  SimConfig cfg;
  cfg.n_rrh = 3;
  cfg.n_pairs = 6;
  cfg.n_antennas = 2;
  cfg.area_side = 0.5;
  cfg.max_pair_dist = 0.1;
  Rng rng(7);
  const NetworkTopology topo = place_random(cfg, rng);
  CHECK(topo.rrh_pos.size() == 3);
  CHECK(topo.tx_pos.size() == 6);
  CHECK(topo.rx_pos.size() == 6);
  for (const auto& pos : topo.rrh_pos) {
    CHECK(pos.x() >= 0.0);
    CHECK(pos.x() <= 0.5);
    CHECK(pos.y() >= 0.0);
    CHECK(pos.y() <= 0.5);
  }
  for (int k = 0; k < 6; ++k) {
    CHECK((topo.tx_pos[k] - topo.rx_pos[k]).norm() <= 0.1 + 1e-12);
    CHECK(topo.rx_pos[k].x() >= 0.0);
    CHECK(topo.rx_pos[k].x() <= 0.5);
  }
}

TEST_CASE("place_random zero radius co-locates the pair") {
  SimConfig cfg;
  cfg.n_pairs = 1;
  cfg.max_pair_dist = 0.0;
  Rng rng(3);
  const NetworkTopology topo = place_random(cfg, rng);
  CHECK((topo.tx_pos[0] - topo.rx_pos[0]).norm() == 0.0);
}

TEST_CASE("place_random is deterministic per seed") {
  SimConfig cfg;
  Rng a(42), b(42), c(43);
  const NetworkTopology ta = place_random(cfg, a);
  const NetworkTopology tb = place_random(cfg, b);
  const NetworkTopology tc = place_random(cfg, c);
  for (int k = 0; k < cfg.n_pairs; ++k) {
    CHECK(ta.tx_pos[k] == tb.tx_pos[k]);
    CHECK(ta.rx_pos[k] == tb.rx_pos[k]);
  }
  CHECK(ta.tx_pos[0] != tc.tx_pos[0]);
}

TEST_CASE("place_random rejects bad dimensions") {
  SimConfig cfg;
  Rng rng(1);
  cfg.n_pairs = 0;
  CHECK_THROWS_AS(place_random(cfg, rng), std::invalid_argument);
  cfg.n_pairs = 1;
  cfg.max_pair_dist = -0.1;
  CHECK_THROWS_AS(place_random(cfg, rng), std::invalid_argument);
}

TEST_CASE("channel second moments match the pathloss target") {
  // One pair at a known distance from a single-antenna RRH.
  NetworkTopology topo;
  topo.n_rrh = 1;
  topo.n_pairs = 1;
  topo.n_antennas = 1;
  topo.area_side = 1.0;
  topo.max_pair_dist = 0.4;
  topo.rrh_pos = {{0.0, 0.0}};
  topo.tx_pos = {{0.3, 0.0}};
  topo.rx_pos = {{0.3, 0.25}};

  const int n_draws = 100000;
  Rng rng(11);
  double acc_cran = 0.0;
  double acc_d2d = 0.0;
  Cplx mean_fading = 0.0;
  const double amp_cran = std::sqrt(db_to_linear(-pathloss_cran_db(0.3)));
  for (int i = 0; i < n_draws; ++i) {
    const ChannelRealization ch = draw_channels(topo, 1e-10, rng);
    acc_cran += std::norm(ch.g_cran[0](0));
    acc_d2d += std::norm(ch.g_d2d(0, 0));
    mean_fading += ch.g_cran[0](0) / amp_cran;
  }
  const double var_cran = acc_cran / n_draws;
  const double var_d2d = acc_d2d / n_draws;
  CHECK(var_cran ==
        doctest::Approx(db_to_linear(-pathloss_cran_db(0.3))).epsilon(0.02));
  CHECK(var_d2d ==
        doctest::Approx(db_to_linear(-pathloss_d2d_db(0.25))).epsilon(0.02));

  // Zero-mean fading within 3 sigma per component.
  mean_fading /= static_cast<double>(n_draws);
  const double bound = 3.0 * std::sqrt(0.5 / n_draws);
  CHECK(std::abs(mean_fading.real()) < bound);
  CHECK(std::abs(mean_fading.imag()) < bound);
}

TEST_CASE("channel draws are bit-identical per seed") {
  SimConfig cfg;
  Rng trng(5);
  const NetworkTopology topo = place_random(cfg, trng);
  Rng a(9, 1), b(9, 1);
  for (int t = 0; t < 3; ++t) {
    const ChannelRealization ca = draw_channels(topo, cfg.noise_mw(), a);
    const ChannelRealization cb = draw_channels(topo, cfg.noise_mw(), b);
    for (int k = 0; k < cfg.n_pairs; ++k)
      CHECK(ca.g_cran[k] == cb.g_cran[k]);
    CHECK(ca.g_d2d == cb.g_d2d);
  }
}

TEST_CASE("antenna block extraction follows the stacked layout") {
  CVec v(6);
  for (int i = 0; i < 6; ++i) v(i) = Cplx(i, -i);
  for (int n = 0; n < 3; ++n) {
    const CVec blk = rrh_block(v, n, 2);
    REQUIRE(blk.size() == 2);
    CHECK(blk(0) == v(2 * n));
    CHECK(blk(1) == v(2 * n + 1));
  }
}

TEST_CASE("draw_channels validates inputs") {
  NetworkTopology topo;  // empty
  Rng rng(1);
  CHECK_THROWS_AS(draw_channels(topo, 1e-10, rng), std::invalid_argument);
  SimConfig cfg;
  Rng trng(2);
  const NetworkTopology good = place_random(cfg, trng);
  CHECK_THROWS_AS(draw_channels(good, 0.0, rng), std::invalid_argument);
}

}  // TEST_SUITE
