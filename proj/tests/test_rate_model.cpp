/* SPDX-License-Identifier: Apache-2.0 */
#include <doctest.h>

#include <cmath>

#include "dcran/rate_model.hpp"
#include "test_support.hpp"

using namespace dcran;
using dcran::test::make_channels;

namespace {

ResourceAllocation single_pair_alloc(const CVec& w, double p) {
  ResourceAllocation alloc;
  alloc.mode = {0};
  alloc.w = {w};
  alloc.p = Vec::Constant(1, p);
  return alloc;
}

}  // namespace

TEST_SUITE("rate_model") {

TEST_CASE("single pair sinr without interference") {
  const ChannelRealization ch =
      make_channels({(CVec(1) << Cplx(2.0, 0.0)).finished()},
                    CMat::Ones(1, 1), 1.0);
  const ResourceAllocation alloc =
      single_pair_alloc((CVec(1) << Cplx(1.0, 0.0)).finished(), 1.0);
  CHECK(sinr_cran(0, alloc, ch) == doctest::Approx(4.0));
  CHECK(rate_cran(0, alloc, ch) == doctest::Approx(std::log2(5.0)));
}

TEST_CASE("orthogonal beamformer nulls the signal") {
  const ChannelRealization ch =
      make_channels({(CVec(2) << Cplx(0.0, 0.0), Cplx(1.0, 0.0)).finished()},
                    CMat::Ones(1, 1), 1.0);
  const ResourceAllocation alloc = single_pair_alloc(
      (CVec(2) << Cplx(1.0, 0.0), Cplx(0.0, 0.0)).finished(), 1.0);
  CHECK(sinr_cran(0, alloc, ch) == 0.0);
}

TEST_CASE("beamformer errors") {
  const ChannelRealization ch = make_channels(
      {(CVec(1) << Cplx(1.0, 0.0)).finished()}, CMat::Ones(1, 1), 1.0);
  ResourceAllocation alloc = single_pair_alloc(CVec(), 1.0);
  CHECK_THROWS_AS(sinr_cran(0, alloc, ch), std::invalid_argument);
  alloc.w[0] = CVec::Zero(1);
  CHECK_THROWS_AS(sinr_cran(0, alloc, ch), std::invalid_argument);
  alloc.mode[0] = 1;
  CHECK_THROWS_AS(sinr_cran(0, alloc, ch), std::invalid_argument);
}

TEST_CASE("sinr matches the scalar oracle on random instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = test::random_instance(seed, 3, 2, 2);
    Rng rng(seed, 9);
    Vec p(3);
    CVec w(4);
    for (int k = 0; k < 3; ++k) p(k) = rng.uniform(0.0, 200.0);
    for (int i = 0; i < 4; ++i) w(i) = inst.ch.g_cran[0](i) + 0.1 * rng.cgauss();
    const double got = sinr_cran(w, 0, p, inst.ch);
    const double expect = test::sinr_cran_oracle(w, 0, p, inst.ch);
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("d2d rate basics") {
  ChannelRealization ch = make_channels(
      {(CVec(1) << Cplx(1.0, 0.0)).finished()}, CMat::Ones(1, 1), 1.0);
  Vec p = Vec::Zero(1);
  CHECK(rate_d2d(0, p, ch) == 0.0);
  ch.g_d2d(0, 0) = std::sqrt(3.0);
  p(0) = 1.0;
  CHECK(rate_d2d(0, p, ch) == doctest::Approx(2.0));
}

TEST_CASE("d2d rate matches oracle on random instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = test::random_instance(seed, 3, 2, 2);
    Rng rng(seed, 10);
    Vec p(3);
    for (int k = 0; k < 3; ++k) p(k) = rng.uniform(0.0, 200.0);
    for (int i = 0; i < 3; ++i)
      CHECK(rate_d2d(i, p, inst.ch) ==
            doctest::Approx(test::rate_d2d_oracle(i, p, inst.ch))
                .epsilon(1e-12));
  }
}

TEST_CASE("rate_general dispatches by mode and sums match oracles") {
  const auto inst = test::random_instance(17, 6, 3, 2);
  Rng rng(17, 11);
  ResourceAllocation alloc;
  alloc.p = Vec::Constant(6, 100.0);
  alloc.mode = {0, 1, 0, 1, 1, 0};
  alloc.w.resize(6);
  for (int k = 0; k < 6; ++k)
    if (alloc.mode[k] == 0) alloc.w[k] = inst.ch.g_cran[k];
  double sum = 0.0, oracle_sum = 0.0;
  for (int k = 0; k < 6; ++k) {
    sum += rate_general(k, alloc, inst.ch);
    if (alloc.mode[k] == 0) {
      oracle_sum += std::log2(
          1.0 + test::sinr_cran_oracle(alloc.w[k], k, alloc.p, inst.ch));
    } else {
      oracle_sum += test::rate_d2d_oracle(k, alloc.p, inst.ch);
    }
  }
  CHECK(sum == doctest::Approx(oracle_sum).epsilon(1e-12));
}

TEST_CASE("sinr is invariant to beamformer scaling") {
  const auto inst = test::random_instance(23, 4, 3, 2);
  Rng rng(23, 12);
  const Vec p = Vec::Constant(4, 150.0);
  CVec w = inst.ch.g_cran[1];
  const double base = sinr_cran(w, 1, p, inst.ch);
  for (double c : {1e-6, 0.3, 7.0, 1e6}) {
    const double scaled = sinr_cran((c * w).eval(), 1, p, inst.ch);
    CHECK(scaled == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("rates are monotone in own power") {
  const auto inst = test::random_instance(29, 4, 3, 2);
  Vec p = Vec::Constant(4, 100.0);
  const CVec w = inst.ch.g_cran[2];
  const double base_c = rate_cran(w, 2, p, inst.ch);
  const double base_d = rate_d2d(2, p, inst.ch);
  Vec up = p;
  up(2) *= 1.01;
  CHECK(rate_cran(w, 2, up, inst.ch) >= base_c);
  CHECK(rate_d2d(2, up, inst.ch) >= base_d);
  Vec down = p;
  down(2) *= 0.99;
  CHECK(rate_cran(w, 2, down, inst.ch) <= base_c);
  CHECK(rate_d2d(2, down, inst.ch) <= base_d);
}

TEST_CASE("fronthaul load indicator") {
  const auto inst = test::random_instance(31, 2, 3, 2);
  ResourceAllocation alloc;
  alloc.p = Vec::Constant(2, 100.0);

  // All D2D: nothing on the fronthaul.
  alloc.mode = {1, 1};
  alloc.w.resize(2);
  Vec rates = Vec::Constant(2, 3.0);
  CHECK(fronthaul_load(alloc, rates, 3, 2).maxCoeff() == 0.0);

  // One C-RAN pair served by all RRHs loads each of them with its rate.
  alloc.mode[0] = 0;
  alloc.w[0] = CVec::Ones(6);
  const Vec load = fronthaul_load(alloc, rates, 3, 2);
  for (int n = 0; n < 3; ++n) CHECK(load(n) == doctest::Approx(3.0));

  // An exactly-zero block contributes nothing on that RRH.
  alloc.w[0].segment(2, 2).setZero();
  const Vec load2 = fronthaul_load(alloc, rates, 3, 2);
  CHECK(load2(0) == doctest::Approx(3.0));
  CHECK(load2(1) == 0.0);
  CHECK(load2(2) == doctest::Approx(3.0));
}

TEST_CASE("active-block threshold is relative") {
  CVec w = CVec::Zero(4);
  w(0) = 1.0;
  w(2) = std::sqrt(0.5e-8);  // below 1e-8 of the total squared norm
  CHECK(block_active(w, 0, 2));
  CHECK_FALSE(block_active(w, 1, 2));
  w(2) = std::sqrt(3e-8);  // above threshold
  CHECK(block_active(w, 1, 2));
}

TEST_CASE("constraint report") {
  const auto inst = test::random_instance(37, 4, 3, 2);
  const PowerLimits limits{200.0, 500.0, 10.0, inst.cfg.noise_mw()};

  ResourceAllocation alloc;
  alloc.mode = {1, 1, 1, 1};
  alloc.w.resize(4);
  alloc.p = Vec::Zero(4);
  const ConstraintReport ok =
      check_constraints(alloc, inst.ch, limits, 3, 2);
  CHECK(ok.all_ok());
  CHECK(ok.c2_slack == doctest::Approx(500.0));

  alloc.p = Vec::Constant(4, 200.0);  // 800 total > 500 budget
  const ConstraintReport bad =
      check_constraints(alloc, inst.ch, limits, 3, 2);
  CHECK_FALSE(bad.c2_ok);
  CHECK(bad.c2_slack == doctest::Approx(500.0 - 800.0));
  CHECK(bad.c4_ok);

  alloc.p(0) = 250.0;  // above the per-pair cap
  CHECK_FALSE(check_constraints(alloc, inst.ch, limits, 3, 2).c4_ok);
}

}  // TEST_SUITE
