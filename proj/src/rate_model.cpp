/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/rate_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcran {

namespace {

double log2p1(double sinr) { return std::log2(1.0 + sinr); }

}  // namespace

double sinr_cran(const CVec& w_k, int k, const Vec& p,
                 const ChannelRealization& ch) {
  if (w_k.size() == 0) throw std::invalid_argument("sinr_cran: missing beamformer");
  const double w_norm2 = w_k.squaredNorm();
  if (w_norm2 <= 0.0) throw std::invalid_argument("sinr_cran: zero beamformer");

  const int n_pairs = static_cast<int>(ch.g_cran.size());
  double interference = 0.0;
  for (int l = 0; l < n_pairs; ++l) {
    if (l == k) continue;
    interference += p(l) * std::norm(w_k.dot(ch.g_cran[l]));
  }
  const double signal = p(k) * std::norm(w_k.dot(ch.g_cran[k]));
  return signal / (interference + ch.noise_power * w_norm2);
}

double sinr_cran(int k, const ResourceAllocation& alloc,
                 const ChannelRealization& ch) {
  if (alloc.mode[k] != 0)
    throw std::invalid_argument("sinr_cran: pair is not in C-RAN mode");
  return sinr_cran(alloc.w[k], k, alloc.p, ch);
}

double rate_cran(const CVec& w_k, int k, const Vec& p,
                 const ChannelRealization& ch) {
  return log2p1(sinr_cran(w_k, k, p, ch));
}

double rate_cran(int k, const ResourceAllocation& alloc,
                 const ChannelRealization& ch) {
  return log2p1(sinr_cran(k, alloc, ch));
}

double rate_d2d(int i, const Vec& p, const ChannelRealization& ch) {
  const int n_pairs = static_cast<int>(ch.g_cran.size());
  double interference = 0.0;
  for (int j = 0; j < n_pairs; ++j) {
    if (j == i) continue;
    interference += p(j) * std::norm(ch.g_d2d(j, i));
  }
  const double signal = p(i) * std::norm(ch.g_d2d(i, i));
  return log2p1(signal / (interference + ch.noise_power));
}

double rate_d2d(int i, const ResourceAllocation& alloc,
                const ChannelRealization& ch) {
  if (alloc.mode[i] != 1)
    throw std::invalid_argument("rate_d2d: pair is not in D2D mode");
  return rate_d2d(i, alloc.p, ch);
}

double rate_general(int k, const ResourceAllocation& alloc,
                    const ChannelRealization& ch) {
  return alloc.mode[k] == 0 ? rate_cran(k, alloc, ch) : rate_d2d(k, alloc, ch);
}

Vec all_rates(const ResourceAllocation& alloc, const ChannelRealization& ch) {
  const int n_pairs = static_cast<int>(alloc.mode.size());
  Vec rates(n_pairs);
  for (int k = 0; k < n_pairs; ++k) {
    if (alloc.mode[k] == 0 &&
        (alloc.w[k].size() == 0 || alloc.w[k].squaredNorm() <= 0.0)) {
      rates(k) = 0.0;  // unserved this slot
    } else {
      rates(k) = rate_general(k, alloc, ch);
    }
  }
  return rates;
}

bool block_active(const CVec& w, int n, int n_antennas) {
  if (w.size() == 0) return false;
  const double total = w.squaredNorm();
  if (total <= 0.0) return false;
  return rrh_block(w, n, n_antennas).squaredNorm() > kActiveBlockTol * total;
}

Vec fronthaul_load(const ResourceAllocation& alloc, const Vec& rates,
                   int n_rrh, int n_antennas) {
  Vec load = Vec::Zero(n_rrh);
  const int n_pairs = static_cast<int>(alloc.mode.size());
  for (int k = 0; k < n_pairs; ++k) {
    if (alloc.mode[k] != 0) continue;
    for (int n = 0; n < n_rrh; ++n)
      if (block_active(alloc.w[k], n, n_antennas)) load(n) += rates(k);
  }
  return load;
}

ConstraintReport check_constraints(const ResourceAllocation& alloc,
                                   const ChannelRealization& ch,
                                   const PowerLimits& limits, int n_rrh,
                                   int n_antennas) {
  constexpr double kTol = 1e-9;
  const int n_pairs = static_cast<int>(alloc.mode.size());
  ConstraintReport report;

  double d2d_power = 0.0;
  for (int k = 0; k < n_pairs; ++k) {
    if (alloc.mode[k] != 0 && alloc.mode[k] != 1) report.c3_ok = false;
    if (alloc.mode[k] == 1) d2d_power += alloc.p(k);
  }
  report.c2_slack = limits.d2d_budget_mw - d2d_power;
  report.c2_ok = report.c2_slack >= -kTol * std::max(1.0, limits.d2d_budget_mw);

  report.c4_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_pairs; ++k) {
    const double slack = std::min(alloc.p(k), limits.p_max_mw - alloc.p(k));
    report.c4_slack = std::min(report.c4_slack, slack);
  }
  report.c4_ok = report.c4_slack >= -kTol * std::max(1.0, limits.p_max_mw);

  const Vec rates = all_rates(alloc, ch);
  const Vec load = fronthaul_load(alloc, rates, n_rrh, n_antennas);
  report.c5_slack = Vec::Constant(n_rrh, limits.fronthaul_cap) - load;
  report.c5_ok =
      (report.c5_slack.array() >= -kTol * std::max(1.0, limits.fronthaul_cap))
          .all();
  return report;
}

}  // namespace dcran
