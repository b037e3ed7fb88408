/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcran {

namespace {

constexpr double kPowerTol = 1e-6;   // mW
constexpr double kMaxInnerSweeps = 200;

double d2d_interference(int i, const Vec& p_all, const ChannelRealization& ch) {
  const int n_pairs = static_cast<int>(ch.g_cran.size());
  double acc = 0.0;
  for (int j = 0; j < n_pairs; ++j) {
    if (j == i) continue;
    acc += p_all(j) * std::norm(ch.g_d2d(j, i));
  }
  return acc;
}

}  // namespace

LagrangeState make_lagrange_state(int n_d2d, const PowerLimits& limits) {
  LagrangeState state;
  state.omega = Vec::Zero(n_d2d);
  // Multiplier scale is ~Y'/(p*ln2); a raw-power step diverges, so the
  // schedule is normalized by the power cap.
  state.step_a = 0.1 / limits.p_max_mw;
  state.step_b = 10.0;
  return state;
}

double d2d_power_closed_form(int i, double yprime_i, double multiplier_sum,
                             const Vec& p_all, const ChannelRealization& ch,
                             double p_max_mw) {
  if (!(multiplier_sum > 0.0))
    throw std::invalid_argument("d2d_power_closed_form: multiplier sum must be > 0");
  const double direct = std::norm(ch.g_d2d(i, i));
  if (!(direct > 0.0))
    throw std::invalid_argument("d2d_power_closed_form: zero direct gain");
  const double interference = d2d_interference(i, p_all, ch) + ch.noise_power;
  const double raw = yprime_i / (multiplier_sum * M_LN2) - interference / direct;
  return std::clamp(raw, 0.0, p_max_mw);
}

void update_multipliers(LagrangeState& state, const std::vector<int>& d2d_set,
                        const Vec& p_all, const PowerLimits& limits) {
  const double step = state.step_a / (state.step_b + state.iter);
  double total = 0.0;
  for (int i : d2d_set) total += p_all(i);
  state.delta = std::max(0.0, state.delta - step * (limits.d2d_budget_mw - total));
  for (std::size_t c = 0; c < d2d_set.size(); ++c) {
    const double slack = limits.p_max_mw - p_all(d2d_set[c]);
    state.omega(static_cast<Eigen::Index>(c)) =
        std::max(0.0, state.omega(static_cast<Eigen::Index>(c)) - step * slack);
  }
  ++state.iter;
}

PowerSolveResult solve_d2d_power(const std::vector<int>& d2d_set,
                                 const Vec& yprime,
                                 const ChannelRealization& ch,
                                 const PowerLimits& limits, Vec p_all) {
  if (d2d_set.empty())
    throw std::invalid_argument("solve_d2d_power: empty D2D set");

  PowerSolveResult result;
  result.omega = Vec::Zero(static_cast<Eigen::Index>(d2d_set.size()));

  int sweeps = 0;
  bool stable = false;

  // Cyclic closed-form updates until the powers settle at fixed delta.
  // delta = 0 is the vanishing-multiplier limit: full power for any pair
  // with positive weight.
  auto stabilize = [&](double delta) {
    stable = false;
    for (int it = 0; it < kMaxInnerSweeps; ++it) {
      ++sweeps;
      double max_change = 0.0;
      for (int i : d2d_set) {
        double target;
        if (delta > 0.0) {
          target = d2d_power_closed_form(i, yprime(i), delta, p_all, ch,
                                         limits.p_max_mw);
        } else {
          target = yprime(i) > 0.0 ? limits.p_max_mw : 0.0;
        }
        max_change = std::max(max_change, std::abs(target - p_all(i)));
        p_all(i) = target;
      }
      if (max_change < kPowerTol) {
        stable = true;
        break;
      }
    }
  };
  auto total_power = [&]() {
    double acc = 0.0;
    for (int i : d2d_set) acc += p_all(i);
    return acc;
  };

  stabilize(0.0);
  double delta = 0.0;
  if (total_power() > limits.d2d_budget_mw + kPowerTol) {
    // Dichotomy on the monotone total-power curve.
    double lo = 0.0;
    double hi = 1e-6;
    stabilize(hi);
    while (total_power() > limits.d2d_budget_mw && hi < 1e12) {
      lo = hi;
      hi *= 4.0;
      stabilize(hi);
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      stabilize(mid);
      const double total = total_power();
      if (std::abs(total - limits.d2d_budget_mw) <= kPowerTol) {
        hi = mid;
        break;
      }
      if (total > limits.d2d_budget_mw)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    }
    stabilize(hi);  // end on the feasible side
    delta = hi;
  }

  // Recover the per-pair cap multipliers for the KKT report.
  for (std::size_t c = 0; c < d2d_set.size(); ++c) {
    const int i = d2d_set[c];
    if (p_all(i) >= limits.p_max_mw - 1e-9) {
      const double direct = std::norm(ch.g_d2d(i, i));
      const double interference = d2d_interference(i, p_all, ch) + ch.noise_power;
      const double grad = yprime(i) * direct /
                          (M_LN2 * (interference + p_all(i) * direct));
      result.omega(static_cast<Eigen::Index>(c)) = std::max(0.0, grad - delta);
    }
  }

  result.p = std::move(p_all);
  result.delta = delta;
  result.iters = sweeps;
  double total = 0.0;
  for (int i : d2d_set) total += result.p(i);
  result.converged = stable && total <= limits.d2d_budget_mw + kPowerTol;
  return result;
}

PowerSolveResult solve_cran_power(const std::vector<int>& cran_set,
                                  const CMat& w, const Vec& yprime,
                                  const ChannelRealization& ch,
                                  const PowerLimits& limits, Vec p_all) {
  PowerSolveResult result;
  result.omega = Vec::Zero(static_cast<Eigen::Index>(cran_set.size()));
  for (std::size_t c = 0; c < cran_set.size(); ++c) {
    const int k = cran_set[c];
    p_all(k) = yprime(k) > 0.0 ? limits.p_max_mw : 0.0;
  }
  // Cap multipliers at the active box edge, from the own-rate gradient.
  for (std::size_t c = 0; c < cran_set.size(); ++c) {
    const int k = cran_set[c];
    if (p_all(k) < limits.p_max_mw - 1e-9) continue;
    const CVec w_k = w.col(k);
    if (w_k.squaredNorm() <= 0.0) continue;
    const double direct = std::norm(w_k.dot(ch.g_cran[k]));
    double interference = ch.noise_power * w_k.squaredNorm();
    for (int l = 0; l < static_cast<int>(ch.g_cran.size()); ++l) {
      if (l == k) continue;
      interference += p_all(l) * std::norm(w_k.dot(ch.g_cran[l]));
    }
    result.omega(static_cast<Eigen::Index>(c)) =
        yprime(k) * direct / (M_LN2 * (interference + p_all(k) * direct));
  }
  result.p = std::move(p_all);
  result.converged = true;
  result.iters = 1;
  return result;
}

}  // namespace dcran
