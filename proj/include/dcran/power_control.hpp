/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <vector>

#include "dcran/common.hpp"
#include "dcran/net_model.hpp"
#include "dcran/sim_config.hpp"

namespace dcran {

/// Multipliers of the D2D power problem: delta for the shared budget,
/// omega[i] for the per-pair cap (indexed by position in the D2D set).
struct LagrangeState {
  double delta = 0.0;
  Vec omega;
  double step_a = 0.0;
  double step_b = 10.0;
  int iter = 0;
};

LagrangeState make_lagrange_state(int n_d2d, const PowerLimits& limits);

/// Water-filling power of pair i at fixed multipliers and fixed other
/// powers: max(0, Y'/((omega+delta)*ln2) - (I + sigma^2)/|g_ii|^2), clamped
/// to p_max. Throws on non-positive multiplier sum or zero direct gain.
double d2d_power_closed_form(int i, double yprime_i, double multiplier_sum,
                             const Vec& p_all, const ChannelRealization& ch,
                             double p_max_mw);

/// Projected subgradient step with diminishing step a/(b+iter).
void update_multipliers(LagrangeState& state, const std::vector<int>& d2d_set,
                        const Vec& p_all, const PowerLimits& limits);

struct PowerSolveResult {
  Vec p;           // full K-vector with the solved entries updated
  bool converged = false;
  double delta = 0.0;
  Vec omega;       // recovered cap multipliers, per set entry
  int iters = 0;   // coordinate sweeps performed
};

/// Coordinate closed-form updates inside a dichotomy on the budget
/// multiplier delta (total power is monotone decreasing in delta); the
/// per-pair cap is realized by the box clamp and omega recovered at the end.
PowerSolveResult solve_d2d_power(const std::vector<int>& d2d_set,
                                 const Vec& yprime,
                                 const ChannelRealization& ch,
                                 const PowerLimits& limits, Vec p_all);

/// C-RAN-mode powers under the per-pair box only. The own-rate term is
/// strictly increasing in own power, so each coordinate update lands on the
/// box edge: P_max for positive weight, 0 for zero weight.
PowerSolveResult solve_cran_power(const std::vector<int>& cran_set,
                                  const CMat& w, const Vec& yprime,
                                  const ChannelRealization& ch,
                                  const PowerLimits& limits, Vec p_all);

}  // namespace dcran
