/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <vector>

#include "dcran/common.hpp"

namespace dcran {

/// LP relaxation of the per-slot mode-selection problem. fixed[k] is -1
/// (free), 0 or 1. Objective (minimized): sum_k y[k]*((1-x[k])*rc[k] +
/// x[k]*rd[k]) subject to sum_k x[k]*p[k] <= budget, x in [0,1]^K.
struct RelaxedModeSolution {
  Vec x;
  double objective = 0.0;
  bool feasible = false;
};

/// Linear objective + one knapsack constraint: greedy fractional fill in
/// order of per-unit objective decrease; at most one fractional entry.
/// Infeasible when the fixed D2D powers alone exceed the budget.
RelaxedModeSolution solve_relaxed(const std::vector<int>& fixed, const Vec& y,
                                  const Vec& rate_cran, const Vec& rate_d2d,
                                  const Vec& p, double d2d_budget_mw);

/// Among fractional entries, the pair with the largest max(rc, rd); ties go
/// to the lowest index. Throws if no entry is fractional.
int pick_branch_variable(const Vec& relaxed_x, const Vec& rate_cran,
                         const Vec& rate_d2d);

struct ModeSelectResult {
  std::vector<int> mode;
  double objective = 0.0;
  int nodes_explored = 0;
};

/// Branch and bound restricted to 2 survival paths: branching replaces the
/// live list with the two children of the best-bound node, so at most
/// 2K + 1 relaxations are ever solved.
ModeSelectResult modified_bnb(const Vec& y, const Vec& rate_cran,
                              const Vec& rate_d2d, const Vec& p,
                              double d2d_budget_mw);

/// Enumerates all 2^K assignments (K <= 20), skipping budget-infeasible
/// ones; ties keep the assignment first reached with pair 0 as the
/// least-significant bit.
ModeSelectResult exhaustive_oracle(const Vec& y, const Vec& rate_cran,
                                   const Vec& rate_d2d, const Vec& p,
                                   double d2d_budget_mw);

/// Objective value of a binary assignment.
double mode_objective(const std::vector<int>& mode, const Vec& y,
                      const Vec& rate_cran, const Vec& rate_d2d);

}  // namespace dcran
