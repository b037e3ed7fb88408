/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/mode_selection.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcran {

namespace {

constexpr double kFracTol = 1e-9;
constexpr double kTinyPower = 1e-12;

bool is_fractional(double x) { return x > kFracTol && x < 1.0 - kFracTol; }

bool is_integral(const Vec& x) {
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (is_fractional(x(k))) return false;
  return true;
}

}  // namespace

RelaxedModeSolution solve_relaxed(const std::vector<int>& fixed, const Vec& y,
                                  const Vec& rate_cran, const Vec& rate_d2d,
                                  const Vec& p, double d2d_budget_mw) {
  const int n_pairs = static_cast<int>(y.size());
  RelaxedModeSolution sol;
  sol.x = Vec::Zero(n_pairs);

  double budget = d2d_budget_mw;
  double objective = y.dot(rate_cran);

  // Objective change of moving pair k fully into D2D mode.
  const Vec delta = y.cwiseProduct(rate_d2d - rate_cran);

  std::vector<int> free_pairs;
  free_pairs.reserve(n_pairs);
  for (int k = 0; k < n_pairs; ++k) {
    switch (fixed[k]) {
      case 1:
        sol.x(k) = 1.0;
        objective += delta(k);
        budget -= p(k);
        break;
      case 0:
        break;
      default:
        free_pairs.push_back(k);
    }
  }
  if (budget < -kTinyPower) {
    sol.objective = std::numeric_limits<double>::infinity();
    sol.feasible = false;
    return sol;
  }

  // Pairs that improve the objective at no power cost always enter.
  std::vector<int> candidates;
  for (int k : free_pairs) {
    if (delta(k) >= 0.0) continue;
    if (p(k) <= kTinyPower) {
      sol.x(k) = 1.0;
      objective += delta(k);
    } else {
      candidates.push_back(k);
    }
  }

  // Greedy fractional knapsack on per-unit objective decrease.
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    const double ra = delta(a) / p(a);
    const double rb = delta(b) / p(b);
    if (ra != rb) return ra < rb;
    return a < b;
  });
  for (int k : candidates) {
    if (budget <= kTinyPower) break;
    const double take = std::min(1.0, budget / p(k));
    sol.x(k) = take;
    objective += take * delta(k);
    budget -= take * p(k);
    if (take < 1.0) break;
  }

  sol.objective = objective;
  sol.feasible = true;
  return sol;
}

int pick_branch_variable(const Vec& relaxed_x, const Vec& rate_cran,
                         const Vec& rate_d2d) {
  int best = -1;
  double best_val = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < relaxed_x.size(); ++k) {
    if (!is_fractional(relaxed_x(k))) continue;
    const double val = std::max(rate_cran(k), rate_d2d(k));
    if (val > best_val) {
      best_val = val;
      best = static_cast<int>(k);
    }
  }
  if (best < 0)
    throw std::invalid_argument("pick_branch_variable: no fractional entry");
  return best;
}

ModeSelectResult modified_bnb(const Vec& y, const Vec& rate_cran,
                              const Vec& rate_d2d, const Vec& p,
                              double d2d_budget_mw) {
  const int n_pairs = static_cast<int>(y.size());

  struct Node {
    std::vector<int> fixed;
    RelaxedModeSolution relax;
  };

  ModeSelectResult result;
  result.mode.assign(n_pairs, 0);
  result.objective = y.dot(rate_cran);  // all-C-RAN fallback

  auto solve_node = [&](std::vector<int> fixed) {
    Node node;
    node.relax = solve_relaxed(fixed, y, rate_cran, rate_d2d, p, d2d_budget_mw);
    node.fixed = std::move(fixed);
    return node;
  };

  std::vector<Node> live;
  live.push_back(solve_node(std::vector<int>(n_pairs, -1)));
  ++result.nodes_explored;
  if (!live.back().relax.feasible) return result;

  double ub = std::numeric_limits<double>::infinity();
  bool have_incumbent = false;

  while (!live.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < live.size(); ++i)
      if (live[i].relax.objective < live[best].relax.objective) best = i;
    Node node = std::move(live[best]);
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(best));

    if (node.relax.objective > ub) continue;  // bound

    if (is_integral(node.relax.x)) {
      if (node.relax.objective < ub || !have_incumbent) {
        ub = node.relax.objective;
        for (int k = 0; k < n_pairs; ++k)
          result.mode[k] = node.relax.x(k) > 0.5 ? 1 : 0;
        result.objective = ub;
        have_incumbent = true;
      }
      continue;
    }

    const int j = pick_branch_variable(node.relax.x, rate_cran, rate_d2d);
    live.clear();  // keep only the two children of the branched node
    for (int value : {0, 1}) {
      std::vector<int> fixed = node.fixed;
      fixed[j] = value;
      Node child = solve_node(std::move(fixed));
      ++result.nodes_explored;
      if (child.relax.feasible) live.push_back(std::move(child));
    }
  }

  assert(result.nodes_explored <= 2 * n_pairs + 1);
  return result;
}

ModeSelectResult exhaustive_oracle(const Vec& y, const Vec& rate_cran,
                                   const Vec& rate_d2d, const Vec& p,
                                   double d2d_budget_mw) {
  const int n_pairs = static_cast<int>(y.size());
  if (n_pairs > 20)
    throw std::invalid_argument("exhaustive_oracle: K must be <= 20");

  ModeSelectResult result;
  result.mode.assign(n_pairs, 0);
  result.objective = std::numeric_limits<double>::infinity();

  const double budget_tol =
      d2d_budget_mw + kTinyPower * std::max(1.0, d2d_budget_mw);
  std::vector<int> mode(n_pairs);
  for (std::uint64_t m = 0; m < (1ull << n_pairs); ++m) {
    double power = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
      mode[k] = static_cast<int>((m >> k) & 1u);
      if (mode[k]) power += p(k);
    }
    ++result.nodes_explored;
    if (power > budget_tol) continue;
    const double obj = mode_objective(mode, y, rate_cran, rate_d2d);
    if (obj < result.objective) {
      result.objective = obj;
      result.mode = mode;
    }
  }
  return result;
}

double mode_objective(const std::vector<int>& mode, const Vec& y,
                      const Vec& rate_cran, const Vec& rate_d2d) {
  double obj = 0.0;
  for (std::size_t k = 0; k < mode.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    obj += y(i) * (mode[k] ? rate_d2d(i) : rate_cran(i));
  }
  return obj;
}

}  // namespace dcran
