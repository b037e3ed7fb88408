/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <vector>

#include "dcran/common.hpp"
#include "dcran/net_model.hpp"
#include "dcran/sim_config.hpp"

namespace dcran {

struct WmmseOptions {
  double tau = 1e-10;       // reweighting regularizer
  double tol = 1e-5;        // relative objective change between sweeps
  int max_sweeps = 100;
  int qcqp_max_iter = 500;  // pair-solve passes allowed per QCQP call
  double kkt_tol = 1e-6;
  // Re-weight beta and refresh the frozen rates after every sweep (the
  // controller loop path). With false, the surrogate problem stays fixed
  // for the whole call and the sweeps are plain block-coordinate descent.
  bool refresh_weights = true;
  // Solve the beamformer subproblem to full KKT accuracy inside every
  // sweep. The controller loop instead carries the load multipliers across
  // sweeps with one secant step each (same fixed point, far fewer solves)
  // and polishes with an exact solve at the end.
  bool exact_qcqp = true;
};

/// Beamformer subproblem at fixed MSE weights and receivers:
///   min over {w_c}  sum_c a[c]*w_c^H gram w_c - 2 Re(b_c^H w_c)
///   s.t. ||w_c||^2 <= p_ball                       (per pair)
///        sum_c block_weight(n,c)*||D_n w_c||^2 <= cap  (per RRH)
struct QcqpProblem {
  CMat gram;                     // D x D Hermitian PSD
  Vec a;                         // per-pair quadratic scale >= 0
  CMat b;                        // D x |C| linear terms
  Eigen::MatrixXd block_weight;  // N x |C|
  Eigen::MatrixXi mask;          // N x |C|, 0 forces the block to zero;
                                 // empty means all blocks free
  double p_ball = 0.0;
  double cap = 0.0;
  int n_rrh = 0;
  int n_antennas = 0;
};

struct QcqpResult {
  CMat w;             // D x |C|
  Vec ball_mult;      // per-pair multipliers of the norm ball
  Vec cap_mult;       // per-RRH multipliers of the block constraint
  bool converged = false;
  double kkt_residual = 0.0;
  int evals = 0;      // pair-solve passes spent
};

/// Dual method: exact per-pair trust-region solves (eigendecomposition +
/// secular equation for the ball multiplier) inside a dichotomy on each
/// per-RRH multiplier. Non-convergence returns the best feasible iterate
/// with converged = false.
QcqpResult solve_qcqp(const QcqpProblem& prob, const WmmseOptions& opts,
                      const Vec* warm_cap_mult = nullptr);

/// Block-coordinate state for the C-RAN-mode pairs. Columns of w / entries
/// of per-pair vectors follow cran_set order.
struct WmmseState {
  std::vector<int> cran_set;
  Vec yprime;   // Q + V weights of the C-RAN pairs
  CMat w;       // D x |C| virtual downlink beamformers
  Vec rho;      // MSE weights
  CVec mu;      // scalar receivers
  Eigen::MatrixXd beta;  // N x |C| reweighting coefficients
  Eigen::MatrixXi mask;  // N x |C| serving support, 0 = RRH detached
  Vec r_hat;    // rates frozen from the previous reweighting round
  Vec p_hat;    // powers frozen from the previous outer iteration (mW)
  CMat gram;    // cached sum of g_l g_l^H over all pairs
  Vec nu;       // warm per-RRH multipliers
  std::vector<double> objective_trace;
  bool qcqp_converged = true;
};

/// Matched-filter beamformers at half the power cap, unit MSE weights,
/// reweighting coefficients and frozen rates from the initial beamformers.
WmmseState init_wmmse_state(const std::vector<int>& cran_set,
                            const ChannelRealization& ch,
                            const Vec& yprime_full, const Vec& p_full_mw,
                            const PowerLimits& limits, int n_rrh,
                            int n_antennas, const WmmseOptions& opts);

/// MSE of pair cran_set[c_idx] under the current scalar receiver.
double compute_mse(int c_idx, const WmmseState& state,
                   const ChannelRealization& ch);

/// Optimal MSE weight 1/e.
double update_mse_weight(double e_k);

/// Optimal scalar receiver for pair cran_set[c_idx] at the current w.
Cplx update_receiver(int c_idx, const WmmseState& state,
                     const ChannelRealization& ch);

/// beta(n,c) = 1/(||D_n w_c||^2 + tau).
Eigen::MatrixXd update_fronthaul_weights(const CMat& w, int n_rrh,
                                         int n_antennas, double tau);

/// Objective of the weighted MMSE surrogate at the current (w, rho, mu).
double wmmse_objective(const WmmseState& state, const ChannelRealization& ch);

/// Reweighting rounds around frozen-problem block-coordinate sweeps:
/// each round runs receivers / MSE weights / QCQP sweeps until the
/// surrogate objective settles, then re-weights beta, refreshes the frozen
/// rates, and, if some RRH still carries more rate than its cap, detaches
/// the weakest active block there (hard zero through the support mask)
/// before the next round. Rounds stop when the per-RRH loads fit. With
/// refresh_weights = false a single frozen round runs: plain BCD.
void wmmse_iterate(WmmseState& state, const ChannelRealization& ch,
                   const Vec& p_full_mw, const PowerLimits& limits,
                   const WmmseOptions& opts);

}  // namespace dcran
