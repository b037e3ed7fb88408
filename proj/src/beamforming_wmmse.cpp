/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/beamforming_wmmse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcran/rate_model.hpp"

namespace dcran {

namespace {

constexpr double kPhatFloorMw = 1e-6;

// The MSE of a near-noiseless pair evaluates by cancellation of O(1) terms;
// values below this floor are numerical zero and would blow up 1/e.
constexpr double kMseFloor = 1e-12;

// A beamformer this far below the power cap no longer carries a served
// stream; snapping it to exact zero keeps the pair honestly unserved
// instead of letting it decay through denormals.
constexpr double kWNormFloorRel = 1e-12;

/// Solves min w^H M w - 2 Re(b^H w) s.t. ||w||^2 <= p_ball for Hermitian
/// PSD M. Fast path: plain LDLT solve, accepted when it lands inside the
/// ball; otherwise eigendecomposition plus the secular equation for the
/// exact ball multiplier.
struct BallSolve {
  CVec w;
  double lambda = 0.0;
};

BallSolve solve_ball(const CMat& m, const CVec& b, double p_ball) {
  BallSolve out;
  const Eigen::Index dim = b.size();
  if (b.squaredNorm() < 1e-280) {
    out.w = CVec::Zero(dim);
    return out;
  }

  {
    Eigen::LDLT<CMat> ldlt(m);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      CVec w = ldlt.solve(b);
      const double resid = (m * w - b).norm();
      if (resid <= 1e-9 * b.norm() &&
          w.squaredNorm() <= p_ball * (1.0 + 1e-12)) {
        out.w = std::move(w);
        return out;
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  Vec d = es.eigenvalues().cwiseMax(0.0);
  const CMat& u = es.eigenvectors();
  const CVec c = u.adjoint() * b;

  const double d_scale = d.maxCoeff();
  const double b_norm = b.norm();

  // Unconstrained minimizer through the pseudo-inverse, unless b has weight
  // on a null direction (then the ball is necessarily active).
  bool null_component = false;
  CVec scaled(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (d(i) > d_scale * 1e-13 && d(i) > 0.0) {
      scaled(i) = c(i) / d(i);
    } else {
      scaled(i) = 0.0;
      if (std::abs(c(i)) > b_norm * 1e-12) null_component = true;
    }
  }
  if (!null_component && scaled.squaredNorm() <= p_ball * (1.0 + 1e-12)) {
    out.w = u * scaled;
    return out;
  }

  // phi(lambda) = sum |c_i|^2/(d_i+lambda)^2 is decreasing; the root of
  // phi = p_ball lies in (0, ||c||/sqrt(p_ball)].
  double lo = 0.0;
  double hi = c.norm() / std::sqrt(p_ball);
  double lambda = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    double phi = 0.0;
    double dphi = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double den = d(i) + lambda;
      const double t = std::norm(c(i)) / (den * den);
      phi += t;
      dphi -= 2.0 * t / den;
    }
    const double f = phi - p_ball;
    if (std::abs(f) <= p_ball * 1e-13) break;
    if (f > 0.0)
      lo = lambda;
    else
      hi = lambda;
    double next = lambda - f / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - lambda) <= 1e-16 * std::max(1.0, lambda)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  for (Eigen::Index i = 0; i < dim; ++i) scaled(i) = c(i) / (d(i) + lambda);
  out.w = u * scaled;
  out.lambda = lambda;
  return out;
}

struct PairSolveOutcome {
  CMat w;
  Vec ball_mult;
};

bool block_allowed(const QcqpProblem& prob, int n, int c) {
  return prob.mask.size() == 0 || prob.mask(n, c) != 0;
}

/// Per-pair exact solves at fixed per-RRH multipliers nu. Blocks masked out
/// of a pair's serving support are removed from its system (hard zeros).
PairSolveOutcome solve_pairs(const QcqpProblem& prob, const Vec& nu) {
  const Eigen::Index dim = prob.gram.rows();
  const int n_c = static_cast<int>(prob.a.size());
  PairSolveOutcome out;
  out.w = CMat::Zero(dim, n_c);
  out.ball_mult = Vec::Zero(n_c);
  std::vector<Eigen::Index> idx;
  idx.reserve(dim);
  for (int c = 0; c < n_c; ++c) {
    idx.clear();
    for (int n = 0; n < prob.n_rrh; ++n) {
      if (!block_allowed(prob, n, c)) continue;
      for (int a2 = 0; a2 < prob.n_antennas; ++a2)
        idx.push_back(static_cast<Eigen::Index>(n) * prob.n_antennas + a2);
    }
    if (idx.empty()) continue;
    const auto sub = static_cast<Eigen::Index>(idx.size());

    CMat m(sub, sub);
    CVec b(sub);
    for (Eigen::Index r = 0; r < sub; ++r) {
      b(r) = prob.b(idx[r], c);
      for (Eigen::Index q = 0; q < sub; ++q)
        m(r, q) = prob.a(c) * prob.gram(idx[r], idx[q]);
    }
    for (Eigen::Index r = 0; r < sub; ++r) {
      const int n = static_cast<int>(idx[r] / prob.n_antennas);
      m(r, r) += nu(n) * prob.block_weight(n, c);
    }
    BallSolve sol = solve_ball(m, b, prob.p_ball);
    for (Eigen::Index r = 0; r < sub; ++r) out.w(idx[r], c) = sol.w(r);
    out.ball_mult(c) = sol.lambda;
  }
  return out;
}

Vec block_loads(const QcqpProblem& prob, const CMat& w) {
  Vec load = Vec::Zero(prob.n_rrh);
  for (int c = 0; c < static_cast<int>(prob.a.size()); ++c) {
    for (int n = 0; n < prob.n_rrh; ++n) {
      const CVec blk = w.col(c).segment(
          static_cast<Eigen::Index>(n) * prob.n_antennas, prob.n_antennas);
      load(n) += prob.block_weight(n, c) * blk.squaredNorm();
    }
  }
  return load;
}

Vec problem_loads(const QcqpProblem& prob, const CMat& w) {
  Vec load = Vec::Zero(prob.n_rrh);
  for (int c = 0; c < static_cast<int>(prob.a.size()); ++c)
    for (int n = 0; n < prob.n_rrh; ++n)
      load(n) += prob.block_weight(n, c) *
                 w.col(c)
                     .segment(static_cast<Eigen::Index>(n) * prob.n_antennas,
                              prob.n_antennas)
                     .squaredNorm();
  return load;
}

}  // namespace

/// Objective of the surrogate at the current (rho, mu) with a candidate w.
static double wmmse_objective_with(const WmmseState& state,
                                   const ChannelRealization& ch,
                                   const CMat& w_candidate) {
  WmmseState probe = state;
  probe.w = w_candidate;
  return wmmse_objective(probe, ch);
}

QcqpResult solve_qcqp(const QcqpProblem& prob, const WmmseOptions& opts,
                      const Vec* warm_cap_mult) {
  const int n_c = static_cast<int>(prob.a.size());
  for (int c = 0; c < n_c; ++c)
    if (prob.a(c) < 0.0)
      throw std::invalid_argument("solve_qcqp: negative quadratic scale");

  QcqpResult res;
  Vec nu = Vec::Zero(prob.n_rrh);
  if (warm_cap_mult != nullptr && warm_cap_mult->size() == prob.n_rrh)
    nu = warm_cap_mult->cwiseMax(0.0);

  int evals = 0;
  PairSolveOutcome cur;
  Vec load;

  // Best feasible iterate seen, returned if the dual search runs out of
  // budget on a stiff landscape.
  bool have_best = false;
  double best_objective = std::numeric_limits<double>::infinity();
  PairSolveOutcome best;
  Vec best_nu;

  auto objective_of = [&](const CMat& w) {
    double acc = 0.0;
    for (int c = 0; c < static_cast<int>(prob.a.size()); ++c) {
      acc += prob.a(c) *
             (w.col(c).adjoint() * prob.gram * w.col(c)).value().real();
      acc -= 2.0 * std::real(prob.b.col(c).dot(w.col(c)));
    }
    return acc;
  };
  auto evaluate = [&]() {
    cur = solve_pairs(prob, nu);
    load = block_loads(prob, cur.w);
    ++evals;
    bool feasible = true;
    for (int n = 0; n < prob.n_rrh; ++n)
      feasible =
          feasible && load(n) <= prob.cap * (1.0 + opts.kkt_tol) + 1e-300;
    if (feasible) {
      const double obj = objective_of(cur.w);
      if (!have_best || obj < best_objective) {
        have_best = true;
        best_objective = obj;
        best = cur;
        best_nu = nu;
      }
    }
  };
  evaluate();

  const double cap_scale = std::max(1.0, prob.cap);
  // Residuals are scaled by the multiplier magnitude so complementarity is
  // attainable when the active multipliers are large.
  auto residual_at = [&](int n) {
    const double primal = (load(n) - prob.cap) / cap_scale;
    const double comp = nu(n) * std::abs(load(n) - prob.cap) /
                        (cap_scale * (1.0 + nu(n)));
    return std::max(primal, comp);
  };
  auto worst_residual = [&]() {
    double worst = 0.0;
    for (int n = 0; n < prob.n_rrh; ++n)
      worst = std::max(worst, residual_at(n));
    return worst;
  };

  // Gauss-Seidel over the per-RRH multipliers; each scalar root-find uses
  // regula falsi with a bisection safeguard on the monotone load curve.
  bool converged = false;
  while (evals < opts.qcqp_max_iter) {
    if (worst_residual() <= opts.kkt_tol) {
      converged = true;
      break;
    }
    int n_star = 0;
    double worst = -1.0;
    for (int n = 0; n < prob.n_rrh; ++n) {
      const double r = residual_at(n);
      if (r > worst) {
        worst = r;
        n_star = n;
      }
    }

    if (load(n_star) <= prob.cap && nu(n_star) > 0.0) {
      // Over-tight: release entirely if the constraint stays satisfied.
      const double saved = nu(n_star);
      nu(n_star) = 0.0;
      evaluate();
      if (load(n_star) <= prob.cap * (1.0 + opts.kkt_tol)) continue;
      nu(n_star) = saved;
      evaluate();
    }

    // Bracket [lo, hi] with f(lo) > 0 >= f(hi), f = load - cap.
    double lo, f_lo, hi, f_hi;
    if (load(n_star) > prob.cap) {
      lo = nu(n_star);
      f_lo = load(n_star) - prob.cap;
      hi = std::max(2.0 * nu(n_star), 1e-8);
      nu(n_star) = hi;
      evaluate();
      while (load(n_star) > prob.cap && hi < 1e14 &&
             evals < opts.qcqp_max_iter) {
        lo = hi;
        f_lo = load(n_star) - prob.cap;
        hi *= 8.0;
        nu(n_star) = hi;
        evaluate();
      }
      f_hi = load(n_star) - prob.cap;
    } else {
      hi = nu(n_star);
      f_hi = load(n_star) - prob.cap;
      lo = 0.0;
      nu(n_star) = lo;
      evaluate();
      f_lo = load(n_star) - prob.cap;
      if (f_lo <= 0.0) continue;  // released above; keep nu = 0
    }

    while (evals < opts.qcqp_max_iter) {
      // Feasible side within tolerance terminates the scalar solve. The
      // interval safeguard is relative: the root can sit many orders of
      // magnitude below the initial bracket.
      const double tol_here = opts.kkt_tol * cap_scale;
      if (-f_hi <= tol_here || hi - lo <= 1e-12 * hi || hi <= 1e-300) break;
      double next = hi - f_hi * (hi - lo) / (f_hi - f_lo);  // regula falsi
      const double mid = 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = mid;
      nu(n_star) = next;
      evaluate();
      const double f = load(n_star) - prob.cap;
      if (f > 0.0) {
        lo = next;
        f_lo = f;
      } else {
        hi = next;
        f_hi = f;
      }
    }
    if (load(n_star) > prob.cap || nu(n_star) != hi) {
      nu(n_star) = hi;
      evaluate();
    }
  }
  if (!converged) converged = worst_residual() <= opts.kkt_tol;

  if (!converged && have_best) {
    bool cur_feasible = true;
    for (int n = 0; n < prob.n_rrh; ++n)
      cur_feasible =
          cur_feasible && load(n) <= prob.cap * (1.0 + opts.kkt_tol);
    if (!cur_feasible || objective_of(cur.w) > best_objective) {
      cur = best;
      nu = best_nu;
      load = block_loads(prob, cur.w);
    }
  }

  res.w = cur.w;
  res.ball_mult = cur.ball_mult;
  res.cap_mult = nu;
  res.converged = converged;
  res.kkt_residual = worst_residual();
  res.evals = evals;
  return res;
}

WmmseState init_wmmse_state(const std::vector<int>& cran_set,
                            const ChannelRealization& ch,
                            const Vec& yprime_full, const Vec& p_full_mw,
                            const PowerLimits& limits, int n_rrh,
                            int n_antennas, const WmmseOptions& opts) {
  if (cran_set.empty())
    throw std::invalid_argument("init_wmmse_state: empty C-RAN set");
  const int n_pairs = static_cast<int>(ch.g_cran.size());
  const Eigen::Index dim = ch.g_cran[0].size();
  const int n_c = static_cast<int>(cran_set.size());

  WmmseState state;
  state.cran_set = cran_set;
  state.yprime = Vec(n_c);
  state.w = CMat::Zero(dim, n_c);
  state.rho = Vec::Ones(n_c);
  state.mu = CVec::Zero(n_c);
  state.r_hat = Vec::Zero(n_c);
  state.p_hat = Vec(n_c);
  state.nu = Vec::Zero(n_rrh);
  state.mask = Eigen::MatrixXi::Ones(n_rrh, n_c);

  state.gram = CMat::Zero(dim, dim);
  for (int l = 0; l < n_pairs; ++l)
    state.gram += ch.g_cran[l] * ch.g_cran[l].adjoint();

  const double scale = std::sqrt(limits.p_max_mw / 2.0);
  for (int c = 0; c < n_c; ++c) {
    const int k = cran_set[c];
    state.yprime(c) = yprime_full(k);
    state.p_hat(c) = std::max(p_full_mw(k), kPhatFloorMw);
    const double g_norm = ch.g_cran[k].norm();
    if (g_norm > 0.0) state.w.col(c) = scale * ch.g_cran[k] / g_norm;
  }
  state.beta = update_fronthaul_weights(state.w, n_rrh, n_antennas, opts.tau);
  for (int c = 0; c < n_c; ++c) {
    const int k = cran_set[c];
    if (state.w.col(c).squaredNorm() > 0.0)
      state.r_hat(c) = rate_cran(state.w.col(c), k, p_full_mw, ch);
  }
  return state;
}

double compute_mse(int c_idx, const WmmseState& state,
                   const ChannelRealization& ch) {
  const double p_hat = state.p_hat(c_idx);
  if (!(p_hat > 0.0))
    throw std::invalid_argument("compute_mse: p_hat must be > 0");
  const int k = state.cran_set[c_idx];
  const CVec w = state.w.col(c_idx);
  const Cplx mu = state.mu(c_idx);
  const double quad =
      (w.adjoint() * state.gram * w).value().real() + ch.noise_power / p_hat;
  const Cplx cross = ch.g_cran[k].dot(w);  // (g_k)^H w
  return std::norm(mu) * quad - 2.0 * std::real(std::conj(mu) * cross) + 1.0;
}

double update_mse_weight(double e_k) {
  if (!(e_k > 0.0))
    throw std::invalid_argument("update_mse_weight: MSE must be > 0");
  return 1.0 / e_k;
}

Cplx update_receiver(int c_idx, const WmmseState& state,
                     const ChannelRealization& ch) {
  const int k = state.cran_set[c_idx];
  const CVec w = state.w.col(c_idx);
  const double den = (w.adjoint() * state.gram * w).value().real() +
                     ch.noise_power / state.p_hat(c_idx);
  if (!(den > 0.0))
    throw std::invalid_argument("update_receiver: zero denominator");
  return ch.g_cran[k].dot(w) / den;
}

Eigen::MatrixXd update_fronthaul_weights(const CMat& w, int n_rrh,
                                         int n_antennas, double tau) {
  if (!(tau > 0.0))
    throw std::invalid_argument("update_fronthaul_weights: tau must be > 0");
  Eigen::MatrixXd beta(n_rrh, w.cols());
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (int n = 0; n < n_rrh; ++n) {
      const double blk =
          w.col(c)
              .segment(static_cast<Eigen::Index>(n) * n_antennas, n_antennas)
              .squaredNorm();
      beta(n, c) = 1.0 / (blk + tau);
    }
  }
  return beta;
}

double wmmse_objective(const WmmseState& state, const ChannelRealization& ch) {
  double obj = 0.0;
  for (int c = 0; c < static_cast<int>(state.cran_set.size()); ++c) {
    const double e = compute_mse(c, state, ch);
    obj += state.yprime(c) * (state.rho(c) * e - std::log(state.rho(c)));
  }
  return obj;
}

void wmmse_iterate(WmmseState& state, const ChannelRealization& ch,
                   const Vec& p_full_mw, const PowerLimits& limits,
                   const WmmseOptions& opts) {
  const int n_c = static_cast<int>(state.cran_set.size());
  if (n_c == 0) throw std::invalid_argument("wmmse_iterate: empty C-RAN set");
  const int n_rrh = static_cast<int>(state.beta.rows());
  const int n_antennas = static_cast<int>(state.w.rows()) / std::max(n_rrh, 1);

  state.objective_trace.clear();

  QcqpProblem prob;
  prob.gram = state.gram;
  prob.a = Vec(n_c);
  prob.b = CMat(state.w.rows(), n_c);
  prob.block_weight = Eigen::MatrixXd(n_rrh, n_c);
  prob.p_ball = limits.p_max_mw;
  prob.cap = limits.fronthaul_cap;
  prob.n_rrh = n_rrh;
  prob.n_antennas = n_antennas;

  auto run_sweeps = [&]() {
    double prev = std::numeric_limits<double>::quiet_NaN();
    Vec nu_prev = state.nu;
    Vec f_prev = Vec::Zero(n_rrh);
    bool have_prev = false;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      for (int c = 0; c < n_c; ++c) {
        if (state.w.col(c).squaredNorm() < kWNormFloorRel * limits.p_max_mw)
          state.w.col(c).setZero();
        state.mu(c) = update_receiver(c, state, ch);
        const double e = compute_mse(c, state, ch);
        state.rho(c) = update_mse_weight(std::max(e, kMseFloor));
      }

      for (int c = 0; c < n_c; ++c) {
        const int k = state.cran_set[c];
        const double yr = state.yprime(c) * state.rho(c);
        prob.a(c) = yr * std::norm(state.mu(c));
        prob.b.col(c) = yr * state.mu(c) * ch.g_cran[k];
        const double zeta = state.r_hat(c) * limits.p_max_mw / state.p_hat(c);
        for (int n = 0; n < n_rrh; ++n)
          prob.block_weight(n, c) = state.beta(n, c) * zeta;
      }
      prob.mask = state.mask;
      // The argmin is invariant to a joint objective rescale, while the
      // optimal load multipliers scale with it. Normalizing keeps the
      // warm-started multipliers valid as the MSE weights grow.
      const double obj_scale =
          std::max({prob.a.maxCoeff() * prob.gram.norm(), prob.b.norm(), 1e-300});
      prob.a /= obj_scale;
      prob.b /= obj_scale;

      if (opts.exact_qcqp) {
        const Vec warm = state.nu;
        QcqpResult qcqp =
            solve_qcqp(prob, opts, warm.size() == n_rrh ? &warm : nullptr);
        // Safeguarded block update: never move to a worse point than the
        // incumbent (possible only when the dual solve ran out of budget on
        // a stiff multiplier landscape). With the rounds active, a worse
        // point is still accepted if the incumbent violates the caps, so
        // feasibility progress cannot stall.
        bool keep_old = false;
        if (wmmse_objective_with(state, ch, qcqp.w) >
            wmmse_objective(state, ch)) {
          if (opts.refresh_weights) {
            bool old_feasible = true;
            const Vec old_load = problem_loads(prob, state.w);
            for (int n = 0; n < n_rrh; ++n)
              old_feasible = old_feasible &&
                             old_load(n) <= prob.cap * (1.0 + opts.kkt_tol);
            for (int c = 0; c < n_c; ++c)
              old_feasible = old_feasible &&
                             state.w.col(c).squaredNorm() <=
                                 prob.p_ball * (1.0 + 1e-9);
            keep_old = old_feasible;
          } else {
            keep_old = true;
          }
        }
        if (!keep_old) state.w = qcqp.w;
        state.nu = qcqp.cap_mult;
        state.qcqp_converged = state.qcqp_converged && qcqp.converged;
      } else {
        // One pair-solve pass plus a safeguarded secant step per load
        // multiplier; the multipliers settle jointly with the sweeps.
        PairSolveOutcome out = solve_pairs(prob, state.nu);
        if (!out.w.allFinite()) {
          // Multiplier ran into overflow territory; back off and retry on
          // the next sweep with the previous beamformers.
          state.nu *= 0.125;
          state.objective_trace.push_back(wmmse_objective(state, ch));
          continue;
        }
        const Vec load = block_loads(prob, out.w);
        Vec nu_next = state.nu;
        for (int n = 0; n < n_rrh; ++n) {
          const double f = load(n) - prob.cap;
          if (state.nu(n) <= 0.0 && f <= 0.0) {
            nu_prev(n) = 0.0;
            f_prev(n) = f;
            continue;
          }
          double next;
          const double df = f - f_prev(n);
          if (have_prev && std::abs(df) > 1e-14 * std::max(1.0, std::abs(f)) &&
              state.nu(n) != nu_prev(n)) {
            next = state.nu(n) - f * (state.nu(n) - nu_prev(n)) / df;
          } else {
            next = f > 0.0 ? std::max(2.0 * state.nu(n), 1e-8)
                           : 0.5 * state.nu(n);
          }
          if (!std::isfinite(next))
            next = f > 0.0 ? std::max(2.0 * state.nu(n), 1e-8)
                           : 0.5 * state.nu(n);
          const double hi_clip = 8.0 * state.nu(n) + 1e-6;
          const double lo_clip = state.nu(n) / 8.0;
          next = std::clamp(next, lo_clip, hi_clip);
          nu_prev(n) = state.nu(n);
          f_prev(n) = f;
          // Same ceiling as the exact dual search; beyond it a block is a
          // hard zero in all but name and the support commitment takes
          // over anyway.
          nu_next(n) = std::min(std::max(0.0, next), 1e14);
        }
        have_prev = true;
        state.nu = nu_next;
        state.w = out.w;
      }

      const double obj = wmmse_objective(state, ch);
      state.objective_trace.push_back(obj);
      if (sweep >= 1 &&
          std::abs(prev - obj) <= opts.tol * std::max(1.0, std::abs(obj)))
        break;
      prev = obj;
    }
  };

  auto refresh_rates = [&]() {
    for (int c = 0; c < n_c; ++c) {
      const int k = state.cran_set[c];
      state.r_hat(c) = state.w.col(c).squaredNorm() > 0.0
                           ? rate_cran(state.w.col(c), k, p_full_mw, ch)
                           : 0.0;
    }
  };

  if (!opts.refresh_weights) {
    run_sweeps();
    return;
  }

  // Rounds with hard support commitment: the surrogate steers the block
  // norms inside a round; between rounds the actual per-RRH rate loads
  // decide whether an RRH-pair link must be detached, and silenced pairs
  // are re-admitted onto RRHs that ended with spare capacity.
  const int max_rounds = 2 * n_rrh * n_c + 2;
  Eigen::MatrixXi readmitted = Eigen::MatrixXi::Zero(n_rrh, n_c);
  for (int round = 0; round < max_rounds; ++round) {
    run_sweeps();
    refresh_rates();

    Vec load = Vec::Zero(n_rrh);
    for (int c = 0; c < n_c; ++c) {
      for (int n = 0; n < n_rrh; ++n) {
        if (state.mask(n, c) == 0) continue;
        const double total = state.w.col(c).squaredNorm();
        if (total <= 0.0) continue;
        const double blk =
            state.w.col(c)
                .segment(static_cast<Eigen::Index>(n) * n_antennas,
                         n_antennas)
                .squaredNorm();
        if (blk > kActiveBlockTol * total) load(n) += state.r_hat(c);
      }
    }

    int worst = -1;
    double worst_excess = 1e-9 * std::max(1.0, limits.fronthaul_cap);
    for (int n = 0; n < n_rrh; ++n) {
      if (load(n) - limits.fronthaul_cap > worst_excess) {
        worst_excess = load(n) - limits.fronthaul_cap;
        worst = n;
      }
    }
    if (worst < 0) {
      // Every cap holds. Give a silenced pair one shot at an RRH with
      // enough spare capacity for its single-RRH rate.
      int add_n = -1, add_c = -1;
      double best_rate = 0.0;
      for (int c = 0; c < n_c; ++c) {
        if (state.w.col(c).squaredNorm() > 0.0) continue;
        const int k = state.cran_set[c];
        for (int n = 0; n < n_rrh; ++n) {
          if (readmitted(n, c) != 0) continue;
          CVec mf = CVec::Zero(state.w.rows());
          mf.segment(static_cast<Eigen::Index>(n) * n_antennas, n_antennas) =
              ch.g_cran[k].segment(
                  static_cast<Eigen::Index>(n) * n_antennas, n_antennas);
          const double mf_norm = mf.norm();
          if (mf_norm <= 0.0) continue;
          mf *= std::sqrt(limits.p_max_mw / 2.0) / mf_norm;
          const double r_est = rate_cran(mf, k, p_full_mw, ch);
          if (r_est <= limits.fronthaul_cap - load(n) && r_est > best_rate) {
            best_rate = r_est;
            add_n = n;
            add_c = c;
          }
        }
      }
      if (add_n < 0) break;
      readmitted(add_n, add_c) = 1;
      state.mask.col(add_c).setZero();
      state.mask(add_n, add_c) = 1;
      const int k = state.cran_set[add_c];
      CVec mf = CVec::Zero(state.w.rows());
      mf.segment(static_cast<Eigen::Index>(add_n) * n_antennas, n_antennas) =
          ch.g_cran[k].segment(
              static_cast<Eigen::Index>(add_n) * n_antennas, n_antennas);
      state.w.col(add_c) = std::sqrt(limits.p_max_mw / 2.0) * mf / mf.norm();
      continue;
    }

    // Detach the link with the cheapest weighted-rate loss per unit of
    // load relief: redundantly served pairs shed their extra RRHs first,
    // and a pair too fast for any cap is evicted rather than everyone else.
    int victim = -1;
    double victim_ratio = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_c; ++c) {
      if (state.mask(worst, c) == 0) continue;
      if (state.r_hat(c) <= 0.0) continue;
      const double total = state.w.col(c).squaredNorm();
      if (total <= 0.0) continue;
      const double blk =
          state.w.col(c)
              .segment(static_cast<Eigen::Index>(worst) * n_antennas,
                       n_antennas)
              .squaredNorm();
      if (blk <= kActiveBlockTol * total) continue;

      CVec w_reduced = state.w.col(c);
      w_reduced.segment(static_cast<Eigen::Index>(worst) * n_antennas,
                        n_antennas)
          .setZero();
      const double r_without =
          w_reduced.squaredNorm() > 0.0
              ? rate_cran(w_reduced, state.cran_set[c], p_full_mw, ch)
              : 0.0;
      const double cost =
          state.yprime(c) * std::max(state.r_hat(c) - r_without, 0.0);
      const double ratio = cost / state.r_hat(c);
      if (ratio < victim_ratio) {
        victim_ratio = ratio;
        victim = c;
      }
    }
    if (victim < 0) break;
    state.mask(worst, victim) = 0;
    state.w.col(victim)
        .segment(static_cast<Eigen::Index>(worst) * n_antennas, n_antennas)
        .setZero();
  }

  if (!opts.exact_qcqp) {
    // Exact warm polish so the returned beamformers sit at a KKT point of
    // the final surrogate problem.
    prob.mask = state.mask;
    const Vec warm = state.nu;
    QcqpResult qcqp =
        solve_qcqp(prob, opts, warm.size() == n_rrh ? &warm : nullptr);
    state.w = qcqp.w;
    state.nu = qcqp.cap_mult;
    state.qcqp_converged = state.qcqp_converged && qcqp.converged;
    refresh_rates();
  }
}

}  // namespace dcran
