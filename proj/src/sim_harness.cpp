/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <thread>

#include "dcran/beamforming_wmmse.hpp"
#include "dcran/lyapunov.hpp"
#include "dcran/mode_selection.hpp"
#include "dcran/power_control.hpp"
#include "dcran/traffic_queues.hpp"

namespace dcran {

namespace {

constexpr double kPhatFloorMw = 1e-6;

// Sweeps per wmmse_iterate call inside the outer loop; the reweighting and
// frozen-rate refresh cadence across outer iterations does the heavy
// lifting, so short inner calls keep the per-slot cost bounded.
constexpr int kInnerSweepsPerOuter = 6;

/// Outer loop of the per-slot controller. Holds the primal iterates
/// (beamformers for every pair, powers, rates) across outer iterations.
class SlotSolver {
 public:
  SlotSolver(const NetworkTopology& topo, const ChannelRealization& ch,
             const Vec& q, const SimConfig& cfg)
      : topo_(topo),
        ch_(ch),
        cfg_(cfg),
        limits_(cfg.limits()),
        yprime_(q.array() + cfg.v_param),
        weights_(drift_weights(q, cfg.v_param)) {}

  SlotOutcome solve(Algorithm alg) {
    const int n_pairs = cfg_.n_pairs;
    const Eigen::Index dim = topo_.dim();

    // Matched-filter start at full power.
    CMat w_all = CMat::Zero(dim, n_pairs);
    const double mf_scale = std::sqrt(limits_.p_max_mw / 2.0);
    for (int k = 0; k < n_pairs; ++k) {
      const double g_norm = ch_.g_cran[k].norm();
      if (g_norm > 0.0) w_all.col(k) = mf_scale * ch_.g_cran[k] / g_norm;
    }

    // Candidate-rate receive directions for pairs outside the C-RAN set:
    // the interference-aware MMSE combiner, refreshed with the powers. A
    // matched filter here badly underestimates what the beamforming stage
    // achieves and locks weak pairs out of C-RAN service.
    auto mmse_direction = [&](int k, const Vec& powers) {
      CMat cov = ch_.noise_power * CMat::Identity(dim, dim);
      for (int l = 0; l < n_pairs; ++l)
        cov += powers(l) * ch_.g_cran[l] * ch_.g_cran[l].adjoint();
      CVec dir = cov.ldlt().solve(ch_.g_cran[k]);
      const double norm = dir.norm();
      return norm > 0.0 ? CVec(mf_scale * dir / norm) : CVec::Zero(dim).eval();
    };
    // Power start: feasible for C2 even if every pair lands in D2D mode,
    // so the first knapsack prices an all-D2D assignment honestly.
    Vec p = Vec::Constant(
        n_pairs,
        std::min(limits_.p_max_mw, limits_.d2d_budget_mw / n_pairs));
    Vec r_prev = Vec::Zero(n_pairs);
    std::vector<int> mode(n_pairs, alg == Algorithm::kD2dMode ? 1 : 0);

    std::optional<WmmseState> wmmse;
    WmmseOptions opts;
    opts.max_sweeps = kInnerSweepsPerOuter;
    opts.exact_qcqp = false;

    SlotOutcome out;
    bool solvers_ok = true;
    bool outer_converged = false;
    int iters = 0;

    // Incumbent over the outer iterates, by the realized drift objective.
    double best_objective = -std::numeric_limits<double>::infinity();
    std::vector<int> best_mode = mode;
    CMat best_w = w_all;
    Vec best_p = p;

    while (iters < cfg_.outer_max_iter) {
      ++iters;

      // Rates of both hypothetical modes at the current iterates: the
      // designed beamformer where one exists, the MMSE combiner otherwise.
      // A served C-RAN rate can never exceed the per-RRH cap (the pair
      // loads every serving RRH by its full rate), so the estimate is
      // clipped there.
      Vec rc(n_pairs), rd(n_pairs);
      for (int k = 0; k < n_pairs; ++k) {
        if (iters == 1) w_all.col(k) = mmse_direction(k, p);
        rc(k) = w_all.col(k).squaredNorm() > 0.0
                    ? std::min(rate_cran(w_all.col(k), k, p, ch_),
                               limits_.fronthaul_cap)
                    : 0.0;
        rd(k) = rate_d2d(k, p, ch_);
      }

      if (alg == Algorithm::kJmsra) {
        mode = modified_bnb(weights_.y, rc, rd, p, limits_.d2d_budget_mw).mode;
      }
      std::vector<int> cran_set, d2d_set;
      for (int k = 0; k < n_pairs; ++k)
        (mode[k] == 0 ? cran_set : d2d_set).push_back(k);

      if (!cran_set.empty()) {
        if (!wmmse || wmmse->cran_set != cran_set) {
          WmmseState fresh = init_wmmse_state(cran_set, ch_, yprime_, p,
                                              limits_, cfg_.n_rrh,
                                              cfg_.n_antennas, opts);
          if (wmmse) {  // carry beamformers of pairs staying in C-RAN mode
            for (std::size_t c = 0; c < cran_set.size(); ++c) {
              const auto it = std::find(wmmse->cran_set.begin(),
                                        wmmse->cran_set.end(), cran_set[c]);
              if (it != wmmse->cran_set.end())
                fresh.w.col(static_cast<Eigen::Index>(c)) = wmmse->w.col(
                    it - wmmse->cran_set.begin());
            }
            fresh.beta = update_fronthaul_weights(fresh.w, cfg_.n_rrh,
                                                  cfg_.n_antennas, opts.tau);
          }
          wmmse = std::move(fresh);
        }
        for (std::size_t c = 0; c < cran_set.size(); ++c)
          wmmse->p_hat(static_cast<Eigen::Index>(c)) =
              std::max(p(cran_set[c]), kPhatFloorMw);
        wmmse_iterate(*wmmse, ch_, p, limits_, opts);
        out.objective_trace_len =
            static_cast<int>(wmmse->objective_trace.size());
        solvers_ok = solvers_ok && wmmse->qcqp_converged;
        for (std::size_t c = 0; c < cran_set.size(); ++c)
          w_all.col(cran_set[c]) = wmmse->w.col(static_cast<Eigen::Index>(c));

        p = solve_cran_power(cran_set, w_all, yprime_, ch_, limits_, p).p;
      }

      if (!d2d_set.empty()) {
        PowerSolveResult res =
            solve_d2d_power(d2d_set, yprime_, ch_, limits_, p);
        p = res.p;
        solvers_ok = solvers_ok && res.converged;
      }

      Vec r_new(n_pairs);
      for (int k = 0; k < n_pairs; ++k) {
        if (mode[k] == 1) {
          r_new(k) = rate_d2d(k, p, ch_);
        } else {
          r_new(k) = w_all.col(k).squaredNorm() > 0.0
                         ? rate_cran(w_all.col(k), k, p, ch_)
                         : 0.0;
        }
      }
      const double objective = yprime_.dot(r_new);
      if (objective > best_objective) {
        best_objective = objective;
        best_mode = mode;
        best_w = w_all;
        best_p = p;
      }

      if ((r_new - r_prev).cwiseAbs().maxCoeff() <= cfg_.outer_tol) {
        outer_converged = true;
        r_prev = r_new;
        break;
      }
      r_prev = r_new;
    }
    out.outer_iters = iters;
    out.converged = solvers_ok && outer_converged;

    ResourceAllocation alloc = build_alloc(best_mode, best_w, best_p);
    enforce_fronthaul(alloc);

    if (alg == Algorithm::kJmsra) {
      // The search space contains the all-D2D assignment; keep whichever
      // the drift objective prefers at realized rates.
      ResourceAllocation all_d2d;
      all_d2d.mode.assign(n_pairs, 1);
      all_d2d.w.resize(n_pairs);
      std::vector<int> everyone(n_pairs);
      for (int k = 0; k < n_pairs; ++k) everyone[k] = k;
      PowerSolveResult d2d = solve_d2d_power(
          everyone, yprime_, ch_, limits_,
          Vec::Constant(n_pairs,
                        std::min(limits_.p_max_mw,
                                 limits_.d2d_budget_mw / n_pairs)));
      all_d2d.p = d2d.p;
      const Vec rates_mix = all_rates(alloc, ch_);
      const Vec rates_d2d = all_rates(all_d2d, ch_);
      if (yprime_.dot(rates_d2d) > yprime_.dot(rates_mix)) {
        alloc = std::move(all_d2d);
        solvers_ok = solvers_ok && d2d.converged;
        out.converged = solvers_ok && outer_converged;
      }
    }

    out.rates = all_rates(alloc, ch_);
    out.fronthaul =
        fronthaul_load(alloc, out.rates, cfg_.n_rrh, cfg_.n_antennas);
    out.feasible = check_constraints(alloc, ch_, limits_, cfg_.n_rrh,
                                     cfg_.n_antennas)
                       .all_ok();
    out.alloc = std::move(alloc);
    return out;
  }

 private:
  ResourceAllocation build_alloc(const std::vector<int>& mode,
                                 const CMat& w_all, const Vec& p) const {
    ResourceAllocation alloc;
    alloc.mode = mode;
    alloc.p = p;
    alloc.w.resize(cfg_.n_pairs);
    for (int k = 0; k < cfg_.n_pairs; ++k)
      if (mode[k] == 0) alloc.w[k] = w_all.col(k);
    return alloc;
  }

  /// The WMMSE stage bounds a reweighted surrogate of the fronthaul load;
  /// the hard per-RRH caps are enforced on the returned allocation by
  /// detaching the weakest active RRH-pair block until every cap holds.
  void enforce_fronthaul(ResourceAllocation& alloc) const {
    const double cap = limits_.fronthaul_cap;
    const double tol = 1e-9 * std::max(1.0, cap);
    for (int guard = 0; guard < cfg_.n_pairs * cfg_.n_rrh + 1; ++guard) {
      const Vec rates = all_rates(alloc, ch_);
      const Vec load =
          fronthaul_load(alloc, rates, cfg_.n_rrh, cfg_.n_antennas);
      int worst = -1;
      double worst_excess = tol;
      for (int n = 0; n < cfg_.n_rrh; ++n) {
        if (load(n) - cap > worst_excess) {
          worst_excess = load(n) - cap;
          worst = n;
        }
      }
      if (worst < 0) return;

      // Weakest relative block on the overloaded RRH goes first.
      int victim = -1;
      double victim_share = std::numeric_limits<double>::infinity();
      for (int k = 0; k < cfg_.n_pairs; ++k) {
        if (alloc.mode[k] != 0 || alloc.w[k].size() == 0) continue;
        const double total = alloc.w[k].squaredNorm();
        if (total <= 0.0) continue;
        if (!block_active(alloc.w[k], worst, cfg_.n_antennas)) continue;
        const double share =
            rrh_block(alloc.w[k], worst, cfg_.n_antennas).squaredNorm() /
            total;
        if (share < victim_share) {
          victim_share = share;
          victim = k;
        }
      }
      if (victim < 0) return;
      alloc.w[victim]
          .segment(static_cast<Eigen::Index>(worst) * cfg_.n_antennas,
                   cfg_.n_antennas)
          .setZero();
    }
  }

  const NetworkTopology& topo_;
  const ChannelRealization& ch_;
  const SimConfig& cfg_;
  PowerLimits limits_;
  Vec yprime_;
  DriftWeights weights_;
};

SlotOutcome run_slot(const NetworkTopology& topo, const ChannelRealization& ch,
                     const Vec& q, const SimConfig& cfg, Algorithm alg) {
  SlotSolver solver(topo, ch, q, cfg);
  return solver.solve(alg);
}

}  // namespace

SlotOutcome run_slot_jmsra(const NetworkTopology& topo,
                           const ChannelRealization& ch, const Vec& q,
                           const SimConfig& cfg) {
  return run_slot(topo, ch, q, cfg, Algorithm::kJmsra);
}

SlotOutcome run_slot_cran_mode(const NetworkTopology& topo,
                               const ChannelRealization& ch, const Vec& q,
                               const SimConfig& cfg) {
  return run_slot(topo, ch, q, cfg, Algorithm::kCranMode);
}

SlotOutcome run_slot_d2d_mode(const NetworkTopology& topo,
                              const ChannelRealization& ch, const Vec& q,
                              const SimConfig& cfg) {
  return run_slot(topo, ch, q, cfg, Algorithm::kD2dMode);
}

ExperimentResult run_experiment(const SimConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.cfg = cfg;

  Rng topo_rng(cfg.seed, 0);
  Rng chan_rng(cfg.seed, 1);
  Rng arrival_rng(cfg.seed, 2);

  result.topo = place_random(cfg, topo_rng);
  const double noise = cfg.noise_mw();
  const ArrivalProcess arrivals{cfg.lambda};

  QueueState qs{Vec::Zero(cfg.n_pairs), 0};
  std::vector<Vec> queue_history;
  queue_history.reserve(cfg.slots);
  result.slots.reserve(cfg.slots);

  double sum_rate_acc = 0.0;
  double fh_acc = 0.0;
  std::vector<int> outer_iters;
  outer_iters.reserve(cfg.slots);

  for (int t = 0; t < cfg.slots; ++t) {
    const ChannelRealization ch = draw_channels(result.topo, noise, chan_rng);
    const Vec a = draw_arrivals(arrivals, cfg.n_pairs, arrival_rng);
    const SlotOutcome out = run_slot(result.topo, ch, qs.q, cfg, cfg.algorithm);

    const QueueState next = update_queues(qs, out.rates, a);
    const Lemma1Result lemma =
        check_lemma1(qs.q, next.q, out.rates, a, cfg.v_param);

    SlotMetrics m;
    m.t = t;
    m.per_pair_rate = out.rates;
    m.per_pair_queue = qs.q;
    m.modes = out.alloc.mode;
    m.fronthaul = out.fronthaul;
    m.outer_iters = out.outer_iters;
    m.objective_trace_len = out.objective_trace_len;
    m.lemma1_ok = lemma.holds;
    m.feasible = out.feasible;
    m.converged = out.converged;
    result.slots.push_back(std::move(m));

    sum_rate_acc += out.rates.sum();
    fh_acc += out.fronthaul.mean();
    outer_iters.push_back(out.outer_iters);
    queue_history.push_back(qs.q);
    qs = next;

    result.summary.all_feasible &= out.feasible;
    result.summary.lemma1_all_ok &= lemma.holds;
    result.summary.all_converged &= out.converged;
  }

  result.summary.avg_throughput = sum_rate_acc / cfg.slots;
  result.summary.avg_delay_slots =
      cfg.lambda > 0.0 ? average_delay(queue_history, cfg.lambda) : 0.0;
  result.summary.avg_fh_load = fh_acc / cfg.slots;
  std::sort(outer_iters.begin(), outer_iters.end());
  const std::size_t mid = outer_iters.size() / 2;
  result.summary.median_outer_iters =
      outer_iters.size() % 2 == 1
          ? outer_iters[mid]
          : 0.5 * (outer_iters[mid - 1] + outer_iters[mid]);
  return result;
}

std::string format_csv_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

void write_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);

  out << "t,algorithm,seed,sum_rate,avg_queue,modes_bitstring";
  for (int n = 1; n <= result.cfg.n_rrh; ++n) out << ",fh_load_" << n;
  out << ",outer_iters,lemma1_ok\n";

  const std::string alg = algorithm_name(result.cfg.algorithm);
  for (const SlotMetrics& m : result.slots) {
    out << m.t << ',' << alg << ',' << result.cfg.seed << ','
        << format_csv_double(m.per_pair_rate.sum()) << ','
        << format_csv_double(m.per_pair_queue.mean()) << ',';
    for (int mode : m.modes) out << (mode ? '1' : '0');
    for (int n = 0; n < result.cfg.n_rrh; ++n)
      out << ',' << format_csv_double(m.fronthaul(n));
    out << ',' << m.outer_iters << ',' << (m.lemma1_ok ? 1 : 0) << '\n';
  }
  out << "-1," << alg << ',' << result.cfg.seed << ','
      << format_csv_double(result.summary.avg_throughput) << ','
      << format_csv_double(result.summary.avg_delay_slots) << ','
      << format_csv_double(result.summary.avg_fh_load) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

SimConfig apply_axis(SimConfig cfg, const std::string& axis, double value) {
  if (axis == "v") {
    cfg.v_param = value;
  } else if (axis == "lambda") {
    cfg.lambda = value;
  } else if (axis == "fronthaul") {
    cfg.fronthaul_cap = value;
  } else if (axis == "distance") {
    cfg.max_pair_dist = value;
  } else {
    throw ConfigError("unknown sweep axis: " + axis);
  }
  return cfg;
}

std::vector<SweepPoint> run_sweep(const SimConfig& base,
                                  const std::string& axis,
                                  const std::vector<double>& values,
                                  const std::vector<std::uint64_t>& seeds,
                                  const std::vector<Algorithm>& algorithms,
                                  int jobs) {
  std::vector<SweepPoint> points;
  for (Algorithm alg : algorithms)
    for (double value : values)
      for (std::uint64_t seed : seeds) {
        SweepPoint pt;
        pt.algorithm = alg;
        pt.axis = axis;
        pt.value = value;
        pt.seed = seed;
        points.push_back(pt);
      }

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= points.size()) return;
      SimConfig cfg = apply_axis(base, axis, points[i].value);
      cfg.algorithm = points[i].algorithm;
      cfg.seed = points[i].seed;
      points[i].summary = run_experiment(cfg).summary;
    }
  };

  const int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return points;
}

void write_sweep_csv(const std::vector<SweepPoint>& points,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << "algorithm,axis,value,seed,avg_throughput,avg_delay_slots,"
         "avg_fh_load\n";
  for (const SweepPoint& pt : points) {
    out << algorithm_name(pt.algorithm) << ',' << pt.axis << ','
        << format_csv_double(pt.value) << ',' << pt.seed << ','
        << format_csv_double(pt.summary.avg_throughput) << ','
        << format_csv_double(pt.summary.avg_delay_slots) << ','
        << format_csv_double(pt.summary.avg_fh_load) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dcran
