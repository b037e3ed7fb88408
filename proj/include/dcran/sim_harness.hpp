/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcran/common.hpp"
#include "dcran/net_model.hpp"
#include "dcran/rate_model.hpp"
#include "dcran/sim_config.hpp"

namespace dcran {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SlotMetrics {
  long t = 0;
  Vec per_pair_rate;
  Vec per_pair_queue;  // backlog at slot start
  std::vector<int> modes;
  Vec fronthaul;       // per-RRH load
  int outer_iters = 0;
  int objective_trace_len = 0;
  bool lemma1_ok = true;
  bool feasible = true;
  bool converged = true;
};

struct SlotOutcome {
  ResourceAllocation alloc;
  Vec rates;
  Vec fronthaul;
  int outer_iters = 0;
  int objective_trace_len = 0;
  bool feasible = true;
  bool converged = true;
};

/// One slot of the joint mode-selection / beamforming / power-control outer
/// loop on the given queue state; returns a feasible allocation.
SlotOutcome run_slot_jmsra(const NetworkTopology& topo,
                           const ChannelRealization& ch, const Vec& q,
                           const SimConfig& cfg);

/// Baseline: every pair forced into C-RAN mode.
SlotOutcome run_slot_cran_mode(const NetworkTopology& topo,
                               const ChannelRealization& ch, const Vec& q,
                               const SimConfig& cfg);

/// Baseline: every pair forced into D2D mode.
SlotOutcome run_slot_d2d_mode(const NetworkTopology& topo,
                              const ChannelRealization& ch, const Vec& q,
                              const SimConfig& cfg);

struct RunSummary {
  double avg_throughput = 0.0;   // sum over pairs of time-averaged rate
  double avg_delay_slots = 0.0;  // Little's law
  double avg_fh_load = 0.0;      // mean over slots and RRHs
  double median_outer_iters = 0.0;
  bool all_feasible = true;
  bool lemma1_all_ok = true;
  bool all_converged = true;
};

struct ExperimentResult {
  SimConfig cfg;
  NetworkTopology topo;
  std::vector<SlotMetrics> slots;
  RunSummary summary;
};

/// Fixes a topology from the seed, then loops slots: draw channels and
/// arrivals, solve the slot, update queues, record metrics.
ExperimentResult run_experiment(const SimConfig& cfg);

/// Per-slot rows plus a final summary row flagged by t = -1. Numeric fields
/// carry 9 significant digits, locale-free.
void write_csv(const ExperimentResult& result, const std::string& path);

struct SweepPoint {
  Algorithm algorithm = Algorithm::kJmsra;
  std::string axis;
  double value = 0.0;
  std::uint64_t seed = 0;
  RunSummary summary;
};

/// Valid axes: v, lambda, fronthaul, distance.
SimConfig apply_axis(SimConfig cfg, const std::string& axis, double value);

/// run_experiment per (algorithm, value, seed), optionally across threads;
/// results come back in deterministic (algorithm, value, seed) order.
std::vector<SweepPoint> run_sweep(const SimConfig& base,
                                  const std::string& axis,
                                  const std::vector<double>& values,
                                  const std::vector<std::uint64_t>& seeds,
                                  const std::vector<Algorithm>& algorithms,
                                  int jobs);

void write_sweep_csv(const std::vector<SweepPoint>& points,
                     const std::string& path);

/// Shortest-of-9-significant-digits decimal rendering used by all CSVs.
std::string format_csv_double(double v);

}  // namespace dcran
