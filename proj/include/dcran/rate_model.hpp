/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <vector>

#include "dcran/common.hpp"
#include "dcran/net_model.hpp"
#include "dcran/sim_config.hpp"

namespace dcran {

/// Relative threshold deciding whether an antenna block of a beamformer
/// carries traffic over the fronthaul (solvers return near-zero, not
/// exact-zero, blocks).
constexpr double kActiveBlockTol = 1e-8;

/// The per-slot decision triple. mode[k] = 0 selects C-RAN mode, 1 selects
/// D2D mode; w[k] is the network-wide receive beamformer and is non-empty
/// exactly for C-RAN-mode pairs; p in mW.
struct ResourceAllocation {
  std::vector<int> mode;
  std::vector<CVec> w;
  Vec p;
};

/// Uplink SINR of pair k through receive beamformer w_k; interference sums
/// over every other pair regardless of mode.
double sinr_cran(const CVec& w_k, int k, const Vec& p,
                 const ChannelRealization& ch);
double sinr_cran(int k, const ResourceAllocation& alloc,
                 const ChannelRealization& ch);

double rate_cran(const CVec& w_k, int k, const Vec& p,
                 const ChannelRealization& ch);
double rate_cran(int k, const ResourceAllocation& alloc,
                 const ChannelRealization& ch);

/// Direct-link rate of pair i in D2D mode.
double rate_d2d(int i, const Vec& p, const ChannelRealization& ch);
double rate_d2d(int i, const ResourceAllocation& alloc,
                const ChannelRealization& ch);

/// Dispatches on alloc.mode[k].
double rate_general(int k, const ResourceAllocation& alloc,
                    const ChannelRealization& ch);

/// All K rates for the given allocation. A C-RAN pair whose beamformer is
/// all-zero is carried at rate 0 (it is not served this slot).
Vec all_rates(const ResourceAllocation& alloc, const ChannelRealization& ch);

/// Whether antenna block n of w carries traffic.
bool block_active(const CVec& w, int n, int n_antennas);

/// Per-RRH fronthaul load: sum of C-RAN-mode rates whose beamformer block at
/// that RRH is active.
Vec fronthaul_load(const ResourceAllocation& alloc, const Vec& rates,
                   int n_rrh, int n_antennas);

struct ConstraintReport {
  bool c2_ok = true;  // sum of D2D-mode powers within budget
  bool c3_ok = true;  // binary modes
  bool c4_ok = true;  // per-pair power box
  bool c5_ok = true;  // fronthaul caps
  double c2_slack = 0.0;
  double c4_slack = 0.0;  // min over pairs of min(p, P_max - p)
  Vec c5_slack;           // per RRH: C_n - load_n

  bool all_ok() const { return c2_ok && c3_ok && c4_ok && c5_ok; }
};

/// Evaluates C2-C5; infeasibility is reported, never thrown.
ConstraintReport check_constraints(const ResourceAllocation& alloc,
                                   const ChannelRealization& ch,
                                   const PowerLimits& limits, int n_rrh,
                                   int n_antennas);

}  // namespace dcran
