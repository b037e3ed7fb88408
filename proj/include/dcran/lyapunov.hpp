/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include "dcran/common.hpp"

namespace dcran {

/// Drift-plus-penalty weights y[k] = -(q[k] + V). Minimizing sum y[k]*R[k]
/// maximizes the queue-weighted throughput sum (q[k] + V)*R[k].
struct DriftWeights {
  Vec y;
  double v_param = 0.0;
};

DriftWeights drift_weights(const Vec& q, double v);

/// 0.5 * sum of squared backlogs.
double lyapunov_value(const Vec& q);

struct Lemma1Result {
  bool holds = false;
  double slack = 0.0;     // bound - drift_minus_penalty
  double drift_minus_penalty = 0.0;
  double bound = 0.0;
  double b_sample = 0.0;  // 0.5 * sum(rates^2 + arrivals^2)
};

/// Sample-path form of the one-slot drift-plus-penalty bound:
///   L(q') - L(q) - V*sum(R) <= B + sum q[k]*(A[k]-R[k]) - V*sum(R)
/// with B = 0.5*sum(R^2 + A^2). Throws if q_after is not the queue update of
/// (q_before, rates, arrivals).
Lemma1Result check_lemma1(const Vec& q_before, const Vec& q_after,
                          const Vec& rates, const Vec& arrivals, double v);

}  // namespace dcran
