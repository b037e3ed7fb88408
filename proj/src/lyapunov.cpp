/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/lyapunov.hpp"

#include <stdexcept>

namespace dcran {

DriftWeights drift_weights(const Vec& q, double v) {
  if (v < 0.0) throw std::invalid_argument("drift_weights: V must be >= 0");
  DriftWeights w;
  w.v_param = v;
  w.y = -(q.array() + v);
  return w;
}

double lyapunov_value(const Vec& q) { return 0.5 * q.squaredNorm(); }

Lemma1Result check_lemma1(const Vec& q_before, const Vec& q_after,
                          const Vec& rates, const Vec& arrivals, double v) {
  const Vec expected = (q_before - rates).cwiseMax(0.0) + arrivals;
  if ((expected - q_after).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("check_lemma1: inconsistent slot transition");

  Lemma1Result res;
  const double penalty = v * rates.sum();
  res.drift_minus_penalty =
      lyapunov_value(q_after) - lyapunov_value(q_before) - penalty;
  res.b_sample = 0.5 * (rates.squaredNorm() + arrivals.squaredNorm());
  res.bound = res.b_sample + q_before.dot(arrivals - rates) - penalty;
  res.slack = res.bound - res.drift_minus_penalty;
  res.holds = res.slack >= -1e-9;
  return res;
}

}  // namespace dcran
