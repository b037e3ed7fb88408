/* SPDX-License-Identifier: Apache-2.0 */
#include "dcran/traffic_queues.hpp"

#include <stdexcept>

namespace dcran {

Vec draw_arrivals(const ArrivalProcess& proc, int n_pairs, Rng& rng) {
  if (proc.lambda < 0.0)
    throw std::invalid_argument("draw_arrivals: lambda must be >= 0");
  Vec a(n_pairs);
  for (int k = 0; k < n_pairs; ++k)
    a(k) = static_cast<double>(rng.poisson(proc.lambda));
  return a;
}

QueueState update_queues(const QueueState& state, const Vec& rates,
                         const Vec& arrivals) {
  if (rates.size() != state.q.size() || arrivals.size() != state.q.size())
    throw std::invalid_argument("update_queues: size mismatch");
  if ((rates.array() < 0.0).any() || (arrivals.array() < 0.0).any())
    throw std::invalid_argument("update_queues: negative rate or arrival");
  QueueState next;
  next.q = (state.q - rates).cwiseMax(0.0) + arrivals;
  next.t = state.t + 1;
  return next;
}

Vec stability_metric(const std::vector<Vec>& queue_history) {
  if (queue_history.size() < 2)
    throw std::invalid_argument("stability_metric: need at least 2 slots");
  const double t = static_cast<double>(queue_history.size() - 1);
  return queue_history.back() / t;
}

double average_delay(const std::vector<Vec>& queue_history, double lambda) {
  if (queue_history.empty())
    throw std::invalid_argument("average_delay: empty history");
  if (!(lambda > 0.0))
    throw std::invalid_argument("average_delay: lambda must be > 0");
  double acc = 0.0;
  for (const Vec& q : queue_history) acc += q.mean();
  return acc / static_cast<double>(queue_history.size()) / lambda;
}

}  // namespace dcran
