/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <vector>

#include "dcran/common.hpp"

namespace dcran {

/// Per-pair backlog in bit/Hz, plus the slot index of the last update.
struct QueueState {
  Vec q;
  long t = 0;
};

struct ArrivalProcess {
  double lambda = 0.0;  // mean arrivals, bit/slot/Hz
};

/// Independent Poisson(lambda) counts, one per pair.
Vec draw_arrivals(const ArrivalProcess& proc, int n_pairs, Rng& rng);

/// q'[k] = max(q[k] - rates[k], 0) + arrivals[k]; increments t.
QueueState update_queues(const QueueState& state, const Vec& rates,
                         const Vec& arrivals);

/// Per-pair Q(t)/t at the last recorded slot; history[i] is the queue vector
/// at slot i. Trends toward 0 on a mean-rate-stable run.
Vec stability_metric(const std::vector<Vec>& queue_history);

/// Little's law: time-average of the mean queue length divided by lambda.
double average_delay(const std::vector<Vec>& queue_history, double lambda);

}  // namespace dcran
