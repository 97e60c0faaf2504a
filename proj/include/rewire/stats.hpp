#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace rewire {

/// Mean with a normal-approximation 95% interval: half-width 1.96 * s / sqrt(count),
/// s the sample standard deviation. Empty input gives NaN mean.
struct Summary {
  double mean = 0.0;
  double ci95 = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;

  double standard_error() const;
};

Summary summarize(std::span<const double> values);

/// Calls `body(i)` for i in [0, count) on up to `workers` threads. Indices are
/// handed out dynamically; callers write results into slot i so the merged
/// output does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace rewire
