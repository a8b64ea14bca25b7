#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pfwd {

struct Estimate {
  double mean = 0.0;
  double std_err = 0.0;
};

/// Running sums for one group of observations (one graph realization).
struct GroupSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
};

/// Mean and standard error of i.i.d. observations.
Estimate simple_estimate(std::span<const double> values);

/// Two-level estimate for a balanced nested design (graphs x repetitions).
/// The grand mean is the mean of group means. With two or more groups the
/// standard error comes from the spread of group means, whose variance is
/// between-graph variance plus within-graph variance over the repetition
/// count. With a single group it falls back to the within-group spread.
Estimate nested_estimate(std::span<const GroupSums> groups);
Estimate nested_estimate(const std::vector<std::vector<double>>& groups);

/// Pool-adjacent-violators fit of a nondecreasing sequence (equal weights).
std::vector<double> isotonic_fit(std::span<const double> values);

}  // namespace pfwd
