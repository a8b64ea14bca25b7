#include "pfwd/stats.hpp"

#include <algorithm>
#include <cmath>

namespace pfwd {

namespace {

double sample_variance(double sum, double sum_sq, std::size_t count) {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  return std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
}

}  // namespace

Estimate simple_estimate(std::span<const double> values) {
  GroupSums s;
  for (double v : values) s.add(v);
  if (s.count == 0) return {};
  const double n = static_cast<double>(s.count);
  return {s.sum / n, std::sqrt(sample_variance(s.sum, s.sum_sq, s.count) / n)};
}

Estimate nested_estimate(std::span<const GroupSums> groups) {
  GroupSums means;
  for (const auto& g : groups) {
    if (g.count > 0) means.add(g.sum / static_cast<double>(g.count));
  }
  if (means.count == 0) return {};
  const double mean = means.sum / static_cast<double>(means.count);
  if (means.count >= 2) {
    const double var = sample_variance(means.sum, means.sum_sq, means.count);
    return {mean, std::sqrt(var / static_cast<double>(means.count))};
  }
  const GroupSums* only = nullptr;
  for (const auto& g : groups) {
    if (g.count > 0) only = &g;
  }
  const double var = sample_variance(only->sum, only->sum_sq, only->count);
  return {mean, std::sqrt(var / static_cast<double>(only->count))};
}

Estimate nested_estimate(const std::vector<std::vector<double>>& groups) {
  std::vector<GroupSums> sums(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (double v : groups[g]) sums[g].add(v);
  }
  return nested_estimate(sums);
}

std::vector<double> isotonic_fit(std::span<const double> values) {
  struct Block {
    double mean;
    std::size_t width;
  };
  std::vector<Block> blocks;
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double w = static_cast<double>(prev.width + top.width);
      prev.mean = (prev.mean * static_cast<double>(prev.width) + top.mean * static_cast<double>(top.width)) / w;
      prev.width += top.width;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.width, b.mean);
  return out;
}

}  // namespace pfwd
