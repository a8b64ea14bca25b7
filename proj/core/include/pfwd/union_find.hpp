#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace pfwd {

/// Disjoint sets over 0..n-1 with path halving and union by size.
class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::int32_t{0});
  }

  std::int32_t find(std::int32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns the surviving root. The larger set absorbs the smaller; on a
  /// size tie the smaller root index survives.
  std::int32_t unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

  std::int32_t set_size(std::int32_t x) { return size_[find(x)]; }
  std::size_t size() const { return parent_.size(); }

private:
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> size_;
};

}  // namespace pfwd
