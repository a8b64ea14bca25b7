#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pfwd/random.hpp"

namespace pfwd {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Square observation window [-m/2, m/2]^2 populated at intensity lambda,
/// with connection radius r.
struct SimDomain {
  double side_m = 101.0;
  double intensity_lambda = 4.5;
  double radius_r = 1.0;

  double area() const { return side_m * side_m; }
  double expected_points() const { return intensity_lambda * area(); }

  /// Throws std::invalid_argument on non-finite or non-positive fields, or
  /// when the window is smaller than one connection diameter.
  void validate() const;

  friend bool operator==(const SimDomain&, const SimDomain&) = default;
};

/// A sampled Poisson process plus the source pinned at the origin.
/// Immutable once built.
class PointSet {
public:
  PointSet(SimDomain domain, std::vector<Point> coords, std::size_t source_index);

  const SimDomain& domain() const { return domain_; }
  const std::vector<Point>& coords() const { return coords_; }
  std::size_t size() const { return coords_.size(); }
  std::size_t source_index() const { return source_index_; }

  /// Number of sampled points, excluding the source.
  std::size_t sampled_count() const { return coords_.size() - 1; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

private:
  SimDomain domain_;
  std::vector<Point> coords_;
  std::size_t source_index_;
};

/// Draws N ~ Poisson(lambda m^2) uniform points on the window from the
/// geometry stream of `seed`, then appends the source at (0,0).
/// `seed.stream_id` must be 0.
PointSet sample_ppp(const SimDomain& domain, const SeedSpec& seed);

}  // namespace pfwd
