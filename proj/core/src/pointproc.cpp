#include "pfwd/pointproc.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pfwd {

void SimDomain::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(side_m)) throw std::invalid_argument("window side m must be finite and positive");
  if (!positive(intensity_lambda)) throw std::invalid_argument("intensity lambda must be finite and positive");
  if (!positive(radius_r)) throw std::invalid_argument("radius r must be finite and positive");
  if (side_m < 2.0 * radius_r) throw std::invalid_argument("window side m must be at least 2r");
}

PointSet::PointSet(SimDomain domain, std::vector<Point> coords, std::size_t source_index)
    : domain_(domain), coords_(std::move(coords)), source_index_(source_index) {
  if (source_index_ >= coords_.size()) throw std::invalid_argument("source index out of range");
}

PointSet sample_ppp(const SimDomain& domain, const SeedSpec& seed) {
  domain.validate();
  if (seed.stream_id != 0) throw std::invalid_argument("geometry must be drawn from stream 0");

  CounterRng rng = derive_stream(seed);
  const auto count = static_cast<std::size_t>(sample_poisson(domain.expected_points(), rng));

  const double half = 0.5 * domain.side_m;
  std::vector<Point> coords;
  coords.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = -half + domain.side_m * rng.uniform();
    const double y = -half + domain.side_m * rng.uniform();
    coords.push_back({x, y});
  }
  coords.push_back({0.0, 0.0});
  return PointSet(domain, std::move(coords), count);
}

}  // namespace pfwd
