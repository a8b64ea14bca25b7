#include "pfwd/random.hpp"

#include <cmath>
#include <stdexcept>

namespace pfwd {

CounterRng derive_stream(const SeedSpec& seed) {
  std::uint64_t h = mix64(seed.master_seed ^ 0x6a09e667f3bcc908ULL);
  h = mix64(h ^ mix64(seed.trial_id + 0xbb67ae8584caa73bULL));
  h = mix64(h ^ mix64(seed.stream_id + 0x3c6ef372fe94f82bULL));
  return CounterRng(h);
}

std::uint64_t sample_poisson(double mean, CounterRng& rng) {
  if (!std::isfinite(mean) || mean < 0.0) {
    throw std::invalid_argument("poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;

  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    double prod = rng.uniform();
    std::uint64_t k = 0;
    while (prod > limit) {
      prod *= rng.uniform();
      ++k;
    }
    return k;
  }

  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace pfwd
