#pragma once

#include <cstdint>
#include <limits>

namespace pfwd {

/// Address of one random stream: (experiment seed, trial, stream).
/// Stream 0 drives geometry; stream j >= 1 drives the marks of packet j.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_id = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Trial id used for forwarding repetition `fwd` on graph `graph`.
/// Forwarding streams are always >= 1, so they never alias the geometry
/// stream of any trial.
constexpr std::uint64_t forwarding_trial_id(std::uint64_t graph, std::uint64_t fwd) {
  return (graph << 32) | fwd;
}

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw i is a pure function of (key, i).
///
/// Satisfies UniformRandomBitGenerator for sequential use, and offers
/// random access through `at()` so per-node draws can be addressed by node
/// index (common random numbers across parameter values).
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return at(counter_++); }

  result_type at(std::uint64_t index) const {
    return mix64(key_ + (index + 1) * kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return to_unit(operator()()); }
  double uniform_at(std::uint64_t index) const { return to_unit(at(index)); }

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

  static constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream for a seed triple. Distinct triples give unrelated keys; the same
/// triple always gives the same stream.
CounterRng derive_stream(const SeedSpec& seed);

/// Poisson variate. Inversion for small means, PTRS transformed rejection
/// (Hormann 1993) otherwise. Uses only `rng.uniform()`, so the result is
/// reproducible wherever the libm functions are.
std::uint64_t sample_poisson(double mean, CounterRng& rng);

}  // namespace pfwd
