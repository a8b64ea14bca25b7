#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pfwd/forwarding.hpp"
#include "pfwd/percolation.hpp"
#include "pfwd/pointproc.hpp"
#include "pfwd/stats.hpp"

namespace pfwd {

enum class Method { kSimulated, kMeanField };

std::string to_string(Method method);
Method parse_method(const std::string& text);  // "simulated" | "mean-field"

/// Outcome of a search for the smallest forwarding probability that
/// delivers at least k of n packets to a 1 - delta fraction of points.
struct PSearchResult {
  bool reachable = false;
  double p_min = 0.0;  // NaN when unreachable
  double lo = 0.0;     // final bracket
  double hi = 0.0;
  Estimate success;    // at p_min (at p = 1 when unreachable)
  double mean_transmissions = 0.0;  // simulated searches only
  int evaluations = 0;
};

/// Search interval lower end: the forwarding probability at which the
/// relaying process becomes critical, capped at 1.
double supercritical_floor(double lam);

/// Success and transmission statistics on a dyadic grid of forwarding
/// probabilities, built from common random numbers.
///
/// Each (graph, forwarding) trial fixes one uniform draw per node and packet.
/// A single pass per packet computes the probability threshold at which each
/// node transmits and receives, so the outcome at every grid value of p (and
/// for every n in the requested set, since packets 1..n are shared) follows
/// without re-simulation. Results equal those of `success_fraction` and
/// `forward_n_packets` at the same p exactly.
class CrnProfile {
public:
  CrnProfile(const SimDomain& domain, int k, std::vector<int> n_values, const TrialsSpec& trials,
             std::uint64_t master_seed, Condition condition, double p_lo, double p_hi, int depth);

  std::size_t grid_size() const { return grid_size_; }
  double p_at(std::size_t i) const;
  const std::vector<int>& n_values() const { return n_values_; }

  Estimate success(std::size_t n_index, std::size_t grid_index) const;
  /// Mean total transmissions per forwarding run.
  double mean_transmissions(std::size_t n_index, std::size_t grid_index) const;

  /// Grid index of the first point with threshold < p_i, i.e. the bin a
  /// threshold falls into. Returns grid_size() when no grid value exceeds it.
  std::size_t bin_of(double threshold) const;

private:
  struct GraphAccum {
    double denominator = 0.0;
    std::vector<std::uint64_t> hits;       // [n_index * grid + i], summed over fwd trials
    std::vector<double> hits_sq;           // same layout, sum of squared hit counts
    std::vector<std::uint64_t> transmissions;
  };

  GraphAccum run_graph(std::size_t g, const SimDomain& domain, int k, const TrialsSpec& trials,
                       std::uint64_t master_seed, Condition condition) const;

  std::vector<int> n_values_;
  double p_lo_;
  double p_hi_;
  std::size_t steps_;  // grid_size_ - 1
  std::size_t grid_size_;
  int fwd_trials_;
  std::vector<GraphAccum> graphs_;
};

/// Monotone bisection of the simulated success curve over
/// (supercritical_floor(lambda), 1] with common random numbers. Stops once
/// the bracket is no wider than `tolerance`, or when the success estimate at
/// a midpoint is within one standard error of 1 - delta.
PSearchResult min_forward_prob_simulated(const SimDomain& domain, int k, int n, double delta,
                                         const TrialsSpec& trials, std::uint64_t master_seed,
                                         Condition condition = Condition::kNone, double tolerance = 1e-3);

/// Same search on a prebuilt profile (n_index selects n).
PSearchResult search_profile(const CrnProfile& profile, std::size_t n_index, double delta, double tolerance);

/// Grid depth such that bisection down to `tolerance` lands on grid points,
/// including the midpoint of the final bracket.
int profile_depth(double p_lo, double p_hi, double tolerance);

/// Expected total transmissions n m^2 lambda p theta(lambda p)^2.
double tau_estimate(int n, double m, double lam, double p, const ThetaTable& table);

/// P(Y >= k) for Y ~ Binomial(n, q), summed from the mode outward with a
/// ratio recurrence so no factorial is ever formed.
double binomial_tail(int n, double q, int k);

/// Mean-field threshold: smallest p in (supercritical_floor(lambda), 1] with
/// binomial_tail(n, theta(lambda p)^2, k) >= 1 - delta, to `tolerance`.
PSearchResult mean_field_p(int k, int n, double delta, double lam, const ThetaTable& table,
                           double tolerance = 1e-4);

/// Fraction of points lying in at least k of the first t extended giant
/// clusters, for all 1 <= k <= t <= n.
struct ThetaExtEstimates {
  int n = 0;
  double forward_prob = 0.0;
  bool supercritical = false;
  std::vector<Estimate> table;  // index (t-1)*n + (k-1)
  /// Per-trial flat tables grouped by graph: samples[g][f][(t-1)*n + (k-1)].
  std::vector<std::vector<std::vector<double>>> samples;

  const Estimate& at(int k, int t) const;
  bool has(int k, int t) const { return k >= 1 && t >= k && t <= n; }
};

/// For each trial: one graph, n independent mark assignments (source always
/// relays); per packet the largest relaying cluster stands in for the
/// infinite one and its extended cluster for the receivers.
ThetaExtEstimates estimate_theta_kn_ext(const SimDomain& domain, int n, double p, const TrialsSpec& trials,
                                        std::uint64_t master_seed);

/// sum_{t=k}^{n-1} th(k,t) (th(t,n) - th(t+1,n)) + th(k,n) th(n,n) on the mean
/// estimates. Negative differences are clamped to 0 with a warning.
double receiver_formula(const ThetaExtEstimates& est, int k);

/// The same expression evaluated per trial, aggregated as a nested estimate,
/// so it carries a standard error.
Estimate receiver_formula_estimate(const ThetaExtEstimates& est, int k);

/// (theta(lambda p)^n,
///  1 - prod_{j=k}^{n} (1 - theta(lambda p^j (1-p)^{n-j}))^{C(n,j)})
std::pair<double, double> theta_ext_lower_bounds(int k, int n, double p, double lam, const ThetaTable& table);

struct SweepRow {
  int n = 0;
  double p_min = 0.0;
  double success_at_p = 0.0;
  double tau = 0.0;  // simulated mean transmissions, or the formula for mean-field rows
  double tau_per_node = 0.0;
  Method method = Method::kSimulated;

  bool reachable = true;
  double success_std_err = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double tau_formula = 0.0;  // tau_estimate at p_min (NaN without a table)
};

struct SweepSpec {
  int k = 20;
  double delta = 0.1;
  std::vector<int> n_values;
  Method method = Method::kSimulated;
  TrialsSpec trials;
  Condition condition = Condition::kNone;
  double sim_tolerance = 1e-3;
  double mean_field_tolerance = 1e-4;
};

/// One row per n. Simulated sweeps share one set of common random numbers
/// across all n and p. `table` is required for mean-field sweeps and optional
/// otherwise (it fills tau_formula). Unreachable rows carry NaN p_min.
std::vector<SweepRow> sweep(const SimDomain& domain, const SweepSpec& spec, const ThetaTable* table,
                            std::uint64_t master_seed);

/// CSV with header n,p_min,success_at_p,tau,tau_per_node,method and reals
/// printed to 6 significant digits.
std::string render_sweep_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& provenance = {});

}  // namespace pfwd
