#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pfwd/pointproc.hpp"
#include "pfwd/stats.hpp"

namespace pfwd {

/// Critical intensity of the unit-disk model. Used for search bounds,
/// regime flags and assertions; never as a substitute for the estimated
/// curve.
inline constexpr double kCriticalIntensity = 1.44;

struct ThetaMeta {
  double window_m = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  bool smoothed = true;

  friend bool operator==(const ThetaMeta&, const ThetaMeta&) = default;
};

/// Empirical percolation-probability curve: largest-component fraction per
/// intensity. Stores raw estimates; when `meta.smoothed` is set, lookups go
/// through the isotonic fit of the raw values.
class ThetaTable {
public:
  ThetaTable() = default;
  ThetaTable(std::vector<double> lambda_grid, std::vector<double> theta_hat, std::vector<double> std_err,
             ThetaMeta meta);

  const std::vector<double>& lambda_grid() const { return lambda_; }
  const std::vector<double>& theta_hat() const { return theta_; }
  const std::vector<double>& std_err() const { return se_; }
  const ThetaMeta& meta() const { return meta_; }
  std::size_t size() const { return lambda_.size(); }

  /// Values used for interpolation (isotonic fit when smoothed, else raw).
  const std::vector<double>& curve() const { return curve_; }

  double max_std_err() const;

  /// Standard error of a mean over `trials` fractions that each move in
  /// steps of one point out of lambda m^2: the smallest error the estimate
  /// can resolve.
  double resolution(std::size_t i) const;

  /// Largest amount by which the isotonic fit moves a raw estimate beyond
  /// `k_se` standard errors (<= 0 means the curve is statistically
  /// monotone). Each standard error is floored at resolution(i), since
  /// near theta = 1 the sample error of a few trials can fall below it or
  /// vanish.
  double isotonic_excess(double k_se = 3.0) const;
  bool passes_isotonic_check(double k_se = 3.0) const { return isotonic_excess(k_se) <= 1e-12; }

  friend bool operator==(const ThetaTable& a, const ThetaTable& b) {
    return a.lambda_ == b.lambda_ && a.theta_ == b.theta_ && a.se_ == b.se_ && a.meta_ == b.meta_;
  }

private:
  std::vector<double> lambda_;
  std::vector<double> theta_;
  std::vector<double> se_;
  ThetaMeta meta_;
  std::vector<double> curve_;
};

/// Piecewise-linear lookup. 0 below the grid, the last value above it,
/// clipped to [0, 1].
double theta_at(const ThetaTable& table, double lam);

/// Interpolated standard error at `lam` (0 below the grid).
double theta_std_err_at(const ThetaTable& table, double lam);

/// Inclusive grid lambda_min, lambda_min + step, ..., <= lambda_max.
struct ThetaGrid {
  double lambda_min = 1.0;
  double lambda_max = 5.0;
  double step = 0.01;

  std::size_t size() const;
  double at(std::size_t i) const;
};

struct ThetaPreset {
  ThetaGrid grid;
  double window_m = 0.0;
  int trials = 0;
};

/// "fast": 1.0:0.05:5.0 on a side-101 window, 20 trials.
/// "paper": 1.0:0.01:5.0 on a side-251 window, 100 trials.
ThetaPreset theta_preset(const std::string& name);

/// Averages the largest-component fraction of `trials` independent graphs
/// per grid intensity. Grid point i, trial t uses geometry seed
/// (master_seed, forwarding_trial_id(i, t), 0).
ThetaTable estimate_theta_curve(const ThetaGrid& grid, double window_m, int trials, std::uint64_t master_seed,
                                unsigned workers = 1, bool smoothed = true);

/// Text format:
///   # m=<side> trials=<int> seed=<int> smoothed=<bool>
///   [# free-form provenance lines]
///   lambda,theta_hat,std_err
///   <rows>
void write_theta_table(std::ostream& os, const ThetaTable& table, const std::vector<std::string>& provenance = {});
ThetaTable read_theta_table(std::istream& is);
std::string render_theta_table(const ThetaTable& table, const std::vector<std::string>& provenance = {});
void save_theta_table(const std::filesystem::path& path, const ThetaTable& table,
                      const std::vector<std::string>& provenance = {});
ThetaTable load_theta_table(const std::filesystem::path& path);

struct DiagnosticRow {
  std::string name;
  double predicted = 0.0;
  double estimate = 0.0;
  double std_err = 0.0;
  double z = 0.0;
  bool applicable = true;
};

struct DiagnosticReport {
  SimDomain domain;
  double forward_prob = 0.0;
  int trials = 0;
  bool supercritical = false;  // lambda * p > critical intensity
  std::vector<DiagnosticRow> rows;

  /// True when every applicable row has |z| <= z_max.
  bool passed(double z_max = 5.0) const;
};

/// Monte Carlo checks of the ergodic limits on one window:
///   point density          -> lambda
///   relaying-node density  -> lambda p
///   largest relaying cluster / points  -> p theta(lambda p)
///   its extended cluster / points      -> theta(lambda p)
/// Cluster rows are marked not applicable in the sub-critical regime.
/// z-scores combine the Monte Carlo error with the table's error.
DiagnosticReport ergodic_diagnostics(const SimDomain& domain, double p, int trials, std::uint64_t master_seed,
                                     const ThetaTable& table, unsigned workers = 1);

}  // namespace pfwd
