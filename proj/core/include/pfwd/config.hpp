#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pfwd/analysis.hpp"
#include "pfwd/forwarding.hpp"

namespace pfwd {

std::string to_string(Condition condition);
Condition parse_condition(const std::string& text);  // "none" | "giant"

/// Every knob of every experiment. Text form is one `key=value` per line;
/// `#` starts a comment line.
struct ExperimentConfig {
  // Geometry.
  double lambda = 4.5;
  double m = 101.0;
  double r = 1.0;
  // Protocol.
  int k = 20;
  int n_first = 20;
  int n_last = 40;
  double delta = 0.1;
  double p = 0.6;
  // Monte Carlo effort.
  int graph_trials = 10;
  int fwd_trials = 20;
  int diag_trials = 100;
  // Percolation-curve estimation.
  std::string preset = "fast";
  double lambda_min = 1.0;
  double lambda_max = 5.0;
  double step = 0.05;
  double theta_m = 101.0;
  int theta_trials = 20;
  bool smoothed = true;
  std::string theta_table;
  // Execution.
  Method method = Method::kSimulated;
  Condition condition = Condition::kNone;
  std::uint64_t seed = 1;
  std::string out;
  unsigned workers = 1;

  SimDomain domain() const { return {m, lambda, r}; }
  ForwardingParams forwarding() const { return {n_first, k, p}; }
  TrialsSpec trials() const { return {graph_trials, fwd_trials, workers}; }
  ThetaGrid theta_grid() const { return {lambda_min, lambda_max, step}; }
  std::vector<int> n_values() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Overwrites the percolation-curve fields with a named preset.
void apply_preset(ExperimentConfig& config, const std::string& name);

/// Assigns one key. Throws std::invalid_argument for unknown keys or
/// malformed values. Setting `preset` also applies it.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Applies the `key=value` lines of `text` on top of `base`.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
std::string render_config(const ExperimentConfig& config);

/// Resolved settings echoed into output headers. Leaves out the keys that
/// only affect execution (workers, out), so outputs depend on the experiment
/// alone.
std::vector<std::string> provenance_lines(const ExperimentConfig& config);

/// "a..b" or a single integer.
std::pair<int, int> parse_n_range(std::string_view text);
std::string format_n_range(int first, int last);

}  // namespace pfwd
