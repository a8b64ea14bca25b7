#include "pfwd/config.hpp"

#include <sstream>
#include <stdexcept>

#include "pfwd/io.hpp"

namespace pfwd {

std::string to_string(Condition condition) { return condition == Condition::kGiant ? "giant" : "none"; }

Condition parse_condition(const std::string& text) {
  if (text == "none") return Condition::kNone;
  if (text == "giant") return Condition::kGiant;
  throw std::invalid_argument("unknown condition '" + text + "' (expected none or giant)");
}

std::vector<int> ExperimentConfig::n_values() const {
  if (n_last < n_first) throw std::invalid_argument("n range is empty");
  std::vector<int> out;
  for (int n = n_first; n <= n_last; ++n) out.push_back(n);
  return out;
}

void apply_preset(ExperimentConfig& config, const std::string& name) {
  const ThetaPreset preset = theta_preset(name);
  config.preset = name;
  config.lambda_min = preset.grid.lambda_min;
  config.lambda_max = preset.grid.lambda_max;
  config.step = preset.grid.step;
  config.theta_m = preset.window_m;
  config.theta_trials = preset.trials;
}

std::pair<int, int> parse_n_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const int n = static_cast<int>(parse_int(text));
    return {n, n};
  }
  const int a = static_cast<int>(parse_int(text.substr(0, dots)));
  const int b = static_cast<int>(parse_int(text.substr(dots + 2)));
  if (b < a) throw std::invalid_argument("n range '" + std::string(text) + "' is empty");
  return {a, b};
}

std::string format_n_range(int first, int last) {
  return first == last ? std::to_string(first) : std::to_string(first) + ".." + std::to_string(last);
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  const std::string v(value);
  auto as_int = [&] { return static_cast<int>(parse_int(value)); };
  if (key == "lambda") c.lambda = parse_double(value);
  else if (key == "m") c.m = parse_double(value);
  else if (key == "r") c.r = parse_double(value);
  else if (key == "k") c.k = as_int();
  else if (key == "n") std::tie(c.n_first, c.n_last) = parse_n_range(value);
  else if (key == "delta") c.delta = parse_double(value);
  else if (key == "p") c.p = parse_double(value);
  else if (key == "graph_trials") c.graph_trials = as_int();
  else if (key == "fwd_trials") c.fwd_trials = as_int();
  else if (key == "diag_trials") c.diag_trials = as_int();
  else if (key == "preset") apply_preset(c, v);
  else if (key == "lambda_min") c.lambda_min = parse_double(value);
  else if (key == "lambda_max") c.lambda_max = parse_double(value);
  else if (key == "step") c.step = parse_double(value);
  else if (key == "theta_m") c.theta_m = parse_double(value);
  else if (key == "theta_trials") c.theta_trials = as_int();
  else if (key == "smoothed") c.smoothed = parse_bool(value);
  else if (key == "theta_table") c.theta_table = v;
  else if (key == "method") c.method = parse_method(v);
  else if (key == "condition") c.condition = parse_condition(v);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(value));
  else if (key == "out") c.out = v;
  else if (key == "workers") c.workers = static_cast<unsigned>(std::max(1, as_int()));
  else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::pair<std::string, std::string>> config_items(const ExperimentConfig& c, bool with_execution) {
  std::vector<std::pair<std::string, std::string>> items = {
      {"lambda", format_shortest(c.lambda)},
      {"m", format_shortest(c.m)},
      {"r", format_shortest(c.r)},
      {"k", std::to_string(c.k)},
      {"n", format_n_range(c.n_first, c.n_last)},
      {"delta", format_shortest(c.delta)},
      {"p", format_shortest(c.p)},
      {"graph_trials", std::to_string(c.graph_trials)},
      {"fwd_trials", std::to_string(c.fwd_trials)},
      {"diag_trials", std::to_string(c.diag_trials)},
      {"preset", c.preset},
      {"lambda_min", format_shortest(c.lambda_min)},
      {"lambda_max", format_shortest(c.lambda_max)},
      {"step", format_shortest(c.step)},
      {"theta_m", format_shortest(c.theta_m)},
      {"theta_trials", std::to_string(c.theta_trials)},
      {"smoothed", c.smoothed ? "true" : "false"},
      {"theta_table", c.theta_table},
      {"method", to_string(c.method)},
      {"condition", to_string(c.condition)},
      {"seed", std::to_string(c.seed)},
  };
  if (with_execution) {
    items.emplace_back("out", c.out);
    items.emplace_back("workers", std::to_string(c.workers));
  }
  return items;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::vector<std::pair<std::string, std::string>> items;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + " is not key=value");
    }
    items.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  // A preset rewrites several keys, so it goes first and explicit keys win.
  for (const auto& [key, value] : items) {
    if (key == "preset") set_config_value(base, key, value);
  }
  for (const auto& [key, value] : items) {
    if (key != "preset") set_config_value(base, key, value);
  }
  return base;
}

std::string render_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_items(config, true)) out += key + "=" + value + "\n";
  return out;
}

std::vector<std::string> provenance_lines(const ExperimentConfig& config) {
  std::vector<std::string> out;
  for (const auto& [key, value] : config_items(config, false)) out.push_back(key + "=" + value);
  return out;
}

}  // namespace pfwd
