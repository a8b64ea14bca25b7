// pfwd: probabilistic forwarding of coded packets on random geometric graphs.
//
//   pfwd theta       --preset fast --out theta.csv
//   pfwd sweep       --method mean-field --theta-table theta.csv --out sweep.csv
//   pfwd simulate    --n 20 --k 20 --p 0.6 --out run.json
//   pfwd diagnostics --lambda 4.5 --p 0.6 --theta-table theta.csv

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "pfwd/io.hpp"
#include "pfwd/parallel.hpp"

namespace {

// Flag name -> config key, per subcommand. Values stay strings and go
// through the same setter as config files.
struct FlagSet {
  std::map<std::string, std::optional<std::string>> values;
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::vector<std::pair<std::string, std::string>> bindings;  // (flag, key)
};

void bind(CLI::App* app, FlagSet& flags, const std::string& flag, const std::string& key, const std::string& help) {
  flags.bindings.emplace_back(flag, key);
  app->add_option("--" + flag, flags.values[flag], help);
}

void add_common(CLI::App* app, FlagSet& flags) {
  app->add_option("--config", flags.config_path, "key=value config file; flags override it");
  app->add_option("--preset", flags.preset, "theta-table preset: fast or paper");
  bind(app, flags, "lambda", "lambda", "intensity (points per unit area)");
  bind(app, flags, "r", "r", "connection radius");
  bind(app, flags, "k", "k", "packets needed to decode");
  bind(app, flags, "n", "n", "coded packets: N or A..B");
  bind(app, flags, "delta", "delta", "allowed non-decoding fraction");
  bind(app, flags, "p", "p", "forwarding probability");
  bind(app, flags, "seed", "seed", "master seed");
  bind(app, flags, "workers", "workers", "worker threads (default: all cores)");
  bind(app, flags, "theta-table", "theta_table", "theta table path (generated there if missing)");
  bind(app, flags, "method", "method", "simulated or mean-field");
  bind(app, flags, "condition", "condition", "none or giant");
  bind(app, flags, "out", "out", "output path (default: stdout)");
  bind(app, flags, "graph-trials", "graph_trials", "graph realizations");
  bind(app, flags, "fwd-trials", "fwd_trials", "forwarding runs per graph");
  bind(app, flags, "lambda-min", "lambda_min", "theta grid start");
  bind(app, flags, "lambda-max", "lambda_max", "theta grid end");
  bind(app, flags, "step", "step", "theta grid step");
  bind(app, flags, "smoothed", "smoothed", "isotonic smoothing of theta (true/false)");
}

pfwd::ExperimentConfig resolve(const FlagSet& flags) {
  pfwd::ExperimentConfig config;
  config.workers = pfwd::default_workers();
  if (flags.config_path) config = pfwd::parse_config(pfwd::read_file(*flags.config_path), config);
  if (flags.preset) pfwd::apply_preset(config, *flags.preset);
  for (const auto& [flag, key] : flags.bindings) {
    const auto& value = flags.values.at(flag);
    if (value) pfwd::set_config_value(config, key, *value);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("pfwd"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Probabilistic forwarding of coded packets on random geometric graphs"};
  app.require_subcommand(1);

  FlagSet theta_flags;
  FlagSet sweep_flags;
  FlagSet sim_flags;
  FlagSet diag_flags;
  std::string graph_out;

  auto* theta = app.add_subcommand("theta", "estimate the percolation curve and write it as CSV");
  add_common(theta, theta_flags);
  bind(theta, theta_flags, "m", "theta_m", "window side for the estimate");
  bind(theta, theta_flags, "trials", "theta_trials", "graphs per grid point");

  auto* sweep = app.add_subcommand("sweep", "minimum forwarding probability and transmissions per n");
  add_common(sweep, sweep_flags);
  bind(sweep, sweep_flags, "m", "m", "window side");

  auto* simulate = app.add_subcommand("simulate", "one graph, one forwarding run, JSON report");
  add_common(simulate, sim_flags);
  bind(simulate, sim_flags, "m", "m", "window side");
  simulate->add_option("--graph-out", graph_out, "also write the graph as an edge list");

  auto* diagnostics = app.add_subcommand("diagnostics", "Monte Carlo checks of the ergodic limits");
  add_common(diagnostics, diag_flags);
  bind(diagnostics, diag_flags, "m", "m", "window side");
  bind(diagnostics, diag_flags, "trials", "diag_trials", "independent graphs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*theta) return pfwd::cli::cmd_theta(resolve(theta_flags));
    if (*sweep) return pfwd::cli::cmd_sweep(resolve(sweep_flags));
    if (*simulate) return pfwd::cli::cmd_simulate(resolve(sim_flags), graph_out);
    if (*diagnostics) return pfwd::cli::cmd_diagnostics(resolve(diag_flags));
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return EXIT_FAILURE;
}
