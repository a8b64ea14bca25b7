#pragma once

#include <nlohmann/json.hpp>

#include "pfwd/config.hpp"
#include "pfwd/percolation.hpp"

namespace pfwd::cli {

/// Loads config.theta_table when it exists; otherwise estimates a table from
/// the config's grid settings and, if a path was given, saves it there.
ThetaTable resolve_theta_table(const ExperimentConfig& config);

nlohmann::ordered_json simulate_report(const ExperimentConfig& config);
nlohmann::ordered_json diagnostics_json(const ExperimentConfig& config, const DiagnosticReport& report);

/// Each command writes its output to config.out (stdout when empty) and
/// returns the process exit code. Progress goes to the log (stderr).
int cmd_theta(const ExperimentConfig& config);
int cmd_sweep(const ExperimentConfig& config);
int cmd_simulate(const ExperimentConfig& config, const std::string& graph_out = {});
int cmd_diagnostics(const ExperimentConfig& config);

}  // namespace pfwd::cli
