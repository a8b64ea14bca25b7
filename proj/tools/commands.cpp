#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <spdlog/spdlog.h>

#include "pfwd/analysis.hpp"
#include "pfwd/forwarding.hpp"
#include "pfwd/io.hpp"
#include "pfwd/rgg.hpp"

namespace pfwd::cli {

namespace {

void emit(const ExperimentConfig& config, const std::string& content) {
  if (config.out.empty()) {
    std::cout << content << std::flush;
  } else {
    atomic_write(config.out, content);
  }
}

nlohmann::ordered_json config_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& line : provenance_lines(config)) {
    const auto eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

ThetaTable resolve_theta_table(const ExperimentConfig& config) {
  if (!config.theta_table.empty() && std::filesystem::exists(config.theta_table)) {
    spdlog::info("loading theta table {}", config.theta_table);
    return load_theta_table(config.theta_table);
  }
  spdlog::info("estimating theta table (grid {}:{}:{}, m={}, {} trials)", config.lambda_min, config.step,
               config.lambda_max, config.theta_m, config.theta_trials);
  ThetaTable table = estimate_theta_curve(config.theta_grid(), config.theta_m, config.theta_trials, config.seed,
                                          config.workers, config.smoothed);
  if (!config.theta_table.empty()) {
    save_theta_table(config.theta_table, table, provenance_lines(config));
    spdlog::info("saved theta table to {}", config.theta_table);
  }
  return table;
}

int cmd_theta(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const ThetaTable table = estimate_theta_curve(config.theta_grid(), config.theta_m, config.theta_trials,
                                                config.seed, config.workers, config.smoothed);
  emit(config, render_theta_table(table, provenance_lines(config)));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  spdlog::info("theta: {} grid points, {:.1f} s, max std_err {:.3g}, isotonic check {}", table.size(), secs,
               table.max_std_err(), table.passes_isotonic_check() ? "passed" : "FAILED");
  return 0;
}

int cmd_sweep(const ExperimentConfig& config) {
  SweepSpec spec;
  spec.k = config.k;
  spec.delta = config.delta;
  spec.n_values = config.n_values();
  spec.method = config.method;
  spec.trials = config.trials();
  spec.condition = config.condition;

  std::optional<ThetaTable> table;
  if (config.method == Method::kMeanField || !config.theta_table.empty()) table = resolve_theta_table(config);

  const auto rows = sweep(config.domain(), spec, table ? &*table : nullptr, config.seed);
  for (const auto& row : rows) {
    if (!row.reachable) {
      spdlog::warn("n={}: near-broadcast unreachable (success at p=1 is {:.4f} < {:.4f})", row.n,
                   row.success_at_p, 1.0 - config.delta);
      continue;
    }
    spdlog::info("n={} p_min={:.4f} success={:.4f}+-{:.4f} tau/node={:.4f} formula tau/node={:.4f}", row.n,
                 row.p_min, row.success_at_p, row.success_std_err, row.tau_per_node,
                 row.tau_formula / (config.lambda * config.m * config.m));
  }
  emit(config, render_sweep_csv(rows, provenance_lines(config)));
  return 0;
}

nlohmann::ordered_json simulate_report(const ExperimentConfig& config) {
  const Rgg rgg = build_rgg(sample_ppp(config.domain(), {config.seed, 0, 0}));
  const ForwardingParams params = config.forwarding();
  const std::uint64_t fwd_trial = forwarding_trial_id(0, 0);
  const ForwardingResult res = forward_n_packets(rgg, params, {config.seed, fwd_trial, 0});
  const ClusterLabeling labels = components(rgg.graph);

  nlohmann::ordered_json j;
  j["config"] = config_json(config);
  j["seed"] = {{"master_seed", config.seed}, {"geometry_trial", 0}, {"geometry_stream", 0},
               {"forwarding_trial", fwd_trial}, {"packet_streams", "1.." + std::to_string(params.n_packets)}};
  j["point_count"] = rgg.size();
  j["source_degree"] = rgg.graph.degree(rgg.source());
  j["source_component_size"] = labels.size_of(labels.label[rgg.source()]);
  j["largest_component_fraction"] =
      static_cast<double>(labels.largest_size()) / static_cast<double>(rgg.size());
  j["n_packets"] = params.n_packets;
  j["k_decode"] = params.k_decode;
  j["forward_prob"] = params.forward_prob;
  j["successful_receivers"] = res.successful_receivers;
  j["success_fraction"] = static_cast<double>(res.successful_receivers) / static_cast<double>(rgg.size());
  j["total_transmissions"] = res.total_transmissions;
  auto packets = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < res.packet_counts.size(); ++i) {
    packets.push_back({{"packet", i + 1},
                       {"transmitters", res.packet_counts[i].transmitters},
                       {"receivers", res.packet_counts[i].receivers}});
  }
  j["packets"] = packets;
  return j;
}

int cmd_simulate(const ExperimentConfig& config, const std::string& graph_out) {
  emit(config, dump(simulate_report(config)));
  if (!graph_out.empty()) {
    const Rgg rgg = build_rgg(sample_ppp(config.domain(), {config.seed, 0, 0}));
    std::ostringstream ss;
    write_edge_list(ss, rgg);
    atomic_write(graph_out, ss.str());
  }
  return 0;
}

nlohmann::ordered_json diagnostics_json(const ExperimentConfig& config, const DiagnosticReport& report) {
  nlohmann::ordered_json j;
  j["config"] = config_json(config);
  j["regime"] = report.supercritical ? "supercritical" : "subcritical";
  j["z_limit"] = 5.0;
  j["passed"] = report.passed(5.0);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    const char* status = !r.applicable ? "not applicable" : (std::fabs(r.z) <= 5.0 ? "pass" : "fail");
    rows.push_back({{"name", r.name},
                    {"predicted", r.predicted},
                    {"estimate", r.estimate},
                    {"std_err", r.std_err},
                    {"z", std::isfinite(r.z) ? nlohmann::ordered_json(r.z) : nlohmann::ordered_json(nullptr)},
                    {"status", status}});
  }
  j["rows"] = rows;
  return j;
}

int cmd_diagnostics(const ExperimentConfig& config) {
  const ThetaTable table = resolve_theta_table(config);
  const DiagnosticReport report =
      ergodic_diagnostics(config.domain(), config.p, config.diag_trials, config.seed, table, config.workers);
  spdlog::info("regime: {} (lambda p = {})", report.supercritical ? "supercritical" : "subcritical",
               config.lambda * config.p);
  for (const auto& r : report.rows) {
    if (r.applicable) {
      spdlog::info("{:<24} predicted {:>10.5f} estimate {:>10.5f} se {:.2e} z {:+.2f}", r.name, r.predicted,
                   r.estimate, r.std_err, r.z);
    } else {
      spdlog::info("{:<24} not applicable (sub-critical)", r.name);
    }
  }
  emit(config, dump(diagnostics_json(config, report)));
  return report.passed(5.0) ? 0 : 1;
}

}  // namespace pfwd::cli
