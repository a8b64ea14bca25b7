// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
//
//   pfwd_acceptance [--workdir DIR] [--workers N] [--only 1,4,9]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <sys/wait.h>

#include <fmt/format.h>

#include "oracles.hpp"
#include "pfwd/analysis.hpp"
#include "pfwd/forwarding.hpp"
#include "pfwd/io.hpp"
#include "pfwd/parallel.hpp"
#include "pfwd/percolation.hpp"
#include "pfwd/random.hpp"
#include "pfwd/rgg.hpp"

namespace fs = std::filesystem;
using namespace pfwd;

namespace {

constexpr std::uint64_t kSeed = 1;
const SimDomain kDomain{101.0, 4.5, 1.0};

struct Context {
  fs::path workdir;
  unsigned workers = 1;
  std::set<int> only;

  // Shared between criteria, computed on first use.
  std::optional<ThetaTable> fast_table;
  double fast_table_seconds = 0.0;
  std::optional<std::vector<SweepRow>> sim_rows;
  std::optional<std::vector<SweepRow>> mf_rows;
  double sweep_seconds = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void note(const std::string& line) { std::printf("    %s\n", line.c_str()); }

const ThetaTable& fast_table(Context& ctx) {
  if (!ctx.fast_table) {
    const ThetaPreset preset = theta_preset("fast");
    const auto t0 = std::chrono::steady_clock::now();
    ctx.fast_table = estimate_theta_curve(preset.grid, preset.window_m, preset.trials, kSeed, ctx.workers, true);
    ctx.fast_table_seconds = seconds_since(t0);
  }
  return *ctx.fast_table;
}

void run_sweeps(Context& ctx) {
  if (ctx.sim_rows) return;
  SweepSpec spec;
  spec.k = 20;
  spec.delta = 0.1;
  for (int n = 20; n <= 40; ++n) spec.n_values.push_back(n);
  spec.trials = {10, 20, ctx.workers};
  const ThetaTable& table = fast_table(ctx);

  const auto t0 = std::chrono::steady_clock::now();
  ctx.sim_rows = sweep(kDomain, spec, &table, kSeed);
  ctx.sweep_seconds = seconds_since(t0);

  spec.method = Method::kMeanField;
  ctx.mf_rows = sweep(kDomain, spec, &table, kSeed);

  note("   n    p_min  success    p_mf   tau/node  formula/node");
  for (std::size_t i = 0; i < ctx.sim_rows->size(); ++i) {
    const SweepRow& s = (*ctx.sim_rows)[i];
    const SweepRow& m = (*ctx.mf_rows)[i];
    note(fmt::format("{:4d}  {:7.4f}  {:6.4f}  {:7.4f}  {:8.4f}  {:8.4f}", s.n, s.p_min, s.success_at_p, m.p_min,
                     s.tau_per_node, s.tau_formula / kDomain.expected_points()));
  }
  note(fmt::format("sweep runtime {:.1f} s", ctx.sweep_seconds));
}

// ---------------------------------------------------------------------------

bool criterion_1(Context& ctx) {
  run_sweeps(ctx);
  bool ok = ctx.sweep_seconds <= 30 * 60;
  double worst = 1.0;
  for (const auto& r : *ctx.sim_rows) {
    ok = ok && r.reachable && r.p_min > 0.32;
    worst = std::min(worst, r.reachable ? r.p_min : -1.0);
  }
  note(fmt::format("smallest p_min {:.4f} (needs > 0.32); runtime {:.0f} s (budget 1800 s)", worst,
                   ctx.sweep_seconds));
  return ok;
}

bool criterion_2(Context& ctx) {
  run_sweeps(ctx);
  const auto& sim = *ctx.sim_rows;
  const auto& mf = *ctx.mf_rows;
  int inversions = 0;
  double largest_rise = 0.0;
  for (std::size_t i = 1; i < sim.size(); ++i) {
    const double rise = sim[i].p_min - sim[i - 1].p_min;
    if (rise > 0.0) {
      ++inversions;
      largest_rise = std::max(largest_rise, rise);
    }
  }
  const bool monotone = inversions == 0 || (inversions == 1 && largest_rise <= 0.01);

  double worst_gap = 0.0;
  bool gap_ok = true;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (sim[i].n > 30) continue;
    if (!mf[i].reachable) {
      gap_ok = false;
      continue;
    }
    const double gap = std::abs(sim[i].p_min - mf[i].p_min);
    worst_gap = std::max(worst_gap, gap);
    gap_ok = gap_ok && gap <= 0.05;
  }
  note(fmt::format("inversions {} (largest rise {:.4f}); max |p_min - p_mf| over n<=30 = {:.4f} (<= 0.05)",
                   inversions, largest_rise, worst_gap));

  // Formula-vs-simulation transmissions, reported without a tolerance.
  for (const auto& r : sim) {
    if (r.n % 5 == 0) {
      note(fmt::format("n={} transmissions simulated {:.0f} vs formula {:.0f} (ratio {:.3f})", r.n, r.tau,
                       r.tau_formula, r.tau_formula / r.tau));
    }
  }
  return monotone && gap_ok;
}

bool criterion_3(Context& ctx) {
  run_sweeps(ctx);
  const auto& sim = *ctx.sim_rows;
  const auto best = std::min_element(sim.begin(), sim.end(),
                                     [](const SweepRow& a, const SweepRow& b) { return a.tau_per_node < b.tau_per_node; });
  note(fmt::format("minimum tau/node {:.4f} at n*={}; tau/node at n=20 is {:.4f}", best->tau_per_node, best->n,
                   sim.front().tau_per_node));
  return best->n > 20 && best->n < 40 && best->tau_per_node < sim.front().tau_per_node;
}

bool criterion_4(Context& ctx) {
  const ThetaTable& t = fast_table(ctx);
  auto raw = [&](double lam) {
    const auto& g = t.lambda_grid();
    const auto it = std::find_if(g.begin(), g.end(), [&](double x) { return std::abs(x - lam) < 1e-9; });
    return t.theta_hat()[static_cast<std::size_t>(it - g.begin())];
  };
  const double t10 = raw(1.0), t12 = raw(1.2), t18 = raw(1.8), t45 = raw(4.5);
  const double excess = t.isotonic_excess(3.0);
  note(fmt::format("theta(1.0)={:.4f} theta(1.2)={:.4f} theta(1.8)={:.4f} theta(4.5)={:.6f}", t10, t12, t18, t45));
  note(fmt::format("isotonic excess {:.3g} (<= 0 passes); runtime {:.0f} s (budget 900 s)", excess,
                   ctx.fast_table_seconds));
  return t10 < 0.02 && t12 < 0.2 && t18 > 0.5 && t45 > 0.99 && t.passes_isotonic_check() &&
         ctx.fast_table_seconds <= 15 * 60;
}

bool within(double est, double se, double target) {
  return std::abs(est - target) <= std::max(3.0 * se, 0.05 * std::abs(target));
}

bool criterion_5(Context& ctx) {
  const double p = 0.6;
  const int graphs = 20, per_graph = 10;
  const ThetaTable& table = fast_table(ctx);
  const double theta = theta_at(table, kDomain.intensity_lambda * p);

  struct PerGraph {
    std::vector<double> tx, rx;
  };
  const auto samples = parallel_map<PerGraph>(graphs, ctx.workers, [&](std::size_t g) {
    const Rgg rgg = build_rgg(sample_ppp(kDomain, {kSeed, g, 0}));
    PerGraph out;
    for (int f = 0; f < per_graph; ++f) {
      const CounterRng stream = derive_stream({kSeed, forwarding_trial_id(g, f), 1});
      const PacketOutcome o = forward_one_packet(rgg, p, stream);
      out.tx.push_back(static_cast<double>(o.transmitters.size()) / static_cast<double>(rgg.size()));
      out.rx.push_back(static_cast<double>(o.receivers.size()) / static_cast<double>(rgg.size()));
    }
    return out;
  });
  std::vector<std::vector<double>> tx, rx;
  for (const auto& s : samples) {
    tx.push_back(s.tx);
    rx.push_back(s.rx);
  }
  const Estimate et = nested_estimate(tx);
  const Estimate er = nested_estimate(rx);
  const double tx_target = p * theta * theta;
  note(fmt::format("transmitters {:.5f} +- {:.5f} vs p theta^2 = {:.5f}", et.mean, et.std_err, tx_target));
  note(fmt::format("receivers    {:.5f} +- {:.5f} vs theta    = {:.5f}", er.mean, er.std_err, theta));
  return within(et.mean, et.std_err, tx_target) && within(er.mean, er.std_err, theta);
}

bool criterion_6(Context& ctx) {
  const TrialsSpec trials{10, 20, ctx.workers};
  const ThetaExtEstimates est = estimate_theta_kn_ext(kDomain, 5, 0.6, trials, kSeed);
  const double point = receiver_formula(est, 3);
  const Estimate formula = receiver_formula_estimate(est, 3);
  const Estimate direct = success_fraction(kDomain, {5, 3, 0.6}, trials, kSeed + 1000);
  const double se = std::hypot(formula.std_err, direct.std_err);
  const double gap = std::abs(point - direct.mean);
  note(fmt::format("formula {:.5f} (+- {:.5f}) vs simulated {:.5f} +- {:.5f}; gap {:.5f}, allowed {:.5f}", point,
                   formula.std_err, direct.mean, direct.std_err, gap, 3.0 * se + 0.05 * direct.mean));
  return gap <= 3.0 * se + 0.05 * direct.mean;
}

bool criterion_7(Context& ctx) {
  const ThetaTable& table = fast_table(ctx);
  const TrialsSpec trials{10, 20, ctx.workers};
  bool ok = true;
  for (double p : {0.5, 0.6}) {
    std::map<int, ThetaExtEstimates> by_n;
    for (int n : {3, 5}) by_n.emplace(n, estimate_theta_kn_ext(kDomain, n, p, trials, kSeed));
    for (auto [k, n] : {std::pair{1, 3}, std::pair{2, 3}, std::pair{3, 5}}) {
      const Estimate sim = by_n.at(n).at(k, n);
      const auto [b1, b2] = theta_ext_lower_bounds(k, n, p, kDomain.intensity_lambda, table);
      const double cap = sim.mean + 2.0 * sim.std_err;
      const bool row = b1 <= cap && b2 <= cap;
      note(fmt::format("p={} k={} n={}: theta_ext {:.5f} +- {:.5f}; bounds {:.5f}, {:.5f} {}", p, k, n, sim.mean,
                       sim.std_err, b1, b2, row ? "ok" : "VIOLATED"));
      ok = ok && row;
    }
  }
  return ok;
}

bool criterion_8(Context&) {
  // (|T|, |R|, number of marked non-source nodes) -> count of mark vectors.
  using Histogram = std::map<std::tuple<std::size_t, std::size_t, int>, long>;
  const auto graphs = oracle::load_hand_graphs(PFWD_TEST_DATA_DIR "/hand_graphs");
  bool ok = !graphs.empty();
  for (const auto& hg : graphs) {
    const std::size_t n = hg.graph.size();
    if (n > 12) {
      ok = false;
      continue;
    }
    const auto adj = oracle::adjacency_of(hg.graph);
    Histogram lib, ref;
    for (unsigned bits = 0; bits < (1u << (n - 1)); ++bits) {
      std::vector<std::uint8_t> marks(n, 0);
      int marked = 0;
      for (std::size_t v = 1; v < n; ++v) {
        marks[v] = (bits >> (v - 1)) & 1u;
        marked += marks[v];
      }
      const PacketOutcome a = forward_marked(hg.graph, 0, marks);
      const oracle::Flood b = oracle::event_driven_bfs(adj, 0, marks);
      ++lib[{a.transmitters.size(), a.receivers.size(), marked}];
      ++ref[{b.transmitters.size(), b.receivers.size(), marked}];
    }
    // Stream-driven forwarding must agree with the mark vector it implies.
    for (std::uint64_t j = 1; j <= 64; ++j) {
      const CounterRng stream = derive_stream({kSeed, 8, j});
      for (double p : {0.25, 0.5, 0.75}) {
        std::vector<std::uint8_t> marks(n);
        for (std::size_t v = 0; v < n; ++v) marks[v] = relays(stream, v, p);
        ok = ok && forward_one_packet(hg.graph, 0, p, stream).receivers ==
                       forward_marked(hg.graph, 0, marks).receivers;
      }
    }
    if (lib != ref) {
      note("distribution mismatch on " + hg.name);
      ok = false;
    }
  }
  note(fmt::format("{} hand graphs enumerated exhaustively", graphs.size()));

  int instances = 0;
  for (std::uint64_t seed = 0; instances < 50; ++seed) {
    CounterRng pick = derive_stream({seed, 88, 0});
    const double m = 4.0 + 26.0 * pick.uniform();
    const double r = 0.5 + 1.5 * pick.uniform();
    const double lam = std::min(6.0, 1900.0 / (m * m)) * (0.2 + 0.8 * pick.uniform());
    const Boundary b = seed % 2 ? Boundary::kTorus : Boundary::kFree;
    if (m < 2.0 * r) continue;
    const Rgg g = build_rgg(sample_ppp({m, lam, r}, {seed, 0, 0}), b);
    if (g.size() > 2000) continue;
    ++instances;
    if (oracle::adjacency_of(g.graph) != oracle::brute_adjacency(g.points.coords(), r, m, b == Boundary::kTorus)) {
      note(fmt::format("adjacency mismatch on instance seed {}", seed));
      ok = false;
    }
  }
  note(fmt::format("{} random instances checked against brute-force adjacency", instances));
  return ok;
}

// ---------------------------------------------------------------------------
// CLI determinism

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

bool criterion_9(Context& ctx) {
  const fs::path dir = ctx.workdir / "cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = quote(PFWD_CLI_PATH);
  const fs::path table = dir / "theta_small.csv";
  const fs::path generated = dir / "theta_generated.csv";
  const fs::path cfg = dir / "small.cfg";
  atomic_write(cfg, "theta_m=30\ntheta_trials=4\nlambda_min=1\nlambda_max=3\nstep=0.5\n");

  if (run(cli + " theta --lambda-min 1 --lambda-max 5 --step 0.5 --m 30 --trials 4 --seed 3 --workers 2 --out " +
          quote(table) + " 2>/dev/null") != 0) {
    note("could not build the shared theta table");
    return false;
  }

  struct Job {
    std::string name;
    std::string args;                // {out} and {aux} are substituted
    bool to_stdout = false;
    bool has_aux = false;
    bool regenerate = false;         // delete `generated` before each run
    std::set<int> exit_codes{0};
  };
  const std::vector<Job> jobs{
      {"theta", "theta --lambda-min 1 --lambda-max 3 --step 0.25 --m 30 --trials 4 --seed 3 --out {out}"},
      {"theta-stdout", "theta --lambda-min 1 --lambda-max 2 --step 0.5 --m 20 --trials 3 --seed 4", true},
      {"sweep-simulated",
       "sweep --lambda 4.5 --m 20 --k 2 --n 2..4 --graph-trials 3 --fwd-trials 4 --seed 3 --theta-table " +
           quote(table) + " --out {out}"},
      {"sweep-giant",
       "sweep --lambda 4.5 --m 20 --k 2 --n 2..3 --graph-trials 2 --fwd-trials 3 --condition giant --seed 5 "
       "--out {out}"},
      {"sweep-mean-field",
       "sweep --method mean-field --k 3 --n 3..8 --seed 3 --theta-table " + quote(table) + " --out {out}"},
      {"sweep-generated-table",
       "sweep --method mean-field --k 2 --n 2..4 --seed 3 --config " + quote(cfg) + " --theta-table " +
           quote(generated) + " --out {out}",
       false, false, true},
      {"simulate", "simulate --m 20 --n 3 --k 2 --p 0.6 --seed 3 --out {out} --graph-out {aux}", false, true},
      {"simulate-stdout", "simulate --m 15 --n 2 --k 1 --p 0.5 --seed 9", true},
      {"diagnostics",
       "diagnostics --m 30 --trials 6 --p 0.6 --seed 3 --theta-table " + quote(table) + " --out {out}", false,
       false, false, {0, 1}},
  };

  bool ok = true;
  for (const auto& job : jobs) {
    std::vector<std::string> outputs;
    bool job_ok = true;
    for (unsigned workers : {1u, 1u, 8u, 8u}) {
      const fs::path out = dir / fmt::format("{}.w{}.{}.out", job.name, workers, outputs.size());
      const fs::path aux = dir / fmt::format("{}.w{}.{}.aux", job.name, workers, outputs.size());
      if (job.regenerate) fs::remove(generated);
      std::string args = job.args;
      for (auto [key, value] : {std::pair{std::string("{out}"), quote(out)}, std::pair{std::string("{aux}"), quote(aux)}}) {
        for (auto pos = args.find(key); pos != std::string::npos; pos = args.find(key)) args.replace(pos, key.size(), value);
      }
      std::string cmd = cli + " " + args + " --workers " + std::to_string(workers);
      cmd += job.to_stdout ? " > " + quote(out) + " 2>/dev/null" : " 2>/dev/null";
      const int rc = run(cmd);
      if (!job.exit_codes.count(rc) || !fs::exists(out)) {
        note(fmt::format("{}: exit code {}", job.name, rc));
        job_ok = false;
        break;
      }
      std::string bytes = read_file(out);
      if (job.has_aux) bytes += "\n--aux--\n" + read_file(aux);
      if (job.regenerate) bytes += "\n--table--\n" + read_file(generated);
      if (bytes.empty()) job_ok = false;
      outputs.push_back(std::move(bytes));
    }
    for (const auto& o : outputs) job_ok = job_ok && o == outputs.front();
    note(fmt::format("{:<22} {}", job.name, job_ok ? "identical across 4 runs (workers 1,1,8,8)" : "DIFFERS"));
    ok = ok && job_ok;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.workdir = fs::temp_directory_path() / "pfwd_acceptance";
  ctx.workers = default_workers();
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) throw std::invalid_argument(arg + " needs a value");
      return argv[++i];
    };
    if (arg == "--workdir") {
      ctx.workdir = next();
    } else if (arg == "--workers") {
      ctx.workers = static_cast<unsigned>(std::max(1LL, parse_int(next())));
    } else if (arg == "--only") {
      std::stringstream list(next());
      for (std::string item; std::getline(list, item, ',');) ctx.only.insert(static_cast<int>(parse_int(item)));
    } else {
      std::fprintf(stderr, "usage: %s [--workdir DIR] [--workers N] [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }
  fs::create_directories(ctx.workdir);

  const std::vector<std::pair<std::string, std::function<bool(Context&)>>> criteria{
      {"1 threshold stays above the critical floor", criterion_1},
      {"2 threshold decreases and tracks the mean-field curve", criterion_2},
      {"3 transmissions per node have an interior minimum", criterion_3},
      {"4 percolation curve anchors and monotonicity", criterion_4},
      {"5 single-packet transmitter and receiver fractions", criterion_5},
      {"6 receiver formula matches simulated success", criterion_6},
      {"7 lower bounds hold", criterion_7},
      {"8 exhaustive oracle and brute-force adjacency", criterion_8},
      {"9 CLI outputs are byte-identical across runs and workers", criterion_9},
  };

  int failures = 0;
  std::vector<std::string> summary;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!ctx.only.empty() && !ctx.only.count(id)) continue;
    std::printf("criterion %s\n", criteria[i].first.c_str());
    std::fflush(stdout);
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      note(std::string("exception: ") + e.what());
    }
    const std::string line = fmt::format("{} criterion {} ({:.1f} s)", ok ? "PASS" : "FAIL", criteria[i].first,
                                         seconds_since(t0));
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    summary.push_back(line);
    failures += ok ? 0 : 1;
  }
  std::printf("\nsummary\n");
  for (const auto& line : summary) std::printf("%s\n", line.c_str());
  return failures == 0 ? 0 : 1;
}
