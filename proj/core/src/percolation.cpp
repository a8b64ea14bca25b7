#include "pfwd/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pfwd/forwarding.hpp"
#include "pfwd/io.hpp"
#include "pfwd/parallel.hpp"
#include "pfwd/rgg.hpp"

namespace pfwd {

ThetaTable::ThetaTable(std::vector<double> lambda_grid, std::vector<double> theta_hat, std::vector<double> std_err,
                       ThetaMeta meta)
    : lambda_(std::move(lambda_grid)), theta_(std::move(theta_hat)), se_(std::move(std_err)), meta_(meta) {
  if (lambda_.empty()) throw std::invalid_argument("theta table grid is empty");
  if (theta_.size() != lambda_.size() || se_.size() != lambda_.size()) {
    throw std::invalid_argument("theta table columns differ in length");
  }
  for (std::size_t i = 0; i < lambda_.size(); ++i) {
    if (i > 0 && !(lambda_[i] > lambda_[i - 1])) throw std::invalid_argument("theta grid must be ascending");
    if (!(theta_[i] >= 0.0 && theta_[i] <= 1.0)) throw std::invalid_argument("theta estimates must lie in [0, 1]");
    if (!(se_[i] >= 0.0)) throw std::invalid_argument("standard errors must be non-negative");
  }
  curve_ = meta_.smoothed ? isotonic_fit(theta_) : theta_;
}

double ThetaTable::max_std_err() const { return *std::max_element(se_.begin(), se_.end()); }

double ThetaTable::resolution(std::size_t i) const {
  if (meta_.window_m <= 0.0 || meta_.trials <= 0) return 0.0;
  const double points = lambda_[i] * meta_.window_m * meta_.window_m;
  return 1.0 / (points * std::sqrt(static_cast<double>(meta_.trials)));
}

double ThetaTable::isotonic_excess(double k_se) const {
  const auto fit = isotonic_fit(theta_);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    const double se = std::max(se_[i], resolution(i));
    worst = std::max(worst, std::fabs(fit[i] - theta_[i]) - k_se * se);
  }
  return worst;
}

namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x < xs.front()) return 0.0;
  if (x >= xs.back()) return ys.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  const std::size_t lo = hi - 1;
  if (x == xs[lo]) return ys[lo];
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

}  // namespace

double theta_at(const ThetaTable& table, double lam) {
  return std::clamp(interpolate(table.lambda_grid(), table.curve(), lam), 0.0, 1.0);
}

double theta_std_err_at(const ThetaTable& table, double lam) {
  return interpolate(table.lambda_grid(), table.std_err(), lam);
}

std::size_t ThetaGrid::size() const {
  if (!(lambda_min > 0.0) || !(step > 0.0) || !(lambda_max >= lambda_min)) return 0;
  return static_cast<std::size_t>(std::floor((lambda_max - lambda_min) / step + 1e-9)) + 1;
}

double ThetaGrid::at(std::size_t i) const {
  // Snap to 1e-9 so grid values print as the decimals the user asked for.
  return std::round((lambda_min + static_cast<double>(i) * step) * 1e9) / 1e9;
}

ThetaPreset theta_preset(const std::string& name) {
  if (name == "fast") return {{1.0, 5.0, 0.05}, 101.0, 20};
  if (name == "paper") return {{1.0, 5.0, 0.01}, 251.0, 100};
  throw std::invalid_argument("unknown preset '" + name + "' (expected fast or paper)");
}

ThetaTable estimate_theta_curve(const ThetaGrid& grid, double window_m, int trials, std::uint64_t master_seed,
                                unsigned workers, bool smoothed) {
  if (!(grid.lambda_min > 0.0)) throw std::invalid_argument("lambda_min must be positive");
  if (!(grid.step > 0.0)) throw std::invalid_argument("step must be positive");
  if (trials < 2) throw std::invalid_argument("at least 2 trials are required");
  const std::size_t points = grid.size();
  if (points == 0) throw std::invalid_argument("theta grid is empty");

  const std::size_t per_point = static_cast<std::size_t>(trials);
  const auto fractions = parallel_map<double>(points * per_point, workers, [&](std::size_t item) {
    const std::size_t i = item / per_point;
    const std::size_t t = item % per_point;
    const SimDomain domain{window_m, grid.at(i), 1.0};
    const Rgg rgg = build_rgg(sample_ppp(domain, {master_seed, forwarding_trial_id(i, t), 0}));
    return largest_component_fraction(rgg.graph);
  });

  std::vector<double> lambdas(points);
  std::vector<double> theta(points);
  std::vector<double> se(points);
  for (std::size_t i = 0; i < points; ++i) {
    const Estimate e = simple_estimate(std::span(fractions).subspan(i * per_point, per_point));
    lambdas[i] = grid.at(i);
    theta[i] = e.mean;
    se[i] = e.std_err;
  }
  return ThetaTable(std::move(lambdas), std::move(theta), std::move(se),
                    ThetaMeta{window_m, trials, master_seed, smoothed});
}

void write_theta_table(std::ostream& os, const ThetaTable& table, const std::vector<std::string>& provenance) {
  const ThetaMeta& meta = table.meta();
  os << "# m=" << format_shortest(meta.window_m) << " trials=" << meta.trials << " seed=" << meta.seed
     << " smoothed=" << (meta.smoothed ? "true" : "false") << '\n';
  for (const auto& line : provenance) os << "# " << line << '\n';
  os << "lambda,theta_hat,std_err\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << format_shortest(table.lambda_grid()[i]) << ',' << format_shortest(table.theta_hat()[i]) << ','
       << format_shortest(table.std_err()[i]) << '\n';
  }
}

std::string render_theta_table(const ThetaTable& table, const std::vector<std::string>& provenance) {
  std::ostringstream ss;
  write_theta_table(ss, table, provenance);
  return ss.str();
}

ThetaTable read_theta_table(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw std::invalid_argument("theta table must start with a '# m=...' header");
  }
  ThetaMeta meta;
  int seen = 0;
  std::istringstream fields(line.substr(2));
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string_view value = std::string_view(field).substr(eq + 1);
    if (key == "m") {
      meta.window_m = parse_double(value);
    } else if (key == "trials") {
      meta.trials = static_cast<int>(parse_int(value));
    } else if (key == "seed") {
      meta.seed = static_cast<std::uint64_t>(parse_int(value));
    } else if (key == "smoothed") {
      meta.smoothed = parse_bool(value);
    } else {
      continue;
    }
    ++seen;
  }
  if (seen != 4) throw std::invalid_argument("theta table header must define m, trials, seed and smoothed");

  std::vector<double> lambdas;
  std::vector<double> theta;
  std::vector<double> se;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line == "lambda,theta_hat,std_err") continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("malformed theta row '" + line + "'");
    const std::string_view row(line);
    lambdas.push_back(parse_double(row.substr(0, c1)));
    theta.push_back(parse_double(row.substr(c1 + 1, c2 - c1 - 1)));
    se.push_back(parse_double(row.substr(c2 + 1)));
  }
  return ThetaTable(std::move(lambdas), std::move(theta), std::move(se), meta);
}

void save_theta_table(const std::filesystem::path& path, const ThetaTable& table,
                      const std::vector<std::string>& provenance) {
  atomic_write(path, render_theta_table(table, provenance));
}

ThetaTable load_theta_table(const std::filesystem::path& path) {
  std::istringstream ss(read_file(path));
  return read_theta_table(ss);
}

bool DiagnosticReport::passed(double z_max) const {
  return std::all_of(rows.begin(), rows.end(),
                     [&](const DiagnosticRow& r) { return !r.applicable || std::fabs(r.z) <= z_max; });
}

namespace {

struct DiagnosticSample {
  double density = 0.0;
  double relay_density = 0.0;
  double giant_fraction = 0.0;
  double extended_fraction = 0.0;
};

double z_score(double estimate, double predicted, double se) {
  const double diff = estimate - predicted;
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace

DiagnosticReport ergodic_diagnostics(const SimDomain& domain, double p, int trials, std::uint64_t master_seed,
                                     const ThetaTable& table, unsigned workers) {
  domain.validate();
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (trials < 2) throw std::invalid_argument("at least 2 trials are required");

  const auto samples = parallel_map<DiagnosticSample>(
      static_cast<std::size_t>(trials), workers, [&](std::size_t t) {
        const Rgg rgg = build_rgg(sample_ppp(domain, {master_seed, t, 0}));
        const CounterRng stream = derive_stream({master_seed, forwarding_trial_id(t, 0), 1});
        const std::size_t n = rgg.size();
        std::vector<std::uint8_t> marked(n, 0);
        std::size_t relays_count = 0;
        for (std::size_t v = 0; v < n; ++v) {
          if (v == rgg.source()) {
            marked[v] = 1;
          } else if (relays(stream, v, p)) {
            marked[v] = 1;
            ++relays_count;
          }
        }
        const ClusterLabeling labels = components(rgg.graph, marked);
        const auto ext = extended_cluster(rgg.graph, labels, labels.largest_id);

        DiagnosticSample s;
        s.density = static_cast<double>(rgg.points.sampled_count()) / domain.area();
        s.relay_density = static_cast<double>(relays_count) / domain.area();
        s.giant_fraction = static_cast<double>(labels.largest_size()) / static_cast<double>(n);
        s.extended_fraction = static_cast<double>(ext.size()) / static_cast<double>(n);
        return s;
      });

  auto column = [&](double DiagnosticSample::*field) {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.*field);
    return simple_estimate(v);
  };

  const double lam = domain.intensity_lambda;
  const double thinned = lam * p;
  const double theta = theta_at(table, thinned);
  const double theta_se = theta_std_err_at(table, thinned);

  DiagnosticReport report;
  report.domain = domain;
  report.forward_prob = p;
  report.trials = trials;
  report.supercritical = thinned > kCriticalIntensity;

  auto add = [&](std::string name, double predicted, Estimate est, double extra_se, bool applicable) {
    const double se = std::hypot(est.std_err, extra_se);
    report.rows.push_back({std::move(name), predicted, est.mean, se, z_score(est.mean, predicted, se), applicable});
  };
  add("point_density", lam, column(&DiagnosticSample::density), 0.0, true);
  add("relay_density", thinned, column(&DiagnosticSample::relay_density), 0.0, true);
  add("relay_giant_fraction", p * theta, column(&DiagnosticSample::giant_fraction), p * theta_se,
      report.supercritical);
  add("extended_giant_fraction", theta, column(&DiagnosticSample::extended_fraction), theta_se,
      report.supercritical);
  return report;
}

}  // namespace pfwd
