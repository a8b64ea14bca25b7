#include "pfwd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "pfwd/io.hpp"
#include "pfwd/parallel.hpp"
#include "pfwd/rgg.hpp"

namespace pfwd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

void check_kn(int k, int n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (k < 1 || k > n) throw std::invalid_argument("k must satisfy 1 <= k <= n");
}

}  // namespace

std::string to_string(Method method) { return method == Method::kSimulated ? "simulated" : "mean_field"; }

Method parse_method(const std::string& text) {
  if (text == "simulated") return Method::kSimulated;
  if (text == "mean-field" || text == "mean_field") return Method::kMeanField;
  throw std::invalid_argument("unknown method '" + text + "' (expected simulated or mean-field)");
}

double supercritical_floor(double lam) {
  if (!(lam > 0.0)) throw std::invalid_argument("lambda must be positive");
  return std::min(1.0, kCriticalIntensity / lam);
}

// ---------------------------------------------------------------------------
// CrnProfile

CrnProfile::CrnProfile(const SimDomain& domain, int k, std::vector<int> n_values, const TrialsSpec& trials,
                       std::uint64_t master_seed, Condition condition, double p_lo, double p_hi, int depth)
    : n_values_(std::move(n_values)), p_lo_(p_lo), p_hi_(p_hi), fwd_trials_(trials.fwd_trials) {
  domain.validate();
  trials.validate();
  if (n_values_.empty()) throw std::invalid_argument("at least one n is required");
  std::sort(n_values_.begin(), n_values_.end());
  n_values_.erase(std::unique(n_values_.begin(), n_values_.end()), n_values_.end());
  for (int n : n_values_) check_kn(k, n);
  if (!(p_lo >= 0.0 && p_hi <= 1.0 && p_lo <= p_hi)) throw std::invalid_argument("invalid p interval");
  if (depth < 0 || depth > 24) throw std::invalid_argument("grid depth out of range");

  steps_ = p_hi_ > p_lo_ ? (std::size_t{1} << depth) : 0;
  grid_size_ = steps_ + 1;

  graphs_ = parallel_map<GraphAccum>(static_cast<std::size_t>(trials.graph_trials), trials.workers,
                                     [&](std::size_t g) { return run_graph(g, domain, k, trials, master_seed, condition); });
}

double CrnProfile::p_at(std::size_t i) const {
  if (steps_ == 0 || i >= steps_) return p_hi_;
  return p_lo_ + (p_hi_ - p_lo_) * static_cast<double>(i) / static_cast<double>(steps_);
}

std::size_t CrnProfile::bin_of(double threshold) const {
  if (threshold < p_lo_) return 0;
  if (!(threshold < p_hi_)) return grid_size_;
  auto i = static_cast<std::size_t>(std::floor((threshold - p_lo_) / (p_hi_ - p_lo_) * static_cast<double>(steps_))) + 1;
  i = std::clamp<std::size_t>(i, 1, steps_);
  while (i > 0 && threshold < p_at(i - 1)) --i;
  while (i < grid_size_ && !(threshold < p_at(i))) ++i;
  return i;
}

CrnProfile::GraphAccum CrnProfile::run_graph(std::size_t g, const SimDomain& domain, int k, const TrialsSpec& trials,
                                             std::uint64_t master_seed, Condition condition) const {
  const Rgg rgg = build_rgg(sample_ppp(domain, {master_seed, g, 0}));
  const std::size_t n_nodes = rgg.size();
  const auto counted = counted_mask(rgg.graph, condition);
  const int n_max = n_values_.back();
  const std::size_t grid = grid_size_;
  const auto kk = static_cast<std::size_t>(k);

  GraphAccum acc;
  acc.denominator = static_cast<double>(std::count(counted.begin(), counted.end(), std::uint8_t{1}));
  acc.hits.assign(n_values_.size() * grid, 0);
  acc.hits_sq.assign(n_values_.size() * grid, 0.0);
  acc.transmissions.assign(n_values_.size() * grid, 0);

  std::vector<double> smallest(n_nodes * kk);
  std::vector<std::uint32_t> filled(n_nodes);
  std::vector<std::uint64_t> transmit_cum(grid);
  std::vector<std::uint64_t> bins(grid + 1);

  for (int f = 0; f < trials.fwd_trials; ++f) {
    std::fill(filled.begin(), filled.end(), 0u);
    std::fill(transmit_cum.begin(), transmit_cum.end(), 0);
    std::size_t next_n = 0;

    for (int j = 1; j <= n_max; ++j) {
      const auto thr = reception_thresholds(
          rgg.graph, rgg.source(),
          derive_stream({master_seed, forwarding_trial_id(g, static_cast<std::uint64_t>(f)), static_cast<std::uint64_t>(j)}));

      std::fill(bins.begin(), bins.end(), 0);
      for (double t : thr.transmit) ++bins[bin_of(t)];
      std::uint64_t running = 0;
      for (std::size_t i = 0; i < grid; ++i) {
        running += bins[i];
        transmit_cum[i] += running;
      }

      // Keep the k smallest reception thresholds per counted node; the k-th
      // smallest is the probability above which the node decodes.
      for (std::size_t v = 0; v < n_nodes; ++v) {
        if (!counted[v]) continue;
        const double x = thr.receive[v];
        double* buf = &smallest[v * kk];
        std::size_t len = filled[v];
        if (len == kk) {
          if (!(x < buf[kk - 1])) continue;
          --len;
        }
        std::size_t pos = len;
        while (pos > 0 && buf[pos - 1] > x) {
          buf[pos] = buf[pos - 1];
          --pos;
        }
        buf[pos] = x;
        filled[v] = static_cast<std::uint32_t>(len + 1);
      }

      if (next_n < n_values_.size() && n_values_[next_n] == j) {
        std::fill(bins.begin(), bins.end(), 0);
        for (std::size_t v = 0; v < n_nodes; ++v) {
          if (counted[v] && filled[v] == kk) ++bins[bin_of(smallest[v * kk + kk - 1])];
        }
        const std::size_t base = next_n * grid;
        std::uint64_t hits = 0;
        for (std::size_t i = 0; i < grid; ++i) {
          hits += bins[i];
          acc.hits[base + i] += hits;
          acc.hits_sq[base + i] += static_cast<double>(hits) * static_cast<double>(hits);
          acc.transmissions[base + i] += transmit_cum[i];
        }
        ++next_n;
      }
    }
  }
  return acc;
}

Estimate CrnProfile::success(std::size_t n_index, std::size_t grid_index) const {
  const std::size_t at = n_index * grid_size_ + grid_index;
  std::vector<GroupSums> groups;
  groups.reserve(graphs_.size());
  for (const auto& g : graphs_) {
    const double d = g.denominator;
    groups.push_back({static_cast<double>(g.hits[at]) / d, g.hits_sq[at] / (d * d),
                      static_cast<std::size_t>(fwd_trials_)});
  }
  return nested_estimate(groups);
}

double CrnProfile::mean_transmissions(std::size_t n_index, std::size_t grid_index) const {
  const std::size_t at = n_index * grid_size_ + grid_index;
  std::uint64_t total = 0;
  for (const auto& g : graphs_) total += g.transmissions[at];
  return static_cast<double>(total) / static_cast<double>(graphs_.size() * static_cast<std::size_t>(fwd_trials_));
}

int profile_depth(double p_lo, double p_hi, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(p_hi > p_lo)) return 0;
  int depth = 0;
  while ((p_hi - p_lo) / std::ldexp(1.0, depth) > tolerance) ++depth;
  return depth + 1;
}

PSearchResult search_profile(const CrnProfile& profile, std::size_t n_index, double delta, double tolerance) {
  check_delta(delta);
  const double target = 1.0 - delta;
  PSearchResult res;
  auto eval = [&](std::size_t i) {
    ++res.evaluations;
    return profile.success(n_index, i);
  };
  auto finish = [&](std::size_t i, std::size_t lo, std::size_t hi, Estimate e) {
    res.reachable = true;
    res.p_min = profile.p_at(i);
    res.lo = profile.p_at(lo);
    res.hi = profile.p_at(hi);
    res.success = e;
    res.mean_transmissions = profile.mean_transmissions(n_index, i);
    return res;
  };

  std::size_t lo = 0;
  std::size_t hi = profile.grid_size() - 1;
  const Estimate top = eval(hi);
  if (top.mean < target) {
    res.reachable = false;
    res.p_min = kNaN;
    res.lo = profile.p_at(lo);
    res.hi = profile.p_at(hi);
    res.success = top;
    res.mean_transmissions = profile.mean_transmissions(n_index, hi);
    return res;
  }
  if (hi == 0) return finish(0, 0, 0, top);
  const Estimate bottom = eval(lo);
  if (bottom.mean >= target) return finish(0, 0, 0, bottom);

  while (hi - lo >= 2 && profile.p_at(hi) - profile.p_at(lo) > tolerance) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const Estimate e = eval(mid);
    if (std::fabs(e.mean - target) <= e.std_err) return finish(mid, lo, hi, e);
    if (e.mean >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const std::size_t mid = hi - lo >= 2 ? lo + (hi - lo) / 2 : hi;
  return finish(mid, lo, hi, eval(mid));
}

PSearchResult min_forward_prob_simulated(const SimDomain& domain, int k, int n, double delta,
                                         const TrialsSpec& trials, std::uint64_t master_seed, Condition condition,
                                         double tolerance) {
  check_delta(delta);
  check_kn(k, n);
  const double lo = supercritical_floor(domain.intensity_lambda);
  const CrnProfile profile(domain, k, {n}, trials, master_seed, condition, lo, 1.0,
                           profile_depth(lo, 1.0, tolerance));
  return search_profile(profile, 0, delta, tolerance);
}

// ---------------------------------------------------------------------------
// Closed-form pieces

double tau_estimate(int n, double m, double lam, double p, const ThetaTable& table) {
  const double theta = theta_at(table, lam * p);
  return static_cast<double>(n) * m * m * lam * p * theta * theta;
}

double binomial_tail(int n, double q, int k) {
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;

  const double log_q = std::log(q);
  const double log_1q = std::log1p(-q);
  const double odds = q / (1.0 - q);
  auto log_pmf = [&](int j) {
    return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * log_q + (n - j) * log_1q;
  };

  const int mode = std::min(n, static_cast<int>(std::floor((n + 1) * q)));
  if (k > mode) {
    // Terms decrease from j = k upward.
    double term = std::exp(log_pmf(k));
    double sum = term;
    for (int j = k; j < n; ++j) {
      term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
      sum += term;
      if (term <= sum * 1e-17) break;
    }
    return std::clamp(sum, 0.0, 1.0);
  }
  // Terms decrease from j = k - 1 downward; complement the lower tail.
  double term = std::exp(log_pmf(k - 1));
  double lower = term;
  for (int j = k - 1; j > 0; --j) {
    term *= static_cast<double>(j) / static_cast<double>(n - j + 1) / odds;
    lower += term;
    if (term <= lower * 1e-17) break;
  }
  return std::clamp(1.0 - lower, 0.0, 1.0);
}

PSearchResult mean_field_p(int k, int n, double delta, double lam, const ThetaTable& table, double tolerance) {
  check_kn(k, n);
  check_delta(delta);
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double target = 1.0 - delta;
  PSearchResult res;
  auto tail = [&](double p) {
    ++res.evaluations;
    const double theta = theta_at(table, lam * p);
    return binomial_tail(n, theta * theta, k);
  };

  double lo = supercritical_floor(lam);
  double hi = 1.0;
  const double top = tail(hi);
  if (top < target) {
    res.reachable = false;
    res.p_min = kNaN;
    res.lo = lo;
    res.hi = hi;
    res.success = {top, 0.0};
    return res;
  }
  res.reachable = true;
  const double bottom = tail(lo);
  if (bottom >= target) {
    res.p_min = res.lo = res.hi = lo;
    res.success = {bottom, 0.0};
    return res;
  }
  double at_hi = top;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double v = tail(mid);
    if (v >= target) {
      hi = mid;
      at_hi = v;
    } else {
      lo = mid;
    }
  }
  res.p_min = hi;
  res.lo = lo;
  res.hi = hi;
  res.success = {at_hi, 0.0};
  return res;
}

// ---------------------------------------------------------------------------
// Extended-cluster membership across packets

const Estimate& ThetaExtEstimates::at(int k, int t) const {
  if (!has(k, t)) throw std::out_of_range("no estimate for (k=" + std::to_string(k) + ", t=" + std::to_string(t) + ")");
  return table[static_cast<std::size_t>((t - 1) * n + (k - 1))];
}

ThetaExtEstimates estimate_theta_kn_ext(const SimDomain& domain, int n, double p, const TrialsSpec& trials,
                                        std::uint64_t master_seed) {
  domain.validate();
  trials.validate();
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");

  const auto nn = static_cast<std::size_t>(n);
  ThetaExtEstimates est;
  est.n = n;
  est.forward_prob = p;
  est.supercritical = domain.intensity_lambda * p > kCriticalIntensity;
  if (!est.supercritical) {
    spdlog::warn("extended-cluster estimates requested in the sub-critical regime (lambda p = {})",
                 domain.intensity_lambda * p);
  }

  est.samples = parallel_map<std::vector<std::vector<double>>>(
      static_cast<std::size_t>(trials.graph_trials), trials.workers, [&](std::size_t g) {
        const Rgg rgg = build_rgg(sample_ppp(domain, {master_seed, g, 0}));
        const std::size_t size = rgg.size();
        std::vector<std::vector<double>> per_trial;
        std::vector<int> counts(size);
        std::vector<std::uint8_t> marked(size);
        std::vector<std::size_t> at_least(nn + 2);
        for (int f = 0; f < trials.fwd_trials; ++f) {
          std::vector<double> flat(nn * nn, 0.0);
          std::fill(counts.begin(), counts.end(), 0);
          for (int j = 1; j <= n; ++j) {
            const CounterRng stream = derive_stream(
                {master_seed, forwarding_trial_id(g, static_cast<std::uint64_t>(f)), static_cast<std::uint64_t>(j)});
            for (std::size_t v = 0; v < size; ++v) marked[v] = v == rgg.source() || relays(stream, v, p);
            const ClusterLabeling labels = components(rgg.graph, marked);
            for (auto v : extended_cluster(rgg.graph, labels, labels.largest_id)) ++counts[v];

            std::fill(at_least.begin(), at_least.end(), 0);
            for (int c : counts) ++at_least[c];
            for (int c = j - 1; c >= 0; --c) at_least[c] += at_least[c + 1];
            for (int k = 1; k <= j; ++k) {
              flat[(j - 1) * nn + (k - 1)] = static_cast<double>(at_least[k]) / static_cast<double>(size);
            }
          }
          per_trial.push_back(std::move(flat));
        }
        return per_trial;
      });

  est.table.assign(nn * nn, Estimate{});
  for (int t = 1; t <= n; ++t) {
    for (int k = 1; k <= t; ++k) {
      const std::size_t at = (t - 1) * nn + (k - 1);
      std::vector<GroupSums> groups(est.samples.size());
      for (std::size_t g = 0; g < est.samples.size(); ++g) {
        for (const auto& flat : est.samples[g]) groups[g].add(flat[at]);
      }
      est.table[at] = nested_estimate(groups);
    }
  }
  return est;
}

namespace {

template <class Lookup>
double receiver_expression(int n, int k, Lookup&& th, bool* clamped) {
  double sum = 0.0;
  for (int t = k; t < n; ++t) {
    double diff = th(t, n) - th(t + 1, n);
    if (diff < 0.0) {
      diff = 0.0;
      *clamped = true;
    }
    sum += th(k, t) * diff;
  }
  return sum + th(k, n) * th(n, n);
}

}  // namespace

double receiver_formula(const ThetaExtEstimates& est, int k) {
  check_kn(k, est.n);
  bool clamped = false;
  const double value =
      receiver_expression(est.n, k, [&](int a, int b) { return est.at(a, b).mean; }, &clamped);
  if (clamped) spdlog::warn("negative extended-cluster difference clamped to 0 (Monte Carlo noise)");
  return value;
}

Estimate receiver_formula_estimate(const ThetaExtEstimates& est, int k) {
  check_kn(k, est.n);
  const auto nn = static_cast<std::size_t>(est.n);
  std::vector<GroupSums> groups(est.samples.size());
  for (std::size_t g = 0; g < est.samples.size(); ++g) {
    for (const auto& flat : est.samples[g]) {
      bool clamped = false;
      groups[g].add(receiver_expression(
          est.n, k, [&](int a, int b) { return flat[(b - 1) * nn + (a - 1)]; }, &clamped));
    }
  }
  return nested_estimate(groups);
}

std::pair<double, double> theta_ext_lower_bounds(int k, int n, double p, double lam, const ThetaTable& table) {
  check_kn(k, n);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  const double bound1 = std::pow(theta_at(table, lam * p), n);

  double log_miss = 0.0;
  for (int j = k; j <= n; ++j) {
    const double theta = theta_at(table, lam * std::pow(p, j) * std::pow(1.0 - p, n - j));
    if (theta >= 1.0) return {bound1, 1.0};
    const double choose = std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0)));
    log_miss += choose * std::log1p(-theta);
  }
  return {bound1, 0.0 - std::expm1(log_miss)};
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<SweepRow> sweep(const SimDomain& domain, const SweepSpec& spec, const ThetaTable* table,
                            std::uint64_t master_seed) {
  domain.validate();
  check_delta(spec.delta);
  if (spec.n_values.empty()) throw std::invalid_argument("n range is empty");
  for (int n : spec.n_values) check_kn(spec.k, n);
  if (spec.method == Method::kMeanField && table == nullptr) {
    throw std::invalid_argument("mean-field sweeps need a theta table");
  }

  const double lam = domain.intensity_lambda;
  const double points = lam * domain.area();
  auto fill = [&](SweepRow& row, const PSearchResult& r) {
    row.reachable = r.reachable;
    row.p_min = r.p_min;
    row.success_at_p = r.success.mean;
    row.success_std_err = r.success.std_err;
    row.lo = r.lo;
    row.hi = r.hi;
    row.tau_formula = (r.reachable && table) ? tau_estimate(row.n, domain.side_m, lam, r.p_min, *table) : kNaN;
  };

  std::vector<SweepRow> rows;
  if (spec.method == Method::kMeanField) {
    for (int n : spec.n_values) {
      SweepRow row;
      row.n = n;
      row.method = Method::kMeanField;
      fill(row, mean_field_p(spec.k, n, spec.delta, lam, *table, spec.mean_field_tolerance));
      row.tau = row.tau_formula;
      row.tau_per_node = row.tau / points;
      rows.push_back(row);
    }
    return rows;
  }

  const double lo = supercritical_floor(lam);
  const CrnProfile profile(domain, spec.k, spec.n_values, spec.trials, master_seed, spec.condition, lo, 1.0,
                           profile_depth(lo, 1.0, spec.sim_tolerance));
  for (int n : spec.n_values) {
    const auto index = static_cast<std::size_t>(
        std::lower_bound(profile.n_values().begin(), profile.n_values().end(), n) - profile.n_values().begin());
    const PSearchResult r = search_profile(profile, index, spec.delta, spec.sim_tolerance);
    SweepRow row;
    row.n = n;
    row.method = Method::kSimulated;
    fill(row, r);
    row.tau = r.reachable ? r.mean_transmissions : kNaN;
    row.tau_per_node = row.tau / points;
    rows.push_back(row);
  }
  return rows;
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& provenance) {
  std::ostringstream os;
  for (const auto& line : provenance) os << "# " << line << '\n';
  os << "n,p_min,success_at_p,tau,tau_per_node,method\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_sig6(r.p_min) << ',' << format_sig6(r.success_at_p) << ',' << format_sig6(r.tau)
       << ',' << format_sig6(r.tau_per_node) << ',' << to_string(r.method) << '\n';
  }
  return os.str();
}

}  // namespace pfwd
