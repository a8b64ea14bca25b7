#include <doctest.h>

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pfwd/analysis.hpp"

using namespace pfwd;

namespace {

ThetaTable constant_table(double value) {
  return ThetaTable({1.0, 2.0, 3.0, 4.0, 5.0}, std::vector<double>(5, value), std::vector<double>(5, 0.0),
                    {101.0, 20, 1, false});
}

// theta(l) = (l - 1) / 5 on [1, 6].
ThetaTable linear_table() {
  std::vector<double> lam, th;
  for (int i = 0; i <= 50; ++i) {
    lam.push_back(1.0 + 0.1 * i);
    th.push_back(0.02 * i);
  }
  return ThetaTable(lam, th, std::vector<double>(lam.size(), 0.0), {101.0, 20, 1, false});
}

ThetaExtEstimates filled_estimates(int n, double value) {
  ThetaExtEstimates est;
  est.n = n;
  est.table.assign(static_cast<std::size_t>(n * n), Estimate{value, 0.0});
  est.samples.assign(2, std::vector<std::vector<double>>(3, std::vector<double>(n * n, value)));
  return est;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("binomial tail equals exact rational arithmetic") {
    for (int n = 0; n <= 20; ++n) {
      for (int qi = 0; qi <= 8; ++qi) {
        const oracle::Rational q(qi, 8);
        double prev = 2.0;
        for (int k = 0; k <= n + 1; ++k) {
          CAPTURE(n);
          CAPTURE(qi);
          CAPTURE(k);
          const double exact = static_cast<double>(oracle::binomial_tail_exact(n, q, k));
          const double got = binomial_tail(n, qi / 8.0, k);
          CHECK(got == doctest::Approx(exact).epsilon(1e-12).scale(1e-300));
          CHECK(got <= prev + 1e-15);
          prev = got;
        }
      }
    }
  }

  TEST_CASE("binomial tail rises with q") {
    for (int k : {1, 5, 10}) {
      double prev = -1.0;
      for (double q = 0.0; q <= 1.0; q += 0.01) {
        const double v = binomial_tail(10, q, k);
        CHECK(v >= prev - 1e-15);
        prev = v;
      }
    }
  }

  TEST_CASE("binomial tail special cases") {
    CHECK(binomial_tail(3, 0.5, 2) == doctest::Approx(0.5));
    CHECK(binomial_tail(7, 0.3, 0) == 1.0);
    CHECK(binomial_tail(7, 1.0, 7) == 1.0);
    CHECK(binomial_tail(7, 0.0, 1) == 0.0);
    CHECK(binomial_tail(7, 0.5, 8) == 0.0);
    CHECK_THROWS(binomial_tail(7, 1.5, 2));
  }

  TEST_CASE("binomial tail is stable for large n") {
    const int n = 10000;
    for (double q : {0.001, 0.3, 0.5, 0.97}) {
      const boost::math::binomial dist(n, q);
      for (int k : {1, 10, 2900, 3000, 5000, 9600, 9700, 9990}) {
        CAPTURE(q);
        CAPTURE(k);
        const double expect = boost::math::cdf(boost::math::complement(dist, k - 1));
        const double got = binomial_tail(n, q, k);
        REQUIRE(std::isfinite(got));
        CHECK(got == doctest::Approx(expect).epsilon(1e-9).scale(1e-300));
      }
    }
  }

  TEST_CASE("search floor") {
    CHECK(supercritical_floor(4.5) == doctest::Approx(0.32));
    CHECK(supercritical_floor(1.0) == 1.0);
    CHECK_THROWS(supercritical_floor(0.0));
    CHECK(profile_depth(0.32, 1.0, 1e-3) == 11);
    CHECK(profile_depth(1.0, 1.0, 1e-3) == 0);
  }

  TEST_CASE("mean field with theta = 1 returns the search floor") {
    const PSearchResult r = mean_field_p(20, 30, 0.1, 4.5, constant_table(1.0));
    CHECK(r.reachable);
    CHECK(r.p_min == doctest::Approx(1.44 / 4.5));
  }

  TEST_CASE("mean field with n = k = 1 inverts the table") {
    // theta^2 >= 0.9 first holds at lambda p = 1 + 5 sqrt(0.9).
    const double expect = (1.0 + 5.0 * std::sqrt(0.9)) / 6.0;
    const PSearchResult r = mean_field_p(1, 1, 0.1, 6.0, linear_table());
    REQUIRE(r.reachable);
    CHECK(r.p_min >= expect - 1e-12);
    CHECK(r.p_min <= expect + 1e-4);
    CHECK(theta_at(linear_table(), 6.0 * r.p_min) >= 0.94868);
  }

  TEST_CASE("mean field threshold does not increase with n") {
    const ThetaTable t = linear_table();
    double prev = 2.0;
    for (int n = 5; n <= 15; ++n) {
      const PSearchResult r = mean_field_p(5, n, 0.1, 6.0, t);
      REQUIRE(r.reachable);
      CHECK(r.p_min <= prev + 1e-12);
      prev = r.p_min;
    }
  }

  TEST_CASE("mean field is unreachable when p = 1 falls short") {
    const PSearchResult r = mean_field_p(1, 1, 0.1, 4.5, constant_table(0.5));
    CHECK_FALSE(r.reachable);
    CHECK(std::isnan(r.p_min));
  }

  TEST_CASE("tau estimate") {
    const ThetaTable one = constant_table(1.0);
    CHECK(tau_estimate(10, 10.0, 4.5, 0.5, one) == doctest::Approx(2250.0));
    CHECK(tau_estimate(20, 10.0, 4.5, 0.5, one) == doctest::Approx(2.0 * tau_estimate(10, 10.0, 4.5, 0.5, one)));
    CHECK(tau_estimate(10, 10.0, 4.5, 0.5, constant_table(0.5)) == doctest::Approx(2250.0 * 0.25));
  }

  TEST_CASE("receiver formula on constant tables") {
    CHECK(receiver_formula(filled_estimates(5, 1.0), 3) == doctest::Approx(1.0));
    CHECK(receiver_formula(filled_estimates(5, 0.7), 3) == doctest::Approx(0.49));
    CHECK(receiver_formula(filled_estimates(4, 0.7), 1) == doctest::Approx(0.49));
    const Estimate e = receiver_formula_estimate(filled_estimates(5, 0.7), 3);
    CHECK(e.mean == doctest::Approx(0.49));
    CHECK(e.std_err == doctest::Approx(0.0));
  }

  TEST_CASE("receiver formula on a hand-made table") {
    // n = 2, k = 1: th(1,1) (th(1,2) - th(2,2)) + th(1,2) th(2,2).
    ThetaExtEstimates est = filled_estimates(2, 0.0);
    est.table[0] = {0.8, 0};  // (k=1, t=1)
    est.table[2] = {0.9, 0};  // (k=1, t=2)
    est.table[3] = {0.6, 0};  // (k=2, t=2)
    CHECK(receiver_formula(est, 1) == doctest::Approx(0.8 * 0.3 + 0.9 * 0.6));
    CHECK(receiver_formula(est, 2) == doctest::Approx(0.6 * 0.6));
  }

  TEST_CASE("lower bounds") {
    const ThetaTable t = linear_table();
    const auto [b1, b2] = theta_ext_lower_bounds(2, 3, 1.0, 5.0, t);
    CHECK(b1 == doctest::Approx(std::pow(0.8, 3)));
    CHECK(b2 == doctest::Approx(0.8));
    const auto [z1, z2] = theta_ext_lower_bounds(1, 3, 0.1, 5.0, t);
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);
  }

  TEST_CASE("extended-cluster estimates are ordered") {
    const ThetaExtEstimates est = estimate_theta_kn_ext({30.0, 4.5, 1.0}, 4, 0.6, {3, 4, 2}, 5);
    CHECK(est.supercritical);
    for (int t = 1; t <= 4; ++t) {
      for (int k = 1; k <= t; ++k) {
        const double v = est.at(k, t).mean;
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (k > 1) CHECK(v <= est.at(k - 1, t).mean + 1e-12);
        if (t > k) CHECK(v >= est.at(k, t - 1).mean - 1e-12);
      }
    }
    CHECK_THROWS(est.at(3, 2));
    CHECK(receiver_formula_estimate(est, 2).mean == doctest::Approx(receiver_formula(est, 2)).epsilon(0.2));
  }

  TEST_CASE("simulated search brackets the target") {
    const SimDomain d{20.0, 4.5, 1.0};
    const TrialsSpec trials{3, 4, 2};
    const PSearchResult r = min_forward_prob_simulated(d, 2, 4, 0.2, trials, 3);
    REQUIRE(r.reachable);
    CHECK(r.p_min >= r.lo);
    CHECK(r.p_min <= r.hi);
    CHECK(r.p_min >= supercritical_floor(4.5));
    CHECK(r.p_min <= 1.0);
    CHECK(r.mean_transmissions > 0.0);

    const PSearchResult again = min_forward_prob_simulated(d, 2, 4, 0.2, {3, 4, 8}, 3);
    CHECK(again.p_min == r.p_min);
  }

  TEST_CASE("simulated search below criticality is unreachable") {
    const PSearchResult r = min_forward_prob_simulated({20.0, 1.0, 1.0}, 1, 1, 0.1, {2, 2, 1}, 3);
    CHECK_FALSE(r.reachable);
    CHECK(std::isnan(r.p_min));
  }

  TEST_CASE("sweeps") {
    const SimDomain d{20.0, 4.5, 1.0};
    SweepSpec spec;
    spec.k = 2;
    spec.n_values = {2, 3, 4};
    spec.trials = {2, 3, 2};
    const auto sim = sweep(d, spec, nullptr, 4);
    REQUIRE(sim.size() == 3);
    CHECK(sim[0].n == 2);
    CHECK(std::isnan(sim[0].tau_formula));
    CHECK(sim[1].tau_per_node == doctest::Approx(sim[1].tau / d.expected_points()));

    spec.method = Method::kMeanField;
    CHECK_THROWS(sweep(d, spec, nullptr, 4));
    const ThetaTable table = linear_table();
    const auto mf = sweep(d, spec, &table, 4);
    REQUIRE(mf.size() == 3);
    CHECK(mf[2].method == Method::kMeanField);

    const std::string csv = render_sweep_csv(mf, {"k=2"});
    CHECK(csv.rfind("# k=2\nn,p_min,success_at_p,tau,tau_per_node,method\n2,", 0) == 0);
  }

  TEST_CASE("method names") {
    CHECK(parse_method("simulated") == Method::kSimulated);
    CHECK(parse_method("mean-field") == Method::kMeanField);
    CHECK(to_string(Method::kMeanField) == "mean_field");
    CHECK_THROWS(parse_method("guess"));
  }
}
