#include <doctest.h>

#include "pfwd/config.hpp"

using namespace pfwd;

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const ExperimentConfig c;
    CHECK(c.lambda == 4.5);
    CHECK(c.m == 101.0);
    CHECK(c.k == 20);
    CHECK(c.n_values().size() == 21);
    CHECK(c.n_values().front() == 20);
    CHECK(c.delta == 0.1);
    CHECK(c.graph_trials == 10);
    CHECK(c.fwd_trials == 20);
    CHECK(c.seed == 1);
  }

  TEST_CASE("render and parse round trip") {
    ExperimentConfig c;
    c.lambda = 3.3;
    c.n_first = 5;
    c.n_last = 9;
    c.method = Method::kMeanField;
    c.condition = Condition::kGiant;
    c.theta_table = "/tmp/t.csv";
    c.out = "o.csv";
    c.workers = 4;
    c.smoothed = false;
    c.seed = 1ULL << 40;
    CHECK(parse_config(render_config(c)) == c);
  }

  TEST_CASE("explicit keys override the preset regardless of order") {
    const ExperimentConfig c = parse_config("theta_trials=7\n# comment\n\npreset=paper\n");
    CHECK(c.theta_trials == 7);
    CHECK(c.theta_m == 251.0);
    CHECK(c.step == 0.01);
  }

  TEST_CASE("bad input is rejected") {
    CHECK_THROWS_AS(parse_config("nonsense"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("colour=red"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("k=abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("lambda=1.0x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("n=9..3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("method=magic"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("condition=some"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("preset=slow"), std::invalid_argument);
  }

  TEST_CASE("n ranges") {
    CHECK(parse_n_range("20..40") == std::pair{20, 40});
    CHECK(parse_n_range("7") == std::pair{7, 7});
    CHECK(format_n_range(3, 5) == "3..5");
    CHECK(format_n_range(4, 4) == "4");
  }

  TEST_CASE("provenance leaves out execution-only keys") {
    ExperimentConfig a;
    ExperimentConfig b = a;
    b.workers = 8;
    b.out = "elsewhere.csv";
    CHECK(provenance_lines(a) == provenance_lines(b));
    for (const auto& line : provenance_lines(a)) {
      CHECK(line.rfind("workers=", 0) != 0);
      CHECK(line.rfind("out=", 0) != 0);
    }
  }

  TEST_CASE("conditions") {
    CHECK(parse_condition("giant") == Condition::kGiant);
    CHECK(to_string(Condition::kNone) == "none");
  }
}
