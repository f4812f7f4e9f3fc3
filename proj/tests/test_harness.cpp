#include "doctest.h"
#include "mtc/constants.hpp"
#include "mtc/suites.hpp"
#include "oracles.hpp"

using namespace mtc;

namespace {

Instance canonical(std::uint64_t seed) {
  return generate_instance(2, 1, 2, WeightSpec::parse("uniform"), MeasureSpec::parse("leaf-sparse:1"), seed);
}

}  // namespace

TEST_CASE("canonical instance") {
  for (std::uint64_t seed : {0, 1, 2, 3}) {
    const Instance in = canonical(seed);
    CHECK(in.mu.sum() == 1.0);
    CHECK(count(support(in.mu)) == 1);
    // Every leaf of B2xB2 is a corner, so each seed gives a copy of the (a,a) mass.
    const Vertex v = static_cast<Vertex>(std::find(in.mu.begin(), in.mu.end(), 1.0) - in.mu.begin());
    CHECK(in.t.is_leaf(v));
    const ConstantsReport c = ordering_report(in.t, in.w.dense(in.t), in.mu);
    CHECK(c.box.value == doctest::Approx(4));
    CHECK(c.carleson.value == doctest::Approx(4));
    CHECK(c.hereditary.value == doctest::Approx(4));
    CHECK(c.embedding.value == doctest::Approx(4));
  }
}

TEST_CASE("weight and measure specs") {
  const Instance ones = generate_instance(2, 2, 2, WeightSpec::parse("from-s:1,1"), MeasureSpec::parse("uniform-leaf"), 0);
  CHECK((ones.w.dense(ones.t) == 1.0).all());
  CHECK(ones.mu.sum() == 16);
  const Instance half = generate_instance(1, 2, 2, WeightSpec::parse("from-s:0.5"), MeasureSpec::parse("random-sparse:2"), 0);
  CHECK(half.w.factors[0][3] == doctest::Approx(2.0));  // (2^-2)^(-1/2)
  const Instance rnd = generate_instance(2, 1, 3, WeightSpec::parse("tensor-random"), MeasureSpec::parse("leaf-sparse:4"), 5);
  CHECK((rnd.w.factors[1] >= 0.5).all());
  CHECK((rnd.w.factors[1] <= 2.0).all());
  CHECK(rnd.mu.sum() == 4);
  CHECK(WeightSpec::parse("from-s:1,0.5").str() == "from-s:1.0,0.5");
  CHECK(MeasureSpec::parse("leaf-sparse:3").str() == "leaf-sparse:3");
  CHECK_THROWS_AS(WeightSpec::parse("from-s:x"), ConfigError);
  CHECK_THROWS_AS(MeasureSpec::parse("leaf-sparse:0"), ConfigError);
  CHECK_THROWS_AS(MeasureSpec::parse("leaf-sparse:1.5"), ConfigError);
  CHECK_THROWS_AS(generate_instance(2, 1, 2, {}, MeasureSpec::parse("leaf-sparse:5"), 0), ConfigError);
  CHECK_THROWS_AS(generate_instance(2, 1, 2, WeightSpec::parse("from-s:2,1"), {}, 0), ConfigError);
  CHECK_THROWS_AS(generate_instance(5, 1, 2, {}, {}, 0), ConfigError);
}

TEST_CASE("serialization round trip") {
  for (const char* w : {"uniform", "tensor-random", "from-s:0.75,0.5,1"}) {
    const Instance in = generate_instance(3, 1, 2, WeightSpec::parse(w), MeasureSpec::parse("random-sparse:5"), 42);
    const std::string text = serialize(in);
    CHECK(serialize(parse_instance(text)) == text);
    CHECK(serialize(generate_instance(3, 1, 2, WeightSpec::parse(w), MeasureSpec::parse("random-sparse:5"), 42)) == text);
    const Instance back = parse_instance(text);
    CHECK((back.mu == in.mu).all());
    CHECK((back.w.dense(back.t) == in.w.dense(in.t)).all());
  }
  Instance custom = canonical(0);
  custom.measure_spec = MeasureSpec::parse("custom");
  custom.mu[4] = 0.1 + 0.2;  // not representable in short decimal form
  const std::string text = serialize(custom);
  CHECK(parse_instance(text).mu[4] == 0.1 + 0.2);
  CHECK(serialize(parse_instance(text)) == text);
  CHECK_THROWS_AS(parse_instance("{"), ConfigError);
  CHECK_THROWS_AS(parse_instance("{\"n\": 2}"), ConfigError);
}

TEST_CASE("verify_instance") {
  const Instance in = canonical(1);
  const std::vector<CheckOutcome> checks = verify_instance(in);
  CHECK(checks.size() >= 8);
  for (const CheckOutcome& c : checks) CHECK_MESSAGE(c.ok, c.property);
  const Instance one = generate_instance(1, 4, 2, WeightSpec::parse("from-s:0.5"), MeasureSpec::parse("random-sparse:4"), 3);
  bool saw_max = false;
  for (const CheckOutcome& c : verify_instance(one)) {
    CHECK_MESSAGE(c.ok, c.property);
    saw_max |= c.property == "one-tree-maximum";
  }
  CHECK(saw_max);
}

TEST_CASE("suites") {
  SuiteConfig c;
  c.suite = "identities";
  c.trials = 40;
  c.n = 3;
  c.depth = 1;
  const ExperimentReport r = run_suite(c);
  CHECK(r.ok());
  CHECK(r.errors.empty());
  CHECK(r.trials.size() == 40);
  CHECK(r.envelopes.size() == 4);
  CHECK(run_suite(c).dump() == r.dump());
  // The config echo reproduces the report.
  CHECK(run_suite(suite_config_from_json(r.to_json()["config"])).dump() == r.dump());

  SuiteConfig k = c;
  k.suite = "constants";
  k.n = 2;
  k.measure = "leaf-sparse:1";
  k.s_values = {1.0};
  k.trials = 3;
  const ExperimentReport cr = run_suite(k);
  for (const auto& t : cr.trials) {
    CHECK(t["box"].get<double>() == doctest::Approx(4));
    CHECK(t["carleson"].get<double>() == doctest::Approx(4));
    CHECK(t["hereditary"].get<double>() == doctest::Approx(4));
    CHECK(t["embedding"].get<double>() == doctest::Approx(4));
  }

  // Per-trial failures are recorded without aborting the sweep.
  SuiteConfig bad = k;
  bad.measure = "leaf-sparse:9";
  const ExperimentReport br = run_suite(bad);
  CHECK(br.errors.size() == 3);
  CHECK(br.trials.size() == 3);

  SuiteConfig s;
  s.suite = "search";
  s.trials = 10;
  const ExperimentReport sr = run_suite(s);
  CHECK(sr.conjecture);
  CHECK(sr.ok());

  for (const char* name : {"inequalities", "maxprinciple", "capacity", "majorization"}) {
    SuiteConfig x;
    x.suite = name;
    x.trials = 10;
    const ExperimentReport xr = run_suite(x);
    CHECK_MESSAGE(xr.ok(), name);
    CHECK(run_suite(x).dump() == xr.dump());
  }
  CHECK(r.csv().rfind("name,count,min,max\n\"partial-summation\",40,", 0) == 0);

  SuiteConfig unknown;
  unknown.suite = "nope";
  CHECK_THROWS_AS(run_suite(unknown), ConfigError);
  CHECK_THROWS_AS(suite_config_from_json(nlohmann::json{{"trials", 3}}), ConfigError);
}
