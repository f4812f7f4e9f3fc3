#include "mtc/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "mtc/capacity.hpp"
#include "mtc/constants.hpp"
#include "mtc/identities.hpp"
#include "mtc/lattice.hpp"
#include "mtc/majorization.hpp"
#include "mtc/maxprinciple.hpp"

namespace mtc {

namespace {

Field random_field(const NTree& t, Rng& rng, double density) {
  Field f = zeros(t);
  for (Eigen::Index v = 0; v < f.size(); ++v)
    if (rng.coin(density)) f[v] = rng.uniform();
  return f;
}

Field random_sparse(const NTree& t, Rng& rng, int k) {
  Field f = zeros(t);
  for (int i = 0; i < k; ++i) f[static_cast<Eigen::Index>(rng.below(t.size()))] += rng.uniform(0.1, 1.0);
  return f;
}

CheckOutcome outcome(const std::string& name, const PropertyOutcome& p) { return {name, p.ok, p.worst}; }

std::uint64_t suite_stream(const std::string& name) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001B3ull;
  return h;
}

Instance trial_instance(const SuiteConfig& c, std::uint64_t seed, int k) {
  WeightSpec ws;
  ws.kind = WeightSpec::Kind::from_s;
  ws.s.assign(static_cast<std::size_t>(c.n), c.s_values[static_cast<std::size_t>(k) % c.s_values.size()]);
  return generate_instance(c.n, c.depth, c.arity, ws, MeasureSpec::parse(c.measure), seed);
}

void validate(const SuiteConfig& c) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), c.suite) == names.end())
    throw ConfigError("unknown suite '" + c.suite + "'");
  if (c.trials <= 0) throw ConfigError("trials must be positive");
  if (c.n < 1 || c.n > kMaxArity) throw ConfigError("n must lie in 1..4");
  if (c.depth < 0 || c.arity < 1) throw ConfigError("bad tree shape");
  if (c.s_values.empty()) throw ConfigError("s_values must not be empty");
  for (double s : c.s_values)
    if (!(s > 0 && s <= 1)) throw ConfigError("s values must lie in (0, 1]");
  MeasureSpec::parse(c.measure);
}

using TrialFn = std::function<void(ExperimentReport&, int k, std::uint64_t seed, nlohmann::json& record)>;

// Runs `body` once per trial; configuration and precondition failures are
// recorded against the trial instead of aborting the sweep.
void for_trials(ExperimentReport& r, const TrialFn& body) {
  const std::uint64_t stream = suite_stream(r.config.suite);
  for (int k = 0; k < r.config.trials; ++k) {
    const std::uint64_t seed = derive_seed(r.config.seed, stream, static_cast<std::uint64_t>(k));
    nlohmann::json record{{"trial", k}, {"seed", seed}};
    try {
      body(r, k, seed, record);
    } catch (const ConfigError& e) {
      r.errors.push_back("trial " + std::to_string(k) + ": " + e.what());
      record["error"] = e.what();
    } catch (const PreconditionError& e) {
      r.errors.push_back("trial " + std::to_string(k) + ": " + e.what());
      record["error"] = e.what();
    }
    r.trials.push_back(std::move(record));
  }
}

void record_checks(ExperimentReport& r, const std::vector<CheckOutcome>& checks, int k, const Instance& in,
                   nlohmann::json& record) {
  for (const CheckOutcome& c : checks) {
    r.envelope(c.property).add(c.worst);
    record[c.property] = c.worst;
    if (!c.ok) r.violations.push_back({c.property, k, "worst " + nlohmann::json(c.worst).dump(), to_json(in)});
  }
}

void identities_suite(ExperimentReport& r) {
  for_trials(r, [](ExperimentReport& r, int k, std::uint64_t seed, nlohmann::json& record) {
    const Instance in = trial_instance(r.config, seed, k);
    const NTree& t = in.t;
    Rng rng(derive_seed(seed, 0xA1, 0));
    const Field f = random_field(t, rng, 0.5), g = random_field(t, rng, 0.5);
    const Field w = in.w.dense(t);
    const double e = energy(t, w, in.mu), p = pairing(t, w, in.mu, in.mu);
    record_checks(r,
                  {outcome("partial-summation", check_partial_summation(t, f, g)),
                   outcome("summation-identity", check_summation_identity(t, f, g)),
                   outcome("duality", check_duality(t, f, g)),
                   {"energy-pairing", close_tol(e, p, 1e-12), e > 0 ? std::abs(e - p) / e : 0}},
                  k, in, record);
  });
}

void inequalities_suite(ExperimentReport& r) {
  for_trials(r, [](ExperimentReport& r, int k, std::uint64_t seed, nlohmann::json& record) {
    const Instance in = trial_instance(r.config, seed, k);
    const NTree& t = in.t;
    Rng rng(derive_seed(seed, 0xA2, 0));
    const Field f = random_field(t, rng, 0.5), g = random_field(t, rng, 0.5);
    std::vector<CheckOutcome> checks{outcome("summation-bound", check_summation_bound(t, f, g)),
                                     outcome("split", check_split(t, f, g))};
    if (t.arity() == 1) {
      const Field w = in.w.dense(t);
      const double delta = potential(t, w, in.mu).maxCoeff() * rng.uniform();
      checks.push_back(outcome("one-tree-maximum", check_one_tree_maximum(t, w, in.mu, delta)));
      const Field sg = adjoint_hardy(t, in.mu);
      checks.push_back(outcome("superadditive-sup-bound", check_superadditive_sup_bound(t, sg, f)));
      checks.push_back(outcome("positive-kernel-bound",
                               check_positive_kernel_bound(t, f, sg, g, hardy(t, sg).maxCoeff() * rng.uniform())));
    }
    record_checks(r, checks, k, in, record);
  });
}

void constants_suite(ExperimentReport& r) {
  for_trials(r, [](ExperimentReport& r, int k, std::uint64_t seed, nlohmann::json& record) {
    const Instance in = trial_instance(r.config, seed, k);
    const ConstantsReport c = ordering_report(in.t, in.w.dense(in.t), in.mu, SearchMode::sampled(200, seed));
    record["box"] = c.box.value;
    record["carleson"] = c.carleson.value;
    record["hereditary"] = c.hereditary.value;
    record["embedding"] = c.embedding.value;
    record["exact"] = c.chain_checked;
    r.envelope("box").add(c.box.value);
    r.envelope("carleson/box").add(c.c_over_box);
    r.envelope("hereditary/carleson").add(c.hc_over_c);
    r.envelope("embedding/box").add(c.ce_over_box);
    if (c.chain_checked && !c.chain_ok) r.violations.push_back({"ordering-chain", k, "chain out of order", to_json(in)});
    if (!c.embedding.converged) r.errors.push_back("trial " + std::to_string(k) + ": power iteration did not converge");
  });
}

void capacity_suite(ExperimentReport& r) {
  const std::vector<double> lambdas{1, 1.5, 2, 3};
  for_trials(r, [&](ExperimentReport& r, int k, std::uint64_t seed, nlohmann::json& record) {
    const Instance in = trial_instance(r.config, seed, k);
    if (in.t.arity() < 2 || in.t.arity() > 3) throw ConfigError("capacity bounds need n = 2 or 3");
    const CapacityExperiment e = capacity_bound_experiment(in.t, in.mu, lambdas, true);
    nlohmann::json rows = nlohmann::json::array();
    for (const CapacityRow& row : e.rows) {
      rows.push_back({{"lambda", row.lambda}, {"cap", row.cap}, {"ratio", row.ratio}});
      r.envelope("cap*lambda^" + std::to_string(e.exponent) + "/energy").add(row.ratio);
    }
    record["rows"] = rows;
    // A set inside a larger one never has larger capacity.
    for (std::size_t i = 1; i < e.rows.size(); ++i)
      if (!leq_tol(e.rows[i].cap, e.rows[i - 1].cap, 1e-6))
        r.violations.push_back({"capacity-monotone", k, "capacity grew with lambda", to_json(in)});
  });
}

void majorization_suite(ExperimentReport& r) {
  const int n = r.config.n;
  if (n < 2 || n > 3) throw ConfigError("majorization suite needs n = 2 or 3");
  for_trials(r, [n](ExperimentReport& r, int k, std::uint64_t seed, nlohmann::json& record) {
    const MajorantInstance in = sample_majorant_instance(n, n == 2 ? 60 : 10, seed);
    const nlohmann::json witness{{"generator", "majorant"}, {"n", n}, {"length", n == 2 ? 60 : 10}, {"seed", seed}};
    const MajorizationCertificate c = n == 2 ? majorant_bitree(in.t, in.w, in.f, in.lambda, in.delta)
                                             : majorant_tritree(in.t, in.w, in.f, in.lambda, in.delta);
    record["band"] = count(c.domination_checked_on);
    record["scaled_cost"] = c.scaled_cost();
    r.envelope("scaled-cost").add(c.scaled_cost());
    if (!c.domination_ok) r.violations.push_back({"domination", k, "I phi below I f on the band", witness});
    if (!c.cost_ok) r.violations.push_back({"cost", k, "cost above the stated bound", witness});
    for (const LemmaCheck& l : energy_lemma_checks(in.t, in.w, in.f, in.delta, in.lambda)) {
      r.envelope(l.name).add(l.ratio);
      if (!l.ok) r.violations.push_back({l.name, k, "lemma bound exceeded", witness});
    }
  });
}

void maxprinciple_suite(ExperimentReport& r) {
  for_trials(r, [](ExperimentReport& r, int k, std::uint64_t seed, nlohmann::json& record) {
    const Instance in = trial_instance(r.config, seed, k);
    Rng rng(derive_seed(seed, 0xA3, 0));
    const Field rho = random_sparse(in.t, rng, 3);
    const double top = potential(in.t, in.w.dense(in.t), in.mu).maxCoeff();
    const SurrogateReport s = surrogate_check(in.t, in.w, in.mu, rho, top * rng.uniform(0.05, 1.0));
    record["implied_constant"] = s.implied_constant;
    record["recorded_constant"] = s.recorded_constant;
    r.envelope("implied-constant").add(s.implied_constant);
    if (s.bound_checked) r.envelope(s.bound_name).add(s.recorded_constant);
    if (s.bound_checked && !s.bound_ok) r.violations.push_back({s.bound_name, k, "surrogate bound exceeded", to_json(in)});
  });
  const int n = r.config.n;
  if (n == 2 || n == 3) {
    const CoveringSweep sw = covering_sweep(n, r.config.trials, r.config.seed);
    r.envelope("covering-size-product").add(sw.max_size_product);
    const nlohmann::json witness{{"generator", "covering-sweep"}, {"n", n}, {"trials", r.config.trials},
                                 {"seed", r.config.seed}};
    nlohmann::json summary{{"traces", sw.traces},
                           {"nested", sw.nested},
                           {"raw_failures", sw.raw_failures},
                           {"raw_failures_nested", sw.raw_failures_nested},
                           {"augmentations", sw.augmentations},
                           {"final_failures", sw.final_failures}};
    r.trials.push_back({{"covering", summary}});
    if (sw.final_failures) r.violations.push_back({"cover-inclusion", -1, "augmentation left a gap", witness});
    if (sw.raw_failures_nested)
      r.violations.push_back({"cover-inclusion-nested", -1, "raw failure in a nested trace", witness});
    if (sw.mass_failures) r.violations.push_back({"cover-mass", -1, "mass bound failed", witness});
    if (sw.good_failures) r.violations.push_back({"good-potential", -1, "good potential too small", witness});

    TheoremSuiteConfig tc;
    tc.n = n;
    tc.max_depth = n == 2 ? 2 : 1;
    tc.s_values = r.config.s_values;
    tc.trials = std::min(r.config.trials, 100);
    tc.seed = r.config.seed;
    const TheoremSuiteReport tr = theorem_ratio_suite(tc);
    for (const RatioEnvelope& e : tr.envelopes) {
      Envelope& out = r.envelope("ratio:" + e.name);
      if (e.instances > 0) out.add(e.max_ratio), out.add(e.min_ratio);
    }
    if (tr.chain_failures)
      r.violations.push_back({"ordering-chain", -1, "chain out of order in the ratio sweep",
                              {{"generator", "theorem-ratio"}, {"n", n}, {"seed", r.config.seed}}});
  }
}

void lattice_suite(ExperimentReport& r) {
  const SuiteConfig& c = r.config;
  const GoodLatticeReport g = good_lattice_probability(10, c.trials * 100, c.seed);
  r.trials.push_back({{"good_probability", g.probability}, {"wilson_lo", g.wilson_lo}, {"wilson_hi", g.wilson_hi}});
  r.envelope("good-probability").add(g.probability);
  r.envelope("good D_L/D").add(g.max_good_ratio);
  r.envelope("D_L/D").add(g.min_ratio);
  const nlohmann::json gw{{"op", "good-prob"}, {"m", 10}, {"trials", c.trials * 100}, {"seed", c.seed}};
  if (g.good_violations) r.violations.push_back({"lattice-distance", -1, "D_L > 10 D on a good sample", gw});
  if (g.wilson_hi < 7.0 / 8) r.violations.push_back({"good-probability", -1, "probability below 7/8", gw});

  const int d = std::min(c.n, 2);
  for (double s : c.s_values) {
    const NTree t(std::vector<Tree>(static_cast<std::size_t>(d), build_dyadic_tree(d == 1 ? 10 : 6)));
    const KernelReport k = kernel_domination(t, std::vector<double>(static_cast<std::size_t>(d), s), c.trials * 10, c.seed);
    const std::string tag = "s=" + nlohmann::json(s).dump();
    r.envelope("forward " + tag).add(k.forward_max), r.envelope("forward " + tag).add(k.forward_min);
    r.envelope("reverse-probability " + tag).add(k.reverse_probability);
    r.trials.push_back({{"s", s}, {"forward_max", k.forward_max}, {"reverse_probability", k.reverse_probability}});
    if (k.forward_violations)
      r.violations.push_back({"kernel-domination", -1, "tree side above the pinned bound",
                              {{"op", "kernel"}, {"d", d}, {"s", s}, {"trials", c.trials * 10}, {"seed", c.seed}}});
  }

  double prev = 0;
  for (int depth = 2; depth <= 6; ++depth) {
    const PoissonWitness w = poisson_failure_witness(2, depth);
    r.envelope("poisson-ratio").add(w.ratio);
    r.trials.push_back({{"poisson_depth", depth}, {"ratio", w.ratio}});
    if (!(w.ratio > prev))
      r.violations.push_back({"poisson-growth", depth, "ratio did not grow", {{"op", "poisson"}, {"depth", depth}}});
    prev = w.ratio;
  }
}

void search_suite(ExperimentReport& r) {
  const SuiteConfig& c = r.config;
  const PairSearchReport p = conjecture_search_bitree_pair(3, c.trials, c.seed);
  r.trials.push_back({{"pair_search", {{"vacuous", p.vacuous}, {"domination_failures", p.domination_failures},
                                       {"max_cost_ratio", p.max_cost_ratio}}}});
  r.envelope("pair min domination").add(p.min_domination_ratio);
  for (std::size_t i = 0; i < p.taus.size(); ++i)
    r.envelope("pair scaled cost tau=" + nlohmann::json(p.taus[i]).dump()).add(p.max_scaled_cost[i]);

  const ObstructionReport o = obstruction_4tree(1, c.trials, c.seed);
  r.envelope("four-tree split ratio").add(o.max_ratio);
  if (o.exhaustive_max) r.envelope("four-tree exhaustive").add(*o.exhaustive_max);

  for (int n = 2; n <= 3; ++n) {
    const ExponentFit f = fit_partial_exponent(n, n == 2 ? 2 : 1, c.trials, c.seed);
    r.trials.push_back({{"exponent_fit", {{"n", n}, {"slope", f.slope}, {"conjectured", f.conjectured},
                                          {"samples", f.samples}}}});
    r.envelope("exponent n=" + std::to_string(n)).add(f.slope);
  }
}

}  // namespace

std::vector<CheckOutcome> verify_instance(const Instance& in) {
  const NTree& t = in.t;
  const Field w = in.w.dense(t);
  Rng rng(derive_seed(in.seed, 0xA0, 0));
  const Field f = random_field(t, rng, 0.5), g = random_field(t, rng, 0.5);
  std::vector<CheckOutcome> out{outcome("partial-summation", check_partial_summation(t, f, g)),
                                outcome("summation-identity", check_summation_identity(t, f, g)),
                                outcome("duality", check_duality(t, f, g)),
                                outcome("summation-bound", check_summation_bound(t, f, g)),
                                outcome("split", check_split(t, f, g))};
  const Field v = potential(t, w, in.mu);
  const double top = v.size() ? v.maxCoeff() : 0;
  const double e = energy(t, w, in.mu), p = pairing(t, w, in.mu, in.mu);
  out.push_back({"energy-pairing", close_tol(e, p, 1e-12), e > 0 ? std::abs(e - p) / e : 0});
  out.push_back({"superlevel-down-set", is_down_set(t, superlevel_set(t, w, in.mu, top / 2)), 0});
  if (t.arity() == 1) out.push_back(outcome("one-tree-maximum", check_one_tree_maximum(t, w, in.mu, top / 2)));
  if (t.arity() <= 2 && top > 0) {
    const SurrogateReport s = surrogate_check(t, in.w, in.mu, random_sparse(t, rng, 3), top / 2);
    if (s.bound_checked) out.push_back({s.bound_name, s.bound_ok, s.recorded_constant});
  }
  if (t.size() <= kDownSetEnumerationCap) {
    const ConstantsReport c = ordering_report(t, w, in.mu);
    if (c.chain_checked) out.push_back({"ordering-chain", c.chain_ok, c.hc_over_c});
  }
  return out;
}

nlohmann::json to_json(const SuiteConfig& c) {
  return {{"suite", c.suite}, {"seed", c.seed},   {"trials", c.trials},     {"n", c.n},
          {"depth", c.depth}, {"arity", c.arity}, {"s_values", c.s_values}, {"measure", c.measure}};
}

SuiteConfig suite_config_from_json(const nlohmann::json& j) {
  try {
    SuiteConfig c;
    c.suite = j.at("suite").get<std::string>();
    c.seed = j.value("seed", c.seed);
    c.trials = j.value("trials", c.trials);
    c.n = j.value("n", c.n);
    c.depth = j.value("depth", c.depth);
    c.arity = j.value("arity", c.arity);
    c.s_values = j.value("s_values", c.s_values);
    c.measure = j.value("measure", c.measure);
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed suite config: ") + e.what());
  }
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities",   "inequalities", "constants", "capacity",
                                              "majorization", "maxprinciple", "lattice",   "search"};
  return names;
}

bool is_conjecture_suite(const std::string& name) { return name == "search"; }

void Envelope::add(double x) {
  if (count == 0 || x < min) min = x;
  if (count == 0 || x > max) max = x;
  ++count;
}

Envelope& ExperimentReport::envelope(const std::string& name) {
  for (Envelope& e : envelopes)
    if (e.name == name) return e;
  envelopes.push_back({name});
  return envelopes.back();
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json env = nlohmann::json::array();
  for (const Envelope& e : envelopes) env.push_back({{"name", e.name}, {"count", e.count}, {"min", e.min}, {"max", e.max}});
  nlohmann::json vio = nlohmann::json::array();
  for (const Violation& v : violations)
    vio.push_back({{"property", v.property}, {"trial", v.trial}, {"detail", v.detail}, {"witness", v.witness}});
  return {{"config", mtc::to_json(config)}, {"conjecture", conjecture}, {"ok", ok()},      {"envelopes", env},
          {"violations", vio},              {"errors", errors},         {"trials", trials}};
}

std::string ExperimentReport::dump() const { return to_json().dump(2) + "\n"; }

std::string ExperimentReport::csv() const {
  std::string out = "name,count,min,max\n";
  char buf[128];
  for (const Envelope& e : envelopes) {
    std::snprintf(buf, sizeof buf, ",%d,%.17g,%.17g\n", e.count, e.min, e.max);
    out += '"' + e.name + '"' + buf;
  }
  return out;
}

ExperimentReport run_suite(const SuiteConfig& config) {
  validate(config);
  ExperimentReport r;
  r.config = config;
  r.conjecture = is_conjecture_suite(config.suite);
  static const std::map<std::string, std::function<void(ExperimentReport&)>> runners{
      {"identities", identities_suite}, {"inequalities", inequalities_suite}, {"constants", constants_suite},
      {"capacity", capacity_suite},     {"majorization", majorization_suite}, {"maxprinciple", maxprinciple_suite},
      {"lattice", lattice_suite},       {"search", search_suite}};
  runners.at(config.suite)(r);
  if (r.conjecture) r.violations.clear();
  return r;
}

}  // namespace mtc
