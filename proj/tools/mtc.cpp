// mtc: instance generation, single-instance checks and experiment suites.
// Exit codes: 0 = every proven statement held, 1 = a proven statement failed,
// 2 = bad configuration, malformed input or exceeded budget.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mtc/capacity.hpp"
#include "mtc/constants.hpp"
#include "mtc/instance.hpp"
#include "mtc/lattice.hpp"
#include "mtc/majorization.hpp"
#include "mtc/maxprinciple.hpp"
#include "mtc/suites.hpp"

using namespace mtc;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + out);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw ConfigError("bad number '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-tree potential theory experiments"};
  app.require_subcommand(1);
  std::string out;
  std::uint64_t seed = 1;
  std::string instance_path;
  int code = 0;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", out, "Output file (default stdout)");
    c->add_option("--seed", seed, "Master seed");
  };

  // gen
  int n = 2, depth = 1, arity = 2;
  std::string weight = "uniform", measure = "leaf-sparse:1";
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  add_common(gen);
  gen->add_option("--n", n, "Number of tree factors");
  gen->add_option("--depth", depth, "Depth of each factor");
  gen->add_option("--arity", arity, "Children per vertex");
  gen->add_option("--weight", weight, "uniform | tensor-random | from-s:s1,s2,...");
  gen->add_option("--measure", measure, "leaf-sparse:k | uniform-leaf");
  gen->callback([&] { emit(serialize(generate_instance(n, depth, arity, WeightSpec::parse(weight), MeasureSpec::parse(measure), seed)), out); });

  // constants
  int sampled = 200;
  auto* constants = app.add_subcommand("constants", "Box, Carleson, hereditary and embedding constants");
  add_common(constants);
  constants->add_option("--instance", instance_path)->required();
  constants->add_option("--sampled", sampled, "Heuristic trials when exhaustive search is too large");
  constants->callback([&] {
    const Instance in = parse_instance(read_file(instance_path));
    const ConstantsReport c = ordering_report(in.t, in.w.dense(in.t), in.mu, SearchMode::sampled(sampled, seed));
    emit(dump({{"box", c.box.value},
               {"carleson", c.carleson.value},
               {"carleson_exact", c.carleson.exact},
               {"hereditary", c.hereditary.value},
               {"hereditary_exact", c.hereditary.exact},
               {"embedding", c.embedding.value},
               {"embedding_upper", c.embedding.upper},
               {"embedding_converged", c.embedding.converged},
               {"chain_checked", c.chain_checked},
               {"chain_ok", c.chain_ok}}),
         out);
    if (c.chain_checked && !c.chain_ok) code = 1;
  });

  // capacity
  std::string lambdas = "1,1.5,2,3";
  bool normalize = false;
  auto* cap = app.add_subcommand("capacity", "Capacity of superlevel sets of the potential");
  add_common(cap);
  cap->add_option("--instance", instance_path)->required();
  cap->add_option("--lambda", lambdas, "Comma-separated levels");
  cap->add_flag("--normalize", normalize, "Scale mu so that max V on supp mu is 1");
  cap->callback([&] {
    const Instance in = parse_instance(read_file(instance_path));
    if (in.n < 2 || in.n > 3) {
      json rows = json::array();
      const Field w = in.w.dense(in.t);
      for (double l : parse_doubles(lambdas)) {
        const CapacityResult c = capacity(in.t, superlevel_set(in.t, w, in.mu, l), kCapacityTol, w);
        rows.push_back({{"lambda", l}, {"cap", c.value}, {"converged", c.converged}});
      }
      emit(dump({{"rows", rows}}), out);
      return;
    }
    const CapacityExperiment e = capacity_bound_experiment(in.t, in.mu, parse_doubles(lambdas), normalize);
    json rows = json::array();
    for (const CapacityRow& r : e.rows)
      rows.push_back({{"lambda", r.lambda}, {"set_size", r.set_size}, {"cap", r.cap}, {"energy", r.energy},
                      {"ratio", r.ratio}});
    emit(dump({{"exponent", e.exponent}, {"scale", e.scale}, {"rows", rows}, {"empirical_c", e.empirical_c}}), out);
  });

  // majorize
  int maj_n = 2, length = 60;
  auto* maj = app.add_subcommand("majorize", "Small-energy majorant on a random path-product instance");
  add_common(maj);
  maj->add_option("--n", maj_n, "2 or 3");
  maj->add_option("--length", length, "Path length per coordinate");
  maj->callback([&] {
    if (maj_n < 2 || maj_n > 3) throw ConfigError("majorize needs n = 2 or 3");
    const MajorantInstance in = sample_majorant_instance(maj_n, length, seed);
    const MajorizationCertificate c = maj_n == 2 ? majorant_bitree(in.t, in.w, in.f, in.lambda, in.delta)
                                                 : majorant_tritree(in.t, in.w, in.f, in.lambda, in.delta);
    emit(dump({{"construction", c.construction},
               {"lambda", c.lambda},
               {"delta", c.delta},
               {"band", count(c.domination_checked_on)},
               {"domination_ok", c.domination_ok},
               {"worst_domination_gap", c.worst_domination_gap},
               {"cost_ratio", c.cost_ratio},
               {"cost_bound", c.cost_bound()},
               {"scaled_cost", c.scaled_cost()},
               {"cost_ok", c.cost_ok}}),
         out);
    if (!c.domination_ok || !c.cost_ok) code = 1;
  });

  // surrogate
  double fraction = 0.5;
  auto* sur = app.add_subcommand("surrogate", "Surrogate maximum principle with rho = mu");
  add_common(sur);
  sur->add_option("--instance", instance_path)->required();
  sur->add_option("--delta-fraction", fraction, "delta as a fraction of max V^mu");
  sur->callback([&] {
    const Instance in = parse_instance(read_file(instance_path));
    const double top = potential(in.t, in.w.dense(in.t), in.mu).maxCoeff();
    const SurrogateReport s = surrogate_check(in.t, in.w, in.mu, in.mu, top * fraction);
    emit(dump({{"n", s.n},
               {"delta", s.delta},
               {"kappa", s.kappa},
               {"lhs", s.lhs},
               {"implied_constant", s.implied_constant},
               {"bound", s.bound_name},
               {"bound_lhs", s.bound_lhs},
               {"bound_rhs", s.bound_rhs},
               {"bound_checked", s.bound_checked},
               {"bound_ok", s.bound_ok},
               {"recorded_constant", s.recorded_constant}}),
         out);
    if (s.bound_checked && !s.bound_ok) code = 1;
  });

  // verify
  SuiteConfig sc;
  std::string suite, config_path, csv_path, s_list;
  auto* ver = app.add_subcommand("verify", "Check one instance, or run a suite");
  add_common(ver);
  ver->add_option("--instance", instance_path, "Instance to check");
  ver->add_option("--suite", suite, "identities|inequalities|constants|capacity|majorization|maxprinciple|lattice|search");
  ver->add_option("--config", config_path, "Suite config, or a report whose config is re-run");
  ver->add_option("--trials", sc.trials);
  ver->add_option("--n", sc.n);
  ver->add_option("--depth", sc.depth);
  ver->add_option("--measure", sc.measure);
  ver->add_option("--s", s_list, "Comma-separated s values");
  ver->add_option("--csv", csv_path, "Envelope table output");
  ver->callback([&] {
    if (!instance_path.empty()) {
      const Instance in = parse_instance(read_file(instance_path));
      json rows = json::array();
      for (const CheckOutcome& c : verify_instance(in)) {
        rows.push_back({{"property", c.property}, {"ok", c.ok}, {"worst", c.worst}});
        if (!c.ok) code = 1;
      }
      emit(dump({{"checks", rows}}), out);
      return;
    }
    SuiteConfig cfg = sc;
    if (!config_path.empty()) {
      json j;
      try {
        j = json::parse(read_file(config_path));
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      cfg = suite_config_from_json(j.contains("config") ? j["config"] : j);
    } else {
      if (suite.empty()) throw ConfigError("verify needs --instance, --suite or --config");
      cfg.suite = suite;
      cfg.seed = seed;
      if (!s_list.empty()) cfg.s_values = parse_doubles(s_list);
    }
    const ExperimentReport r = run_suite(cfg);
    emit(r.dump(), out);
    if (!csv_path.empty()) emit(r.csv(), csv_path);
    if (!r.ok()) code = 1;
  });

  // lattice
  std::string op = "good-prob", s_text = "1";
  int d = 1, trials = 10000, m = 10, ldepth = 6;
  auto* lat = app.add_subcommand("lattice", "Random dyadic lattice experiments");
  add_common(lat);
  lat->add_option("--op", op, "good-prob | kernel | poisson");
  lat->add_option("--d", d, "Dimension");
  lat->add_option("--s", s_text, "Comma-separated exponents (one per coordinate, or one for all)");
  lat->add_option("--trials", trials);
  lat->add_option("--m", m, "Arc level for good-prob");
  lat->add_option("--depth", ldepth, "Tree depth for kernel and poisson");
  lat->callback([&] {
    if (op == "good-prob") {
      const GoodLatticeReport g = good_lattice_probability(m, trials, seed);
      emit(dump({{"m", g.m},
                 {"trials", g.trials},
                 {"probability", g.probability},
                 {"wilson", {g.wilson_lo, g.wilson_hi}},
                 {"good_violations", g.good_violations},
                 {"max_good_ratio", g.max_good_ratio},
                 {"min_ratio", g.min_ratio}}),
           out);
      if (g.good_violations) code = 1;
    } else if (op == "kernel") {
      if (d < 1 || d > 3) throw ConfigError("kernel comparison needs d in 1..3");
      std::vector<double> s = parse_doubles(s_text);
      if (s.size() == 1) s.assign(static_cast<std::size_t>(d), s[0]);
      const NTree t(std::vector<Tree>(static_cast<std::size_t>(d), build_dyadic_tree(ldepth)));
      const KernelReport k = kernel_domination(t, s, trials, seed);
      emit(dump({{"d", k.d},
                 {"depth", k.depth},
                 {"s", k.s},
                 {"trials", k.trials},
                 {"forward", {{"max", k.forward_max}, {"min", k.forward_min}, {"bound", k.forward_bound},
                              {"violations", k.forward_violations}}},
                 {"reverse", {{"bound", k.reverse_bound}, {"probability", k.reverse_probability},
                              {"max", k.reverse_max}}}}),
           out);
      if (k.forward_violations) code = 1;
    } else if (op == "poisson") {
      json rows = json::array();
      for (int k = 2; k <= ldepth; ++k) {
        const PoissonWitness w = poisson_failure_witness(d == 1 ? 2 : d, k);
        rows.push_back({{"depth", k},
                        {"ratio", w.ratio},
                        {"alpha", {w.alpha[0].depth, w.alpha[0].index}},
                        {"beta", {w.beta[0].depth, w.beta[0].index}},
                        {"diagonal_ratio", w.diagonal_ratio}});
      }
      emit(dump({{"rows", rows}}), out);
    } else {
      throw ConfigError("unknown lattice op '" + op + "'");
    }
  });

  // search
  int search_trials = 100;
  auto* search = app.add_subcommand("search", "Conjecture searches (report only)");
  add_common(search);
  search->add_option("--trials", search_trials);
  search->callback([&] {
    SuiteConfig cfg;
    cfg.suite = "search";
    cfg.seed = seed;
    cfg.trials = search_trials;
    emit(run_suite(cfg).dump(), out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "mtc: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "mtc: " << e.what() << "\n";
    return 2;
  }
  return code;
}
