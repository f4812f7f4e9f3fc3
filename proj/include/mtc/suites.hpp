#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtc/instance.hpp"

namespace mtc {

struct CheckOutcome {
  std::string property;
  bool ok = true;
  double worst = 0;
};

// Proven statements that apply to a single instance. Auxiliary fields are
// derived from the instance seed, so a stored instance reproduces the checks.
std::vector<CheckOutcome> verify_instance(const Instance& in);

struct SuiteConfig {
  std::string suite;  // identities|inequalities|constants|capacity|majorization|maxprinciple|lattice|search
  std::uint64_t seed = 1;
  int trials = 100;
  int n = 2;
  int depth = 2;
  int arity = 2;
  std::vector<double> s_values{1.0, 0.75, 0.5};  // trial k uses s_values[k % size] in every coordinate
  std::string measure = "random-sparse:3";
};

nlohmann::json to_json(const SuiteConfig& c);
SuiteConfig suite_config_from_json(const nlohmann::json& j);
const std::vector<std::string>& suite_names();
bool is_conjecture_suite(const std::string& name);

struct Envelope {
  std::string name;
  int count = 0;
  double min = 0, max = 0;
  void add(double x);
};

struct Violation {
  std::string property;
  int trial = -1;
  std::string detail;
  nlohmann::json witness;  // re-runnable input (instance or generator parameters)
};

struct ExperimentReport {
  SuiteConfig config;
  bool conjecture = false;
  std::vector<nlohmann::json> trials;
  std::vector<Envelope> envelopes;
  std::vector<Violation> violations;  // always empty for conjecture suites
  std::vector<std::string> errors;    // per-trial budget or convergence failures

  Envelope& envelope(const std::string& name);
  bool ok() const { return violations.empty(); }
  nlohmann::json to_json() const;
  std::string dump() const;  // JSON text, trailing newline
  std::string csv() const;   // envelope table, 17 significant digits
};

// Trial k draws from derive_seed(config.seed, suite stream, k). Throws
// ConfigError for an unknown suite or invalid configuration.
ExperimentReport run_suite(const SuiteConfig& config);

}  // namespace mtc
