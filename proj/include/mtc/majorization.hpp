#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtc/hardy.hpp"

namespace mtc {

// Product-term majorant, or the same term passed through one more I.
enum class MajorantForm { product, outer };

struct MajorizationCertificate {
  std::string construction;  // "one-tree", "bi-tree", "tri-tree"
  MajorantForm form = MajorantForm::product;
  Field phi;
  double lambda = 0;
  double delta = 0;
  // Vertices where domination is required and was checked.
  VertexSet domination_checked_on;
  bool domination_ok = true;
  double worst_domination_gap = 0;  // min over the set of I(w phi) - I(w f)
  std::optional<Vertex> worst_vertex;
  double cost_ratio = 0;  // int w phi^2 / int w f^2 (0 when f = 0)
  double cost_constant = 0;
  int cost_power = 1;  // bound is cost_constant * (delta / lambda)^cost_power
  bool cost_ok = true;

  double cost_bound() const;
  // cost_ratio * (lambda / delta)^cost_power.
  double scaled_cost() const;
};

// f = I* mu * 1_{V^mu <= delta}: superadditive per coordinate, and supported
// where I(w f) <= delta.
Field truncated_adjoint(const NTree& t, const Field& w, const Field& mu, double delta);

// Largest I(w f) over supp f (0 for f = 0).
double support_level(const NTree& t, const Field& w, const Field& f);

// Random hypothesis-satisfying majorant input on a product of paths: tensor
// factors in [1/2, 2], a few point masses near the far corner, f the truncated
// adjoint, delta its support level and lambda in [4 delta, max I(w f)] when that
// range is nonempty (4 delta otherwise).
struct MajorantInstance {
  NTree t;
  TensorWeight w;
  Field f;
  double delta = 0;
  double lambda = 0;
};
MajorantInstance sample_majorant_instance(int n, int length, std::uint64_t seed);

// phi = 2/lambda * If * g * 1_{Ig <= 4 lambda}; domination on leaves with
// Ig in [lambda, 2 lambda]; cost bound 16 delta / lambda.
MajorizationCertificate majorant_1tree(const NTree& t, const Field& f, const Field& g, double lambda, double delta);

// phi = 4/lambda * I1(w1 f) I2(w2 f) 1_{I(wf) <= 2 lambda}; cost bound 64 (delta/lambda)^2.
MajorizationCertificate majorant_bitree(const NTree& t, const TensorWeight& w, const Field& f, double lambda,
                                        double delta, MajorantForm form = MajorantForm::product);

// phi = 4/lambda * sum_i I_i(w_i f) I_(i)(w_(i) f) 1_{I(wf) <= 2 lambda}, where
// I_(i) runs over the other two coordinates; cost bound 192 delta / lambda.
MajorizationCertificate majorant_tritree(const NTree& t, const TensorWeight& w, const Field& f, double lambda,
                                         double delta, MajorantForm form = MajorantForm::product);

// Recomputes domination and cost from phi and f; true when both match the stored flags.
bool recheck_certificate(const NTree& t, const Field& w_dense, const Field& f, const MajorizationCertificate& c);

struct LemmaCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;  // lemma constant folded in
  double ratio = 0;
  bool ok = true;
};

// Two-trees: the two bi-tree energy bounds (constants delta^2 and 4 delta^2).
// Three-trees: the truncated product bound (constant 2 delta lambda), once per
// distinguished coordinate. Rejects f that is not superadditive or violates the
// support condition.
std::vector<LemmaCheck> energy_lemma_checks(const NTree& t, const TensorWeight& w, const Field& f, double delta,
                                            double lambda);

struct PairSearchReport {
  int depth = 0;
  int trials = 0;
  int vacuous = 0;  // empty band or f = 0
  int domination_failures = 0;
  double min_domination_ratio = 0;  // min of I phi / I f over all checked band vertices
  std::vector<double> taus{1.0, 0.5, 0.25};
  std::vector<double> max_scaled_cost;  // max of int phi^2 (lambda/delta)^tau / int f^2 per tau
  double max_cost_ratio = 0;
  // Trials with f = g, where the one-function majorant applies.
  int coincident_trials = 0;
  double coincident_max_scaled = 0;  // int phi^2 (lambda/delta)^2 / int f^2
};

// Pairs (f, g) on a binary bi-tree with g = I* rho superadditive and supp f in
// {I g <= delta}, lambda >= 10 delta. Checks the three-term majorant.
PairSearchReport conjecture_search_bitree_pair(int depth, int trials, std::uint64_t seed);

struct ObstructionReport {
  int depth = 0;
  int trials = 0;
  double max_ratio = 0;  // sup of int (I12 f . I34 f)^2 / int f^2 over sampled f >= 0
  std::optional<double> exhaustive_max;  // leaf-supported 0/1 fields, depth 1 only
  // Full split-sum majorant with f = g on instances with a nonempty band.
  int band_instances = 0;
  double min_split_domination = 0;
  double max_split_cost = 0;
};

inline constexpr int kObstructionMaxDepth = 3;

ObstructionReport obstruction_4tree(int depth, int trials, std::uint64_t seed);

}  // namespace mtc
