#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtc/hardy.hpp"

namespace mtc {

// Surrogate maximum principle:
//   int V_delta^mu d rho <= C (delta |rho|)^kappa (E_delta[mu] E[rho])^((1 - kappa) / 2).
struct SurrogateReport {
  int n = 0;
  double delta = 0;
  double kappa = 0;
  double lhs = 0;  // int V_delta^mu d rho
  double rho_mass = 0, truncated_energy = 0, rho_energy = 0, mu_mass = 0, mu_energy = 0;
  // lhs over the kappa form without C (0 when lhs = 0).
  double implied_constant = 0;

  // Arity-specific statement. n = 1: lhs <= delta |rho|. n = 2: lhs^4 <= 28
  // delta^2 E_delta[mu] E[rho] |rho|^2. n = 3: lhs^3 / (delta E_delta[mu] E[rho]
  // |rho|) is only recorded (no explicit constant), as is n = 4.
  std::string bound_name;
  double bound_lhs = 0, bound_rhs = 0;
  bool bound_checked = false;
  bool bound_ok = true;
  double recorded_constant = 0;  // bound_lhs / bound_rhs (rhs without constant when unchecked)
  // n = 3: lhs / (delta^1/2 E[mu]^1/6 |mu|^1/6 E[rho]^1/3 |rho|^1/3).
  double corollary_ratio = 0;
};

// kappa defaults to 1/n.
SurrogateReport surrogate_check(const NTree& t, const TensorWeight& w, const Field& mu, const Field& rho, double delta,
                                std::optional<double> kappa = std::nullopt);

// Known surrogate constants for tensor weights: (1, 1) on 1-trees and
// (1/2, 28^(1/4)) on 2-trees. Empty otherwise.
struct SurrogateConstants {
  double kappa = 0;
  double c = 0;
};
std::optional<SurrogateConstants> known_surrogate_constants(int n);

// Taking rho = mu: int V_delta^mu d mu <= C^(2/(1+kappa)) (delta|mu|)^(2 kappa/(1+kappa)) E^((1-kappa)/(1+kappa)).
// Returns the exponent and constant of that form.
SurrogateConstants self_pairing_constants(const SurrogateConstants& s);

struct PartialReport {
  double lhs = 0;  // int V_delta^mu d mu = E_delta[mu]
  double rhs = 0;  // (delta|mu|)^k E[mu]^(1-k), k = 2 kappa / (1 + kappa)
  double ratio = 0;
  // (delta|mu|)^(2/(n+1)) E[mu]^((n-1)/(n+1)); coincides with rhs when kappa = 1/n.
  double conjecture_rhs = 0;
  double conjecture_ratio = 0;
  bool skipped = false;  // mu = 0
};
PartialReport partial_check(const NTree& t, const Field& w, const Field& mu, double delta,
                            std::optional<double> kappa = std::nullopt);

// Least-squares fit of log(E_delta / E) against log(delta |mu| / E) over random
// instances on n-trees of the given depth.
struct ExponentFit {
  int n = 0;
  int depth = 0;
  int samples = 0;
  double slope = 0;  // fitted exponent
  double intercept = 0;
  double conjectured = 0;  // 2 / (n + 1)
  double max_conjecture_ratio = 0;
};
ExponentFit fit_partial_exponent(int n, int depth, int trials, std::uint64_t seed);

struct LargeEnergySet {
  VertexSet set;  // {V^nu > threshold}
  double threshold = 0;
  double fraction = 0;  // E_E[nu] / E[nu]
  // (kappa, C) satisfy the self-pairing bound at delta = threshold here.
  bool constants_consistent = false;
  bool fraction_ok = true;  // fraction >= 1/2, required only when consistent
};
// (kappa, c) are surrogate constants; they are converted to the self-pairing
// form before building the threshold (2 C')^(-1/kappa') E[nu] / |nu|.
LargeEnergySet large_energy_downset(const NTree& t, const Field& w, const Field& nu, SurrogateConstants s);

// sum over omega <= Q <= P of w(Q) I*nu(Q). Requires omega <= P.
double interval_potential(const NTree& t, const Field& w, const Field& nu, Vertex p, Vertex omega);
// V_good(omega) = sum over P >= omega with V_P(omega) > eps of w I*mu (P).
Field good_potential(const NTree& t, const Field& w, const Field& mu, double eps);

struct CoveringFamily {
  CoordMask coords = 0;
  Vertex p = 0;
  std::vector<Vertex> q;  // the chosen maximal elements
  std::vector<Vertex> r;  // the recursive family (sorted, deduplicated)
};

struct CoveringTrace {
  int n = 0;
  Vertex omega = 0;
  double eps = 0;
  double kappa = 0;
  std::vector<double> eps_seq;  // eps_1 .. eps_{n-1}
  double eps_prime = 0;
  VertexSet u;               // {Q >= omega : V_Q(omega) > eps'}
  std::vector<VertexSet> w;  // w[j - 1] = {Q >= omega : V^mu(Q) <= eps_j}, j = 1 .. n-1
  // W_1 contains W_2 ... contains W_{n-1} contains U. This is the case in which
  // the cover inclusion is claimed.
  bool nested = false;
  std::vector<CoveringFamily> families;  // one per (J, p), J nonempty, p >= omega

  int raw_failures = 0;  // (J, p) pairs whose inclusion failed before augmentation
  int augmentations = 0;
  std::optional<Vertex> first_violation;
  bool cover_verified = false;  // every inclusion holds after augmentation

  std::size_t r_size = 0;  // |R_{1..n}(omega)|
  double size_product = 0;  // r_size * eps_1 ... eps_{n-1}
  double mass_off_w1 = 0;   // sum of w I*mu over {Q >= omega} \ W_1
  double cover_mass = 0;    // sum over p' in R_{1..n}(omega) of V_{p'}(omega)
  bool mass_ok = true;      // mass_off_w1 <= cover_mass
  // Outside the nested case: some p outside W_{n-1} with all of {>= p} in U.
  std::optional<Vertex> good_witness;
  double good_value = 0;  // V_good(omega) at eps'
  bool good_ok = true;    // good_value >= eps_{n-1} whenever a witness exists
};

// Builds U, W_j, the families Q_J / R_J with a greedy maximal disjoint choice in
// index order, then checks the cover inclusion for every (J, p) by direct set
// comparison. Uncovered maximal points are added to R_J(p) and counted.
CoveringTrace covering_construction(const NTree& t, const Field& w, const Field& mu, Vertex omega, double eps,
                                    std::optional<double> kappa = std::nullopt);

// Random traces: depth 1..3 (n = 2) or 1..2 (n = 3), up to 20 point masses
// scaled so that max V^mu lies in [10^-1.5, 10^0.5], eps in [1/4, 0.95] and
// omega biased toward the leaves.
struct CoveringSweep {
  int n = 0;
  int traces = 0;
  int nested = 0;
  int nested_nonempty = 0;  // nested traces with a nonempty top family
  int raw_failures = 0;     // traces with at least one raw inclusion failure
  int raw_failures_nested = 0;
  int augmentations = 0;
  int final_failures = 0;
  int mass_failures = 0;
  int good_failures = 0;
  double max_size_product = 0;
};
CoveringSweep covering_sweep(int n, int trials, std::uint64_t seed);

// Default covering parameters: eps = 1/4 and kappa = 2/(n+1).
inline constexpr double kCoveringEps = 0.25;
double default_covering_kappa(int n);
double default_eps_prime(int n);

struct MainEstimate {
  double scale = 1;  // mu was multiplied by this to get E[mu] = |mu|
  double eps_prime = 0;
  double ratio = 0;  // int V_good d mu / |mu|
  double min_potential_on_support = 0;
};
// Rejects instances whose normalization has V^mu < 1/3 somewhere on supp mu.
MainEstimate main_estimate_check(const NTree& t, const Field& w, const Field& mu,
                                 std::optional<double> eps_prime = std::nullopt);

struct BalanceResult {
  bool found = false;
  std::string method;  // "iteration", "exhaustive" or "none"
  DownSet set;
  Field nu;
  double min_potential = 0;  // min of V^nu~ over the set
  double energy_fraction = 0;
};
// Down-set E~ with V^{nu 1_E~} >= A/3 on E~ and E[nu 1_E~] >= E[nu]/3.
BalanceResult balance(const NTree& t, const Field& w, const Field& nu, double a);

struct RatioEnvelope {
  std::string name;
  int instances = 0;
  double max_ratio = 0;
  double min_ratio = 0;
};

struct TheoremSuiteConfig {
  int n = 2;
  int max_depth = 2;
  std::vector<double> s_values{1.0, 0.75, 0.5};
  int trials = 100;
  int max_support = 8;
  std::uint64_t seed = 1;
};

struct TheoremSuiteReport {
  TheoremSuiteConfig config;
  std::vector<RatioEnvelope> envelopes;  // hc/carleson, ce/hc, hc/box, ce/box, pairing
  double kappa_prime = 0;
  int exact_instances = 0;
  int chain_failures = 0;
};
TheoremSuiteReport theorem_ratio_suite(const TheoremSuiteConfig& config);

}  // namespace mtc
