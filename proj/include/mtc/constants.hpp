#pragma once

#include <cstdint>
#include <optional>

#include "mtc/hardy.hpp"

namespace mtc {

// Exhaustive search, or a seeded heuristic whose result is a lower bound.
struct SearchMode {
  bool exact = true;
  int trials = 0;
  std::uint64_t seed = 0;

  static SearchMode exhaustive() { return {}; }
  static SearchMode sampled(int trials, std::uint64_t seed) { return {false, trials, seed}; }
};

struct BoxResult {
  double value = 0;
  Vertex witness = 0;
};

struct CarlesonResult {
  double value = 0;
  bool exact = false;
  bool infinite = false;  // a zero-mass down-set carries positive energy
  DownSet witness;
};

struct HereditaryResult {
  double value = 0;
  bool exact = false;
  VertexSet witness;
};

struct EmbeddingResult {
  double value = 0;  // Rayleigh quotient at the last iterate (a lower bound)
  double upper = 0;  // Collatz-Wielandt bound max_i (A x)_i / x_i
  int iterations = 0;
  bool converged = false;
  bool matrix_free = false;
  std::size_t support = 0;
  Field psi;  // maximizing test function on supp mu (zero elsewhere)
};

struct ConstantsReport {
  BoxResult box;
  CarlesonResult carleson;
  HereditaryResult hereditary;
  EmbeddingResult embedding;
  double ce_over_box = 0, hc_over_c = 0, c_over_box = 0;
  bool chain_checked = false;  // all four exact
  bool chain_ok = true;
};

inline constexpr std::size_t kHereditaryExactCap = 18;
inline constexpr std::size_t kKernelMaterializeCap = 4000;
inline constexpr int kPowerIterationCap = 100000;

// max over beta with I*mu(beta) > 0 of E_beta / I*mu(beta), E_beta = I*(w (I*mu)^2)(beta).
BoxResult box_constant(const NTree& t, const Field& w, const Field& mu);

// max over down-sets D with mu(D) > 0 of sum_D w (I*mu)^2 / mu(D).
CarlesonResult carleson_constant(const NTree& t, const Field& w, const Field& mu, SearchMode mode);

// max over nonempty E in supp mu of E[mu 1_E] / mu(E).
HereditaryResult hereditary_constant(const NTree& t, const Field& w, const Field& mu, SearchMode mode);

// K(a, b) = sum of w over the common ancestors of a and b (0 when there are none).
double common_ancestor_weight(const NTree& t, const Field& iw, Vertex a, Vertex b);

// Top eigenvalue of sqrt(mu_a mu_b) K(a, b) on supp mu, by power iteration.
// `matrix_free` defaults to materializing the kernel up to kKernelMaterializeCap points.
EmbeddingResult embedding_constant(const NTree& t, const Field& w, const Field& mu, double tol = 1e-10,
                                   std::optional<bool> matrix_free = std::nullopt);

// All four constants; exact where the size caps allow, `fallback` elsewhere.
ConstantsReport ordering_report(const NTree& t, const Field& w, const Field& mu,
                                SearchMode fallback = SearchMode::sampled(200, 1));

inline constexpr std::size_t kBoundaryCellCap = 16;

struct BoundaryResult {
  double value = 0;
  bool exact = false;
  std::vector<char> witness_cells;  // chosen boundary cells, mixed-radix over leaf positions
};

// Dyadic Chang-Carleson constant: sup over unions of boundary cells Omega of
// sum_{R_alpha in Omega} m(R_alpha)^2 nu(alpha) / m(Omega). Needs equal-depth
// complete binary components.
BoundaryResult chang_carleson_dyadic(const NTree& t, const Field& nu, SearchMode mode);

// Top eigenvalue of m(a) m(b) sum_{alpha >= a, b} nu(alpha) over boundary cells,
// relative to L^2(m).
EmbeddingResult boundary_embedding_constant(const NTree& t, const Field& nu, double tol = 1e-10);

}  // namespace mtc
