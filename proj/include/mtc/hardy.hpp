#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "mtc/poset.hpp"

namespace mtc {

// Dense real field over product vertices, indexed by the mixed-radix vertex index.
using Field = Eigen::ArrayXd;

// Bit j selects coordinate j.
using CoordMask = unsigned;
inline CoordMask all_coords(const NTree& t) { return (1u << t.arity()) - 1u; }
inline CoordMask coord_bit(int j) { return 1u << j; }

Field zeros(const NTree& t);
Field indicator(const VertexSet& s);
VertexSet support(const Field& f);
VertexSet where_leq(const Field& f, double level);      // {f <= level}
VertexSet where_greater(const Field& f, double level);  // {f > level}
Field restrict_to(const Field& f, const VertexSet& s);

// Throws ConfigError on length mismatch, PreconditionError on a negative entry
// when `nonnegative` is set.
void check_field(const NTree& t, const Field& f, const char* name, bool nonnegative = true);

// (I f)(g) = sum of f over all ancestors-or-equal of g.
Field hardy(const NTree& t, const Field& f);
// Product of I_j over j in `coords`.
Field hardy_coord(const NTree& t, const Field& f, CoordMask coords);
// (I* f)(g) = sum of f over all descendants-or-equal of g.
Field adjoint_hardy(const NTree& t, const Field& f);
Field adjoint_coord(const NTree& t, const Field& f, CoordMask coords);
// g minus the sum of g over the children in coordinate j.
Field delta_coord(const NTree& t, const Field& g, int j);
// Delta_j g >= -rel_tol * max|g| for every coordinate j.
bool is_superadditive(const NTree& t, const Field& g, double rel_tol = 1e-12);

// w(alpha) = prod_j factors[j][alpha_j].
struct TensorWeight {
  std::vector<Eigen::ArrayXd> factors;

  Field dense(const NTree& t) const { return partial(t, all_coords(t)); }
  // Product of the factors of the coordinates in `coords` (1 when empty).
  Field partial(const NTree& t, CoordMask coords) const;
  double at(const NTree& t, Vertex v) const;
  void validate(const NTree& t) const;
};

TensorWeight uniform_weight(const NTree& t);
// w_j(alpha_j) = (2^-depth)^(s_j - 1); requires s_j in (0, 1].
TensorWeight weight_from_s(const NTree& t, const std::vector<double>& s);
// Same formula without the range check (s = 0 gives |alpha_j|^-1).
TensorWeight weight_from_exponents(const NTree& t, const std::vector<double>& s);

// V^mu = I(w I* mu).
Field potential(const NTree& t, const Field& w, const Field& mu);
// E[mu] = sum w (I* mu)^2.
double energy(const NTree& t, const Field& w, const Field& mu);

struct EnergyReport {
  double energy = 0;
  double truncated_energy = 0;
  double delta = 0;
  double total_mass = 0;
};

// Restriction to {V^mu <= delta} (ties included).
EnergyReport truncated(const NTree& t, const Field& w, const Field& mu, double delta);
// V_delta^mu = I(1_{V^mu <= delta} w I* mu).
Field truncated_potential(const NTree& t, const Field& w, const Field& mu, double delta);
// int V_delta^mu d rho; the full potential when delta is absent.
double pairing(const NTree& t, const Field& w, const Field& mu, const Field& rho,
               std::optional<double> delta = std::nullopt);

}  // namespace mtc
