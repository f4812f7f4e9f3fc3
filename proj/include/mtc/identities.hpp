#pragma once
// Exact identities and pointwise inequalities for the Hardy operators, evaluated
// on concrete fields. Each check reports the worst residual it saw.

#include "mtc/hardy.hpp"

namespace mtc {

struct PropertyOutcome {
  bool ok = true;
  // Identities: largest relative error. Inequalities: largest (lhs - rhs) / scale.
  double worst = 0;
  Vertex witness = 0;
};

// sum f g = sum Delta_j f * I_j g, for every coordinate j.
PropertyOutcome check_partial_summation(const NTree& t, const Field& f, const Field& g,
                                        double rel = 1e-12);
// I*_j(f g) = I*_j(Delta_j f * I_j g) - f (I_j g - g), pointwise, every j.
PropertyOutcome check_summation_identity(const NTree& t, const Field& f, const Field& g,
                                         double rel = 1e-12);
// I*_j(f g) <= I*_j(Delta_j f * I_j g) for f, g >= 0.
PropertyOutcome check_summation_bound(const NTree& t, const Field& f, const Field& g,
                                      double slack = kRelTol);
// (I f)(I g) <= I(sum_{A} I_A f * I_{A^c} g), A over all coordinate subsets.
Field split_right_side(const NTree& t, const Field& f, const Field& g);
PropertyOutcome check_split(const NTree& t, const Field& f, const Field& g, double slack = kRelTol);
// <I f, g> = <f, I* g>.
PropertyOutcome check_duality(const NTree& t, const Field& f, const Field& g, double rel = 1e-12);
// n = 1 only: V_delta^mu <= delta everywhere.
PropertyOutcome check_one_tree_maximum(const NTree& t, const Field& w, const Field& mu, double delta,
                                       double slack = kRelTol);
// n = 1, g superadditive, h >= 0: I*(g h)(b) <= max_{supp g} I h * g(b).
PropertyOutcome check_superadditive_sup_bound(const NTree& t, const Field& g, const Field& h,
                                              double slack = kRelTol);
// n = 1, K = I o 1_{I g <= delta}: int (K f)^2 G <= sup_{supp G} K K* G * int f^2.
PropertyOutcome check_positive_kernel_bound(const NTree& t, const Field& f, const Field& g,
                                            const Field& G, double delta, double slack = kRelTol);

}  // namespace mtc
