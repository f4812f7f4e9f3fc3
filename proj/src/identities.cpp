#include "mtc/identities.hpp"

#include <cmath>

namespace mtc {

namespace {

void record(PropertyOutcome& out, double excess, Vertex v) {
  if (excess > out.worst) {
    out.worst = excess;
    out.witness = v;
  }
}

// Pointwise lhs <= rhs with slack relative to max(|lhs|, |rhs|).
void pointwise_leq(PropertyOutcome& out, const Field& lhs, const Field& rhs, double slack) {
  for (Eigen::Index i = 0; i < lhs.size(); ++i) {
    const double scale = std::max({std::abs(lhs[i]), std::abs(rhs[i]), 1e-300});
    const double excess = (lhs[i] - rhs[i] - kAbsFloor) / scale;
    record(out, excess, static_cast<Vertex>(i));
    if (!leq_tol(lhs[i], rhs[i], slack)) out.ok = false;
  }
}

}  // namespace

PropertyOutcome check_partial_summation(const NTree& t, const Field& f, const Field& g, double rel) {
  PropertyOutcome out;
  const double lhs = (f * g).sum();
  for (int j = 0; j < t.arity(); ++j) {
    const Field df = delta_coord(t, f, j);
    const Field ig = hardy_coord(t, g, coord_bit(j));
    const double rhs = (df * ig).sum();
    const double scale = std::max({(f * g).abs().sum(), (df * ig).abs().sum(), 1e-300});
    const double err = std::abs(lhs - rhs) / scale;
    record(out, err, 0);
    if (err > rel) out.ok = false;
  }
  return out;
}

PropertyOutcome check_summation_identity(const NTree& t, const Field& f, const Field& g, double rel) {
  PropertyOutcome out;
  for (int j = 0; j < t.arity(); ++j) {
    const CoordMask m = coord_bit(j);
    const Field df = delta_coord(t, f, j);
    const Field ig = hardy_coord(t, g, m);
    const Field lhs = adjoint_coord(t, f * g, m);
    const Field rhs = adjoint_coord(t, df * ig, m) - f * (ig - g);
    const Field scale = adjoint_coord(t, (df * ig).abs(), m) + f.abs() * (ig.abs() + g.abs()) + lhs.abs();
    for (Eigen::Index i = 0; i < lhs.size(); ++i) {
      const double err = std::abs(lhs[i] - rhs[i]) / std::max(scale[i], 1e-300);
      record(out, err, static_cast<Vertex>(i));
      if (err > rel) out.ok = false;
    }
  }
  return out;
}

PropertyOutcome check_summation_bound(const NTree& t, const Field& f, const Field& g, double slack) {
  PropertyOutcome out;
  for (int j = 0; j < t.arity(); ++j) {
    const CoordMask m = coord_bit(j);
    const Field lhs = adjoint_coord(t, f * g, m);
    const Field rhs = adjoint_coord(t, delta_coord(t, f, j) * hardy_coord(t, g, m), m);
    pointwise_leq(out, lhs, rhs, slack);
  }
  return out;
}

Field split_right_side(const NTree& t, const Field& f, const Field& g) {
  const CoordMask all = all_coords(t);
  Field sum = zeros(t);
  for (CoordMask a = 0; a <= all; ++a) {
    const Field fa = a ? hardy_coord(t, f, a) : f;
    const CoordMask c = all & ~a;
    const Field gc = c ? hardy_coord(t, g, c) : g;
    sum += fa * gc;
  }
  return hardy(t, sum);
}

PropertyOutcome check_split(const NTree& t, const Field& f, const Field& g, double slack) {
  PropertyOutcome out;
  pointwise_leq(out, hardy(t, f) * hardy(t, g), split_right_side(t, f, g), slack);
  return out;
}

PropertyOutcome check_duality(const NTree& t, const Field& f, const Field& g, double rel) {
  PropertyOutcome out;
  const Field a = hardy(t, f) * g;
  const Field b = f * adjoint_hardy(t, g);
  const double scale = std::max({a.abs().sum(), b.abs().sum(), 1e-300});
  out.worst = std::abs(a.sum() - b.sum()) / scale;
  out.ok = out.worst <= rel;
  return out;
}

PropertyOutcome check_one_tree_maximum(const NTree& t, const Field& w, const Field& mu, double delta,
                                       double slack) {
  if (t.arity() != 1) throw PreconditionError("maximum principle check needs a 1-tree");
  PropertyOutcome out;
  const Field v = truncated_potential(t, w, mu, delta);
  pointwise_leq(out, v, Field::Constant(v.size(), delta), slack);
  return out;
}

PropertyOutcome check_superadditive_sup_bound(const NTree& t, const Field& g, const Field& h,
                                              double slack) {
  if (t.arity() != 1) throw PreconditionError("needs a 1-tree");
  if (!is_superadditive(t, g)) throw PreconditionError("g must be superadditive");
  const Field ih = hardy(t, h);
  double sup = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g[i] != 0) sup = std::max(sup, ih[i]);
  PropertyOutcome out;
  pointwise_leq(out, adjoint_hardy(t, g * h), sup * g, slack);
  return out;
}

PropertyOutcome check_positive_kernel_bound(const NTree& t, const Field& f, const Field& g,
                                            const Field& G, double delta, double slack) {
  if (t.arity() != 1) throw PreconditionError("needs a 1-tree");
  const Field cut = (hardy(t, g) <= delta).cast<double>();
  const Field kf = hardy(t, cut * f);
  const Field kkg = hardy(t, cut * adjoint_hardy(t, G));
  double sup = 0;
  for (Eigen::Index i = 0; i < G.size(); ++i)
    if (G[i] != 0) sup = std::max(sup, kkg[i]);
  PropertyOutcome out;
  const double lhs = (kf * kf * G).sum();
  const double rhs = sup * (f * f).sum();
  out.worst = (lhs - rhs - kAbsFloor) / std::max({lhs, rhs, 1e-300});
  out.ok = leq_tol(lhs, rhs, slack);
  return out;
}

}  // namespace mtc
