#include "mtc/hardy.hpp"

#include <cmath>
#include <string>

namespace mtc {

Field zeros(const NTree& t) { return Field::Zero(static_cast<Eigen::Index>(t.size())); }

Field indicator(const VertexSet& s) {
  Field f(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) f[i] = s[i] ? 1.0 : 0.0;
  return f;
}

VertexSet support(const Field& f) {
  VertexSet s(static_cast<std::size_t>(f.size()), 0);
  for (Eigen::Index i = 0; i < f.size(); ++i) s[i] = f[i] != 0.0;
  return s;
}

VertexSet where_leq(const Field& f, double level) {
  VertexSet s(static_cast<std::size_t>(f.size()), 0);
  for (Eigen::Index i = 0; i < f.size(); ++i) s[i] = f[i] <= level;
  return s;
}

VertexSet where_greater(const Field& f, double level) {
  VertexSet s(static_cast<std::size_t>(f.size()), 0);
  for (Eigen::Index i = 0; i < f.size(); ++i) s[i] = f[i] > level;
  return s;
}

Field restrict_to(const Field& f, const VertexSet& s) { return f * indicator(s); }

void check_field(const NTree& t, const Field& f, const char* name, bool nonnegative) {
  if (static_cast<std::size_t>(f.size()) != t.size())
    throw ConfigError(std::string("field '") + name + "' has wrong length");
  if (nonnegative)
    for (Eigen::Index i = 0; i < f.size(); ++i)
      if (!(f[i] >= 0.0))
        throw PreconditionError(std::string("field '") + name + "' is negative at vertex " +
                                std::to_string(i));
}

namespace {

// One coordinate pass. Upward: out(child) += out(parent), root-to-leaf, which
// accumulates ancestors. Downward: out(parent) += out(child), leaf-to-root.
void sweep(const NTree& t, int j, Field& out, bool ancestors) {
  const Tree& tr = t.tree(j);
  const std::size_t stride = t.stride(j);
  const std::size_t block = stride * static_cast<std::size_t>(tr.size());
  const auto& order = tr.topo();
  double* x = out.data();
  for (std::size_t base = 0; base < t.size(); base += block) {
    if (ancestors) {
      for (int c : order) {
        const int p = tr.parent(c);
        if (p < 0) continue;
        double* dst = x + base + c * stride;
        const double* src = x + base + p * stride;
        for (std::size_t i = 0; i < stride; ++i) dst[i] += src[i];
      }
    } else {
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int c = *it, p = tr.parent(c);
        if (p < 0) continue;
        double* dst = x + base + p * stride;
        const double* src = x + base + c * stride;
        for (std::size_t i = 0; i < stride; ++i) dst[i] += src[i];
      }
    }
  }
}

}  // namespace

Field hardy_coord(const NTree& t, const Field& f, CoordMask coords) {
  check_field(t, f, "f", false);
  Field out = f;
  for (int j = 0; j < t.arity(); ++j)
    if (coords & coord_bit(j)) sweep(t, j, out, true);
  return out;
}

Field adjoint_coord(const NTree& t, const Field& f, CoordMask coords) {
  check_field(t, f, "f", false);
  Field out = f;
  for (int j = 0; j < t.arity(); ++j)
    if (coords & coord_bit(j)) sweep(t, j, out, false);
  return out;
}

Field hardy(const NTree& t, const Field& f) { return hardy_coord(t, f, all_coords(t)); }
Field adjoint_hardy(const NTree& t, const Field& f) { return adjoint_coord(t, f, all_coords(t)); }

Field delta_coord(const NTree& t, const Field& g, int j) {
  check_field(t, g, "g", false);
  if (j < 0 || j >= t.arity()) throw ConfigError("coordinate out of range");
  const Tree& tr = t.tree(j);
  const std::size_t stride = t.stride(j);
  const std::size_t block = stride * static_cast<std::size_t>(tr.size());
  Field out = g;
  for (std::size_t base = 0; base < t.size(); base += block)
    for (int c = 0; c < tr.size(); ++c) {
      const int p = tr.parent(c);
      if (p < 0) continue;
      for (std::size_t i = 0; i < stride; ++i) out[base + p * stride + i] -= g[base + c * stride + i];
    }
  return out;
}

bool is_superadditive(const NTree& t, const Field& g, double rel_tol) {
  const double tol = g.size() ? rel_tol * g.abs().maxCoeff() : 0.0;
  for (int j = 0; j < t.arity(); ++j)
    if ((delta_coord(t, g, j) < -tol).any()) return false;
  return true;
}

Field TensorWeight::partial(const NTree& t, CoordMask coords) const {
  validate(t);
  Field out = Field::Ones(static_cast<Eigen::Index>(t.size()));
  for (int j = 0; j < t.arity(); ++j) {
    if (!(coords & coord_bit(j))) continue;
    for (Vertex v = 0; v < t.size(); ++v) out[v] *= factors[j][t.coord(v, j)];
  }
  return out;
}

double TensorWeight::at(const NTree& t, Vertex v) const {
  double w = 1;
  for (int j = 0; j < t.arity(); ++j) w *= factors[j][t.coord(v, j)];
  return w;
}

void TensorWeight::validate(const NTree& t) const {
  if (static_cast<int>(factors.size()) != t.arity()) throw ConfigError("weight arity mismatch");
  for (int j = 0; j < t.arity(); ++j) {
    if (factors[j].size() != t.tree(j).size()) throw ConfigError("weight factor length mismatch");
    if (!(factors[j] >= 0).all()) throw PreconditionError("weight factor must be nonnegative");
  }
}

TensorWeight uniform_weight(const NTree& t) {
  TensorWeight w;
  for (int j = 0; j < t.arity(); ++j) w.factors.push_back(Eigen::ArrayXd::Ones(t.tree(j).size()));
  return w;
}

TensorWeight weight_from_exponents(const NTree& t, const std::vector<double>& s) {
  if (static_cast<int>(s.size()) != t.arity()) throw ConfigError("need one exponent per coordinate");
  TensorWeight w;
  for (int j = 0; j < t.arity(); ++j) {
    const Tree& tr = t.tree(j);
    Eigen::ArrayXd f(tr.size());
    for (int v = 0; v < tr.size(); ++v) f[v] = std::pow(2.0, tr.depth(v) * (1.0 - s[j]));
    w.factors.push_back(f);
  }
  return w;
}

TensorWeight weight_from_s(const NTree& t, const std::vector<double>& s) {
  for (double x : s)
    if (!(x > 0.0 && x <= 1.0)) throw ConfigError("weight exponents s_j must lie in (0, 1]");
  return weight_from_exponents(t, s);
}

Field potential(const NTree& t, const Field& w, const Field& mu) {
  check_field(t, w, "w");
  check_field(t, mu, "mu");
  return hardy(t, w * adjoint_hardy(t, mu));
}

double energy(const NTree& t, const Field& w, const Field& mu) {
  check_field(t, w, "w");
  check_field(t, mu, "mu");
  const Field g = adjoint_hardy(t, mu);
  return (w * g * g).sum();
}

EnergyReport truncated(const NTree& t, const Field& w, const Field& mu, double delta) {
  if (!(delta >= 0)) throw PreconditionError("delta must be nonnegative");
  const Field g = adjoint_hardy(t, mu);
  const Field V = hardy(t, w * g);
  const Field e = w * g * g;
  EnergyReport r;
  r.delta = delta;
  r.energy = e.sum();
  r.truncated_energy = (V <= delta).select(e, 0.0).sum();
  r.total_mass = mu.sum();
  return r;
}

Field truncated_potential(const NTree& t, const Field& w, const Field& mu, double delta) {
  const Field g = adjoint_hardy(t, mu);
  const Field V = hardy(t, w * g);
  return hardy(t, (V <= delta).select(w * g, 0.0));
}

double pairing(const NTree& t, const Field& w, const Field& mu, const Field& rho,
               std::optional<double> delta) {
  check_field(t, w, "w");
  check_field(t, mu, "mu");
  check_field(t, rho, "rho");
  const Field gm = adjoint_hardy(t, mu);
  const Field gr = adjoint_hardy(t, rho);
  Field terms = w * gm * gr;
  if (delta) {
    const Field V = hardy(t, w * gm);
    terms = (V <= *delta).select(terms, 0.0);
  }
  return terms.sum();
}

}  // namespace mtc
