#include "mtc/capacity.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace mtc {

namespace {

double kkt(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  double r = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) r = std::max(r, x[i] > 0 ? std::abs(g[i]) : std::max(0.0, -g[i]));
  return r;
}

// Projected gradient with step 1/L, used to leave a cycling active set.
void projected_gradient(const Eigen::MatrixXd& q, const Eigen::VectorXd& b, Eigen::VectorXd& x, int steps) {
  const double l = q.diagonal().sum();  // trace bounds the top eigenvalue
  for (int s = 0; s < steps; ++s) x = (x - (q * x - b) / l).cwiseMax(0.0);
}

}  // namespace

QpResult solve_nonneg_qp(const Eigen::MatrixXd& q, const Eigen::VectorXd& b, double tol) {
  const Eigen::Index n = b.size();
  QpResult r;
  r.x = Eigen::VectorXd::Zero(n);
  const int cap = std::max<int>(10 * static_cast<int>(n), 10);
  std::vector<char> passive(n, 0);
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());

  for (int restart = 0; restart < 4 && !r.converged; ++restart) {
    int it = 0;
    for (; it < cap; ++it) {
      const Eigen::VectorXd g = q * r.x - b;
      Eigen::Index add = -1;
      double most = -tol * scale;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!passive[i] && g[i] < most) {
          most = g[i];
          add = i;
        }
      if (add < 0) break;
      passive[add] = 1;
      // Inner loop: minimize on the passive set, backtracking to stay feasible.
      for (;;) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < n; ++i)
          if (passive[i]) idx.push_back(i);
        const auto k = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd qp(k, k);
        Eigen::VectorXd bp(k);
        for (Eigen::Index a = 0; a < k; ++a) {
          bp[a] = b[idx[a]];
          for (Eigen::Index c = 0; c < k; ++c) qp(a, c) = q(idx[a], idx[c]);
        }
        const Eigen::VectorXd z = qp.ldlt().solve(bp);
        if ((z.array() > 0).all()) {
          for (Eigen::Index a = 0; a < k; ++a) r.x[idx[a]] = z[a];
          break;
        }
        double alpha = 1;
        for (Eigen::Index a = 0; a < k; ++a)
          if (z[a] <= 0) {
            const double xi = r.x[idx[a]];
            alpha = std::min(alpha, xi / (xi - z[a]));
          }
        for (Eigen::Index a = 0; a < k; ++a) {
          double& xi = r.x[idx[a]];
          xi += alpha * (z[a] - xi);
          if (xi <= 0 || (z[a] <= 0 && xi <= 1e-15 * scale)) {
            xi = 0;
            passive[idx[a]] = 0;
          }
        }
        if (std::none_of(passive.begin(), passive.end(), [](char c) { return c != 0; })) break;
      }
    }
    r.iterations += it;
    r.kkt_residual = kkt(r.x, q * r.x - b);
    r.converged = r.kkt_residual <= tol * scale;
    if (!r.converged) {
      projected_gradient(q, b, r.x, 1000);
      for (Eigen::Index i = 0; i < n; ++i) passive[i] = r.x[i] > 0;
    }
  }
  return r;
}

namespace {

struct Reduced {
  Field phi;
  Field duals;
  QpResult qp;
};

Reduced solve_on(const NTree& t, const std::vector<Vertex>& pts, const Field& inv_w_sums, const Field& inv_w,
                 double tol) {
  const auto k = static_cast<Eigen::Index>(pts.size());
  // Dual: min 1/4 l'Gl - sum l, i.e. Q = G/2, b = 1.
  Eigen::MatrixXd q(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto jn = join(t, pts[i], pts[j]);
      q(i, j) = q(j, i) = jn ? inv_w_sums[*jn] / 2 : 0.0;
    }
  Reduced r;
  r.qp = solve_nonneg_qp(q, Eigen::VectorXd::Ones(k), tol);
  r.duals = zeros(t);
  for (Eigen::Index i = 0; i < k; ++i) r.duals[pts[i]] = r.qp.x[i];
  r.phi = adjoint_hardy(t, r.duals) * inv_w / 2;
  return r;
}

constexpr std::size_t kSignedFullSolveCap = 400;

}  // namespace

CapacityResult capacity(const NTree& t, const VertexSet& e, double tol, const std::optional<Field>& weight) {
  if (e.size() != t.size()) throw ConfigError("set has wrong length");
  if (count(e) == 0) throw PreconditionError("capacity needs a nonempty set");
  Field w = Field::Ones(static_cast<Eigen::Index>(t.size()));
  if (weight) {
    check_field(t, *weight, "w");
    if (!(*weight > 0).all()) throw PreconditionError("weighted capacity needs w > 0");
    w = *weight;
  }
  const Field inv_w = w.inverse();
  const Field inv_w_sums = hardy(t, inv_w);

  // With phi >= 0, I phi only grows downward, so the maximal elements carry all
  // the binding constraints.
  const Reduced red = solve_on(t, maximal_elements(t, e), inv_w_sums, inv_w, tol);
  CapacityResult r;
  r.phi = red.phi;
  r.duals = red.duals;
  r.value = (w * r.phi * r.phi).sum();
  r.iterations = red.qp.iterations;
  r.converged = red.qp.converged;

  const Field ip = hardy(t, r.phi);
  r.active_set.assign(t.size(), 0);
  double residual = red.qp.kkt_residual;
  for (Vertex v = 0; v < t.size(); ++v)
    if (e[v]) {
      r.active_set[v] = ip[v] <= 1 + tol;
      residual = std::max(residual, 1 - ip[v]);
    }
  r.kkt_residual = residual;

  // Without phi >= 0 the dual is the same program over all of E.
  if (count(e) <= kSignedFullSolveCap) {
    std::vector<Vertex> all;
    for (Vertex v = 0; v < t.size(); ++v)
      if (e[v]) all.push_back(v);
    const Reduced full = solve_on(t, all, inv_w_sums, inv_w, tol);
    r.signed_value = (w * full.phi * full.phi).sum();
  } else {
    // Extending the reduced duals by zero satisfies the full KKT system once
    // I phi >= 1 holds on E, so the values agree.
    r.signed_value = r.value;
  }
  return r;
}

VertexSet superlevel_set(const NTree& t, const Field& w, const Field& mu, double lambda) {
  if (!(lambda > 0)) throw PreconditionError("level must be positive");
  return where_greater(potential(t, w, mu), lambda);
}

CapacityExperiment capacity_bound_experiment(const NTree& t, const Field& mu, const std::vector<double>& lambdas,
                                             bool normalize) {
  if (t.arity() != 2 && t.arity() != 3) throw ConfigError("capacity experiment needs a two- or three-tree");
  check_field(t, mu, "mu");
  if (!(mu.sum() > 0)) throw PreconditionError("measure must not vanish identically");
  const Field w = Field::Ones(static_cast<Eigen::Index>(t.size()));
  CapacityExperiment ex;
  ex.exponent = t.arity() == 2 ? 4 : 2;
  double vmax = 0;
  const Field v0 = potential(t, w, mu);
  for (Vertex v = 0; v < t.size(); ++v)
    if (mu[v] > 0) vmax = std::max(vmax, v0[v]);
  ex.scale = normalize ? 1 / vmax : 1;
  ex.max_potential_on_support = vmax * ex.scale;
  const Field m = mu * ex.scale;
  const double en = energy(t, w, m);
  for (double lambda : lambdas) {
    if (lambda < 1) continue;  // the bound is only claimed for lambda >= 1
    const VertexSet s = superlevel_set(t, w, m, lambda);
    if (count(s) == 0) continue;
    CapacityRow row;
    row.lambda = lambda;
    row.set_size = count(s);
    row.cap = capacity(t, s).value;
    row.energy = en;
    row.ratio = row.cap * std::pow(lambda, ex.exponent) / en;
    ex.empirical_c = std::max(ex.empirical_c, row.ratio);
    ex.rows.push_back(row);
  }
  return ex;
}

}  // namespace mtc
