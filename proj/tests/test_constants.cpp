#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "mtc/constants.hpp"
#include "oracles.hpp"

using namespace mtc;
using oracle::v2;

namespace {

Field delta_at(const NTree& t, Vertex v, double c = 1.0) {
  Field f = zeros(t);
  f[v] = c;
  return f;
}

// Carleson constant by filtering every vertex subset.
double carleson_brute(const NTree& t, const Field& w, const Field& mu) {
  const Field g = oracle::adjoint(t, mu);
  double best = -1;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << t.size()); ++m) {
    std::vector<char> s(t.size());
    for (Vertex v = 0; v < t.size(); ++v) s[v] = (m >> v) & 1u;
    if (!oracle::is_down_set_bruteforce(t, s)) continue;
    double en = 0, mass = 0;
    for (Vertex v = 0; v < t.size(); ++v)
      if (s[v]) {
        en += w[v] * g[v] * g[v];
        mass += mu[v];
      }
    if (mass > 0) best = std::max(best, en / mass);
  }
  return best;
}

double hereditary_brute(const NTree& t, const Field& w, const Field& mu) {
  std::vector<Vertex> pts;
  for (Vertex v = 0; v < t.size(); ++v)
    if (mu[v] > 0) pts.push_back(v);
  double best = -1;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << pts.size()); ++m) {
    Field r = zeros(t);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if ((m >> i) & 1u) r[pts[i]] = mu[pts[i]];
    best = std::max(best, oracle::energy(t, w, r) / r.sum());
  }
  return best;
}

double embedding_eigen(const NTree& t, const Field& w, const Field& mu) {
  std::vector<Vertex> pts;
  for (Vertex v = 0; v < t.size(); ++v)
    if (mu[v] > 0) pts.push_back(v);
  const auto k = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      a(i, j) = std::sqrt(mu[pts[i]] * mu[pts[j]]) * oracle::common_ancestor_weight(t, w, pts[i], pts[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("constants for a point mass on B2") {
  const NTree t = oracle::b2();
  const Field w = Field::Ones(3), mu = delta_at(t, 1);
  const BoxResult b = box_constant(t, w, mu);
  CHECK(b.value == 2.0);
  CHECK(b.witness == 0);
  CHECK(carleson_constant(t, w, mu, SearchMode::exhaustive()).value == 2.0);
  CHECK(hereditary_constant(t, w, mu, SearchMode::exhaustive()).value == 2.0);
  const EmbeddingResult e = embedding_constant(t, w, mu);
  CHECK(e.converged);
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constants for a point mass at (a,a) on B2xB2") {
  const NTree t = oracle::b2b2();
  const Field w = Field::Ones(9), mu = delta_at(t, v2(t, 1, 1));
  const ConstantsReport r = ordering_report(t, w, mu);
  CHECK(r.box.value == 4.0);
  CHECK(r.carleson.value == 4.0);
  CHECK(r.hereditary.value == 4.0);
  CHECK(r.embedding.value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.chain_checked);
  CHECK(r.chain_ok);
}

TEST_CASE("exact constants agree with brute force and satisfy the ordering chain") {
  Rng rng(17);
  const NTree t = oracle::b2b2();
  for (int trial = 0; trial < 40; ++trial) {
    const Field w = oracle::random_field(t, rng) + 0.05;
    const Field mu = oracle::random_sparse(t, rng, 1 + static_cast<int>(rng.below(5)));
    const double c = carleson_constant(t, w, mu, SearchMode::exhaustive()).value;
    const double h = hereditary_constant(t, w, mu, SearchMode::exhaustive()).value;
    const EmbeddingResult e = embedding_constant(t, w, mu, 1e-13);
    CHECK(close_tol(c, carleson_brute(t, w, mu), 1e-12));
    CHECK(close_tol(h, hereditary_brute(t, w, mu), 1e-12));
    const double ev = embedding_eigen(t, w, mu);
    CHECK(close_tol(e.value, ev, 1e-8));
    CHECK(leq_tol(ev, e.upper, 1e-12));
    const ConstantsReport r = ordering_report(t, w, mu);
    CHECK(r.chain_ok);
  }
}

TEST_CASE("matrix-free and dense power iteration agree") {
  Rng rng(23);
  const NTree t = oracle::product(2, 3);
  const Field w = weight_from_s(t, {0.6, 0.8}).dense(t);
  for (int trial = 0; trial < 5; ++trial) {
    const Field mu = oracle::random_sparse(t, rng, 12);
    const EmbeddingResult a = embedding_constant(t, w, mu, 1e-12, false);
    const EmbeddingResult b = embedding_constant(t, w, mu, 1e-12, true);
    CHECK_FALSE(a.matrix_free);
    CHECK(b.matrix_free);
    CHECK(close_tol(a.value, b.value, 1e-9));
    // psi is an approximate eigenfunction: its Rayleigh quotient is a lower bound.
    const Field rho = b.psi * mu;
    const double rq = energy(t, w, rho.abs()) / (b.psi * b.psi * mu).sum();
    CHECK(rq <= b.value * (1 + 1e-9));
    CHECK(rq >= b.value * (1 - 1e-6));
    // The constant test function is also a lower bound.
    CHECK(leq_tol(energy(t, w, mu) / mu.sum(), a.value));
  }
}

TEST_CASE("sampled searches are lower bounds and scale linearly") {
  Rng rng(31);
  const NTree t = oracle::b2b2();
  for (int trial = 0; trial < 15; ++trial) {
    const Field w = oracle::random_field(t, rng) + 0.05;
    const Field mu = oracle::random_sparse(t, rng, 5);
    const double ce = carleson_constant(t, w, mu, SearchMode::exhaustive()).value;
    const double cs = carleson_constant(t, w, mu, SearchMode::sampled(50, trial)).value;
    CHECK(leq_tol(cs, ce));
    CHECK(cs > 0);
    const double he = hereditary_constant(t, w, mu, SearchMode::exhaustive()).value;
    const double hs = hereditary_constant(t, w, mu, SearchMode::sampled(20, trial)).value;
    CHECK(leq_tol(hs, he));
    // E scales like c^2, mu(D) like c.
    CHECK(close_tol(box_constant(t, w, 3 * mu).value, 3 * box_constant(t, w, mu).value));
    CHECK(close_tol(carleson_constant(t, w, 3 * mu, SearchMode::exhaustive()).value, 3 * ce));
    CHECK(close_tol(hereditary_constant(t, w, 2 * mu, SearchMode::exhaustive()).value, 2 * he));
    CHECK(close_tol(embedding_constant(t, 2 * w, mu).value, 2 * embedding_constant(t, w, mu).value, 1e-8));
  }
}

TEST_CASE("constant searches reject bad input") {
  const NTree t = oracle::b2();
  CHECK_THROWS_AS(box_constant(t, Field::Ones(3), zeros(t)), PreconditionError);
  CHECK_THROWS_AS(box_constant(t, Field::Ones(2), delta_at(t, 0)), ConfigError);
  CHECK_THROWS_AS(carleson_constant(t, Field::Ones(3), -delta_at(t, 0), SearchMode::exhaustive()),
                  PreconditionError);
  const NTree big = oracle::product(1, 5);
  Field mu = Field::Ones(static_cast<Eigen::Index>(big.size()));
  CHECK_THROWS_AS(hereditary_constant(big, Field::Ones(mu.size()), mu, SearchMode::exhaustive()), ConfigError);
  CHECK(hereditary_constant(big, Field::Ones(mu.size()), mu, SearchMode::sampled(3, 1)).value > 0);
}

TEST_CASE("Carleson constant for a mass at the root") {
  // Energy on a down-set needs mass below it, so the constant is finite here.
  const NTree t = oracle::b2();
  const CarlesonResult r = carleson_constant(t, Field::Ones(3), delta_at(t, 0), SearchMode::exhaustive());
  CHECK_FALSE(r.infinite);
  CHECK(r.value == 1.0);
}

TEST_CASE("dyadic boundary constants") {
  const NTree t = oracle::b2();
  const Field nu = delta_at(t, 0);
  const BoundaryResult cc = chang_carleson_dyadic(t, nu, SearchMode::exhaustive());
  CHECK(cc.value == doctest::Approx(1.0));
  CHECK(boundary_embedding_constant(t, nu).value == doctest::Approx(1.0).epsilon(1e-12));

  // Leaf mass: nu = delta_a gives m(R_a)^2 / m({a}) = 1/2.
  CHECK(chang_carleson_dyadic(t, delta_at(t, 1), SearchMode::exhaustive()).value == doctest::Approx(0.5));

  Rng rng(41);
  const NTree tt = oracle::product(2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Field f = oracle::random_field(tt, rng, 0.7);
    const double exact = chang_carleson_dyadic(tt, f, SearchMode::exhaustive()).value;
    const double sampled = chang_carleson_dyadic(tt, f, SearchMode::sampled(30, trial)).value;
    CHECK(leq_tol(sampled, exact));
    // Testing the embedding with 1_Omega bounds the box-type constant.
    CHECK(leq_tol(exact, boundary_embedding_constant(tt, f).value, 1e-8));
  }
  CHECK_THROWS_AS(chang_carleson_dyadic(NTree({build_dyadic_tree(1, 3)}), Field::Ones(4), SearchMode::exhaustive()),
                  PreconditionError);
}
