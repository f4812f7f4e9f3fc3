#include "doctest.h"
#include "mtc/majorization.hpp"
#include "oracles.hpp"

using namespace mtc;
using oracle::v2;

namespace {

NTree chain(int n) {
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i - 1;
  return NTree({Tree(parent)});
}

Field leaf_measure(const NTree& t, Rng& rng, double scale) {
  Field mu = zeros(t);
  for (Vertex v = 0; v < t.size(); ++v)
    if (t.is_leaf(v) && rng.coin(0.4)) mu[v] = scale * rng.uniform();
  if (!(mu.sum() > 0)) mu[t.size() - 1] = scale;
  return mu;
}

}  // namespace

TEST_CASE("one-tree majorant on a chain") {
  const NTree t = chain(16);
  const Field g = Field::Ones(16);  // I* of a unit mass at the leaf
  Field f = zeros(t);
  f[0] = 1;
  const MajorizationCertificate c = majorant_1tree(t, f, g, 10, 1);
  CHECK(count(c.domination_checked_on) == 1);
  CHECK(c.domination_checked_on[15]);
  CHECK(c.domination_ok);
  CHECK(c.worst_domination_gap == doctest::Approx(3.2 - 1.0));
  CHECK(c.cost_ratio == doctest::Approx(16 * 0.04));
  CHECK(c.cost_ok);
  CHECK(c.cost_bound() == doctest::Approx(1.6));

  const MajorizationCertificate z = majorant_1tree(t, zeros(t), g, 10, 1);
  CHECK((z.phi == 0).all());
  CHECK(z.cost_ratio == 0);
  CHECK(z.domination_ok);
  // Band above every potential value.
  CHECK(count(majorant_1tree(t, f, g, 100, 1).domination_checked_on) == 0);

  CHECK_THROWS_AS(majorant_1tree(t, f, g, 5, 1), PreconditionError);
  Field bad = zeros(t);
  bad[3] = 1;
  CHECK_THROWS_AS(majorant_1tree(t, bad, g, 10, 1), PreconditionError);
  Field sub = g;
  sub[0] = 0;
  CHECK_THROWS_AS(majorant_1tree(t, f, sub, 10, 1), PreconditionError);
}

TEST_CASE("one-tree majorant on random superadditive data") {
  // Binary trees keep Ig below (depth + 1) g(root) < 10 delta, so use a
  // path with a side branch at every vertex.
  Rng rng(8);
  std::vector<int> parent{-1};
  for (int i = 1; i < 80; ++i) parent.push_back(i % 2 ? i - 1 : i - 2);
  const NTree t({Tree(parent)});
  int nonempty = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Field g = adjoint_hardy(t, oracle::random_sparse(t, rng, 3));
    const Field ig = hardy(t, g);
    const double delta = g[0] * (1 + rng.uniform());
    Field f = zeros(t);
    for (Vertex v = 0; v < t.size(); ++v)
      if (ig[v] <= delta) f[v] = rng.uniform();
    const double lambda = 10 * delta + rng.uniform() * std::max(0.0, ig.maxCoeff() - 10 * delta);
    const MajorizationCertificate c = majorant_1tree(t, f, g, lambda, delta);
    nonempty += count(c.domination_checked_on) > 0;
    CHECK(c.domination_ok);
    CHECK(c.cost_ok);
    CHECK(recheck_certificate(t, Field(), f, c));
  }
  CHECK(nonempty > 0);
}

TEST_CASE("bi-tree majorant on the corner mass of B2xB2") {
  const NTree t = oracle::b2b2();
  Field mu = zeros(t);
  mu[v2(t, 1, 1)] = 1;
  const Field f = adjoint_hardy(t, mu);
  CHECK(support_level(t, Field::Ones(9), f) == 4.0);
  const MajorizationCertificate c = majorant_bitree(t, uniform_weight(t), f, 16, 4);
  CHECK(count(c.domination_checked_on) == 0);
  CHECK(c.phi[v2(t, 1, 1)] == doctest::Approx(1.0));
  CHECK(c.phi[v2(t, 0, 1)] == doctest::Approx(0.5));
  CHECK(c.phi[v2(t, 0, 0)] == doctest::Approx(0.25));
  CHECK(c.cost_ratio == doctest::Approx(1.5625 / 4));
  CHECK(c.cost_ok);
  CHECK(c.cost_bound() == doctest::Approx(4.0));
  CHECK_THROWS_AS(majorant_bitree(t, uniform_weight(t), f, 15, 4), PreconditionError);
  CHECK_THROWS_AS(majorant_bitree(t, uniform_weight(t), f, 16, 3), PreconditionError);
  CHECK_THROWS_AS(majorant_bitree(t, uniform_weight(t), Field::Ones(9), 40, 10), PreconditionError);
  CHECK_THROWS_AS(majorant_tritree(t, uniform_weight(t), f, 16, 4), ConfigError);
}

TEST_CASE("bi-tree and tri-tree majorants on hyperbolic path products") {
  for (int n = 2; n <= 3; ++n) {
    int band = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const MajorantInstance in = sample_majorant_instance(n, n == 2 ? 100 : 12, seed);
      const Field w = in.w.dense(in.t);
      CHECK(is_superadditive(in.t, in.f));
      CHECK(in.lambda >= 4 * in.delta);
      for (MajorantForm form : {MajorantForm::product, MajorantForm::outer}) {
        const MajorizationCertificate c = n == 2 ? majorant_bitree(in.t, in.w, in.f, in.lambda, in.delta, form)
                                                 : majorant_tritree(in.t, in.w, in.f, in.lambda, in.delta, form);
        band += count(c.domination_checked_on) > 0;
        CHECK(c.domination_ok);
        if (form == MajorantForm::product) CHECK(c.cost_ok);
        CHECK(recheck_certificate(in.t, w, in.f, c));
      }
    }
    CHECK(band >= 10);
  }
}

TEST_CASE("majorant instances are reproducible") {
  const MajorantInstance a = sample_majorant_instance(2, 20, 9), b = sample_majorant_instance(2, 20, 9);
  CHECK((a.f == b.f).all());
  CHECK(a.lambda == b.lambda);
}

TEST_CASE("tri-tree majorant on a corner mass of B2^3") {
  const NTree t = oracle::product(3, 1);
  Field mu = zeros(t);
  mu[t.size() - 1] = 1;
  const Field f = adjoint_hardy(t, mu);
  CHECK(support_level(t, Field::Ones(27), f) == 8.0);
  const MajorizationCertificate c = majorant_tritree(t, uniform_weight(t), f, 32, 8);
  CHECK(c.domination_ok);
  CHECK(c.cost_ok);
  CHECK(c.cost_power == 1);
  CHECK(c.cost_constant == 192);
}

TEST_CASE("certificate recheck catches tampering") {
  const NTree t = oracle::product(2, 2);
  Rng rng(1);
  const Field w = Field::Ones(static_cast<Eigen::Index>(t.size()));
  const Field f = truncated_adjoint(t, w, leaf_measure(t, rng, 0.3), 1.0);
  const double delta = support_level(t, w, f);
  MajorizationCertificate c = majorant_bitree(t, uniform_weight(t), f, 4 * delta, delta);
  CHECK(recheck_certificate(t, w, f, c));
  c.phi *= 2;
  CHECK_FALSE(recheck_certificate(t, w, f, c));
}

TEST_CASE("energy lemma checks") {
  Rng rng(5);
  for (int n = 2; n <= 3; ++n) {
    const NTree t = oracle::product(n, 2);
    for (int trial = 0; trial < 30; ++trial) {
      const TensorWeight tw = weight_from_s(t, std::vector<double>(n, trial % 2 ? 0.5 : 1.0));
      const Field w = tw.dense(t);
      const Field f = truncated_adjoint(t, w, leaf_measure(t, rng, 0.5), 1.0);
      const double delta = support_level(t, w, f);
      for (const LemmaCheck& r : energy_lemma_checks(t, tw, f, delta, 4 * delta + 1e-3)) {
        CHECK(r.ok);
        CHECK(r.ratio <= 1 + 1e-9);
      }
    }
    const auto zero = energy_lemma_checks(t, uniform_weight(t), zeros(t), 0, 1.0);
    CHECK(zero.size() == (n == 2 ? 2u : 3u));
    for (const LemmaCheck& r : zero) CHECK(r.ratio == 0);
  }
  const NTree t = oracle::product(2, 1);
  CHECK_THROWS_AS(energy_lemma_checks(t, uniform_weight(t), Field::Ones(9), 100, 100), PreconditionError);
  CHECK_THROWS_AS(energy_lemma_checks(oracle::product(1, 2), uniform_weight(oracle::product(1, 2)), Field::Ones(7),
                                      1, 1),
                  ConfigError);
}

TEST_CASE("two-function search on bi-trees") {
  const PairSearchReport r3 = conjecture_search_bitree_pair(3, 200, 77);
  CHECK(r3.domination_failures == 0);
  CHECK(r3.vacuous < r3.trials);
  CHECK(r3.min_domination_ratio >= 1.0);
  CHECK(r3.coincident_trials <= 20);
  // Depth 2: I g <= 9 g(root) < 10 delta, so every band is empty.
  const PairSearchReport r2 = conjecture_search_bitree_pair(2, 50, 77);
  CHECK(r2.vacuous == 50);
  CHECK(conjecture_search_bitree_pair(3, 200, 77).max_cost_ratio == r3.max_cost_ratio);
}

TEST_CASE("four-tree split ratio") {
  const ObstructionReport r0 = obstruction_4tree(0, 3, 1);
  CHECK(r0.max_ratio == 1.0);
  const ObstructionReport r1 = obstruction_4tree(1, 30, 1);
  REQUIRE(r1.exhaustive_max.has_value());
  CHECK(*r1.exhaustive_max >= 1.0);
  CHECK(r1.max_ratio >= *r1.exhaustive_max);
  CHECK_THROWS_AS(obstruction_4tree(4, 1, 1), ConfigError);
}
