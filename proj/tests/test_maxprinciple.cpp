#include "doctest.h"
#include "mtc/constants.hpp"
#include "mtc/maxprinciple.hpp"
#include "oracles.hpp"

using namespace mtc;
using oracle::v2;

namespace {

Field corner_mass(const NTree& t, double m = 1) {
  Field mu = zeros(t);
  mu[v2(t, 1, 1)] = m;
  return mu;
}

// Brute-force good potential from the definition.
Field good_brute(const NTree& t, const Field& w, const Field& mu, double eps) {
  const Field f = w * oracle::adjoint(t, mu);
  Field out = zeros(t);
  for (Vertex om = 0; om < t.size(); ++om)
    for (Vertex p = 0; p < t.size(); ++p) {
      if (!leq(t, om, p)) continue;
      double s = 0;
      for (Vertex q = 0; q < t.size(); ++q)
        if (leq(t, om, q) && leq(t, q, p)) s += f[q];
      if (s > eps) out[om] += f[p];
    }
  return out;
}

// Every subset of the vertices that is a down-set and balances nu at level a.
int balancing_sets(const NTree& t, const Field& w, const Field& nu, double a) {
  int found = 0;
  const double en = oracle::energy(t, w, nu);
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << t.size()); ++bits) {
    std::vector<char> s(t.size());
    for (Vertex v = 0; v < t.size(); ++v) s[v] = (bits >> v) & 1;
    if (!oracle::is_down_set_bruteforce(t, s)) continue;
    Field sub = zeros(t);
    for (Vertex v = 0; v < t.size(); ++v)
      if (s[v]) sub[v] = nu[v];
    const Field pot = oracle::hardy(t, w * oracle::adjoint(t, sub));
    bool ok = oracle::energy(t, w, sub) >= en / 3 - 1e-12;
    for (Vertex v = 0; v < t.size(); ++v)
      if (s[v] && pot[v] < a / 3 - 1e-12) ok = false;
    found += ok;
  }
  return found;
}

}  // namespace

TEST_CASE("surrogate check on hand instances") {
  const NTree t = oracle::b2b2();
  const Field mu = corner_mass(t);
  const SurrogateReport r = surrogate_check(t, uniform_weight(t), mu, mu, 4);
  CHECK(r.lhs == doctest::Approx(4));
  CHECK(r.bound_checked);
  CHECK(r.bound_lhs == doctest::Approx(256));
  CHECK(r.bound_rhs == doctest::Approx(28 * 16 * 4 * 4));
  CHECK(r.bound_ok);
  CHECK(r.implied_constant == doctest::Approx(1.0));

  const SurrogateReport z = surrogate_check(t, uniform_weight(t), mu, zeros(t), 4);
  CHECK(z.lhs == 0);
  CHECK(z.bound_ok);
  CHECK(z.implied_constant == 0);
  CHECK_THROWS_AS(surrogate_check(t, uniform_weight(t), mu, mu, 0), PreconditionError);
}

TEST_CASE("surrogate bounds on random instances") {
  Rng rng(21);
  for (int n = 1; n <= 3; ++n) {
    const NTree t = oracle::product(n, n == 1 ? 4 : 2);
    for (int trial = 0; trial < 60; ++trial) {
      const TensorWeight w = weight_from_s(t, std::vector<double>(n, trial % 3 == 0 ? 0.5 : 1.0));
      const Field mu = oracle::random_sparse(t, rng, 4);
      const Field rho = oracle::random_sparse(t, rng, 3);
      const double top = potential(t, w.dense(t), mu).maxCoeff();
      const SurrogateReport r = surrogate_check(t, w, mu, rho, top * rng.uniform(0.05, 1.2));
      CHECK(r.bound_ok);
      CHECK(r.lhs >= 0);
      if (n == 3) CHECK(r.corollary_ratio >= 0);
    }
  }
}

TEST_CASE("self-pairing form") {
  const SurrogateConstants two = *known_surrogate_constants(2);
  const SurrogateConstants sp = self_pairing_constants(two);
  CHECK(sp.kappa == doctest::Approx(2.0 / 3));
  CHECK(sp.c == doctest::Approx(std::cbrt(28.0)));
  CHECK_FALSE(known_surrogate_constants(3).has_value());

  Rng rng(4);
  const NTree t = oracle::product(2, 2);
  const Field w = Field::Ones(static_cast<Eigen::Index>(t.size()));
  const Field mu = oracle::random_sparse(t, rng, 5);
  const double top = potential(t, w, mu).maxCoeff();
  const PartialReport all = partial_check(t, w, mu, top);
  CHECK(all.lhs == doctest::Approx(energy(t, w, mu)));
  CHECK(all.ratio <= sp.c);
  CHECK(all.conjecture_rhs == doctest::Approx(all.rhs));
  CHECK(partial_check(t, w, zeros(t), 1).skipped);

  const ExponentFit fit = fit_partial_exponent(4, 1, 60, 3);
  CHECK(fit.samples > 30);
  CHECK(fit.conjectured == doctest::Approx(0.4));
  CHECK(std::isfinite(fit.slope));
}

TEST_CASE("large energy down-set") {
  const NTree b = oracle::b2();
  Field nu = zeros(b);
  nu[1] = 1;
  const LargeEnergySet r = large_energy_downset(b, Field::Ones(3), nu, *known_surrogate_constants(1));
  CHECK(r.threshold == doctest::Approx(1.0));
  CHECK(r.set == VertexSet{0, 1, 0});
  CHECK(r.fraction == doctest::Approx(0.5));
  CHECK(r.constants_consistent);
  CHECK(r.fraction_ok);

  // Constants too large for the instance: the threshold clears every potential.
  const LargeEnergySet e = large_energy_downset(b, Field::Ones(3), nu, {1.0, 1e-3});
  CHECK(count(e.set) == 0);
  CHECK(e.fraction == 0);
  CHECK_FALSE(e.constants_consistent);

  Rng rng(31);
  const NTree t = oracle::product(2, 3);
  for (int trial = 0; trial < 40; ++trial) {
    const Field w = weight_from_s(t, {trial % 2 ? 0.75 : 1.0, 0.5}).dense(t);
    const LargeEnergySet s = large_energy_downset(t, w, oracle::random_sparse(t, rng, 6), *known_surrogate_constants(2));
    CHECK(is_down_set(t, s.set));
    CHECK(s.constants_consistent);
    CHECK(s.fraction >= 0.5);
  }
}

TEST_CASE("interval and good potentials") {
  const NTree t = oracle::b2b2();
  const Field w = Field::Ones(9);
  const Field mu = corner_mass(t);
  CHECK(interval_potential(t, w, mu, v2(t, 0, 0), v2(t, 1, 1)) == 4.0);
  CHECK(interval_potential(t, w, mu, v2(t, 1, 1), v2(t, 1, 1)) == 1.0);
  CHECK(interval_potential(t, w, mu, v2(t, 0, 1), v2(t, 1, 1)) == 2.0);
  CHECK_THROWS_AS(interval_potential(t, w, mu, v2(t, 1, 1), v2(t, 0, 0)), PreconditionError);
  CHECK((good_potential(t, w, mu, 4.0) == 0).all());
  CHECK(good_potential(t, w, mu, 1.5)[v2(t, 1, 1)] == doctest::Approx(3.0));

  Rng rng(12);
  const NTree t2 = oracle::product(2, 2);
  const Field w2 = weight_from_s(t2, {0.5, 1.0}).dense(t2);
  for (int trial = 0; trial < 10; ++trial) {
    const Field m = oracle::random_sparse(t2, rng, 4);
    const double eps = rng.uniform(0, 2);
    CHECK(((good_potential(t2, w2, m, eps) - good_brute(t2, w2, m, eps)).abs() <= 1e-12).all());
  }
}

TEST_CASE("covering construction on hand traces") {
  const NTree t = oracle::b2b2();
  const Field w = Field::Ones(9);
  const CoveringTrace z = covering_construction(t, w, zeros(t), v2(t, 1, 1), 0.25);
  CHECK(count(z.u) == 0);
  CHECK(z.nested);
  CHECK(z.cover_verified);
  CHECK(z.r_size == 0);

  // Corner mass normalized to E = |mu| = 1/4: V = 1 at the corner.
  const CoveringTrace c = covering_construction(t, w, corner_mass(t, 0.25), v2(t, 1, 1), 0.25);
  CHECK(c.eps_seq == std::vector<double>{0.25});
  CHECK(c.eps_prime == doctest::Approx(1.0 / 16));
  CHECK(count(c.u) == 4);
  CHECK(count(c.w[0]) == 1);
  CHECK(c.w[0][v2(t, 0, 0)]);
  CHECK_FALSE(c.nested);
  REQUIRE(c.good_witness.has_value());
  CHECK(c.good_value == doctest::Approx(1.0));
  CHECK(c.good_ok);
  // Outside the nested case the inclusion is not claimed; the gap is closed by augmentation.
  CHECK(c.raw_failures == 3);
  CHECK(c.first_violation == v2(t, 0, 1));
  CHECK(c.cover_verified);

  // Small mass: U is the root alone, W_1 is everything.
  const CoveringTrace s = covering_construction(t, w, corner_mass(t, 1.0 / 32), v2(t, 1, 1), 0.25);
  CHECK(s.nested);
  CHECK(count(s.u) == 1);
  CHECK(s.raw_failures == 0);
  CHECK(s.cover_verified);
  CHECK_THROWS_AS(covering_construction(oracle::b2(), Field::Ones(3), zeros(oracle::b2()), 0, 0.25), ConfigError);
}

TEST_CASE("covering sweeps") {
  for (int n = 2; n <= 3; ++n) {
    const CoveringSweep sw = covering_sweep(n, 120, 9);
    CHECK(sw.final_failures == 0);
    CHECK(sw.raw_failures_nested == 0);
    CHECK(sw.mass_failures == 0);
    CHECK(sw.good_failures == 0);
    CHECK(sw.nested > 0);
  }
}

TEST_CASE("main estimate") {
  const NTree t = oracle::b2b2();
  const Field w = Field::Ones(9);
  const MainEstimate m = main_estimate_check(t, w, corner_mass(t, 3));
  CHECK(m.scale == doctest::Approx(1.0 / 12));
  CHECK(m.min_potential_on_support == doctest::Approx(1.0));
  CHECK(m.ratio == doctest::Approx(1.0));
  CHECK(m.eps_prime == doctest::Approx(1.0 / 16));

  Field bad = corner_mass(t);
  bad[v2(t, 2, 2)] = 1e-3;
  CHECK_THROWS_AS(main_estimate_check(t, w, bad), PreconditionError);
  CHECK_THROWS_AS(main_estimate_check(oracle::b2(), Field::Ones(3), Field::Ones(3)), ConfigError);
}

TEST_CASE("balancing") {
  const NTree t = oracle::b2b2();
  const Field w = Field::Ones(9);
  const Field nu = corner_mass(t);
  CHECK(balancing_sets(t, w, nu, 4) > 0);
  const BalanceResult r = balance(t, w, nu, 4);
  REQUIRE(r.found);
  CHECK(is_down_set(t, r.set));
  CHECK(r.min_potential >= 4.0 / 3);
  CHECK(r.energy_fraction >= 1.0 / 3);
  CHECK((r.nu == nu).all());
  CHECK_THROWS_AS(balance(t, w, nu, 5), PreconditionError);

  Rng rng(17);
  const NTree t2 = oracle::product(2, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const Field w2 = weight_from_s(t2, {trial % 2 ? 0.5 : 1.0, 0.75}).dense(t2);
    const Field m = oracle::random_sparse(t2, rng, 5);
    const double a = energy(t2, w2, m) / m.sum() * rng.uniform(0.3, 1.0);
    const BalanceResult b = balance(t2, w2, m, a);
    CHECK(b.found);
    CHECK(is_down_set(t2, b.set));
    CHECK(leq_tol(a / 3, b.min_potential));
    CHECK(leq_tol(1.0 / 3, b.energy_fraction));
  }
}

TEST_CASE("theorem ratio suite") {
  TheoremSuiteConfig one;
  one.n = 2;
  one.max_depth = 2;
  one.trials = 10;
  one.max_support = 1;
  const TheoremSuiteReport r = theorem_ratio_suite(one);
  for (int i = 0; i < 4; ++i) {
    CHECK(r.envelopes[i].max_ratio == doctest::Approx(1.0));
    CHECK(r.envelopes[i].min_ratio == doctest::Approx(1.0));
  }
  CHECK(r.kappa_prime == doctest::Approx(1.0 / 6));

  TheoremSuiteConfig c;
  c.n = 3;
  c.trials = 15;
  const TheoremSuiteReport a = theorem_ratio_suite(c);
  CHECK(a.chain_failures == 0);
  for (const RatioEnvelope& e : a.envelopes) {
    CHECK(e.instances == 15);
    CHECK(std::isfinite(e.max_ratio));
  }
  const TheoremSuiteReport b = theorem_ratio_suite(c);
  CHECK(b.envelopes[4].max_ratio == a.envelopes[4].max_ratio);
}
