#include "mtc/maxprinciple.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mtc/constants.hpp"

namespace mtc {

namespace {

void require_delta(double delta) {
  if (!(delta > 0)) throw PreconditionError("delta must be positive");
}

double safe_ratio(double num, double den) {
  if (num == 0) return 0;
  return den > 0 ? num / den : std::numeric_limits<double>::infinity();
}

}  // namespace

std::optional<SurrogateConstants> known_surrogate_constants(int n) {
  if (n == 1) return SurrogateConstants{1.0, 1.0};
  if (n == 2) return SurrogateConstants{0.5, std::pow(28.0, 0.25)};
  return std::nullopt;
}

SurrogateConstants self_pairing_constants(const SurrogateConstants& s) {
  return {2 * s.kappa / (1 + s.kappa), std::pow(s.c, 2 / (1 + s.kappa))};
}

SurrogateReport surrogate_check(const NTree& t, const TensorWeight& w, const Field& mu, const Field& rho, double delta,
                                std::optional<double> kappa) {
  require_delta(delta);
  check_field(t, mu, "mu");
  check_field(t, rho, "rho");
  w.validate(t);
  const Field wd = w.dense(t);
  SurrogateReport r;
  r.n = t.arity();
  r.delta = delta;
  r.kappa = kappa.value_or(1.0 / r.n);
  const EnergyReport em = truncated(t, wd, mu, delta);
  r.lhs = pairing(t, wd, mu, rho, delta);
  r.truncated_energy = em.truncated_energy;
  r.mu_energy = em.energy;
  r.mu_mass = em.total_mass;
  r.rho_mass = rho.sum();
  r.rho_energy = energy(t, wd, rho);
  r.implied_constant = safe_ratio(r.lhs, std::pow(delta * r.rho_mass, r.kappa) *
                                             std::pow(r.truncated_energy * r.rho_energy, (1 - r.kappa) / 2));

  switch (r.n) {
    case 1:
      r.bound_name = "one-tree maximum";
      r.bound_lhs = r.lhs;
      r.bound_rhs = delta * r.rho_mass;
      r.bound_checked = true;
      break;
    case 2:
      r.bound_name = "two-tree fourth power";
      r.bound_lhs = std::pow(r.lhs, 4);
      r.bound_rhs = 28 * delta * delta * r.truncated_energy * r.rho_energy * r.rho_mass * r.rho_mass;
      r.bound_checked = true;
      break;
    default:
      r.bound_name = r.n == 3 ? "three-tree cube" : "four-tree cube";
      r.bound_lhs = std::pow(r.lhs, 3);
      r.bound_rhs = delta * r.truncated_energy * r.rho_energy * r.rho_mass;
      break;
  }
  r.bound_ok = !r.bound_checked || leq_tol(r.bound_lhs, r.bound_rhs);
  r.recorded_constant = safe_ratio(r.bound_lhs, r.bound_rhs);
  if (r.n == 3)
    r.corollary_ratio = safe_ratio(r.lhs, std::sqrt(delta) * std::pow(r.mu_energy * r.mu_mass, 1.0 / 6) *
                                              std::pow(r.rho_energy * r.rho_mass, 1.0 / 3));
  return r;
}

PartialReport partial_check(const NTree& t, const Field& w, const Field& mu, double delta,
                            std::optional<double> kappa) {
  require_delta(delta);
  check_field(t, mu, "mu");
  PartialReport r;
  const double m = mu.sum();
  if (!(m > 0)) {
    r.skipped = true;
    return r;
  }
  const int n = t.arity();
  const double kap = kappa.value_or(1.0 / n);
  const double k = 2 * kap / (1 + kap);
  const EnergyReport e = truncated(t, w, mu, delta);
  r.lhs = e.truncated_energy;
  r.rhs = std::pow(delta * m, k) * std::pow(e.energy, 1 - k);
  r.ratio = safe_ratio(r.lhs, r.rhs);
  const double kc = 2.0 / (n + 1);
  r.conjecture_rhs = std::pow(delta * m, kc) * std::pow(e.energy, 1 - kc);
  r.conjecture_ratio = safe_ratio(r.lhs, r.conjecture_rhs);
  return r;
}

ExponentFit fit_partial_exponent(int n, int depth, int trials, std::uint64_t seed) {
  if (n < 1 || n > kMaxArity || depth < 0) throw ConfigError("bad arity or depth");
  std::vector<Tree> trees(n, build_dyadic_tree(depth, 2));
  const NTree t(trees);
  if (t.size() > vertex_budget()) throw ConfigError("product exceeds the vertex budget");
  const Field w = Field::Ones(static_cast<Eigen::Index>(t.size()));
  ExponentFit fit;
  fit.n = n;
  fit.depth = depth;
  fit.conjectured = 2.0 / (n + 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, 0xE7, static_cast<std::uint64_t>(k)));
    Field mu = zeros(t);
    const int points = 1 + static_cast<int>(rng.below(6));
    for (int i = 0; i < points; ++i) mu[rng.below(t.size())] += rng.uniform(0.1, 1);
    const double top = potential(t, w, mu).maxCoeff();
    const double delta = top * std::pow(10.0, rng.uniform(-1, 0));
    const PartialReport p = partial_check(t, w, mu, delta);
    if (p.skipped || p.lhs <= 0) continue;
    const double en = energy(t, w, mu);
    const double x = std::log(delta * mu.sum() / en), y = std::log(p.lhs / en);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.samples;
    fit.max_conjecture_ratio = std::max(fit.max_conjecture_ratio, p.conjecture_ratio);
  }
  if (fit.samples >= 2) {
    const double den = fit.samples * sxx - sx * sx;
    if (den > 0) {
      fit.slope = (fit.samples * sxy - sx * sy) / den;
      fit.intercept = (sy - fit.slope * sx) / fit.samples;
    }
  }
  return fit;
}

LargeEnergySet large_energy_downset(const NTree& t, const Field& w, const Field& nu, SurrogateConstants s) {
  check_field(t, nu, "nu");
  check_field(t, w, "w");
  const double m = nu.sum();
  if (!(m > 0)) throw PreconditionError("measure must not vanish identically");
  if (!(s.kappa > 0) || !(s.c > 0)) throw PreconditionError("kappa and C must be positive");
  const SurrogateConstants sp = self_pairing_constants(s);
  const Field g = adjoint_hardy(t, nu);
  const Field e = w * g * g;
  const double en = e.sum();
  LargeEnergySet r;
  r.threshold = std::pow(2 * sp.c, -1 / sp.kappa) * en / m;
  r.set = where_greater(hardy(t, w * g), r.threshold);
  double inside = 0;
  for (Vertex v = 0; v < t.size(); ++v)
    if (r.set[v]) inside += e[v];
  r.fraction = en > 0 ? inside / en : 0;
  const double low = en - inside;  // E_threshold[nu]
  r.constants_consistent = en > 0 && leq_tol(low, sp.c * std::pow(r.threshold * m, sp.kappa) * std::pow(en, 1 - sp.kappa));
  r.fraction_ok = !r.constants_consistent || leq_tol(0.5, r.fraction);
  return r;
}

namespace {

// V_P(omega) for every P; meaningful only for P >= omega.
Field interval_row(const NTree& t, const Field& f, Vertex omega) {
  const VertexSet up = above(t, omega);
  Field h = zeros(t);
  for (Vertex v = 0; v < t.size(); ++v)
    if (up[v]) h[v] = f[v];
  return adjoint_hardy(t, h);
}

}  // namespace

double interval_potential(const NTree& t, const Field& w, const Field& nu, Vertex p, Vertex omega) {
  check_field(t, nu, "nu");
  check_field(t, w, "w");
  if (p >= t.size() || omega >= t.size()) throw ConfigError("vertex out of range");
  if (!leq(t, omega, p)) throw PreconditionError("interval needs omega <= P");
  const Field g = adjoint_hardy(t, nu);
  double s = 0;
  for (Vertex q = 0; q < t.size(); ++q)
    if (leq(t, omega, q) && leq(t, q, p)) s += w[q] * g[q];
  return s;
}

Field good_potential(const NTree& t, const Field& w, const Field& mu, double eps) {
  check_field(t, mu, "mu");
  check_field(t, w, "w");
  const Field f = w * adjoint_hardy(t, mu);
  Field out = zeros(t);
  for (Vertex omega = 0; omega < t.size(); ++omega) {
    const Field row = interval_row(t, f, omega);
    const VertexSet up = above(t, omega);
    double s = 0;
    for (Vertex p = 0; p < t.size(); ++p)
      if (up[p] && row[p] > eps) s += f[p];
    out[omega] = s;
  }
  return out;
}

double default_covering_kappa(int n) { return 2.0 / (n + 1); }

namespace {

std::vector<double> eps_sequence(int n, double eps, double kappa) {
  std::vector<double> seq;
  double e = eps;
  for (int j = 1; j < n; ++j) {
    seq.push_back(e);
    e = eps * std::pow(e, 1 / kappa);
  }
  return seq;
}

double eps_product(double eps, const std::vector<double>& seq) {
  double p = eps;
  for (double e : seq) p *= e;
  return p;
}

int popcount(CoordMask m) {
  int c = 0;
  for (; m; m &= m - 1) ++c;
  return c;
}

// Working state for one covering trace. Sets are masks over the ancestors of
// omega, indexed by position in `anc`.
class Cover {
 public:
  Cover(const NTree& t, Vertex omega, CoveringTrace& trace) : t_(t), trace_(trace) {
    for (Vertex v = 0; v < t.size(); ++v)
      if (leq(t, omega, v)) {
        pos_[v] = anc_.size();
        anc_.push_back(v);
      }
  }

  const std::vector<Vertex>& anc() const { return anc_; }

  // W_k over positions, with W_n = U.
  std::vector<char> level(int k) const {
    const VertexSet& s = k == t_.arity() ? trace_.u : trace_.w[k - 1];
    std::vector<char> m(anc_.size());
    for (std::size_t i = 0; i < anc_.size(); ++i) m[i] = s[anc_[i]];
    return m;
  }

  // Up_J p minus the set `excl`.
  std::vector<char> up_minus(CoordMask j, Vertex p, const std::vector<char>& excl) const {
    std::vector<char> m(anc_.size(), 0);
    for (std::size_t i = 0; i < anc_.size(); ++i) {
      const Vertex q = anc_[i];
      if (excl[i] || !leq(t_, p, q)) continue;
      bool ok = true;
      for (int c = 0; c < t_.arity() && ok; ++c)
        if (!(j & coord_bit(c)) && t_.coord(q, c) != t_.coord(p, c)) ok = false;
      m[i] = ok;
    }
    return m;
  }

  std::vector<std::size_t> maximal(const std::vector<char>& s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < anc_.size(); ++i) {
      if (!s[i]) continue;
      bool top = true;
      for (std::size_t k = 0; k < anc_.size() && top; ++k)
        if (k != i && s[k] && leq(t_, anc_[i], anc_[k])) top = false;
      if (top) out.push_back(i);
    }
    return out;
  }

  // Union of the intervals [omega, p'] over p' in r.
  std::vector<char> covered(const std::vector<Vertex>& r) const {
    std::vector<char> m(anc_.size(), 0);
    for (Vertex p : r)
      for (std::size_t i = 0; i < anc_.size(); ++i)
        if (leq(t_, anc_[i], p)) m[i] = 1;
    return m;
  }

  std::size_t pos(Vertex v) const { return pos_.at(v); }

 private:
  const NTree& t_;
  CoveringTrace& trace_;
  std::vector<Vertex> anc_;
  std::map<Vertex, std::size_t> pos_;
};

}  // namespace

double default_eps_prime(int n) {
  return eps_product(kCoveringEps, eps_sequence(n, kCoveringEps, default_covering_kappa(n)));
}

CoveringTrace covering_construction(const NTree& t, const Field& w, const Field& mu, Vertex omega, double eps,
                                    std::optional<double> kappa) {
  const int n = t.arity();
  if (n != 2 && n != 3) throw ConfigError("covering construction needs a two- or three-tree");
  check_field(t, mu, "mu");
  check_field(t, w, "w");
  if (omega >= t.size()) throw ConfigError("vertex out of range");
  if (!(eps > 0)) throw PreconditionError("eps must be positive");

  CoveringTrace tr;
  tr.n = n;
  tr.omega = omega;
  tr.eps = eps;
  tr.kappa = kappa.value_or(default_covering_kappa(n));
  if (!(tr.kappa > 0)) throw PreconditionError("kappa must be positive");
  tr.eps_seq = eps_sequence(n, eps, tr.kappa);
  tr.eps_prime = eps_product(eps, tr.eps_seq);

  const Field f = w * adjoint_hardy(t, mu);
  const Field v = hardy(t, f);
  const Field row = interval_row(t, f, omega);
  const VertexSet up = above(t, omega);
  tr.u.assign(t.size(), 0);
  for (Vertex q = 0; q < t.size(); ++q) tr.u[q] = up[q] && row[q] > tr.eps_prime;
  for (double ej : tr.eps_seq) {
    VertexSet s(t.size(), 0);
    for (Vertex q = 0; q < t.size(); ++q) s[q] = up[q] && v[q] <= ej;
    tr.w.push_back(s);
  }
  auto subset = [&](const VertexSet& a, const VertexSet& b) {
    for (Vertex q = 0; q < t.size(); ++q)
      if (a[q] && !b[q]) return false;
    return true;
  };
  tr.nested = subset(tr.u, tr.w.back());
  for (std::size_t j = 1; j < tr.w.size(); ++j) tr.nested = tr.nested && subset(tr.w[j], tr.w[j - 1]);

  Cover cv(t, omega, tr);
  const auto& anc = cv.anc();
  const CoordMask full = all_coords(t);
  // families[J][pos(p)]
  std::vector<std::vector<CoveringFamily>> fam(full + 1, std::vector<CoveringFamily>(anc.size()));

  for (int size = 1; size <= n; ++size)
    for (CoordMask j = 1; j <= full; ++j) {
      if (popcount(j) != size) continue;
      const std::vector<char> outer = cv.level(n - size + 1);
      for (std::size_t ip = 0; ip < anc.size(); ++ip) {
        CoveringFamily& cf = fam[j][ip];
        cf.coords = j;
        cf.p = anc[ip];
        const std::vector<char> region = cv.up_minus(j, cf.p, outer);
        const std::vector<std::size_t> tops = cv.maximal(region);
        if (size == 1) {
          for (std::size_t i : tops) cf.q.push_back(anc[i]);
          cf.r = cf.q;
        } else {
          const std::vector<char> inner = cv.level(n - size + 2);
          std::vector<std::vector<char>> taken;
          for (std::size_t i : tops) {
            const std::vector<char> s = cv.up_minus(j, anc[i], inner);
            bool disjoint = true;
            for (const auto& other : taken)
              for (std::size_t k = 0; k < anc.size() && disjoint; ++k)
                if (s[k] && other[k]) disjoint = false;
            if (!disjoint) continue;
            taken.push_back(s);
            cf.q.push_back(anc[i]);
          }
          for (CoordMask jp = 1; jp <= full; ++jp) {
            if ((jp & ~j) || popcount(jp) != size - 1) continue;
            for (Vertex q : cf.q) {
              const auto& sub = fam[jp][cv.pos(q)].r;
              cf.r.insert(cf.r.end(), sub.begin(), sub.end());
            }
          }
        }
        std::sort(cf.r.begin(), cf.r.end());
        cf.r.erase(std::unique(cf.r.begin(), cf.r.end()), cf.r.end());

        // Inclusion check, then close any gap with uncovered maximal points.
        bool failed = false;
        for (;;) {
          const std::vector<char> d = cv.covered(cf.r);
          std::vector<char> gap(anc.size(), 0);
          bool any = false;
          for (std::size_t k = 0; k < anc.size(); ++k)
            if (region[k] && !d[k]) gap[k] = any = true;
          if (!any) break;
          const std::size_t top = cv.maximal(gap).front();
          if (!failed) {
            failed = true;
            ++tr.raw_failures;
            if (!tr.first_violation) tr.first_violation = anc[top];
          }
          cf.r.insert(std::upper_bound(cf.r.begin(), cf.r.end(), anc[top]), anc[top]);
          ++tr.augmentations;
        }
      }
    }

  for (CoordMask j = 1; j <= full; ++j)
    for (std::size_t ip = 0; ip < anc.size(); ++ip) tr.families.push_back(std::move(fam[j][ip]));

  // Final recheck of every inclusion from the stored families.
  tr.cover_verified = true;
  for (const CoveringFamily& cf : tr.families) {
    const std::vector<char> region = cv.up_minus(cf.coords, cf.p, cv.level(n - popcount(cf.coords) + 1));
    const std::vector<char> d = cv.covered(cf.r);
    for (std::size_t k = 0; k < anc.size(); ++k)
      if (region[k] && !d[k]) tr.cover_verified = false;
  }

  const CoveringFamily& top = tr.families[(full - 1) * anc.size() + cv.pos(omega)];
  tr.r_size = top.r.size();
  double prod = 1;
  for (double e : tr.eps_seq) prod *= e;
  tr.size_product = static_cast<double>(tr.r_size) * prod;
  for (Vertex q : anc)
    if (!tr.w.front()[q]) tr.mass_off_w1 += f[q];
  for (Vertex p : top.r) tr.cover_mass += row[p];
  tr.mass_ok = !tr.cover_verified || leq_tol(tr.mass_off_w1, tr.cover_mass);

  for (Vertex q : anc) {
    if (tr.u[q]) tr.good_value += f[q];
    if (!tr.good_witness && tr.u[q] && !tr.w.back()[q]) tr.good_witness = q;
  }
  tr.good_ok = !tr.good_witness || leq_tol(tr.eps_seq.back(), tr.good_value);
  return tr;
}

CoveringSweep covering_sweep(int n, int trials, std::uint64_t seed) {
  if (n != 2 && n != 3) throw ConfigError("covering sweep needs n = 2 or 3");
  CoveringSweep sw;
  sw.n = n;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, 0xC0, static_cast<std::uint64_t>(k)));
    const int depth = 1 + static_cast<int>(rng.below(n == 2 ? 3 : 2));
    const NTree t(std::vector<Tree>(n, build_dyadic_tree(depth, 2)));
    const Field w = Field::Ones(static_cast<Eigen::Index>(t.size()));
    Field mu = zeros(t);
    const int pts = 1 + static_cast<int>(rng.below(20));
    for (int i = 0; i < pts; ++i) mu[rng.below(t.size())] += rng.uniform(0.1, 1);
    Vertex omega = rng.below(t.size());
    mu *= std::pow(10.0, rng.uniform(-1.5, 0.5)) / potential(t, w, mu).maxCoeff();
    const double eps = rng.uniform(0.25, 0.95);
    if (rng.coin(0.7)) omega = t.size() - 1 - rng.below(t.size() / 3);
    const CoveringTrace tr = covering_construction(t, w, mu, omega, eps);
    ++sw.traces;
    sw.nested += tr.nested;
    sw.nested_nonempty += tr.nested && tr.r_size > 0;
    sw.raw_failures += tr.raw_failures > 0;
    sw.raw_failures_nested += tr.nested && tr.raw_failures > 0;
    sw.augmentations += tr.augmentations;
    sw.final_failures += !tr.cover_verified;
    sw.mass_failures += !tr.mass_ok;
    sw.good_failures += !tr.good_ok;
    if (tr.nested) sw.max_size_product = std::max(sw.max_size_product, tr.size_product);
  }
  return sw;
}

MainEstimate main_estimate_check(const NTree& t, const Field& w, const Field& mu, std::optional<double> eps_prime) {
  if (t.arity() < 2) throw ConfigError("the main estimate is stated for n >= 2");
  check_field(t, mu, "mu");
  check_field(t, w, "w");
  const double m = mu.sum();
  const double en = energy(t, w, mu);
  if (!(m > 0) || !(en > 0)) throw PreconditionError("measure must carry positive energy");
  MainEstimate r;
  r.scale = m / en;
  r.eps_prime = eps_prime.value_or(default_eps_prime(t.arity()));
  const Field nm = mu * r.scale;
  const Field v = potential(t, w, nm);
  r.min_potential_on_support = std::numeric_limits<double>::infinity();
  for (Vertex q = 0; q < t.size(); ++q)
    if (nm[q] > 0) {
      r.min_potential_on_support = std::min(r.min_potential_on_support, v[q]);
      if (!leq_tol(1.0 / 3, v[q]))
        throw PreconditionError("normalized potential below 1/3 at vertex " + std::to_string(q));
    }
  const Field good = good_potential(t, w, nm, r.eps_prime);
  r.ratio = (good * nm).sum() / nm.sum();
  return r;
}

namespace {

// Checks both balancing conclusions for the down-set s.
bool balanced(const NTree& t, const Field& w, const Field& nu, const DownSet& s, double a, double full_energy,
              BalanceResult& out) {
  if (count(s) == 0) return false;
  const Field sub = restrict_to(nu, s);
  const Field v = potential(t, w, sub);
  double vmin = std::numeric_limits<double>::infinity();
  for (Vertex q = 0; q < t.size(); ++q)
    if (s[q]) vmin = std::min(vmin, v[q]);
  const double e = energy(t, w, sub);
  if (!leq_tol(a / 3, vmin) || !leq_tol(full_energy / 3, e)) return false;
  out.found = true;
  out.set = s;
  out.nu = sub;
  out.min_potential = vmin;
  out.energy_fraction = full_energy > 0 ? e / full_energy : 0;
  return true;
}

}  // namespace

BalanceResult balance(const NTree& t, const Field& w, const Field& nu, double a) {
  check_field(t, nu, "nu");
  check_field(t, w, "w");
  const double en = energy(t, w, nu);
  if (!(a > 0)) throw PreconditionError("A must be positive");
  if (!leq_tol(a * nu.sum(), en)) throw PreconditionError("balancing needs E[nu] >= A |nu|");
  BalanceResult r;
  r.method = "none";

  // Keep the vertices where the current potential reaches A/3. Potentials only
  // shrink as mass is removed, so the sets decrease to a fixed point.
  DownSet s(t.size(), 1);
  for (;;) {
    const Field v = potential(t, w, restrict_to(nu, s));
    DownSet next(t.size(), 0);
    for (Vertex q = 0; q < t.size(); ++q) next[q] = s[q] && leq_tol(a / 3, v[q]);
    if (next == s) break;
    s = std::move(next);
  }
  if (balanced(t, w, nu, s, a, en, r)) {
    r.method = "iteration";
    return r;
  }
  if (t.size() <= kDownSetEnumerationCap) {
    for_each_down_set(t, [&](const DownSet& d) {
      if (!r.found) balanced(t, w, nu, d, a, en, r);
    });
    if (r.found) r.method = "exhaustive";
  }
  return r;
}

TheoremSuiteReport theorem_ratio_suite(const TheoremSuiteConfig& config) {
  const int n = config.n;
  if (n < 1 || n > 3) throw ConfigError("theorem suite runs on 1-, 2- and 3-trees");
  if (config.max_depth < 1 || config.s_values.empty() || config.max_support < 1)
    throw ConfigError("bad theorem suite configuration");
  TheoremSuiteReport rep;
  rep.config = config;
  const double kappa = 1.0 / n;
  rep.kappa_prime = kappa / (2 * (1 + kappa));
  const char* names[] = {"hc/carleson", "ce/hc", "hc/box", "ce/box", "pairing"};
  for (const char* nm : names) rep.envelopes.push_back({nm, 0, 0, std::numeric_limits<double>::infinity()});
  auto add = [&](int i, double x) {
    RatioEnvelope& e = rep.envelopes[i];
    ++e.instances;
    e.max_ratio = std::max(e.max_ratio, x);
    e.min_ratio = std::min(e.min_ratio, x);
  };

  for (int k = 0; k < config.trials; ++k) {
    Rng rng(derive_seed(config.seed, 0x7E, static_cast<std::uint64_t>(k)));
    const int depth = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.max_depth)));
    const NTree t(std::vector<Tree>(n, build_dyadic_tree(depth, 2)));
    std::vector<double> s(n);
    for (double& x : s) x = config.s_values[rng.below(config.s_values.size())];
    const Field w = weight_from_s(t, s).dense(t);
    auto draw = [&]() {
      Field m = zeros(t);
      const int pts = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.max_support)));
      for (int i = 0; i < pts; ++i) m[rng.below(t.size())] += rng.uniform(0.1, 1);
      return m;
    };
    const Field mu = draw();
    const Field rho = draw();
    const std::uint64_t sub = derive_seed(config.seed, 0x7F, static_cast<std::uint64_t>(k));
    const ConstantsReport c = ordering_report(t, w, mu, SearchMode::sampled(200, sub));
    rep.exact_instances += c.chain_checked;
    rep.chain_failures += c.chain_checked && !c.chain_ok;
    add(0, c.hereditary.value / c.carleson.value);
    add(1, c.embedding.value / c.hereditary.value);
    add(2, c.hereditary.value / c.box.value);
    add(3, c.embedding.value / c.box.value);

    // Normalize both measures to hereditary constant 1.
    const double hr = hereditary_constant(t, w, rho,
                                          count(support(rho)) <= kHereditaryExactCap ? SearchMode::exhaustive()
                                                                                     : SearchMode::sampled(200, sub))
                          .value;
    const Field mn = mu / c.hereditary.value, rn = rho / hr;
    const double lhs = pairing(t, w, mn, rn);
    add(4, lhs / (std::pow(mn.sum(), 0.5 - rep.kappa_prime) * std::pow(rn.sum(), 0.5 + rep.kappa_prime)));
  }
  for (RatioEnvelope& e : rep.envelopes)
    if (e.instances == 0) e.min_ratio = 0;
  return rep;
}

}  // namespace mtc
