#include "mtc/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mtc {

namespace {

constexpr double kDominationSlack = 1e-9;

NTree binary_product(int n, int depth) {
  std::vector<Tree> ts;
  for (int j = 0; j < n; ++j) ts.push_back(build_dyadic_tree(depth));
  return NTree(ts);
}

void require_superadditive(const NTree& t, const Field& f) {
  for (int j = 0; j < t.arity(); ++j) {
    const Field d = delta_coord(t, f, j);
    const double tol = 1e-12 * f.abs().maxCoeff();
    for (Vertex v = 0; v < t.size(); ++v)
      if (d[v] < -tol)
        throw PreconditionError("f is not superadditive in coordinate " + std::to_string(j) + " at vertex " +
                                std::to_string(v));
  }
}

void require_support(const NTree& t, const Field& f, const Field& level, double delta) {
  for (Vertex v = 0; v < t.size(); ++v)
    if (f[v] != 0 && level[v] > delta * (1 + 1e-12))
      throw PreconditionError("support condition fails at vertex " + std::to_string(v));
}

// Fills the domination fields from lhs = I(w phi), rhs = I(w f).
void check_domination(MajorizationCertificate& c, const Field& lhs, const Field& rhs) {
  c.domination_ok = true;
  c.worst_domination_gap = std::numeric_limits<double>::infinity();
  c.worst_vertex.reset();
  for (std::size_t v = 0; v < c.domination_checked_on.size(); ++v) {
    if (!c.domination_checked_on[v]) continue;
    const double gap = lhs[v] - rhs[v];
    if (gap < c.worst_domination_gap) {
      c.worst_domination_gap = gap;
      c.worst_vertex = v;
    }
    if (gap < -kDominationSlack * std::max(1.0, std::abs(rhs[v]))) c.domination_ok = false;
  }
  if (!c.worst_vertex) c.worst_domination_gap = 0;
}

void finish_cost(MajorizationCertificate& c, const Field& w, const Field& f) {
  const double base = (w * f * f).sum();
  c.cost_ratio = base > 0 ? (w * c.phi * c.phi).sum() / base : 0.0;
  c.cost_ok = c.cost_ratio <= c.cost_bound() * (1 + 1e-9) + 1e-15;
}

void require_common(const Field& f, double lambda, double delta, double factor) {
  if (!(delta >= 0)) throw PreconditionError("delta must be nonnegative");
  if (!(lambda > 0) || lambda < factor * delta * (1 - 1e-12))
    throw PreconditionError("lambda must be positive and at least " + std::to_string(static_cast<int>(factor)) +
                            " delta");
  if (!(f >= 0).all()) throw PreconditionError("f must be nonnegative");
}

MajorizationCertificate multi_majorant(const NTree& t, const TensorWeight& tw, const Field& f, double lambda,
                                       double delta, MajorantForm form, int arity, const char* name,
                                       double constant, int power) {
  if (t.arity() != arity) throw ConfigError(std::string(name) + " majorant needs arity " + std::to_string(arity));
  check_field(t, f, "f");
  tw.validate(t);
  require_common(f, lambda, delta, 4);
  require_superadditive(t, f);
  const Field w = tw.dense(t);
  const Field level = hardy(t, w * f);
  require_support(t, f, level, delta);

  MajorizationCertificate c;
  c.construction = name;
  c.form = form;
  c.lambda = lambda;
  c.delta = delta;
  c.cost_constant = constant;
  c.cost_power = power;
  const Field cut = (level <= 2 * lambda).cast<double>();
  Field sum = zeros(t);
  if (arity == 2) {
    sum = hardy_coord(t, tw.partial(t, 1) * f, 1) * hardy_coord(t, tw.partial(t, 2) * f, 2);
  } else {
    for (int i = 0; i < arity; ++i) {
      const CoordMask own = coord_bit(i), rest = all_coords(t) & ~own;
      sum += hardy_coord(t, tw.partial(t, own) * f, own) * hardy_coord(t, tw.partial(t, rest) * f, rest);
    }
  }
  c.phi = 4 / lambda * sum * cut;
  if (form == MajorantForm::outer) c.phi = hardy(t, c.phi);
  c.domination_checked_on = VertexSet(t.size());
  for (Vertex v = 0; v < t.size(); ++v) c.domination_checked_on[v] = level[v] >= lambda && level[v] <= 2 * lambda;
  check_domination(c, hardy(t, w * c.phi), level);
  finish_cost(c, w, f);
  return c;
}

}  // namespace

double MajorizationCertificate::cost_bound() const {
  if (lambda <= 0) return std::numeric_limits<double>::infinity();
  return cost_constant * std::pow(delta / lambda, cost_power);
}

double MajorizationCertificate::scaled_cost() const {
  if (delta <= 0) return cost_ratio > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return cost_ratio * std::pow(lambda / delta, cost_power);
}

Field truncated_adjoint(const NTree& t, const Field& w, const Field& mu, double delta) {
  const Field g = adjoint_hardy(t, mu);
  return (hardy(t, w * g) <= delta).select(g, 0.0);
}

double support_level(const NTree& t, const Field& w, const Field& f) {
  const Field level = hardy(t, w * f);
  double m = 0;
  for (Vertex v = 0; v < t.size(); ++v)
    if (f[v] != 0) m = std::max(m, level[v]);
  return m;
}

MajorantInstance sample_majorant_instance(int n, int length, std::uint64_t seed) {
  if (n < 1 || n > 4) throw ConfigError("arity must be in 1..4");
  std::vector<Tree> ts;
  for (int j = 0; j < n; ++j) ts.push_back(build_path_tree(length));
  MajorantInstance in{NTree(ts), {}, {}, 0, 0};
  const NTree& t = in.t;
  Rng rng(seed);
  for (int j = 0; j < n; ++j) {
    Eigen::ArrayXd a(length);
    for (int i = 0; i < length; ++i) a[i] = rng.uniform(0.5, 2.0);
    in.w.factors.push_back(a);
  }
  const Field w = in.w.dense(t);
  Field mu = zeros(t);
  const int masses = 1 + static_cast<int>(rng.below(3));
  for (int q = 0; q < masses; ++q) {
    Coords c{};
    for (int j = 0; j < n; ++j) c[j] = length - 1 - static_cast<int>(rng.below(std::max(1, length / 4)));
    mu[t.index(c)] += rng.uniform(0.5, 1.0);
  }
  // Truncating well above the root potential leaves a hyperbolic support.
  const double spread = n == 1 ? 2.0 : (n == 2 ? 7.0 : 5.0);
  const double cut = potential(t, w, mu)[0] * std::pow(2.0, rng.uniform(2.0, spread));
  in.f = truncated_adjoint(t, w, mu, cut);
  in.delta = support_level(t, w, in.f);
  const double top = hardy(t, w * in.f).maxCoeff();
  in.lambda = 4 * in.delta + rng.uniform() * std::max(0.0, top - 4 * in.delta);
  return in;
}

MajorizationCertificate majorant_1tree(const NTree& t, const Field& f, const Field& g, double lambda, double delta) {
  if (t.arity() != 1) throw ConfigError("one-tree majorant needs arity 1");
  check_field(t, f, "f");
  check_field(t, g, "g");
  require_common(f, lambda, delta, 10);
  require_superadditive(t, g);
  const Field ig = hardy(t, g);
  require_support(t, f, ig, delta);

  MajorizationCertificate c;
  c.construction = "one-tree";
  c.lambda = lambda;
  c.delta = delta;
  c.cost_constant = 16;
  c.cost_power = 1;
  const Field fi = hardy(t, f);
  c.phi = 2 / lambda * fi * g * (ig <= 4 * lambda).cast<double>();
  c.domination_checked_on = VertexSet(t.size());
  for (Vertex v = 0; v < t.size(); ++v)
    c.domination_checked_on[v] = t.is_leaf(v) && ig[v] >= lambda && ig[v] <= 2 * lambda;
  check_domination(c, hardy(t, c.phi), fi);
  const Field one = Field::Ones(static_cast<Eigen::Index>(t.size()));
  finish_cost(c, one, f);
  return c;
}

MajorizationCertificate majorant_bitree(const NTree& t, const TensorWeight& w, const Field& f, double lambda,
                                        double delta, MajorantForm form) {
  return multi_majorant(t, w, f, lambda, delta, form, 2, "bi-tree", 64, 2);
}

MajorizationCertificate majorant_tritree(const NTree& t, const TensorWeight& w, const Field& f, double lambda,
                                         double delta, MajorantForm form) {
  return multi_majorant(t, w, f, lambda, delta, form, 3, "tri-tree", 192, 1);
}

bool recheck_certificate(const NTree& t, const Field& w_dense, const Field& f, const MajorizationCertificate& c) {
  check_field(t, f, "f");
  check_field(t, c.phi, "phi");
  MajorizationCertificate r = c;
  const bool one = c.construction == "one-tree";
  const Field w = one ? Field::Ones(static_cast<Eigen::Index>(t.size())) : w_dense;
  check_domination(r, hardy(t, w * c.phi), hardy(t, w * f));
  finish_cost(r, w, f);
  return r.domination_ok == c.domination_ok && r.cost_ok == c.cost_ok &&
         close_tol(r.cost_ratio, c.cost_ratio, 1e-12);
}

std::vector<LemmaCheck> energy_lemma_checks(const NTree& t, const TensorWeight& tw, const Field& f, double delta,
                                            double lambda) {
  if (t.arity() != 2 && t.arity() != 3) throw ConfigError("energy lemmas are stated on two- and three-trees");
  check_field(t, f, "f");
  tw.validate(t);
  require_superadditive(t, f);
  const Field w = tw.dense(t);
  const Field level = hardy(t, w * f);
  require_support(t, f, level, delta);
  const double base = (w * f * f).sum();
  std::vector<LemmaCheck> out;
  auto row = [&](std::string name, double lhs, double rhs) {
    LemmaCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    c.ok = leq_tol(lhs, rhs, 1e-9);
    out.push_back(c);
  };
  if (t.arity() == 2) {
    const Field a = hardy_coord(t, tw.partial(t, 1) * f, 1);
    const Field b = hardy_coord(t, tw.partial(t, 2) * f, 2);
    row("bitree-mixed", (w * f * a * b * level).sum(), delta * delta * base);
    row("bitree-square", (w * a * a * b * b).sum(), 4 * delta * delta * base);
  } else {
    if (!(lambda > 0)) throw PreconditionError("lambda must be positive");
    const Field cut = (level <= lambda).cast<double>();
    for (int i = 0; i < 3; ++i) {
      const CoordMask own = coord_bit(i), rest = all_coords(t) & ~own;
      const Field p = hardy_coord(t, tw.partial(t, own) * f, own) * hardy_coord(t, tw.partial(t, rest) * f, rest);
      row("tritree-truncated-" + std::to_string(i + 1), (w * p * p * cut).sum(), 2 * delta * lambda * base);
    }
  }
  return out;
}

namespace {

Field random_leaf_measure(const NTree& t, Rng& rng) {
  Field mu = zeros(t);
  const double p = rng.uniform(0.1, 0.6);
  Vertex last = 0;
  for (Vertex v = 0; v < t.size(); ++v)
    if (t.is_leaf(v)) {
      last = v;
      if (rng.coin(p)) mu[v] = rng.uniform();
    }
  if (!(mu.sum() > 0)) mu[last] = 1;
  return mu;
}

double min_ratio_on_band(const Field& num, const Field& den, const VertexSet& band, int& failures) {
  double m = std::numeric_limits<double>::infinity();
  bool failed = false;
  for (std::size_t v = 0; v < band.size(); ++v) {
    if (!band[v] || den[v] <= 0) continue;
    m = std::min(m, num[v] / den[v]);
    if (num[v] < den[v] * (1 - kDominationSlack)) failed = true;
  }
  if (failed) ++failures;
  return m;
}

}  // namespace

PairSearchReport conjecture_search_bitree_pair(int depth, int trials, std::uint64_t seed) {
  if (depth < 1) throw ConfigError("depth must be at least 1");
  const NTree t = binary_product(2, depth);
  PairSearchReport rep;
  rep.depth = depth;
  rep.trials = trials;
  rep.max_scaled_cost.assign(rep.taus.size(), 0.0);
  rep.min_domination_ratio = std::numeric_limits<double>::infinity();

  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, 0xB1, static_cast<std::uint64_t>(k)));
    const bool coincident = k % 10 == 9;
    // A few point masses: spread measures keep I g below 10 g(root).
    Field rho = zeros(t);
    const int masses = 1 + static_cast<int>(rng.below(3));
    for (int q = 0; q < masses; ++q) {
      Vertex v;
      do v = rng.below(t.size());
      while (!t.is_leaf(v));
      rho[v] += rng.uniform(0.5, 1.0);
    }
    Field g = adjoint_hardy(t, rho);
    Field big = hardy(t, g);
    const double delta = big[0] * (1 + rng.uniform());
    Field f;
    if (coincident) {
      g = (big <= delta).select(g, 0.0);
      big = hardy(t, g);
      f = g;
    } else {
      f = zeros(t);
      for (Vertex v = 0; v < t.size(); ++v)
        if (big[v] <= delta && rng.coin(0.5)) f[v] = rng.uniform();
    }
    const double top = big.maxCoeff();
    const double lambda = 10 * delta + rng.uniform() * std::max(0.0, top - 10 * delta);
    VertexSet band(t.size());
    std::size_t in_band = 0;
    for (Vertex v = 0; v < t.size(); ++v) {
      band[v] = big[v] >= lambda && big[v] <= 2 * lambda;
      in_band += band[v] != 0;
    }
    if (in_band == 0 || !(f.sum() > 0)) {
      ++rep.vacuous;
      continue;
    }
    const Field cut = (big <= 2 * lambda).cast<double>();
    const Field f1 = hardy_coord(t, f, 1), f2 = hardy_coord(t, f, 2);
    Field phi;
    if (coincident) {
      phi = (10.0 / 9.0) / lambda * 2 * f1 * f2 * cut;
    } else {
      const Field g1 = hardy_coord(t, g, 1), g2 = hardy_coord(t, g, 2);
      phi = (f1 * g2 + g1 * f2 + g * hardy(t, f)) / lambda * cut;
    }
    const double ratio = min_ratio_on_band(hardy(t, phi), hardy(t, f), band, rep.domination_failures);
    rep.min_domination_ratio = std::min(rep.min_domination_ratio, ratio);
    const double cost = (phi * phi).sum() / (f * f).sum();
    if (coincident) {
      ++rep.coincident_trials;
      rep.coincident_max_scaled = std::max(rep.coincident_max_scaled, cost * std::pow(lambda / delta, 2));
    } else {
      rep.max_cost_ratio = std::max(rep.max_cost_ratio, cost);
      for (std::size_t i = 0; i < rep.taus.size(); ++i)
        rep.max_scaled_cost[i] = std::max(rep.max_scaled_cost[i], cost * std::pow(lambda / delta, rep.taus[i]));
    }
  }
  if (!std::isfinite(rep.min_domination_ratio)) rep.min_domination_ratio = 0;
  return rep;
}

namespace {

double split_ratio(const NTree& t, const Field& f) {
  const double base = (f * f).sum();
  if (!(base > 0)) return 0;
  const Field p = hardy_coord(t, f, 0b0011) * hardy_coord(t, f, 0b1100);
  return (p * p).sum() / base;
}

}  // namespace

ObstructionReport obstruction_4tree(int depth, int trials, std::uint64_t seed) {
  if (depth < 0 || depth > kObstructionMaxDepth)
    throw ConfigError("four-tree search supports depths 0.." + std::to_string(kObstructionMaxDepth));
  const NTree t = binary_product(4, depth);
  ObstructionReport rep;
  rep.depth = depth;
  rep.trials = trials;
  rep.min_split_domination = std::numeric_limits<double>::infinity();

  std::vector<Vertex> leaves;
  for (Vertex v = 0; v < t.size(); ++v)
    if (t.is_leaf(v)) leaves.push_back(v);

  {
    Field ind = zeros(t);
    for (Vertex v : leaves) ind[v] = 1;
    rep.max_ratio = std::max(split_ratio(t, ind), split_ratio(t, Field::Ones(static_cast<Eigen::Index>(t.size()))));
  }
  if (depth == 1) {
    double best = 0;
    Field f = zeros(t);
    for (std::uint32_t m = 1; m < (1u << leaves.size()); ++m) {
      for (std::size_t i = 0; i < leaves.size(); ++i) f[leaves[i]] = (m >> i) & 1u;
      best = std::max(best, split_ratio(t, f));
    }
    rep.exhaustive_max = best;
    rep.max_ratio = std::max(rep.max_ratio, best);
  }

  const Field one = Field::Ones(static_cast<Eigen::Index>(t.size()));
  const CoordMask all = all_coords(t);
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, 0x4A, static_cast<std::uint64_t>(k)));
    Field f = zeros(t);
    switch (k % 3) {
      case 0:
        for (Vertex v = 0; v < t.size(); ++v)
          if (rng.coin(0.5)) f[v] = rng.uniform();
        break;
      case 1:
        for (Vertex v : leaves)
          if (rng.coin(0.5)) f[v] = rng.uniform();
        break;
      default:
        f = adjoint_hardy(t, random_leaf_measure(t, rng));
    }
    rep.max_ratio = std::max(rep.max_ratio, split_ratio(t, f));

    // Split-sum majorant with f = g on a truncated measure.
    if (depth == 0) continue;
    const Field mu = random_leaf_measure(t, rng);
    const double delta = mu.sum() * (1 + rng.uniform());
    const Field h = truncated_adjoint(t, one, mu, delta);
    const Field level = hardy(t, h);
    const double lambda = 10 * delta + rng.uniform() * std::max(0.0, level.maxCoeff() - 10 * delta);
    VertexSet band(t.size());
    bool any = false;
    for (Vertex v = 0; v < t.size(); ++v) {
      band[v] = level[v] >= lambda && level[v] <= 2 * lambda;
      any = any || band[v];
    }
    if (!any) continue;
    ++rep.band_instances;
    Field sum = zeros(t);
    for (CoordMask a = 1; a <= all; ++a) sum += hardy_coord(t, h, a) * hardy_coord(t, h, all & ~a);
    const Field phi = sum / lambda * (level <= 2 * lambda).cast<double>();
    int ignored = 0;
    rep.min_split_domination = std::min(rep.min_split_domination, min_ratio_on_band(hardy(t, phi), level, band, ignored));
    rep.max_split_cost = std::max(rep.max_split_cost, (phi * phi).sum() / (h * h).sum());
  }
  if (!std::isfinite(rep.min_split_domination)) rep.min_split_domination = 0;
  return rep;
}

}  // namespace mtc
