#include "mtc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtc/hardy.hpp"

namespace mtc {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double angle_of(Point z) {
  if (z == Point(0, 0)) return 0;
  double a = std::arg(z);
  if (a < 0) a += kTwoPi;
  return a >= kTwoPi ? 0 : a;
}

// Position of angle x relative to theta, in [0, 2 pi).
double relative_angle(double x, double theta) {
  double r = std::fmod(x - theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r >= kTwoPi ? 0 : r;
}

std::uint64_t arc_index(double rel, int k) {
  const double h = kTwoPi * std::ldexp(1.0, -k);
  const auto i = static_cast<std::uint64_t>(std::floor(rel / h));
  return std::min(i, (std::uint64_t{1} << k) - 1);
}

void check_point(Point z) {
  if (!(std::abs(z) < 1)) throw PreconditionError("points must lie in the open unit disc");
}

// Smallest angular separation between two closed arcs.
double arc_gap(const Arc& x, const Arc& y) {
  if (x.length() >= kTwoPi || y.length() >= kTwoPi) return 0;
  const double lo = x.a - y.b, hi = x.b - y.a;
  double l = std::fmod(lo, kTwoPi);
  if (l < 0) l += kTwoPi;
  const double h = l + (hi - lo);
  if (l == 0 || h >= kTwoPi) return 0;
  return std::min(l, kTwoPi - h);
}

struct RadialRange {
  double lo = 0, hi = 0;
};
RadialRange radii(int depth) { return {1 - std::ldexp(1.0, -depth), 1 - std::ldexp(1.0, -depth - 1)}; }

DyadicCell join_cells(DyadicCell a, DyadicCell b) {
  while (a.depth > b.depth) a.index >>= 1, --a.depth;
  while (b.depth > a.depth) b.index >>= 1, --b.depth;
  while (a.index != b.index) a.index >>= 1, b.index >>= 1, --a.depth;
  return a;
}

// Sum of 2^(i (1-s)) over the ancestors i = 0 .. depth of the join.
double tree_side_1d(double s, int join_depth) {
  double sum = 0;
  for (int i = 0; i <= join_depth; ++i) sum += std::pow(2.0, i * (1 - s));
  return sum;
}

// Heap layout of build_dyadic_tree(depth, 2).
DyadicCell cell_of_vertex(int v) {
  int k = 0;
  while ((2 << k) - 1 <= v) ++k;
  return {k, static_cast<std::uint64_t>(v + 1 - (1 << k))};
}
int vertex_of_cell(const DyadicCell& c) { return (1 << c.depth) - 1 + static_cast<int>(c.index); }

DyadicCell random_cell(Rng& rng, int max_depth) {
  const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_depth) + 1));
  return {k, rng.below(std::uint64_t{1} << k)};
}

Point random_point(Rng& rng, double angle, int max_depth) {
  const double gap = std::exp2(-rng.uniform(0, max_depth + 1));
  return std::polar(1 - gap, angle);
}

void check_s(const std::vector<double>& s) {
  for (double x : s)
    if (!(x > 0 && x <= 1)) throw ConfigError("kernel exponents s_j must lie in (0, 1]");
}

}  // namespace

Distances distances(Point z, Point zeta, double theta) {
  check_point(z);
  check_point(zeta);
  const double au = angle_of(z), av = angle_of(zeta);
  const double gz = 1 - std::abs(z), gzeta = 1 - std::abs(zeta);
  Distances out;
  out.d = std::abs(std::polar(1.0, au) - std::polar(1.0, av)) + gz + gzeta;
  const double floor_len = std::max(gz, gzeta);
  const double ru = relative_angle(au, theta), rv = relative_angle(av, theta);
  out.d_lattice = kTwoPi;
  for (int k = kMaxLatticeGeneration; k >= 1; --k) {
    const double len = kTwoPi * std::ldexp(1.0, -k);
    if (len <= floor_len) continue;
    // Arcs of generation >= 1 are at most a half circle, so a shared arc
    // contains the shorter arc between u and v.
    if (arc_index(ru, k) == arc_index(rv, k)) {
      out.d_lattice = len;
      break;
    }
  }
  return out;
}

Arc lattice_arc(int depth, std::uint64_t index, double theta) {
  const double h = kTwoPi * std::ldexp(1.0, -depth);
  const double a = theta + h * static_cast<double>(index);
  return {a, a + h};
}

DyadicCell whitney_cell(Point z, double theta, int max_depth) {
  check_point(z);
  const double gap = 1 - std::abs(z);
  int k = static_cast<int>(std::floor(-std::log2(gap)));
  // 1 - |z| in (2^-k-1, 2^-k]; fix rounding at the endpoints.
  while (k > 0 && gap > std::ldexp(1.0, -k)) --k;
  while (gap <= std::ldexp(1.0, -k - 1)) ++k;
  k = std::clamp(k, 0, max_depth);
  return {k, arc_index(relative_angle(angle_of(z), theta), k)};
}

GoodLatticeReport good_lattice_probability(int m, int trials, std::uint64_t seed) {
  if (m < 4 || m > 40) throw ConfigError("lattice level m must lie in 4..40");
  if (trials <= 0) throw ConfigError("trials must be positive");
  GoodLatticeReport r;
  r.m = m;
  r.trials = trials;
  r.min_ratio = INFINITY;
  const double len = kTwoPi * std::ldexp(1.0, -m);
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, 0x1A, static_cast<std::uint64_t>(k)));
    const double theta = rng.uniform(0, kTwoPi);
    bool good = true;
    for (int g = 1; g <= m - 4 && good; ++g) {
      const double spacing = kTwoPi * std::ldexp(1.0, -g);
      good = std::fmod(theta, spacing) >= len;
    }
    Point z, zeta;
    double dd = 0;
    do {
      z = std::polar(1 - rng.uniform(0, 1.6) * len, rng.uniform(0, len));
      zeta = std::polar(1 - rng.uniform(0, 1.6) * len, rng.uniform(0, len));
      dd = distances(z, zeta, theta).d;
    } while (dd < 1.6 * len || dd > 3.2 * len);
    const Distances dist = distances(z, zeta, theta);
    const double ratio = dist.d_lattice / dist.d;
    r.min_ratio = std::min(r.min_ratio, ratio);
    if (good) {
      ++r.good;
      r.max_good_ratio = std::max(r.max_good_ratio, ratio);
      if (ratio > 10) ++r.good_violations;
    }
  }
  const double n = trials, p = r.good / n, z2 = 1.96 * 1.96;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = 1.96 * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  r.probability = p;
  r.wilson_lo = std::max(0.0, centre - half);
  r.wilson_hi = std::min(1.0, centre + half);
  return r;
}

double kernel_factor(double s, double dist) {
  if (s >= 1) return 1 + std::log(2 / dist);
  return std::pow(dist, s - 1);
}

double forward_kernel_bound(double s) {
  // At join depth k every pair of box points has |1 - z conj(zeta)| <= (2 + 2 pi) 2^-k.
  double best = 0;
  for (int k = 0; k <= 64; ++k) {
    const double far = (2 + kTwoPi) * std::ldexp(1.0, -k);
    const double analytic = s >= 1 ? std::max(1.0, kernel_factor(1, far)) : kernel_factor(s, far);
    best = std::max(best, tree_side_1d(s, k) / analytic);
  }
  return best;
}

double reverse_kernel_bound(double s) { return s >= 1 ? 4.5 : std::pow(16.0, 1 - s); }

double min_box_distance(const DyadicCell& a, const DyadicCell& b, double theta) {
  const double phi = arc_gap(lattice_arc(a.depth, a.index, theta), lattice_arc(b.depth, b.index, theta));
  const RadialRange ra = radii(a.depth), rb = radii(b.depth);
  const double lo = std::max(0.0, ra.lo) * std::max(0.0, rb.lo), hi = ra.hi * rb.hi;
  const double s2 = std::pow(std::sin(phi / 2), 2);
  const double p = std::clamp(1 - 2 * s2, lo, hi);
  return std::sqrt((1 - p) * (1 - p) + 4 * p * s2);
}

KernelReport kernel_domination(const NTree& t, const std::vector<double>& s, int trials, std::uint64_t seed) {
  const int d = t.arity();
  if (static_cast<int>(s.size()) != d) throw ConfigError("need one exponent per coordinate");
  check_s(s);
  if (trials <= 0) throw ConfigError("trials must be positive");
  const std::optional<int> depth = t.tree(0).dyadic_depth();
  for (int j = 0; j < d; ++j)
    if (!depth || t.tree(j).dyadic_depth() != depth || t.tree(j).parents() != build_dyadic_tree(*depth).parents())
      throw ConfigError("kernel comparison needs complete binary trees of one depth");
  const int n = *depth;

  KernelReport r;
  r.d = d;
  r.depth = n;
  r.s = s;
  r.trials = trials;
  r.forward_min = INFINITY;
  r.forward_bound = 1;
  r.reverse_bound = 1;
  for (double x : s) r.forward_bound *= forward_kernel_bound(x), r.reverse_bound *= reverse_kernel_bound(x);

  const Field tree_side = hardy(t, weight_from_s(t, s).dense(t));
  auto product_vertex = [&](const std::vector<DyadicCell>& cells) {
    Vertex v = 0;
    for (int j = 0; j < d; ++j) v += static_cast<Vertex>(vertex_of_cell(cells[j])) * t.stride(j);
    return v;
  };

  std::vector<DyadicCell> a(d), b(d), joined(d);
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, 0x1B, static_cast<std::uint64_t>(k)));
    double analytic = 1;
    for (int j = 0; j < d; ++j) {
      const double theta = rng.uniform(0, kTwoPi);
      a[j] = random_cell(rng, n);
      if (rng.coin()) {
        b[j] = random_cell(rng, n);
      } else {
        // A relative of a[j]: descend from one of its ancestors.
        DyadicCell c{static_cast<int>(rng.below(static_cast<std::uint64_t>(a[j].depth) + 1)), 0};
        c.index = a[j].index >> (a[j].depth - c.depth);
        const int extra = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - c.depth) + 1));
        b[j] = {c.depth + extra, (c.index << extra) | rng.below(std::uint64_t{1} << extra)};
      }
      joined[j] = join_cells(a[j], b[j]);
      analytic *= kernel_factor(s[j], min_box_distance(a[j], b[j], theta));
    }
    const double ratio = tree_side[product_vertex(joined)] / analytic;
    r.forward_max = std::max(r.forward_max, ratio);
    r.forward_min = std::min(r.forward_min, ratio);
    if (!leq_tol(ratio, r.forward_bound)) ++r.forward_violations;
  }

  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, 0x1C, static_cast<std::uint64_t>(k)));
    double kernel = 1;
    for (int j = 0; j < d; ++j) {
      const double theta = rng.uniform(0, kTwoPi);
      const double angle = rng.uniform(0, kTwoPi);
      const Point z = random_point(rng, angle, n);
      const double offset = (2 * rng.uniform() - 1) * std::numbers::pi * std::exp2(-rng.uniform(0, n));
      const Point zeta = random_point(rng, angle + offset, n);
      a[j] = whitney_cell(z, theta, n);
      b[j] = whitney_cell(zeta, theta, n);
      joined[j] = join_cells(a[j], b[j]);
      kernel *= kernel_factor(s[j], std::abs(1.0 - z * std::conj(zeta)));
    }
    const double ratio = kernel / tree_side[product_vertex(joined)];
    r.reverse_max = std::max(r.reverse_max, ratio);
    if (leq_tol(ratio, r.reverse_bound)) ++r.reverse_hits;
  }
  r.reverse_probability = static_cast<double>(r.reverse_hits) / trials;
  return r;
}

double poisson_box_sup(const DyadicCell& a, const DyadicCell& b) {
  const double phi = arc_gap(lattice_arc(a.depth, a.index, 0), lattice_arc(b.depth, b.index, 0));
  const RadialRange ra = radii(a.depth), rb = radii(b.depth);
  const double lo = std::max(0.0, ra.lo) * std::max(0.0, rb.lo), hi = ra.hi * rb.hi;
  const double c = std::cos(phi);
  // (1 - p^2) / (1 - 2 p c + p^2) increases up to p = (1 - sin phi) / cos phi and then decreases.
  double p = lo;
  if (c > 0) p = std::clamp((1 - std::sin(phi)) / c, lo, hi);
  return (1 - p * p) / (1 - 2 * p * c + p * p);
}

PoissonWitness poisson_failure_witness(int d, int depth) {
  if (d < 1 || d > kMaxArity) throw ConfigError("Poisson witness dimension must lie in 1..4");
  if (depth < 0 || depth > 8) throw ConfigError("Poisson witness depth must lie in 0..8");
  PoissonWitness r;
  r.d = d;
  r.depth = depth;
  const int count = (2 << depth) - 1;
  r.pairs = static_cast<std::size_t>(count) * static_cast<std::size_t>(count);
  double best = -1, best_tree = 0, best_p = 0;
  DyadicCell ba, bb;
  for (int u = 0; u < count; ++u)
    for (int v = 0; v < count; ++v) {
      const DyadicCell a = cell_of_vertex(u), b = cell_of_vertex(v);
      const double tree = tree_side_1d(0, join_cells(a, b).depth);
      const double p = poisson_box_sup(a, b);
      if (tree / p > best) best = tree / p, best_tree = tree, best_p = p, ba = a, bb = b;
    }
  r.alpha.assign(d, ba);
  r.beta.assign(d, bb);
  r.tree_side = std::pow(best_tree, d);
  r.poisson_side = std::pow(best_p, d);
  r.ratio = std::pow(best, d);
  const DyadicCell leaf{depth, 0};
  r.diagonal_ratio = std::pow(tree_side_1d(0, depth) / poisson_box_sup(leaf, leaf), d);
  return r;
}

}  // namespace mtc
