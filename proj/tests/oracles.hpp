#pragma once
// Brute-force reference implementations. Everything here loops over pairs of
// vertices and uses leq() directly, so it shares no code path with the DP kernels.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mtc/hardy.hpp"
#include "mtc/poset.hpp"

namespace oracle {

using mtc::Field;
using mtc::NTree;
using mtc::Vertex;

inline NTree b2() { return NTree({mtc::build_dyadic_tree(1, 2)}); }
inline NTree b2b2() { return NTree({mtc::build_dyadic_tree(1, 2), mtc::build_dyadic_tree(1, 2)}); }
inline NTree chain2() { return NTree({mtc::Tree({-1, 0})}); }
inline NTree product(int n, int depth, int arity = 2) {
  std::vector<mtc::Tree> ts;
  for (int j = 0; j < n; ++j) ts.push_back(mtc::build_dyadic_tree(depth, arity));
  return NTree(ts);
}
// B2 labels: o = 0, a = 1, b = 2.
inline Vertex v2(const NTree& t, int x, int y) { return t.index({x, y, 0, 0}); }

inline Field hardy(const NTree& t, const Field& f) {
  Field out = Field::Zero(f.size());
  for (Vertex g = 0; g < t.size(); ++g)
    for (Vertex h = 0; h < t.size(); ++h)
      if (mtc::leq(t, g, h)) out[g] += f[h];
  return out;
}

inline Field adjoint(const NTree& t, const Field& f) {
  Field out = Field::Zero(f.size());
  for (Vertex g = 0; g < t.size(); ++g)
    for (Vertex h = 0; h < t.size(); ++h)
      if (mtc::leq(t, h, g)) out[g] += f[h];
  return out;
}

// Partial Hardy in the coordinates of `mask`: sum over h >= g that agree with g
// outside `mask`.
inline Field hardy_coord(const NTree& t, const Field& f, unsigned mask) {
  Field out = Field::Zero(f.size());
  for (Vertex g = 0; g < t.size(); ++g)
    for (Vertex h = 0; h < t.size(); ++h) {
      if (!mtc::leq(t, g, h)) continue;
      bool ok = true;
      for (int j = 0; j < t.arity(); ++j)
        if (!(mask & (1u << j)) && t.coord(g, j) != t.coord(h, j)) ok = false;
      if (ok) out[g] += f[h];
    }
  return out;
}

// Kernel K(a,b) = sum of w over common ancestors.
inline double common_ancestor_weight(const NTree& t, const Field& w, Vertex a, Vertex b) {
  double s = 0;
  for (Vertex g = 0; g < t.size(); ++g)
    if (mtc::leq(t, a, g) && mtc::leq(t, b, g)) s += w[g];
  return s;
}

// E[mu] as a double sum over pairs.
inline double energy(const NTree& t, const Field& w, const Field& mu) {
  double s = 0;
  for (Vertex a = 0; a < t.size(); ++a)
    for (Vertex b = 0; b < t.size(); ++b)
      if (mu[a] != 0 && mu[b] != 0) s += mu[a] * mu[b] * oracle::common_ancestor_weight(t, w, a, b);
  return s;
}

inline bool is_down_set_bruteforce(const NTree& t, const std::vector<char>& m) {
  for (Vertex a = 0; a < t.size(); ++a)
    if (m[a])
      for (Vertex b = 0; b < t.size(); ++b)
        if (mtc::leq(t, b, a) && !m[b]) return false;
  return true;
}

inline Field random_field(const NTree& t, mtc::Rng& rng, double density = 1.0) {
  Field f = Field::Zero(static_cast<Eigen::Index>(t.size()));
  for (Vertex v = 0; v < t.size(); ++v)
    if (rng.coin(density)) f[v] = rng.uniform();
  return f;
}

inline Field random_sparse(const NTree& t, mtc::Rng& rng, int k) {
  Field f = Field::Zero(static_cast<Eigen::Index>(t.size()));
  for (int i = 0; i < k; ++i) f[rng.below(t.size())] += rng.uniform(0.1, 1.0);
  return f;
}

// Branch and bound over phi in {0, 1/32, ..., 2} on the ancestors of E (the
// only vertices that can matter). Returns the best grid value of sum phi^2.
inline double capacity_grid(const NTree& t, const mtc::VertexSet& e) {
  std::vector<Vertex> free;
  for (Vertex v = 0; v < t.size(); ++v) {
    bool useful = false;
    for (Vertex x = 0; x < t.size(); ++x)
      if (e[x] && mtc::leq(t, x, v)) useful = true;
    if (useful) free.push_back(v);
  }
  if (free.size() > 6) throw std::invalid_argument("grid oracle needs at most 6 free vertices");
  std::vector<Vertex> cons;
  for (Vertex x = 0; x < t.size(); ++x)
    if (e[x]) cons.push_back(x);
  const std::size_t k = free.size();
  // covers[c][i]: free vertex i is an ancestor-or-equal of constraint c.
  std::vector<std::vector<char>> covers(cons.size(), std::vector<char>(k));
  for (std::size_t c = 0; c < cons.size(); ++c)
    for (std::size_t i = 0; i < k; ++i) covers[c][i] = mtc::leq(t, cons[c], free[i]);

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> phi(k, 0);
  std::function<void(std::size_t, double)> go = [&](std::size_t i, double cost) {
    if (cost >= best) return;
    // Cauchy-Schwarz: a deficit d spread over m open slots costs at least d^2/m.
    double lb = 0;
    for (std::size_t c = 0; c < cons.size(); ++c) {
      double have = 0;
      int open = 0;
      for (std::size_t j = 0; j < k; ++j)
        if (covers[c][j]) {
          if (j < i)
            have += phi[j];
          else
            ++open;
        }
      const double d = 1 - have;
      if (d > 1e-12) {
        if (open == 0 || 2.0 * open < d) return;
        lb = std::max(lb, d * d / open);
      }
    }
    if (cost + lb >= best) return;
    if (i == k) {
      best = cost;
      return;
    }
    for (int s = 0; s <= 64; ++s) {
      phi[i] = s / 32.0;
      go(i + 1, cost + phi[i] * phi[i]);
    }
    phi[i] = 0;
  };
  go(0, 0);
  return best;
}

}  // namespace oracle
