#include "mtc/poset.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mtc {

Tree::Tree(std::vector<int> parent) : parent_(std::move(parent)) {
  const int n = size();
  if (n == 0) throw ConfigError("tree must have at least one vertex");
  children_.assign(n, {});
  for (int v = 0; v < n; ++v) {
    const int p = parent_[v];
    if (p < -1 || p >= n || p == v) throw ConfigError("invalid parent index at vertex " + std::to_string(v));
    if (p >= 0) children_[p].push_back(v);
  }
  // Breadth-first from the maximal elements; any vertex not reached lies on a cycle.
  depth_.assign(n, -1);
  for (int v = 0; v < n; ++v)
    if (parent_[v] < 0) {
      depth_[v] = 0;
      topo_.push_back(v);
    }
  for (std::size_t head = 0; head < topo_.size(); ++head) {
    const int v = topo_[head];
    for (int c : children_[v]) {
      depth_[c] = depth_[v] + 1;
      topo_.push_back(c);
    }
  }
  if (static_cast<int>(topo_.size()) != n) throw ConfigError("parent relation has a cycle");
  for (int v = 0; v < n; ++v) {
    if (children_[v].empty()) leaves_.push_back(v);
    max_depth_ = std::max(max_depth_, depth_[v]);
  }
}

bool Tree::ancestor_or_equal(int a, int v) const {
  if (depth_[a] > depth_[v]) return false;
  while (depth_[v] > depth_[a]) v = parent_[v];
  return v == a;
}

std::optional<int> Tree::lca(int a, int b) const {
  while (depth_[a] > depth_[b]) a = parent_[a];
  while (depth_[b] > depth_[a]) b = parent_[b];
  while (a != b) {
    a = parent_[a];
    b = parent_[b];
    if (a < 0 || b < 0) return std::nullopt;
  }
  return a;
}

std::optional<int> Tree::dyadic_depth() const {
  if (topo_.size() != 1 && parent_[topo_[1]] < 0) return std::nullopt;  // forest
  for (int v = 0; v < size(); ++v) {
    const auto k = children_[v].size();
    if (k != 0 && k != 2) return std::nullopt;
    if (k == 0 && depth_[v] != max_depth_) return std::nullopt;
  }
  return max_depth_;
}

Tree build_dyadic_tree(int depth, int arity) {
  if (depth < 0 || depth > 12) throw ConfigError("tree depth must be in 0..12");
  if (arity < 1 || arity > 3) throw ConfigError("tree arity must be in 1..3");
  std::size_t count = 1, level = 1;
  for (int d = 0; d < depth; ++d) {
    level *= static_cast<std::size_t>(arity);
    count += level;
  }
  if (count > vertex_budget()) throw ConfigError("tree exceeds vertex budget");
  std::vector<int> parent{-1};
  parent.reserve(count);
  std::size_t start = 0, width = 1;
  for (int d = 0; d < depth; ++d) {
    for (std::size_t v = start; v < start + width; ++v)
      for (int c = 0; c < arity; ++c) parent.push_back(static_cast<int>(v));
    start += width;
    width *= static_cast<std::size_t>(arity);
  }
  return Tree(std::move(parent));
}

Tree build_path_tree(int length) {
  if (length < 1) throw ConfigError("path length must be positive");
  if (static_cast<std::size_t>(length) > vertex_budget()) throw ConfigError("tree exceeds vertex budget");
  std::vector<int> parent(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) parent[i] = i - 1;
  return Tree(std::move(parent));
}

NTree::NTree(std::vector<Tree> trees) : trees_(std::move(trees)) {
  const int n = arity();
  if (n < 1 || n > kMaxArity) throw ConfigError("product arity must be in 1..4");
  const std::size_t budget = vertex_budget();
  size_ = 1;
  for (int j = n - 1; j >= 0; --j) {
    stride_[j] = size_;
    size_ *= static_cast<std::size_t>(trees_[j].size());
    if (size_ > budget) throw ConfigError("product size exceeds MTC_BUDGET_VERTICES");
  }
}

Coords NTree::coords(Vertex v) const {
  Coords c{};
  for (int j = 0; j < arity(); ++j) c[j] = coord(v, j);
  return c;
}

Vertex NTree::index(const Coords& c) const {
  Vertex v = 0;
  for (int j = 0; j < arity(); ++j) {
    if (c[j] < 0 || c[j] >= trees_[j].size()) throw ConfigError("vertex coordinate out of range");
    v += static_cast<std::size_t>(c[j]) * stride_[j];
  }
  return v;
}

int NTree::total_depth(Vertex v) const {
  int d = 0;
  for (int j = 0; j < arity(); ++j) d += trees_[j].depth(coord(v, j));
  return d;
}

bool NTree::is_leaf(Vertex v) const {
  for (int j = 0; j < arity(); ++j)
    if (!trees_[j].is_leaf(coord(v, j))) return false;
  return true;
}

std::size_t NTree::ancestor_count(Vertex v) const {
  std::size_t k = 1;
  for (int j = 0; j < arity(); ++j) k *= static_cast<std::size_t>(trees_[j].depth(coord(v, j)) + 1);
  return k;
}

bool leq(const NTree& t, Vertex alpha, Vertex beta) {
  for (int j = 0; j < t.arity(); ++j)
    if (!t.tree(j).ancestor_or_equal(t.coord(beta, j), t.coord(alpha, j))) return false;
  return true;
}

std::optional<Vertex> join(const NTree& t, Vertex alpha, Vertex beta) {
  Coords c{};
  for (int j = 0; j < t.arity(); ++j) {
    auto l = t.tree(j).lca(t.coord(alpha, j), t.coord(beta, j));
    if (!l) return std::nullopt;
    c[j] = *l;
  }
  return t.index(c);
}

std::size_t count(const VertexSet& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), char{1}));
}

namespace {

// Propagate membership along one coordinate: toward children (downward) or parents.
void propagate(const NTree& t, int j, VertexSet& s, bool downward) {
  const Tree& tr = t.tree(j);
  const std::size_t stride = t.stride(j);
  const std::size_t block = stride * static_cast<std::size_t>(tr.size());
  const auto& order = tr.topo();
  for (std::size_t base = 0; base < t.size(); base += block) {
    if (downward) {
      for (int c : order) {
        const int p = tr.parent(c);
        if (p < 0) continue;
        for (std::size_t i = 0; i < stride; ++i)
          s[base + c * stride + i] |= s[base + p * stride + i];
      }
    } else {
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int c = *it, p = tr.parent(c);
        if (p < 0) continue;
        for (std::size_t i = 0; i < stride; ++i)
          s[base + p * stride + i] |= s[base + c * stride + i];
      }
    }
  }
}

void check_len(const NTree& t, const VertexSet& s) {
  if (s.size() != t.size()) throw ConfigError("vertex set length does not match product size");
}

}  // namespace

VertexSet down_closure(const NTree& t, const VertexSet& s) {
  check_len(t, s);
  VertexSet out = s;
  for (int j = 0; j < t.arity(); ++j) propagate(t, j, out, true);
  return out;
}

VertexSet up_closure(const NTree& t, const VertexSet& s) {
  check_len(t, s);
  VertexSet out = s;
  for (int j = 0; j < t.arity(); ++j) propagate(t, j, out, false);
  return out;
}

bool is_down_set(const NTree& t, const VertexSet& s) { return down_closure(t, s) == s; }
bool is_up_set(const NTree& t, const VertexSet& s) { return up_closure(t, s) == s; }

VertexSet below(const NTree& t, Vertex v) {
  VertexSet s(t.size(), 0);
  s[v] = 1;
  return down_closure(t, s);
}

VertexSet above(const NTree& t, Vertex v) {
  VertexSet s(t.size(), 0);
  s[v] = 1;
  return up_closure(t, s);
}

std::vector<Vertex> maximal_elements(const NTree& t, const VertexSet& s) {
  check_len(t, s);
  // A member is not maximal iff it lies strictly below another member.
  VertexSet covers(t.size(), 0);
  for (Vertex v = 0; v < t.size(); ++v) {
    if (!s[v]) continue;
    for (int j = 0; j < t.arity(); ++j)
      for (int c : t.tree(j).children(t.coord(v, j))) covers[t.with_coord(v, j, c)] = 1;
  }
  const VertexSet strictly_below = down_closure(t, covers);
  std::vector<Vertex> out;
  for (Vertex v = 0; v < t.size(); ++v)
    if (s[v] && !strictly_below[v]) out.push_back(v);
  return out;
}

void for_each_down_set(const NTree& t, const std::function<void(const DownSet&)>& visit) {
  if (t.size() > kDownSetEnumerationCap)
    throw ConfigError("down-set enumeration refused: product size exceeds " +
                      std::to_string(kDownSetEnumerationCap));
  // Deepest vertices first, so every lower cover is decided before its upper cover.
  std::vector<Vertex> order(t.size());
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return t.total_depth(a) > t.total_depth(b); });
  std::vector<std::vector<Vertex>> lower(t.size());
  for (Vertex v = 0; v < t.size(); ++v)
    for (int j = 0; j < t.arity(); ++j)
      for (int c : t.tree(j).children(t.coord(v, j))) lower[v].push_back(t.with_coord(v, j, c));

  DownSet mask(t.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == order.size()) {
      visit(mask);
      return;
    }
    const Vertex v = order[k];
    rec(k + 1);
    if (std::all_of(lower[v].begin(), lower[v].end(), [&](Vertex u) { return mask[u] != 0; })) {
      mask[v] = 1;
      rec(k + 1);
      mask[v] = 0;
    }
  };
  rec(0);
}

std::vector<DownSet> enumerate_down_sets(const NTree& t) {
  std::vector<DownSet> out;
  for_each_down_set(t, [&](const DownSet& d) { out.push_back(d); });
  return out;
}

DownSet random_down_set(const NTree& t, Rng& rng) {
  const std::size_t k = rng.below(t.size() + 1);
  std::vector<Vertex> antichain;
  for (std::size_t i = 0; i < k; ++i) {
    const Vertex v = rng.below(t.size());
    bool comparable = false;
    for (Vertex a : antichain)
      if (leq(t, a, v) || leq(t, v, a)) {
        comparable = true;
        break;
      }
    if (!comparable) antichain.push_back(v);
  }
  DownSet s(t.size(), 0);
  for (Vertex a : antichain) s[a] = 1;
  return down_closure(t, s);
}

DownSet random_down_set(const NTree& t, std::uint64_t seed) {
  Rng rng(seed);
  return random_down_set(t, rng);
}

}  // namespace mtc
