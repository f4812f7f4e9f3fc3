#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mtc/common.hpp"

namespace mtc {

inline constexpr int kMaxArity = 4;

// A finite rooted forest given by parent pointers (-1 = maximal element).
// "Ancestor" always means a larger element, i.e. nearer the root.
class Tree {
 public:
  explicit Tree(std::vector<int> parent);

  int size() const { return static_cast<int>(parent_.size()); }
  int parent(int v) const { return parent_[v]; }
  int depth(int v) const { return depth_[v]; }
  int max_depth() const { return max_depth_; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  bool is_leaf(int v) const { return children_[v].empty(); }
  const std::vector<int>& leaves() const { return leaves_; }
  // Vertices ordered so that every parent precedes its children.
  const std::vector<int>& topo() const { return topo_; }
  const std::vector<int>& parents() const { return parent_; }

  // a >= v: a lies on the chain from v to its root.
  bool ancestor_or_equal(int a, int v) const;
  std::optional<int> lca(int a, int b) const;
  // Depth N when the tree is a complete binary tree with all leaves at depth N.
  std::optional<int> dyadic_depth() const;

 private:
  std::vector<int> parent_, depth_, topo_, leaves_;
  std::vector<std::vector<int>> children_;
  int max_depth_ = 0;
};

// Complete arity-regular tree in breadth-first order (root = 0).
Tree build_dyadic_tree(int depth, int arity = 2);
// Chain 0 -> 1 -> ... -> length-1.
Tree build_path_tree(int length);

using Coords = std::array<int, kMaxArity>;
using Vertex = std::size_t;

// Product of 1..4 trees. Vertices are addressed by a mixed-radix index with
// coordinate 0 most significant.
class NTree {
 public:
  explicit NTree(std::vector<Tree> trees);

  int arity() const { return static_cast<int>(trees_.size()); }
  std::size_t size() const { return size_; }
  const Tree& tree(int j) const { return trees_[j]; }
  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t stride(int j) const { return stride_[j]; }

  int coord(Vertex v, int j) const {
    return static_cast<int>((v / stride_[j]) % static_cast<std::size_t>(trees_[j].size()));
  }
  Coords coords(Vertex v) const;
  Vertex index(const Coords& c) const;
  Vertex with_coord(Vertex v, int j, int value) const {
    return v + (static_cast<std::size_t>(value) - static_cast<std::size_t>(coord(v, j))) * stride_[j];
  }
  // Sum of coordinate depths; strictly decreases when moving to an ancestor.
  int total_depth(Vertex v) const;
  bool is_leaf(Vertex v) const;  // leaf in every coordinate
  std::size_t ancestor_count(Vertex v) const;

 private:
  std::vector<Tree> trees_;
  std::array<std::size_t, kMaxArity> stride_{};
  std::size_t size_ = 1;
};

// alpha <= beta in the product order.
bool leq(const NTree& t, Vertex alpha, Vertex beta);
// Coordinatewise least common ancestor; empty when some coordinate has none.
std::optional<Vertex> join(const NTree& t, Vertex alpha, Vertex beta);

// Boolean membership mask over product vertices.
using VertexSet = std::vector<char>;
using DownSet = VertexSet;

std::size_t count(const VertexSet& s);
bool is_down_set(const NTree& t, const VertexSet& s);
bool is_up_set(const NTree& t, const VertexSet& s);
VertexSet down_closure(const NTree& t, const VertexSet& s);
VertexSet up_closure(const NTree& t, const VertexSet& s);
// {beta : beta <= v} and {beta : beta >= v}.
VertexSet below(const NTree& t, Vertex v);
VertexSet above(const NTree& t, Vertex v);
// Maximal / minimal members of s.
std::vector<Vertex> maximal_elements(const NTree& t, const VertexSet& s);

inline constexpr std::size_t kDownSetEnumerationCap = 20;

// Visits every down-set exactly once (empty and full included). Refuses
// products larger than kDownSetEnumerationCap.
void for_each_down_set(const NTree& t, const std::function<void(const DownSet&)>& visit);
std::vector<DownSet> enumerate_down_sets(const NTree& t);

// Down-closure of a random antichain; deterministic in the seed.
DownSet random_down_set(const NTree& t, std::uint64_t seed);
DownSet random_down_set(const NTree& t, Rng& rng);

}  // namespace mtc
