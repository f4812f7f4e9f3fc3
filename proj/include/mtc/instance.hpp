#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mtc/hardy.hpp"

namespace mtc {

// "uniform", "tensor-random" (factors uniform in [1/2, 2]) or "from-s:s1,s2,...".
struct WeightSpec {
  enum class Kind { uniform, tensor_random, from_s } kind = Kind::uniform;
  std::vector<double> s;

  static WeightSpec parse(const std::string& text);
  std::string str() const;
};

// "leaf-sparse:k" (unit masses on k distinct random leaves), "random-sparse:k"
// (k masses in [1/10, 1] at random vertices, repeats add up), "uniform-leaf"
// (unit mass on every leaf) or "custom" (explicit point masses).
struct MeasureSpec {
  enum class Kind { leaf_sparse, random_sparse, uniform_leaf, custom } kind = Kind::leaf_sparse;
  int k = 1;
  std::vector<std::pair<Coords, double>> masses;  // custom only

  static MeasureSpec parse(const std::string& text);
  std::string str() const;
};

// n copies of the complete tree of the given depth and arity.
struct Instance {
  int n = 0;
  int depth = 0;
  int arity = 2;
  std::uint64_t seed = 0;
  WeightSpec weight_spec;
  MeasureSpec measure_spec;
  NTree t{{Tree({-1})}};
  TensorWeight w;
  Field mu;
};

Instance generate_instance(int n, int depth, int arity, const WeightSpec& ws, const MeasureSpec& ms,
                           std::uint64_t seed);

// Weight factors and the nonzero masses are stored explicitly, so parsing does
// not depend on the generator. Doubles use the shortest representation that
// reads back to the same value.
nlohmann::json to_json(const Instance& in);
Instance instance_from_json(const nlohmann::json& j);
std::string serialize(const Instance& in);
Instance parse_instance(const std::string& text);

}  // namespace mtc
