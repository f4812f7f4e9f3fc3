#include "mtc/instance.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mtc {

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw ConfigError("bad number '" + item + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad number '" + item + "'");
    }
  }
  return out;
}

std::string join_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += nlohmann::json(xs[i]).dump();
  }
  return out;
}

NTree build_tree(int n, int depth, int arity) {
  if (n < 1 || n > kMaxArity) throw ConfigError("n must lie in 1..4");
  return NTree(std::vector<Tree>(static_cast<std::size_t>(n), build_dyadic_tree(depth, arity)));
}

}  // namespace

WeightSpec WeightSpec::parse(const std::string& text) {
  if (text == "uniform") return {};
  if (text == "tensor-random") return {Kind::tensor_random, {}};
  if (text.rfind("from-s:", 0) == 0) return {Kind::from_s, parse_list(text.substr(7))};
  throw ConfigError("unknown weight spec '" + text + "'");
}

std::string WeightSpec::str() const {
  switch (kind) {
    case Kind::uniform: return "uniform";
    case Kind::tensor_random: return "tensor-random";
    case Kind::from_s: return "from-s:" + join_list(s);
  }
  return {};
}

MeasureSpec MeasureSpec::parse(const std::string& text) {
  if (text == "uniform-leaf") return {Kind::uniform_leaf, 0, {}};
  if (text == "custom") return {Kind::custom, 0, {}};
  for (const auto& [prefix, kind] : {std::pair{std::string("leaf-sparse:"), Kind::leaf_sparse},
                                      std::pair{std::string("random-sparse:"), Kind::random_sparse}})
    if (text.rfind(prefix, 0) == 0) {
      const std::vector<double> k = parse_list(text.substr(prefix.size()));
      if (k.size() != 1 || !(k[0] >= 1 && k[0] <= 1e6) || k[0] != static_cast<int>(k[0]))
        throw ConfigError(prefix + " needs a count >= 1");
      return {kind, static_cast<int>(k[0]), {}};
    }
  throw ConfigError("unknown measure spec '" + text + "'");
}

std::string MeasureSpec::str() const {
  switch (kind) {
    case Kind::leaf_sparse: return "leaf-sparse:" + std::to_string(k);
    case Kind::random_sparse: return "random-sparse:" + std::to_string(k);
    case Kind::uniform_leaf: return "uniform-leaf";
    case Kind::custom: return "custom";
  }
  return {};
}

Instance generate_instance(int n, int depth, int arity, const WeightSpec& ws, const MeasureSpec& ms,
                           std::uint64_t seed) {
  Instance in;
  in.n = n;
  in.depth = depth;
  in.arity = arity;
  in.seed = seed;
  in.weight_spec = ws;
  in.measure_spec = ms;
  in.t = build_tree(n, depth, arity);
  const NTree& t = in.t;

  Rng wrng(derive_seed(seed, 0x57, 0));
  switch (ws.kind) {
    case WeightSpec::Kind::uniform: in.w = uniform_weight(t); break;
    case WeightSpec::Kind::from_s: in.w = weight_from_s(t, ws.s); break;
    case WeightSpec::Kind::tensor_random:
      for (int j = 0; j < n; ++j) {
        Eigen::ArrayXd f(t.tree(j).size());
        for (Eigen::Index v = 0; v < f.size(); ++v) f[v] = wrng.uniform(0.5, 2.0);
        in.w.factors.push_back(f);
      }
      break;
  }

  in.mu = zeros(t);
  std::vector<Vertex> leaves;
  for (Vertex v = 0; v < t.size(); ++v)
    if (t.is_leaf(v)) leaves.push_back(v);
  Rng mrng(derive_seed(seed, 0x4D, 0));
  switch (ms.kind) {
    case MeasureSpec::Kind::uniform_leaf:
      for (Vertex v : leaves) in.mu[static_cast<Eigen::Index>(v)] = 1;
      break;
    case MeasureSpec::Kind::leaf_sparse: {
      if (static_cast<std::size_t>(ms.k) > leaves.size()) throw ConfigError("more point masses than leaves");
      // Partial Fisher-Yates.
      for (int i = 0; i < ms.k; ++i) {
        const std::size_t r = i + mrng.below(leaves.size() - static_cast<std::size_t>(i));
        std::swap(leaves[static_cast<std::size_t>(i)], leaves[r]);
        in.mu[static_cast<Eigen::Index>(leaves[static_cast<std::size_t>(i)])] = 1;
      }
      break;
    }
    case MeasureSpec::Kind::random_sparse:
      for (int i = 0; i < ms.k; ++i) {
        const Vertex v = mrng.below(t.size());
        in.mu[static_cast<Eigen::Index>(v)] += mrng.uniform(0.1, 1.0);
      }
      break;
    case MeasureSpec::Kind::custom:
      for (const auto& [c, m] : ms.masses) {
        for (int j = 0; j < n; ++j)
          if (c[j] < 0 || c[j] >= t.tree(j).size()) throw ConfigError("custom mass outside the tree");
        if (!(m >= 0)) throw PreconditionError("masses must be nonnegative");
        in.mu[static_cast<Eigen::Index>(t.index(c))] += m;
      }
      break;
  }
  return in;
}

nlohmann::json to_json(const Instance& in) {
  nlohmann::json j;
  j["n"] = in.n;
  j["depth"] = in.depth;
  j["arity"] = in.arity;
  j["seed"] = in.seed;
  j["weight_spec"] = in.weight_spec.str();
  j["measure_spec"] = in.measure_spec.str();
  nlohmann::json factors = nlohmann::json::array();
  for (const Eigen::ArrayXd& f : in.w.factors) factors.push_back(std::vector<double>(f.begin(), f.end()));
  j["weight_factors"] = factors;
  nlohmann::json masses = nlohmann::json::array();
  for (Vertex v = 0; v < in.t.size(); ++v)
    if (in.mu[static_cast<Eigen::Index>(v)] != 0) {
      const Coords c = in.t.coords(v);
      masses.push_back({{"coords", std::vector<int>(c.begin(), c.begin() + in.n)},
                        {"mass", in.mu[static_cast<Eigen::Index>(v)]}});
    }
  j["masses"] = masses;
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  try {
    Instance in;
    in.n = j.at("n").get<int>();
    in.depth = j.at("depth").get<int>();
    in.arity = j.at("arity").get<int>();
    in.seed = j.at("seed").get<std::uint64_t>();
    in.weight_spec = WeightSpec::parse(j.at("weight_spec").get<std::string>());
    in.measure_spec = MeasureSpec::parse(j.at("measure_spec").get<std::string>());
    in.t = build_tree(in.n, in.depth, in.arity);
    for (const auto& f : j.at("weight_factors")) {
      const std::vector<double> xs = f.get<std::vector<double>>();
      in.w.factors.push_back(Eigen::Map<const Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
    }
    in.w.validate(in.t);
    in.mu = zeros(in.t);
    for (const auto& m : j.at("masses")) {
      const std::vector<int> c = m.at("coords").get<std::vector<int>>();
      if (static_cast<int>(c.size()) != in.n) throw ConfigError("mass coordinates do not match n");
      Coords cc{};
      for (int i = 0; i < in.n; ++i) {
        if (c[i] < 0 || c[i] >= in.t.tree(i).size()) throw ConfigError("mass outside the tree");
        cc[i] = c[i];
      }
      const double mass = m.at("mass").get<double>();
      if (!(mass >= 0)) throw PreconditionError("masses must be nonnegative");
      in.mu[static_cast<Eigen::Index>(in.t.index(cc))] = mass;
      if (in.measure_spec.kind == MeasureSpec::Kind::custom) in.measure_spec.masses.emplace_back(cc, mass);
    }
    return in;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed instance: ") + e.what());
  }
}

std::string serialize(const Instance& in) { return to_json(in).dump(2) + "\n"; }

Instance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instance is not valid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

}  // namespace mtc
