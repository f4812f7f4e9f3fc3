#include "mtc/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace mtc {

std::size_t vertex_budget() {
  if (const char* env = std::getenv("MTC_BUDGET_VERTICES")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || !(v >= 1)) throw ConfigError("MTC_BUDGET_VERTICES must be a positive number");
    return static_cast<std::size_t>(v);
  }
  return 2'000'000;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t k) {
  return mix64(master ^ mix64(stream * 0x9E3779B97F4A7C15ULL + k));
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do x = eng_();
  while (x >= limit);
  return x % n;
}

bool leq_tol(double a, double b, double rel) {
  return a <= b + rel * std::max(std::abs(a), std::abs(b)) + kAbsFloor;
}

bool close_tol(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + kAbsFloor;
}

}  // namespace mtc
