#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mtc {

// Bad configuration or exceeded size budget. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation's stated precondition does not hold for the given input.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Product-size cap, read from MTC_BUDGET_VERTICES (default 2e6).
std::size_t vertex_budget();

// splitmix64 finalizer; the basis of all seed derivation.
std::uint64_t mix64(std::uint64_t x);

// Seed for trial `k` of stream `stream` under `master`:
//   mix64(master ^ mix64(stream * 0x9E3779B97F4A7C15 + k)).
// Trial results depend only on their own seed, never on execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t k);

// Thin wrapper over mt19937_64. Floats are built from the raw 64-bit output so
// sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool coin(double p = 0.5) { return uniform() < p; }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Relative comparison helpers: tolerance 1e-9 relative with 1e-12 absolute floor.
inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsFloor = 1e-12;

// a <= b up to slack scaled by both sides.
bool leq_tol(double a, double b, double rel = kRelTol);
bool close_tol(double a, double b, double rel = kRelTol);

}  // namespace mtc
