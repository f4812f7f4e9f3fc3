#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mtc/poset.hpp"

namespace mtc {

using Point = std::complex<double>;

// Rotated dyadic lattice on the unit circle: generation k consists of the 2^k
// closed arcs [theta + 2 pi i 2^-k, theta + 2 pi (i + 1) 2^-k]; generation 0 is
// the whole circle.
inline constexpr int kMaxLatticeGeneration = 60;

struct Distances {
  double d = 0;          // |u - v| + 1 - |z| + 1 - |zeta|, chord distance
  double d_lattice = 0;  // length of the smallest admissible lattice arc
};
// u, v are the radial projections z/|z|, zeta/|zeta| (angle 0 at the origin).
Distances distances(Point z, Point zeta, double theta);

// Arc [a, b] of a dyadic vertex at depth k and index i (0 <= i < 2^k).
struct Arc {
  double a = 0, b = 0;
  double length() const { return b - a; }
};
Arc lattice_arc(int depth, std::uint64_t index, double theta);

// The depth-k vertex whose Whitney box {arg z in I, 1-|z| in (2^-k-1, 2^-k]}
// contains z; points deeper than max_depth are assigned to depth max_depth.
struct DyadicCell {
  int depth = 0;
  std::uint64_t index = 0;
};
DyadicCell whitney_cell(Point z, double theta, int max_depth);

struct GoodLatticeReport {
  int m = 0;
  int trials = 0;
  int good = 0;
  double probability = 0;
  double wilson_lo = 0, wilson_hi = 0;  // 95% Wilson interval
  int good_violations = 0;              // good samples with D_L > 10 D
  double max_good_ratio = 0;            // max D_L / D over good samples
  double min_ratio = 0;                 // min D_L / D over all samples
};
// Arc I = [0, 2 pi 2^-m); a sample is good when no division point of
// generations 1 .. m-4 falls in I. (z, zeta) project into I with
// D in [1.6, 3.2] |I|, so a good sample has D_L <= 16 |I| <= 10 D.
// Requires m >= 4 (m = 4 has no generations and probability 1) and m <= 40.
GoodLatticeReport good_lattice_probability(int m, int trials, std::uint64_t seed);

// One-coordinate kernel: |1 - z conj(zeta)|^(s-1) for s < 1 and
// 1 + log(2 / |1 - z conj(zeta)|) for s = 1 (a positive representative of the
// logarithmic kernel; |1 - z conj(zeta)| < 2 in the disc).
double kernel_factor(double s, double dist);

// Pinned one-coordinate constants. forward: tree side <= B(s) * box sup for
// every vertex pair of a binary tree. reverse: |K_s(z, zeta)| <= B'(s) * tree
// side whenever D_L <= 10 D, with B'(s) = 16^(1-s) and B'(1) = 4.5.
double forward_kernel_bound(double s);
double reverse_kernel_bound(double s);

// Minimum of |1 - z conj(zeta)| over the closed Whitney boxes of two cells.
double min_box_distance(const DyadicCell& a, const DyadicCell& b, double theta);

// Supremum over the closed Whitney boxes of (1 - |z zeta|^2) / |1 - z conj(zeta)|^2.
double poisson_box_sup(const DyadicCell& a, const DyadicCell& b);

struct KernelReport {
  int d = 0;
  int depth = 0;
  std::vector<double> s;
  int trials = 0;
  // tree side / sup over boxes, over random vertex pairs.
  double forward_max = 0, forward_min = 0;
  double forward_bound = 0;  // product of forward_kernel_bound(s_j)
  int forward_violations = 0;
  // |K_s(z, zeta)| / tree side of the cells containing z, zeta under random rotations.
  double reverse_bound = 0;
  int reverse_hits = 0;  // samples with ratio <= reverse_bound
  double reverse_probability = 0;
  double reverse_max = 0;
};
// t must be a product of complete binary trees of one depth; d = t.arity().
KernelReport kernel_domination(const NTree& t, const std::vector<double>& s, int trials, std::uint64_t seed);

struct PoissonWitness {
  int d = 0;
  int depth = 0;
  // Per coordinate (depth, index) of alpha and beta at the maximizing pair.
  std::vector<DyadicCell> alpha, beta;
  double tree_side = 0;     // I_{w_0} 1(alpha join beta), w_j = |alpha_j|^-1
  double poisson_side = 0;  // sup over boxes of prod (1 - |z_j zeta_j|^2) / |1 - z_j conj(zeta_j)|^2
  double ratio = 0;
  double diagonal_ratio = 0;  // alpha = beta = the first leaf
  std::size_t pairs = 0;      // pairs searched per coordinate
};
// Exhaustive over vertex pairs. Both sides factor over coordinates, so the
// maximum over the product is the d-th power of the one-coordinate maximum.
PoissonWitness poisson_failure_witness(int d, int depth);

}  // namespace mtc
