#pragma once

#include <optional>
#include <vector>

#include "mtc/hardy.hpp"

namespace mtc {

struct CapacityResult {
  double value = 0;         // sum phi^2 (or sum w phi^2) at the minimizer
  double signed_value = 0;  // same program without phi >= 0, solved on all of E
  Field phi;
  Field duals;           // lambda_omega on E, zero elsewhere; phi = I* lambda / 2
  VertexSet active_set;  // omega in E with I phi(omega) <= 1 + tol
  double kkt_residual = 0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kCapacityTol = 1e-8;

// min sum phi^2 subject to I phi >= 1 on E and phi >= 0. With `weight`, the
// objective is sum w phi^2 (w > 0 required).
CapacityResult capacity(const NTree& t, const VertexSet& e, double tol = kCapacityTol,
                        const std::optional<Field>& weight = std::nullopt);

// {alpha : V^mu(alpha) > lambda}; always a down-set.
VertexSet superlevel_set(const NTree& t, const Field& w, const Field& mu, double lambda);

struct CapacityRow {
  double lambda = 0;
  std::size_t set_size = 0;
  double cap = 0;
  double energy = 0;
  double ratio = 0;  // cap * lambda^p / E[mu]
};

struct CapacityExperiment {
  int exponent = 0;  // p = 4 on two-trees, 2 on three-trees
  double scale = 1;  // factor applied to mu by normalization
  double max_potential_on_support = 0;
  std::vector<CapacityRow> rows;
  double empirical_c = 0;
};

// Unit weights. With `normalize`, mu is rescaled so that max V^mu on supp mu is 1.
// Grid points with an empty superlevel set are skipped.
CapacityExperiment capacity_bound_experiment(const NTree& t, const Field& mu, const std::vector<double>& lambdas,
                                             bool normalize);

// Nonnegative quadratic program min 1/2 x'Qx - b'x, x >= 0, for positive definite Q.
struct QpResult {
  Eigen::VectorXd x;
  double kkt_residual = 0;
  int iterations = 0;
  bool converged = false;
};
QpResult solve_nonneg_qp(const Eigen::MatrixXd& q, const Eigen::VectorXd& b, double tol);

}  // namespace mtc
