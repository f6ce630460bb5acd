#pragma once

#include <optional>

#include "dca/numerics.hpp"

namespace dca {

/// Minimum-coefficient quantities for node j of a precision matrix, with
/// beta = -omega_{-j,j} / omega_jj.
struct A2Quantities {
  int node = 0;
  int q = 0;
  std::optional<double> b_min;  // empty when q = 0
  double lambda_q = 0.0;
  std::optional<double> rate_term;  // sqrt(log p / n) q / lambda; empty without n
  std::optional<double> ratio_term;  // lambda sqrt(q) / b_min; empty when q = 0
};

A2Quantities a2_quantities(const SymMatrix& omega, int j, double lambda, std::optional<int> n = std::nullopt);

/// Noiseless-lasso subgradient quantities for node j of a covariance matrix.
struct A3Quantities {
  int node = 0;
  NodeSet noiseless_support;  // ne~ (original labels)
  NodeSet true_neighborhood;  // support of the precision column
  double sup_off_support = 0.0;  // ||tau_{-ne~}||_inf
  double margin = 1.0;            // 1 - sup_off_support
  std::optional<double> min_inverse_term;  // empty when ne~ \ ne is empty
};

A3Quantities a3_quantities(const SymMatrix& sigma, int j, double lambda);

/// Largest dimension restricted_eigenvalue accepts.
inline constexpr int kRestrictedEigenvalueMaxDim = 15;

/// Empirical restricted-eigenvalue constant: the smallest b' A b / ||b_S||^2
/// found over the cone ||b_{-I}||_1 <= c ||b_I||_1, with I ranging over index
/// sets of size |support| and S over I and I plus one coordinate that is at
/// least as large as every other coordinate outside I. Multi-start projected
/// gradient, so the value is an upper bound on the true constant and never
/// below the smallest eigenvalue of A.
double restricted_eigenvalue(const SymMatrix& sigma_hat, const NodeSet& support, double c = 3.0);

}  // namespace dca
