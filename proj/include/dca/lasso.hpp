#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dca/numerics.hpp"

namespace dca {

struct LassoOptions {
  double tol = 1e-9;      // max coefficient change per sweep
  double kkt_tol = 1e-7;  // max KKT violation
  int max_iter = 100000;  // coordinate sweeps
};

/// Lasso regression of node `target` on all other nodes. `coefficients` has
/// p-1 entries ordered by node index with the target skipped.
struct LassoFit {
  Vector coefficients;
  double lambda = 0.0;
  int target = 0;
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
};

struct Subgradient {
  Vector tau;
  double lambda = 0.0;
  int target = 0;
};

/// Minimizes 1/2 b' S_{-j,-j} b - b' S_{-j,j} + lambda ||b||_1 by cyclic
/// coordinate descent. With S = X'X/n this is the lasso neighborhood
/// regression; with S = Sigma it is the noiseless lasso. `warm_start`, when
/// given, is a (p-1)-vector in the same layout as LassoFit::coefficients.
LassoFit lasso_covariance(const Matrix& s, int j, double lambda, const LassoOptions& options = {},
                          const Vector* warm_start = nullptr);

/// Largest KKT violation of `coefficients` for the covariance-form problem.
double lasso_kkt_residual(const Matrix& s, int j, const Vector& coefficients, double lambda);

/// (1/2n)||x_j - X_{-j} b||^2 + lambda ||b||_1, no intercept, no scaling.
LassoFit lasso_cd(const DataMatrix& x, int j, double lambda, double tol = 1e-9, int max_iter = 100000);

/// Population counterpart of lasso_cd with the Gram matrix replaced by sigma.
LassoFit noiseless_lasso(const SymMatrix& sigma, int j, double lambda, double tol = 1e-9, int max_iter = 100000);

/// tau = (Sigma_{-j,j} - Sigma_{-j,-j} beta) / lambda for a noiseless fit.
/// Throws InvalidFit if the fit violates its KKT conditions by more than
/// `kkt_tol`.
Subgradient subgradient_tau(const SymMatrix& sigma, int j, double lambda, const LassoFit& fit,
                            double kkt_tol = 1e-6);

/// ||S_{-j,j}||_inf, the smallest lambda with an all-zero solution.
double lambda_max(const Matrix& s, int j);

/// `count` log-spaced values from lmax down to ratio * lmax.
std::vector<double> lambda_grid(double lmax, int count = 50, double ratio = 1e-3);

/// Fold-wise Gram matrices of one dataset. Each held-out fold's training and
/// validation quadratic forms come from these sums, so tuning every node of a
/// dataset costs one pass over the rows.
class CrossValidation {
 public:
  CrossValidation(const Matrix& x, int folds, std::uint64_t seed);

  struct Selection {
    double lambda = 0.0;
    std::vector<double> cv_error;  // aligned with the grid
    int skipped_folds = 0;
  };

  /// Grid value with the smallest mean held-out squared error, warm-starting
  /// down the grid; ties go to the larger lambda. Folds whose path fails to
  /// converge are skipped; NotConverged if every fold fails.
  Selection select(int j, std::span<const double> grid, const LassoOptions& options = {}) const;

  /// X'X/n over all rows.
  const Matrix& full_gram() const { return full_gram_; }
  int folds() const { return static_cast<int>(fold_sums_.size()); }

 private:
  std::vector<Matrix> fold_sums_;
  std::vector<int> fold_sizes_;
  Matrix total_sum_;
  Matrix full_gram_;
  int n_ = 0;
};

double cv_lambda(const DataMatrix& x, int j, int folds, std::span<const double> grid, std::uint64_t seed);

/// Nodes with a nonzero coefficient, in original labels.
NodeSet estimated_neighborhood(const LassoFit& fit);

}  // namespace dca
