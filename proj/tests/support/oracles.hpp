#pragma once

#include <vector>

#include "dca/numerics.hpp"

namespace oracle {

dca::SymMatrix omega_one();
dca::SymMatrix sigma_one();
dca::SymMatrix omega_two();
dca::SymMatrix sigma_two();

/// Exhaustive lasso: tries every sign pattern in {-1,0,1}^(p-1), solves the
/// stationarity equations on the active set and keeps the best consistent
/// candidate. Objective (1/2n)||y - Xb||^2 + lambda ||b||_1, no intercept.
dca::Vector brute_force_lasso(const dca::Matrix& x, int j, double lambda);
double lasso_objective(const dca::Matrix& x, int j, const dca::Vector& b, double lambda);

/// Holm by definition: for each sorted position, reject while every earlier
/// position also passed.
std::vector<bool> holm_reference(const std::vector<double>& p, double alpha);

/// Partial correlation from the inverse of the sample covariance of
/// {j, k} + given.
double partial_correlation_by_inverse(const dca::Matrix& x, int j, int k, const std::vector<int>& given);

/// Recount of the average false positive rate without shared code.
double recount_rate(const std::vector<std::vector<bool>>& z, const std::vector<std::vector<bool>>& include);

}  // namespace oracle
