#pragma once

#include <cstdint>
#include <vector>

#include "dca/numerics.hpp"

namespace dca {

struct QuantTestResult {
  int node = 0;
  double statistic = 0.0;
  double pvalue = 1.0;
  int perms = 0;
};

/// Lasso-regularized partial correlations of one sample: each column is
/// regressed on the others using the correlation matrix at
/// lambda = sqrt(log p / n), and rho_jk = sign(b_jk) sqrt(b_jk b_kj) when the
/// two coefficients agree in sign, 0 otherwise.
Matrix regularized_partial_correlations(const Matrix& correlation, int n);

/// d_j = sum_k (rho1_jk - rho2_jk)^2 for every node.
Vector quant_statistics(const DataMatrix& x1, const DataMatrix& x2);

/// Quantitative permutation test for every node. Group labels are permuted
/// over the pooled rows with group sizes preserved; all nodes share the same
/// permutations. Add-one p-values.
std::vector<QuantTestResult> quant_tests(const DataMatrix& x1, const DataMatrix& x2, int perms, std::uint64_t seed,
                                         int threads = 1);

QuantTestResult quant_node_test(const DataMatrix& x1, const DataMatrix& x2, int j, int perms, std::uint64_t seed);

}  // namespace dca
