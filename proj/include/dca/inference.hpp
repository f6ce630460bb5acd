#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dca/numerics.hpp"

namespace dca {

/// Per-test level 1 - sqrt(1 - alpha) that splits a level-alpha test across
/// two independent networks.
double sidak_level(double alpha);

struct MultiplicityDecision {
  std::vector<bool> reject;  // aligned with the input p-values
  double level = 0.0;
};

/// Holm step-down: reject the i-th smallest p-value while p_(i) <= alpha/(m-i+1).
MultiplicityDecision holm(std::span<const double> pvalues, double alpha);

/// Holm-adjusted p-values; p_adj <= alpha exactly when holm() rejects at alpha.
std::vector<double> holm_adjust(std::span<const double> pvalues);

MultiplicityDecision bonferroni(std::span<const double> pvalues, double alpha);

struct PValueLabel {
  int network = 0;  // 0 = network I, 1 = network II
  int candidate = 0;
};

struct PValueSet {
  std::vector<PValueLabel> labels;
  std::vector<double> pvalues;
};

/// Two-sided Fisher z-test p-value for a partial correlation r estimated from
/// n rows with `given` conditioning variables.
double fisher_z_pvalue(double r, int n, int given);

/// H0: x_j independent of x_k given x_cond (Fisher z of the partial correlation).
double individual_test(const DataMatrix& x, int j, int k, const NodeSet& cond);

/// individual_test for every candidate, sharing one conditioning regression.
std::vector<double> individual_tests(const DataMatrix& x, int j, const NodeSet& cond, const NodeSet& candidates);

/// Residual-permutation score test of H0: beta_k = 0 for every candidate, given
/// x_cond. Statistic sum_k (r' xt_k / n)^2 with r, xt_k residuals on [1, x_cond];
/// p-value (1 + #{T_perm >= T}) / (perms + 1). Empty candidates give 1.
double group_test(const DataMatrix& x, int j, const NodeSet& cond, const NodeSet& candidates, int perms,
                  std::uint64_t seed);

}  // namespace dca
