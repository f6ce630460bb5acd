#include "dca/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dca/errors.hpp"
#include "dca/lasso.hpp"
#include "dca/parallel.hpp"
#include "dca/rng.hpp"

namespace dca {

namespace {

// Raw sums for one group: sum of rows and sum of outer products.
struct Moments {
  Vector sum;
  Matrix cross;
  int n = 0;
};

Moments moments_of(const Matrix& pooled, std::span<const int> rows) {
  const auto p = pooled.cols();
  Moments m{Vector::Zero(p), Matrix::Zero(p, p), static_cast<int>(rows.size())};
  Matrix block(static_cast<Eigen::Index>(rows.size()), p);
  for (std::size_t i = 0; i < rows.size(); ++i) block.row(static_cast<Eigen::Index>(i)) = pooled.row(rows[i]);
  m.sum = block.colwise().sum().transpose();
  m.cross.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
  m.cross = m.cross.selfadjointView<Eigen::Lower>();
  return m;
}

Moments complement(const Moments& total, const Moments& part) {
  return {total.sum - part.sum, total.cross - part.cross, total.n - part.n};
}

Matrix correlation_of(const Moments& m) {
  const Vector mean = m.sum / m.n;
  Matrix cov = m.cross / m.n - mean * mean.transpose();
  Vector scale = cov.diagonal();
  for (Eigen::Index k = 0; k < scale.size(); ++k) {
    if (!(scale[k] > 0.0)) fail(ErrorCode::InsufficientSamples, "a column is constant within a group");
    scale[k] = 1.0 / std::sqrt(scale[k]);
  }
  Matrix cor = scale.asDiagonal() * cov * scale.asDiagonal();
  cor = 0.5 * (cor + cor.transpose());
  cor.diagonal().setOnes();
  return cor;
}

Vector statistics_of(const Moments& a, const Moments& b) {
  const Matrix d =
      regularized_partial_correlations(correlation_of(a), a.n) - regularized_partial_correlations(correlation_of(b), b.n);
  return d.array().square().rowwise().sum();
}

}  // namespace

Matrix regularized_partial_correlations(const Matrix& correlation, int n) {
  const auto p = correlation.rows();
  require(p >= 2 && correlation.cols() == p, "correlation matrix must be square with p >= 2");
  require(n >= 2, "need at least two rows");
  const double lambda = std::sqrt(std::log(static_cast<double>(p)) / n);
  Matrix beta = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    const LassoFit fit = lasso_covariance(correlation, j, lambda);
    if (!fit.converged) fail(ErrorCode::NotConverged, "lasso did not converge in the quantitative statistic");
    for (Eigen::Index k = 0, i = 0; k < p; ++k)
      if (k != j) beta(j, k) = fit.coefficients[i++];
  }
  Matrix rho = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = j + 1; k < p; ++k) {
      const double prod = beta(j, k) * beta(k, j);
      if (prod > 0.0) {
        const double r = std::copysign(std::sqrt(prod), beta(j, k));
        rho(j, k) = r;
        rho(k, j) = r;
      }
    }
  return rho;
}

Vector quant_statistics(const DataMatrix& x1, const DataMatrix& x2) {
  require(x1.p() == x2.p(), "datasets must have the same number of variables");
  std::vector<int> all1(static_cast<std::size_t>(x1.n())), all2(static_cast<std::size_t>(x2.n()));
  std::iota(all1.begin(), all1.end(), 0);
  std::iota(all2.begin(), all2.end(), 0);
  return statistics_of(moments_of(x1.values(), all1), moments_of(x2.values(), all2));
}

std::vector<QuantTestResult> quant_tests(const DataMatrix& x1, const DataMatrix& x2, int perms, std::uint64_t seed,
                                         int threads) {
  require(perms >= 99, "the quantitative test needs perms >= 99");
  require(x1.p() == x2.p(), "datasets must have the same number of variables");
  if (x1.n() < 3 || x2.n() < 3) fail(ErrorCode::InsufficientSamples, "each group needs at least 3 rows");
  const int p = x1.p();
  const int n1 = x1.n();
  const int n = n1 + x2.n();
  Matrix pooled(n, p);
  pooled << x1.values(), x2.values();

  std::vector<int> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  const Moments total = moments_of(pooled, rows);
  const Moments first = moments_of(pooled, std::span<const int>(rows).first(static_cast<std::size_t>(n1)));
  const Vector observed = statistics_of(first, complement(total, first));

  std::vector<Vector> permuted(static_cast<std::size_t>(perms));
  parallel_for(permuted.size(), resolve_threads(threads), [&](std::size_t b) {
    std::vector<int> order(rows);
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(b)}));
    shuffle(std::span<int>(order), rng);
    const Moments g1 = moments_of(pooled, std::span<const int>(order).first(static_cast<std::size_t>(n1)));
    permuted[b] = statistics_of(g1, complement(total, g1));
  });

  std::vector<QuantTestResult> out(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    const double t = observed[j];
    const double tie = 1e-12 * std::max(1.0, std::abs(t));
    int exceed = 0;
    for (const Vector& v : permuted)
      if (v[j] >= t - tie) ++exceed;
    out[j] = {j, t, (1.0 + exceed) / (perms + 1.0), perms};
  }
  return out;
}

QuantTestResult quant_node_test(const DataMatrix& x1, const DataMatrix& x2, int j, int perms, std::uint64_t seed) {
  require(j >= 0 && j < x1.p(), "node index out of range");
  return quant_tests(x1, x2, perms, seed)[static_cast<std::size_t>(j)];
}

}  // namespace dca
