#include <doctest.h>

#include <cmath>

#include "dca/comparators.hpp"
#include "dca/errors.hpp"
#include "dca/lasso.hpp"
#include "oracles.hpp"

using namespace dca;

namespace {

Matrix correlation_of(const Matrix& x) {
  const Matrix c = center_columns(x);
  Matrix s = c.transpose() * c;
  const Vector d = s.diagonal().cwiseSqrt();
  for (int a = 0; a < s.rows(); ++a)
    for (int b = 0; b < s.cols(); ++b) s(a, b) /= d(a) * d(b);
  return s;
}

}  // namespace

TEST_CASE("regularized partial correlations are symmetric with zero diagonal") {
  const DataMatrix x = sample_mvn(oracle::sigma_one(), 500, 11);
  const Matrix rho = regularized_partial_correlations(correlation_of(x.values()), 500);
  CHECK((rho - rho.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 0; j < 3; ++j) CHECK(rho(j, j) == 0.0);
  CHECK(rho.cwiseAbs().maxCoeff() <= 1.0);
  // Omega^I has partial correlations -0.5 everywhere.
  CHECK(rho(0, 1) < -0.3);
}

TEST_CASE("regularized partial correlations agree with a direct lasso computation") {
  const DataMatrix x = sample_mvn(oracle::sigma_two(), 200, 12);
  const Matrix r = correlation_of(x.values());
  const Matrix rho = regularized_partial_correlations(r, 200);
  const double lambda = std::sqrt(std::log(3.0) / 200.0);
  Matrix beta = Matrix::Zero(3, 3);
  for (int j = 0; j < 3; ++j) {
    const LassoFit fit = lasso_covariance(r, j, lambda);
    int i = 0;
    for (int k = 0; k < 3; ++k)
      if (k != j) beta(j, k) = fit.coefficients(i++);
  }
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      if (j == k) continue;
      const double prod = beta(j, k) * beta(k, j);
      const double expected = prod > 0 ? std::copysign(std::sqrt(prod), beta(j, k)) : 0.0;
      CHECK(rho(j, k) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("quant statistic vanishes for identical samples") {
  const DataMatrix x = sample_mvn(oracle::sigma_one(), 100, 13);
  CHECK(quant_statistics(x, x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quant p-values are in range and reproducible") {
  const DataMatrix x1 = sample_mvn(oracle::sigma_one(), 80, 14);
  const DataMatrix x2 = sample_mvn(oracle::sigma_two(), 90, 15);
  const auto a = quant_tests(x1, x2, 199, 5);
  const auto b = quant_tests(x1, x2, 199, 5, 2);
  REQUIRE(a.size() == 3);
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j].pvalue >= 1.0 / 200.0);
    CHECK(a[j].pvalue <= 1.0);
    CHECK(a[j].pvalue == b[j].pvalue);
    CHECK(a[j].statistic == b[j].statistic);
    CHECK(a[j].perms == 199);
  }
  const auto single = quant_node_test(x1, x2, 2, 199, 5);
  CHECK(single.pvalue == a[2].pvalue);
  // Node 2 loses both edges: the test should see it.
  CHECK(a[2].pvalue <= 0.01);
}

TEST_CASE("quant test on a duplicated sample rarely rejects") {
  int small = 0;
  for (int s = 0; s < 20; ++s) {
    const DataMatrix x = sample_mvn(oracle::sigma_one(), 60, 100 + s);
    const auto r = quant_node_test(x, x, 0, 99, s);
    small += r.pvalue <= 0.05 ? 1 : 0;
  }
  CHECK(small <= 2);
}

TEST_CASE("quant test argument checks") {
  const DataMatrix x = sample_mvn(oracle::sigma_one(), 30, 1);
  CHECK_THROWS_AS(quant_tests(x, x, 50, 1), Error);
  const DataMatrix tiny(Matrix::Random(2, 3));
  try {
    quant_tests(x, tiny, 99, 1);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
}
