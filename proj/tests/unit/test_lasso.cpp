#include <doctest.h>

#include <cmath>

#include "dca/errors.hpp"
#include "dca/lasso.hpp"
#include "dca/rng.hpp"
#include "oracles.hpp"

using namespace dca;

namespace {

DataMatrix noisy_design(int n, int p, Rng& rng) {
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < p; ++k) x(i, k) = rng.normal();
  for (int i = 0; i < n; ++i) x(i, 0) += 0.8 * x(i, 1) - 0.5 * x(i, p - 1);
  return DataMatrix(x);
}

}  // namespace

TEST_CASE("lasso_cd matches the sign-pattern oracle") {
  Rng rng(2024);
  for (int t = 0; t < 60; ++t) {
    const int p = 2 + static_cast<int>(rng.below(6));
    const int n = 10 + static_cast<int>(rng.below(31));
    const DataMatrix x = noisy_design(n, p, rng);
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
    const double lmax = lambda_max(gram(x.values()), j);
    const double lambda = lmax * (0.02 + 0.9 * rng.uniform());
    const LassoFit fit = lasso_cd(x, j, lambda);
    REQUIRE(fit.converged);
    const Vector ref = oracle::brute_force_lasso(x.values(), j, lambda);
    CHECK((fit.coefficients - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("noiseless lasso satisfies its KKT system") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const int d = 3 + t % 6;
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) a(i, k) = rng.normal();
    const SymMatrix sigma = SymMatrix::symmetrized(a * a.transpose() / d + 0.2 * Matrix::Identity(d, d));
    const int j = t % d;
    const double lambda = 0.3 * lambda_max(sigma.matrix(), j);
    const LassoFit fit = noiseless_lasso(sigma, j, lambda);
    REQUIRE(fit.converged);
    CHECK(lasso_kkt_residual(sigma.matrix(), j, fit.coefficients, lambda) <= 1e-7);
  }
}

TEST_CASE("noiseless lasso is bitwise deterministic") {
  const LassoFit a = noiseless_lasso(oracle::sigma_one(), 0, 0.1);
  const LassoFit b = noiseless_lasso(oracle::sigma_one(), 0, 0.1);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("subgradient on the toy covariance") {
  const SymMatrix s = oracle::sigma_one();
  const double lambda = 0.25;
  const LassoFit fit = noiseless_lasso(s, 0, lambda);
  const Subgradient sub = subgradient_tau(s, 0, lambda, fit);
  CHECK(sub.tau.cwiseAbs().maxCoeff() <= 1.0 + 1e-8);
  for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i)
    if (fit.coefficients[i] != 0.0) CHECK(sub.tau[i] == doctest::Approx(fit.coefficients[i] > 0 ? 1.0 : -1.0));

  LassoFit bogus = fit;
  bogus.coefficients.setConstant(0.7);
  CHECK_THROWS_AS(subgradient_tau(s, 0, lambda, bogus), Error);
}

TEST_CASE("penalties at or above lambda_max give the empty model") {
  const SymMatrix s = oracle::sigma_one();
  const double lmax = lambda_max(s.matrix(), 1);
  CHECK(lmax == doctest::Approx(0.5));
  const LassoFit fit = noiseless_lasso(s, 1, lmax);
  CHECK(fit.coefficients.cwiseAbs().maxCoeff() == 0.0);
  const Subgradient sub = subgradient_tau(s, 1, lmax * 2.0, noiseless_lasso(s, 1, lmax * 2.0));
  CHECK(sub.tau.cwiseAbs().maxCoeff() == doctest::Approx(0.5));
}

TEST_CASE("estimated neighborhoods use original labels") {
  LassoFit fit;
  fit.target = 0;
  fit.coefficients = Vector(3);
  fit.coefficients << 0.0, 0.3, -0.2;
  CHECK(estimated_neighborhood(fit) == NodeSet{2, 3});
  fit.target = 2;
  CHECK(estimated_neighborhood(fit) == NodeSet{1, 3});
}

TEST_CASE("lambda grid is log spaced") {
  const auto g = lambda_grid(2.0, 5, 1e-2);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 2.0);
  CHECK(g.back() == doctest::Approx(0.02));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]));
}

TEST_CASE("warm starts do not change the solution") {
  Rng rng(3);
  const DataMatrix x = noisy_design(40, 6, rng);
  const Matrix s = gram(x.values());
  const LassoFit cold = lasso_covariance(s, 0, 0.05);
  Vector warm = Vector::Constant(5, 0.4);
  const LassoFit hot = lasso_covariance(s, 0, 0.05, {}, &warm);
  CHECK((cold.coefficients - hot.coefficients).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("cross-validation agrees with explicit fold refits") {
  Rng rng(31);
  const DataMatrix x = noisy_design(60, 5, rng);
  const int folds = 5;
  const CrossValidation cv(x.values(), folds, 77);
  const auto grid = lambda_grid(lambda_max(cv.full_gram(), 0), 8, 0.05);
  const auto sel = cv.select(0, grid);

  // Recover the fold assignment with the same seeded shuffle.
  std::vector<int> order(60);
  for (int i = 0; i < 60; ++i) order[i] = i;
  Rng frng(77);
  shuffle(std::span<int>(order), frng);
  std::vector<int> fold_of(60);
  for (int i = 0; i < 60; ++i) fold_of[order[i]] = i % folds;

  for (std::size_t g = 0; g < grid.size(); ++g) {
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<int> train, test;
      for (int i = 0; i < 60; ++i) (fold_of[i] == f ? test : train).push_back(i);
      const DataMatrix xt = x.rows(train);
      const Vector b = oracle::brute_force_lasso(xt.values(), 0, grid[g]);
      double sse = 0.0;
      for (int i : test) {
        double r = x(i, 0);
        for (int k = 1; k < 5; ++k) r -= b[k - 1] * x(i, k);
        sse += r * r;
      }
      total += sse / static_cast<double>(test.size());
    }
    CHECK(sel.cv_error[g] == doctest::Approx(total / folds).epsilon(1e-6));
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (sel.cv_error[g] < sel.cv_error[best]) best = g;
  CHECK(sel.lambda == grid[best]);
  CHECK(cv.select(0, grid).cv_error == sel.cv_error);
}
