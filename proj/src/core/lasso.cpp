#include "dca/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dca/errors.hpp"
#include "dca/rng.hpp"

namespace dca {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

void check_target(const Matrix& s, int j) {
  require(s.rows() == s.cols() && s.rows() >= 2, "lasso needs a square matrix with p >= 2");
  require(j >= 0 && j < s.rows(), "target node out of range");
}

Vector expand(const Vector& reduced, int j, Eigen::Index p) {
  Vector full = Vector::Zero(p);
  for (Eigen::Index k = 0, i = 0; k < p; ++k)
    if (k != j) full[k] = reduced[i++];
  return full;
}

Vector compress(const Vector& full, int j) {
  Vector reduced(full.size() - 1);
  for (Eigen::Index k = 0, i = 0; k < full.size(); ++k)
    if (k != j) reduced[i++] = full[k];
  return reduced;
}

double kkt_from_gradient(const Vector& b, const Vector& g, int j, double lambda) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    if (k == j) continue;
    const double v = b[k] == 0.0 ? std::max(0.0, std::abs(g[k]) - lambda)
                                 : std::abs(g[k] - lambda * (b[k] > 0.0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

LassoFit lasso_covariance(const Matrix& s, int j, double lambda, const LassoOptions& options,
                          const Vector* warm_start) {
  check_target(s, j);
  require(lambda >= 0.0 && std::isfinite(lambda), "lambda must be a finite nonnegative number");
  const Eigen::Index p = s.rows();
  Vector b = Vector::Zero(p);
  if (warm_start != nullptr) {
    require(warm_start->size() == p - 1, "warm start has the wrong length");
    b = expand(*warm_start, j, p);
  }
  Vector g = s.col(j) - s * b;

  auto update = [&](Eigen::Index k) {
    const double skk = s(k, k);
    const double old = b[k];
    const double next = skk > 0.0 ? soft_threshold(g[k] + skk * old, lambda) / skk : 0.0;
    const double delta = next - old;
    if (delta != 0.0) {
      b[k] = next;
      g.noalias() -= delta * s.col(k);
    }
    return std::abs(delta);
  };

  LassoFit fit;
  fit.lambda = lambda;
  fit.target = j;
  int sweeps = 0;
  double kkt = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> active;
  while (sweeps < options.max_iter) {
    double change = 0.0;
    for (Eigen::Index k = 0; k < p; ++k)
      if (k != j) change = std::max(change, update(k));
    ++sweeps;
    if (change < options.tol) {
      g = s.col(j) - s * b;
      kkt = kkt_from_gradient(b, g, j, lambda);
      if (kkt <= options.kkt_tol) {
        fit.converged = true;
        break;
      }
      continue;
    }
    active.clear();
    for (Eigen::Index k = 0; k < p; ++k)
      if (k != j && b[k] != 0.0) active.push_back(k);
    while (sweeps < options.max_iter) {
      double inner = 0.0;
      for (const auto k : active) inner = std::max(inner, update(k));
      ++sweeps;
      if (inner < options.tol) break;
    }
  }
  if (!fit.converged) kkt = lasso_kkt_residual(s, j, compress(b, j), lambda);
  fit.coefficients = compress(b, j);
  fit.iterations = sweeps;
  fit.kkt_residual = kkt;
  return fit;
}

double lasso_kkt_residual(const Matrix& s, int j, const Vector& coefficients, double lambda) {
  check_target(s, j);
  require(coefficients.size() == s.rows() - 1, "coefficient vector has the wrong length");
  const Vector b = expand(coefficients, j, s.rows());
  const Vector g = s.col(j) - s * b;
  return kkt_from_gradient(b, g, j, lambda);
}

LassoFit lasso_cd(const DataMatrix& x, int j, double lambda, double tol, int max_iter) {
  LassoOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return lasso_covariance(gram(x.values()), j, lambda, options);
}

LassoFit noiseless_lasso(const SymMatrix& sigma, int j, double lambda, double tol, int max_iter) {
  LassoOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return lasso_covariance(sigma.matrix(), j, lambda, options);
}

Subgradient subgradient_tau(const SymMatrix& sigma, int j, double lambda, const LassoFit& fit, double kkt_tol) {
  require(lambda > 0.0, "subgradient needs lambda > 0");
  require(fit.target == j, "fit was computed for a different node");
  const double residual = lasso_kkt_residual(sigma.matrix(), j, fit.coefficients, lambda);
  if (!(residual <= kkt_tol))
    fail(ErrorCode::InvalidFit, "KKT residual " + std::to_string(residual) + " exceeds tolerance");
  const Vector b = expand(fit.coefficients, j, sigma.dim());
  const Vector g = sigma.matrix().col(j) - sigma.matrix() * b;
  return {compress(g, j) / lambda, lambda, j};
}

double lambda_max(const Matrix& s, int j) {
  check_target(s, j);
  double m = 0.0;
  for (Eigen::Index k = 0; k < s.rows(); ++k)
    if (k != j) m = std::max(m, std::abs(s(k, j)));
  return m;
}

std::vector<double> lambda_grid(double lmax, int count, double ratio) {
  require(lmax > 0.0, "lambda grid needs lmax > 0");
  require(count >= 1 && ratio > 0.0 && ratio < 1.0, "bad lambda grid shape");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = lmax;
    return grid;
  }
  const double step = std::log(ratio) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = lmax * std::exp(step * i);
  return grid;
}

CrossValidation::CrossValidation(const Matrix& x, int folds, std::uint64_t seed) : n_(static_cast<int>(x.rows())) {
  require(folds >= 2, "cross-validation needs at least two folds");
  require(folds <= n_, "more folds than rows");
  std::vector<int> order(static_cast<std::size_t>(n_));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(std::span<int>(order), rng);

  const Eigen::Index p = x.cols();
  std::vector<std::vector<int>> members(static_cast<std::size_t>(folds));
  for (int i = 0; i < n_; ++i) members[i % folds].push_back(order[i]);
  total_sum_ = Matrix::Zero(p, p);
  for (auto& rows : members) {
    std::sort(rows.begin(), rows.end());
    Matrix sub(static_cast<Eigen::Index>(rows.size()), p);
    for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
    Matrix f = Matrix::Zero(p, p);
    f.selfadjointView<Eigen::Lower>().rankUpdate(sub.transpose());
    f.triangularView<Eigen::StrictlyUpper>() = f.transpose();
    total_sum_ += f;
    fold_sums_.push_back(std::move(f));
    fold_sizes_.push_back(static_cast<int>(rows.size()));
  }
  full_gram_ = total_sum_ / static_cast<double>(n_);
}

CrossValidation::Selection CrossValidation::select(int j, std::span<const double> grid,
                                                   const LassoOptions& options) const {
  require(!grid.empty(), "lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0, "lambda grid values must be positive");
    require(i == 0 || grid[i] < grid[i - 1], "lambda grid must be strictly decreasing");
  }
  Selection sel;
  sel.cv_error.assign(grid.size(), 0.0);
  if (grid.size() == 1) {
    sel.lambda = grid[0];
    return sel;
  }
  const Eigen::Index p = total_sum_.rows();
  int used = 0;
  std::vector<double> fold_err(grid.size());
  for (std::size_t f = 0; f < fold_sums_.size(); ++f) {
    const Matrix train = (total_sum_ - fold_sums_[f]) / static_cast<double>(n_ - fold_sizes_[f]);
    const Matrix& held = fold_sums_[f];
    Vector warm = Vector::Zero(p - 1);
    bool ok = true;
    for (std::size_t g = 0; g < grid.size() && ok; ++g) {
      const LassoFit fit = lasso_covariance(train, j, grid[g], options, &warm);
      if (!fit.converged) {
        ok = false;
        break;
      }
      warm = fit.coefficients;
      // SSE on the fold is w' F w with w = e_j - b.
      std::vector<std::pair<Eigen::Index, double>> w{{j, 1.0}};
      for (Eigen::Index k = 0, i = 0; k < p; ++k) {
        if (k == j) continue;
        if (fit.coefficients[i] != 0.0) w.emplace_back(k, -fit.coefficients[i]);
        ++i;
      }
      double sse = 0.0;
      for (const auto& [a, wa] : w)
        for (const auto& [b, wb] : w) sse += wa * wb * held(a, b);
      fold_err[g] = sse / static_cast<double>(fold_sizes_[f]);
    }
    if (!ok) {
      ++sel.skipped_folds;
      continue;
    }
    ++used;
    for (std::size_t g = 0; g < grid.size(); ++g) sel.cv_error[g] += fold_err[g];
  }
  if (used == 0) fail(ErrorCode::NotConverged, "lasso failed to converge on every cross-validation fold");
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    sel.cv_error[g] /= used;
    if (sel.cv_error[g] < sel.cv_error[best]) best = g;
  }
  sel.lambda = grid[best];
  return sel;
}

double cv_lambda(const DataMatrix& x, int j, int folds, std::span<const double> grid, std::uint64_t seed) {
  require(j >= 0 && j < x.p(), "target node out of range");
  return CrossValidation(x.values(), folds, seed).select(j, grid).lambda;
}

NodeSet estimated_neighborhood(const LassoFit& fit) {
  NodeSet out;
  for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i)
    if (fit.coefficients[i] != 0.0) out.push_back(static_cast<int>(i) < fit.target ? static_cast<int>(i) : static_cast<int>(i) + 1);
  return out;
}

}  // namespace dca
