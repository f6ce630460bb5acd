#include "dca/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "dca/errors.hpp"
#include "dca/rng.hpp"

namespace dca {

NodeSet make_node_set(std::vector<int> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

bool contains(const NodeSet& set, int node) { return std::binary_search(set.begin(), set.end(), node); }

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeSet symmetric_difference(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const NodeSet& sub, const NodeSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  require(m_.rows() >= 1 && m_.rows() == m_.cols(), "SymMatrix must be square with dim >= 1");
  require(m_.allFinite(), "SymMatrix entries must be finite");
  for (Eigen::Index i = 0; i < m_.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      require(m_(i, j) == m_(j, i),
              "matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  require(m.rows() == m.cols(), "SymMatrix must be square");
  Matrix s = 0.5 * (m + m.transpose());
  return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(int dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::diagonal(std::span<const double> values) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return SymMatrix(std::move(m));
}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  require(values_.rows() >= 1, "DataMatrix needs at least one row");
  require(values_.cols() >= 2, "DataMatrix needs at least two columns");
  require(values_.allFinite(), "DataMatrix values must be finite");
}

DataMatrix DataMatrix::rows(std::span<const int> index) const {
  Matrix out(static_cast<Eigen::Index>(index.size()), values_.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    require(index[i] >= 0 && index[i] < n(), "row index out of range");
    out.row(static_cast<Eigen::Index>(i)) = values_.row(index[i]);
  }
  return DataMatrix(std::move(out));
}

Matrix cholesky(const SymMatrix& a) {
  const int d = a.dim();
  const Matrix& m = a.matrix();
  const double scale = m.diagonal().maxCoeff();
  if (!(scale > 0.0)) fail(ErrorCode::NotPositiveDefinite, "largest diagonal entry is not positive");
  const double tol = 1e-12 * scale;
  Matrix l = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    double pivot = m(j, j);
    for (int k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > tol))
      fail(ErrorCode::NotPositiveDefinite, "pivot " + std::to_string(j) + " is " + std::to_string(pivot));
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (int i = j + 1; i < d; ++i) {
      double v = m(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

SymMatrix invert_spd(const SymMatrix& a) {
  const Matrix l = cholesky(a);
  Matrix linv = Matrix::Identity(a.dim(), a.dim());
  l.triangularView<Eigen::Lower>().solveInPlace(linv);
  return SymMatrix::symmetrized(linv.transpose() * linv);
}

EigenRange extreme_eigenvalues(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::DomainError, "eigensolver did not converge");
  const Vector& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

DataMatrix sample_mvn(const SymMatrix& sigma, int n, std::uint64_t seed) {
  require(n >= 1, "sample_mvn needs n >= 1");
  const Matrix l = cholesky(sigma);
  const int p = sigma.dim();
  Rng rng(seed);
  Matrix z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
  Matrix x = z * l.transpose();
  return DataMatrix(std::move(x));
}

Residualizer::Residualizer(const Matrix& x, const NodeSet& given) : design_(x.rows(), static_cast<Eigen::Index>(given.size()) + 1) {
  design_.col(0).setOnes();
  for (std::size_t c = 0; c < given.size(); ++c) {
    require(given[c] >= 0 && given[c] < x.cols(), "conditioning index out of range");
    design_.col(static_cast<Eigen::Index>(c) + 1) = x.col(given[c]);
  }
  qr_.compute(design_);
  if (qr_.rank() < design_.cols())
    fail(ErrorCode::RankDeficient, "conditioning design has rank " + std::to_string(qr_.rank()) + " < " +
                                       std::to_string(design_.cols()));
}

Vector Residualizer::residual(const Vector& y) const {
  const Vector coef = qr_.solve(y);
  return y - design_ * coef;
}

double partial_correlation(const DataMatrix& x, int j, int k, const NodeSet& given) {
  require(j != k, "partial_correlation needs j != k");
  require(j >= 0 && j < x.p() && k >= 0 && k < x.p(), "node index out of range");
  require(!contains(given, j) && !contains(given, k), "conditioning set must exclude j and k");
  if (x.n() <= static_cast<int>(given.size()) + 3)
    fail(ErrorCode::InsufficientSamples, "partial correlation needs n > |given| + 3");
  const Residualizer res(x.values(), given);
  const Vector rj = res.residual(x.values().col(j));
  const Vector rk = res.residual(x.values().col(k));
  const double sjj = rj.dot(rj);
  const double skk = rk.dot(rk);
  if (!(sjj > 0.0) || !(skk > 0.0))
    fail(ErrorCode::RankDeficient, "a variable lies in the span of the conditioning set");
  const double r = rj.dot(rk) / std::sqrt(sjj * skk);
  return std::clamp(r, -1.0, 1.0);
}

Matrix gram(const Matrix& x) {
  Matrix g = Matrix::Zero(x.cols(), x.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / static_cast<double>(x.rows()));
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

Matrix center_columns(const Matrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return x.rowwise() - mean;
}

Vector column_variances(const Matrix& x) {
  const Matrix c = center_columns(x);
  const double denom = x.rows() > 1 ? static_cast<double>(x.rows() - 1) : 1.0;
  return c.colwise().squaredNorm().transpose() / denom;
}

}  // namespace dca
