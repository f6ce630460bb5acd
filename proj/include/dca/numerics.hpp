#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace dca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted, duplicate-free list of node indices.
using NodeSet = std::vector<int>;

NodeSet make_node_set(std::vector<int> nodes);
bool contains(const NodeSet& set, int node);
NodeSet set_union(const NodeSet& a, const NodeSet& b);
NodeSet set_intersection(const NodeSet& a, const NodeSet& b);
NodeSet set_difference(const NodeSet& a, const NodeSet& b);
NodeSet symmetric_difference(const NodeSet& a, const NodeSet& b);
bool is_subset(const NodeSet& sub, const NodeSet& super);

/// Square matrix whose entries are exactly symmetric.
class SymMatrix {
 public:
  /// Throws InvalidArgument unless `m` is square, finite and exactly symmetric.
  explicit SymMatrix(Matrix m);

  /// Averages `m` with its transpose first; for computed results.
  static SymMatrix symmetrized(const Matrix& m);
  static SymMatrix identity(int dim);
  static SymMatrix diagonal(std::span<const double> values);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// n x p sample matrix, one row per observation.
class DataMatrix {
 public:
  /// Throws InvalidArgument unless n >= 1, p >= 2 and every value is finite.
  explicit DataMatrix(Matrix values);

  int n() const { return static_cast<int>(values_.rows()); }
  int p() const { return static_cast<int>(values_.cols()); }
  const Matrix& values() const { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

  /// Rows selected by index, in the given order.
  DataMatrix rows(std::span<const int> index) const;

 private:
  Matrix values_;
};

/// Lower-triangular L with L L^T = a. A pivot at or below 1e-12 times the
/// largest diagonal entry raises NotPositiveDefinite.
Matrix cholesky(const SymMatrix& a);

SymMatrix invert_spd(const SymMatrix& a);

struct EigenRange {
  double min;
  double max;
};

EigenRange extreme_eigenvalues(const SymMatrix& a);

/// n rows drawn i.i.d. from N(0, sigma).
DataMatrix sample_mvn(const SymMatrix& sigma, int n, std::uint64_t seed);

/// Correlation of the residuals of x_j and x_k after least-squares projection
/// onto an intercept and the columns in `given`.
double partial_correlation(const DataMatrix& x, int j, int k, const NodeSet& given);

/// Least-squares residualizer for a fixed design [1, X_given].
class Residualizer {
 public:
  /// Throws RankDeficient if the design has rank < |given| + 1.
  Residualizer(const Matrix& x, const NodeSet& given);

  Vector residual(const Vector& y) const;
  int design_columns() const { return static_cast<int>(design_.cols()); }

 private:
  Matrix design_;
  Eigen::ColPivHouseholderQR<Matrix> qr_;
};

/// X^T X / n, symmetrized.
Matrix gram(const Matrix& x);

/// Columns minus their means.
Matrix center_columns(const Matrix& x);

/// Unbiased sample variance of each column.
Vector column_variances(const Matrix& x);

}  // namespace dca
