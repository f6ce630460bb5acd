#include "dca/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dca/errors.hpp"
#include "dca/lasso.hpp"

namespace dca {

namespace {

void check_node(const SymMatrix& a, int j) { require(j >= 0 && j < a.dim(), "node index out of range"); }

// Index sets of size q from {0..d-1} in lexicographic order.
template <class F>
void for_each_subset(int d, int q, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) idx[i] = i;
  for (;;) {
    f(idx);
    int i = q - 1;
    while (i >= 0 && idx[i] == d - q + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int k = i + 1; k < q; ++k) idx[k] = idx[k - 1] + 1;
  }
}

struct ConePiece {
  std::vector<bool> in_i;
  int extra = -1;  // coordinate of S \ I, or -1 for S = I
  double c = 3.0;
};

// Maps b into the cone piece (approximately; the result is always feasible)
// and normalizes ||b_S|| = 1. Returns false when b_S vanishes.
bool project(Vector& b, const ConePiece& piece) {
  const auto d = b.size();
  if (piece.extra >= 0) {
    const double cap = std::abs(b[piece.extra]);
    for (Eigen::Index k = 0; k < d; ++k)
      if (!piece.in_i[k] && k != piece.extra) b[k] = std::clamp(b[k], -cap, cap);
  }
  double inside = 0.0;
  double outside = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) (piece.in_i[k] ? inside : outside) += std::abs(b[k]);
  if (outside > piece.c * inside) {
    const double shrink = outside > 0.0 ? piece.c * inside / outside : 0.0;
    for (Eigen::Index k = 0; k < d; ++k)
      if (!piece.in_i[k]) b[k] *= shrink;
  }
  double norm_s = 0.0;
  for (Eigen::Index k = 0; k < d; ++k)
    if (piece.in_i[k] || k == piece.extra) norm_s += b[k] * b[k];
  norm_s = std::sqrt(norm_s);
  if (!(norm_s > 1e-300)) return false;
  b /= norm_s;
  return true;
}

double minimize_piece(const Matrix& a, const ConePiece& piece, const std::vector<Vector>& starts, double step) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& start : starts) {
    Vector b = start;
    if (!project(b, piece)) continue;
    double value = b.dot(a * b);
    best = std::min(best, value);
    for (int it = 0; it < 300; ++it) {
      Vector next = b - step * (a * b);
      if (!project(next, piece)) break;
      const double v = next.dot(a * next);
      best = std::min(best, v);
      const bool stalled = std::abs(value - v) <= 1e-14 * std::max(1.0, std::abs(value));
      b = std::move(next);
      value = v;
      if (stalled) break;
    }
  }
  return best;
}

}  // namespace

A2Quantities a2_quantities(const SymMatrix& omega, int j, double lambda, std::optional<int> n) {
  check_node(omega, j);
  if (!(lambda > 0.0 && std::isfinite(lambda))) fail(ErrorCode::DomainError, "lambda must be positive");
  if (n) require(*n >= 1, "n must be positive");
  const double diag = omega(j, j);
  if (!(diag > 0.0)) fail(ErrorCode::NotPositiveDefinite, "precision diagonal must be positive");
  A2Quantities out;
  out.node = j;
  double b_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < omega.dim(); ++k) {
    if (k == j || omega(k, j) == 0.0) continue;
    ++out.q;
    b_min = std::min(b_min, std::abs(omega(k, j) / diag));
  }
  out.lambda_q = lambda * out.q;
  if (n) out.rate_term = std::sqrt(std::log(static_cast<double>(omega.dim())) / *n) * out.q / lambda;
  if (out.q > 0) {
    out.b_min = b_min;
    out.ratio_term = lambda * std::sqrt(static_cast<double>(out.q)) / b_min;
  }
  return out;
}

A3Quantities a3_quantities(const SymMatrix& sigma, int j, double lambda) {
  check_node(sigma, j);
  if (!(lambda > 0.0 && std::isfinite(lambda))) fail(ErrorCode::DomainError, "lambda must be positive");
  const SymMatrix omega = invert_spd(sigma);
  const int p = sigma.dim();
  const LassoFit fit = noiseless_lasso(sigma, j, lambda);
  if (!fit.converged) fail(ErrorCode::NotConverged, "noiseless lasso did not converge");
  const Subgradient sub = subgradient_tau(sigma, j, lambda, fit);

  A3Quantities out;
  out.node = j;
  out.noiseless_support = estimated_neighborhood(fit);
  const double scale = omega.matrix().diagonal().cwiseAbs().maxCoeff();
  for (int k = 0; k < p; ++k)
    if (k != j && std::abs(omega(k, j)) > 1e-10 * scale) out.true_neighborhood.push_back(k);

  // tau is laid out like the coefficients: node order with j skipped.
  std::vector<int> label;
  for (int k = 0; k < p; ++k)
    if (k != j) label.push_back(k);
  double sup = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i)
    if (!contains(out.noiseless_support, label[i])) sup = std::max(sup, std::abs(sub.tau[static_cast<Eigen::Index>(i)]));
  out.sup_off_support = sup;
  out.margin = 1.0 - sup;

  const NodeSet extra = set_difference(out.noiseless_support, out.true_neighborhood);
  if (!extra.empty()) {
    const auto& ne = out.noiseless_support;
    const auto q = static_cast<Eigen::Index>(ne.size());
    Matrix block(q, q);
    Vector tau(q);
    for (Eigen::Index a = 0; a < q; ++a) {
      for (Eigen::Index b = 0; b < q; ++b) block(a, b) = sigma(ne[a], ne[b]);
      const auto pos = std::find(label.begin(), label.end(), ne[a]) - label.begin();
      tau[a] = sub.tau[pos];
    }
    const Vector w = block.ldlt().solve(tau);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < q; ++a)
      if (contains(extra, ne[a])) best = std::min(best, std::abs(w[a]));
    out.min_inverse_term = best;
  }
  return out;
}

double restricted_eigenvalue(const SymMatrix& sigma_hat, const NodeSet& support, double c) {
  const int d = sigma_hat.dim();
  if (d > kRestrictedEigenvalueMaxDim)
    fail(ErrorCode::DimensionTooLarge,
         "restricted eigenvalue search is limited to dimension " + std::to_string(kRestrictedEigenvalueMaxDim));
  const int q = static_cast<int>(support.size());
  require(q >= 1 && q <= d, "support size must lie in [1, dim]");
  for (int k : support) require(k >= 0 && k < d, "support index out of range");
  require(c > 0.0 && std::isfinite(c), "cone constant must be positive");

  const Matrix& a = sigma_hat.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const double top = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
  const double step = 0.5 / top;
  const Vector bottom = eig.eigenvectors().col(0);

  double best = std::numeric_limits<double>::infinity();
  for_each_subset(d, q, [&](const std::vector<int>& idx) {
    ConePiece piece{std::vector<bool>(static_cast<std::size_t>(d), false), -1, c};
    for (int i : idx) piece.in_i[i] = true;
    std::vector<Vector> starts;
    for (int i : idx) starts.push_back(Vector::Unit(d, i));
    starts.push_back(bottom);
    starts.push_back(-bottom);
    best = std::min(best, minimize_piece(a, piece, starts, step));
    for (int s = 0; s < d; ++s) {
      if (piece.in_i[s]) continue;
      piece.extra = s;
      std::vector<Vector> more = starts;
      for (int i : idx) {
        Vector v = Vector::Unit(d, i);
        v[s] = 1.0;
        more.push_back(v);
      }
      best = std::min(best, minimize_piece(a, piece, more, step));
    }
    piece.extra = -1;
  });
  return best;
}

}  // namespace dca
