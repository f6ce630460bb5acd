#include "dca/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dca/errors.hpp"
#include "dca/rng.hpp"

namespace dca {

namespace {

void check_pvalues(std::span<const double> pvalues) {
  for (double p : pvalues) require(p >= 0.0 && p <= 1.0, "p-values must lie in [0, 1]");
}

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::DomainError, "level must lie in (0, 1)");
}

std::vector<std::size_t> ascending_order(std::span<const double> pvalues) {
  std::vector<std::size_t> order(pvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pvalues[a] < pvalues[b]; });
  return order;
}

void check_nodes(int p, int j, const NodeSet& cond, const NodeSet& candidates) {
  require(j >= 0 && j < p, "node index out of range");
  for (int k : cond) require(k >= 0 && k < p && k != j, "conditioning set must be valid nodes other than j");
  for (int k : candidates) {
    require(k >= 0 && k < p && k != j, "candidates must be valid nodes other than j");
    require(!contains(cond, k), "candidates must not overlap the conditioning set");
  }
}

}  // namespace

double sidak_level(double alpha) {
  check_level(alpha);
  return -std::expm1(0.5 * std::log1p(-alpha));
}

MultiplicityDecision holm(std::span<const double> pvalues, double alpha) {
  check_pvalues(pvalues);
  check_level(alpha);
  MultiplicityDecision out{std::vector<bool>(pvalues.size(), false), alpha};
  const auto order = ascending_order(pvalues);
  const std::size_t m = pvalues.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (!(pvalues[order[i]] <= alpha / static_cast<double>(m - i))) break;
    out.reject[order[i]] = true;
  }
  return out;
}

std::vector<double> holm_adjust(std::span<const double> pvalues) {
  check_pvalues(pvalues);
  const auto order = ascending_order(pvalues);
  const std::size_t m = pvalues.size();
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    running = std::max(running, std::min(1.0, static_cast<double>(m - i) * pvalues[order[i]]));
    adjusted[order[i]] = running;
  }
  return adjusted;
}

MultiplicityDecision bonferroni(std::span<const double> pvalues, double alpha) {
  check_pvalues(pvalues);
  check_level(alpha);
  MultiplicityDecision out{std::vector<bool>(pvalues.size(), false), alpha};
  const double cut = alpha / static_cast<double>(std::max<std::size_t>(1, pvalues.size()));
  for (std::size_t i = 0; i < pvalues.size(); ++i) out.reject[i] = pvalues[i] <= cut;
  return out;
}

double fisher_z_pvalue(double r, int n, int given) {
  const int dof = n - given - 3;
  if (dof <= 0) fail(ErrorCode::InsufficientSamples, "Fisher z-test needs n > |cond| + 3");
  if (std::abs(r) >= 1.0) return 0.0;
  const double z = std::atanh(r) * std::sqrt(static_cast<double>(dof));
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

double individual_test(const DataMatrix& x, int j, int k, const NodeSet& cond) {
  return individual_tests(x, j, cond, NodeSet{k}).front();
}

std::vector<double> individual_tests(const DataMatrix& x, int j, const NodeSet& cond, const NodeSet& candidates) {
  check_nodes(x.p(), j, cond, candidates);
  const int given = static_cast<int>(cond.size());
  if (x.n() <= given + 3) fail(ErrorCode::InsufficientSamples, "conditional test needs n > |cond| + 3");
  std::vector<double> out;
  out.reserve(candidates.size());
  if (candidates.empty()) return out;
  const Residualizer res(x.values(), cond);
  const Vector rj = res.residual(x.values().col(j));
  const double sjj = rj.dot(rj);
  if (!(sjj > 0.0)) fail(ErrorCode::RankDeficient, "target lies in the span of the conditioning set");
  for (int k : candidates) {
    const Vector rk = res.residual(x.values().col(k));
    const double skk = rk.dot(rk);
    if (!(skk > 0.0)) fail(ErrorCode::RankDeficient, "candidate lies in the span of the conditioning set");
    const double r = std::clamp(rj.dot(rk) / std::sqrt(sjj * skk), -1.0, 1.0);
    out.push_back(fisher_z_pvalue(r, x.n(), given));
  }
  return out;
}

double group_test(const DataMatrix& x, int j, const NodeSet& cond, const NodeSet& candidates, int perms,
                  std::uint64_t seed) {
  check_nodes(x.p(), j, cond, candidates);
  require(perms >= 99, "group test needs at least 99 permutations");
  if (candidates.empty()) return 1.0;
  const int n = x.n();
  if (n <= static_cast<int>(cond.size()) + 1)
    fail(ErrorCode::InsufficientSamples, "group test needs n > |cond| + 1");
  const Residualizer res(x.values(), cond);
  const Vector r = res.residual(x.values().col(j));
  Matrix xt(n, static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c)
    xt.col(static_cast<Eigen::Index>(c)) = res.residual(x.values().col(candidates[c]));

  const double observed = (xt.transpose() * r).squaredNorm();
  const double cutoff = observed * (1.0 - 1e-12);
  std::vector<int> index(static_cast<std::size_t>(n));
  Vector permuted(n);
  Vector scores(xt.cols());
  long exceed = 0;
  for (int b = 0; b < perms; ++b) {
    std::iota(index.begin(), index.end(), 0);
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(b)}));
    shuffle(std::span<int>(index), rng);
    for (int i = 0; i < n; ++i) permuted[i] = r[index[i]];
    scores.noalias() = xt.transpose() * permuted;
    if (scores.squaredNorm() >= cutoff) ++exceed;
  }
  return static_cast<double>(1 + exceed) / static_cast<double>(perms + 1);
}

}  // namespace dca
