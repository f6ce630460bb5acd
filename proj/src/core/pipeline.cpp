#include "dca/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dca/errors.hpp"
#include "dca/parallel.hpp"
#include "dca/rng.hpp"

namespace dca {

namespace {

constexpr std::uint64_t kSplitStream = 0x5350;
constexpr std::uint64_t kFoldStream = 0x464f;
constexpr std::uint64_t kPermStream = 0x5045;

std::pair<DataMatrix, DataMatrix> split_rows(const DataMatrix& x, std::uint64_t seed) {
  std::vector<int> order(static_cast<std::size_t>(x.n()));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(std::span<int>(order), rng);
  const std::size_t est = (order.size() + 1) / 2;
  require(est < order.size(), "sample splitting needs at least two rows");
  std::vector<int> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(est));
  std::vector<int> second(order.begin() + static_cast<std::ptrdiff_t>(est), order.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {x.rows(first), x.rows(second)};
}

void mark_constant(const DataMatrix& x, std::vector<bool>& flags) {
  const Vector var = column_variances(x.values());
  for (int k = 0; k < x.p(); ++k)
    if (!(var[k] > 0.0)) flags[k] = true;
}

double combine_two(double a, double b) {
  const double m = std::min(a, b);
  return 1.0 - (1.0 - m) * (1.0 - m);
}

}  // namespace

void DcaConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::DomainError, "alpha must lie in (0, 1)");
  if (test == TestKind::group) require(perms >= 99, "group tests need perms >= 99");
  if (lambda.cross_validated()) require(lambda.folds >= 2, "cross-validation needs folds >= 2");
  for (double v : lambda.fixed) require(v >= 0.0 && std::isfinite(v), "fixed lambda values must be nonnegative");
  require(grid_size >= 1, "grid_size must be positive");
  require(grid_ratio > 0.0 && grid_ratio < 1.0, "grid_ratio must lie in (0, 1)");
}

NodeSet NodeTestResult::partners_at(double level) const {
  NodeSet out;
  if (kind != TestKind::individual || !error.empty()) return out;
  const double cut = sidak_level(level);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const bool hit = (c < adjusted[0].size() && adjusted[0][c] <= cut) || (c < adjusted[1].size() && adjusted[1][c] <= cut);
    if (hit) out.push_back(candidates[c]);
  }
  return out;
}

PValueSet NodeTestResult::pvalue_set() const {
  PValueSet out;
  for (int m = 0; m < 2; ++m)
    for (std::size_t c = 0; c < pvalues[m].size(); ++c) {
      out.labels.push_back({m, candidates[c]});
      out.pvalues.push_back(pvalues[m][c]);
    }
  return out;
}

DcaAnalysis::DcaAnalysis(const DataMatrix& x1, const DataMatrix& x2, const DcaConfig& config)
    : config_(config), p_(x1.p()), estimation_{x1, x2}, test_{x1, x2} {
  config_.validate();
  require(x1.p() == x2.p(), "datasets must have the same number of variables");
  if (config_.mode == EstimationMode::split) {
    for (int m = 0; m < 2; ++m) {
      auto [est, tst] = split_rows(m == 0 ? x1 : x2, derive_seed(config_.seed, {kSplitStream, static_cast<std::uint64_t>(m)}));
      estimation_[m] = std::move(est);
      test_[m] = std::move(tst);
    }
  }
  if (!config_.lambda.cross_validated()) {
    const auto count = config_.lambda.fixed.size();
    require(count == 1 || count == static_cast<std::size_t>(p_), "fixed lambdas must have 1 or p values");
  }
  std::vector<bool> flags(static_cast<std::size_t>(p_), false);
  for (int m = 0; m < 2; ++m) {
    mark_constant(estimation_[m], flags);
    mark_constant(test_[m], flags);
    // Centering is equivalent to an unpenalized intercept in the regressions.
    const Matrix centered = center_columns(estimation_[m].values());
    if (config_.lambda.cross_validated()) {
      require(estimation_[m].n() >= config_.lambda.folds, "fewer estimation rows than cross-validation folds");
      cv_[m].emplace(centered, config_.lambda.folds, derive_seed(config_.seed, {kFoldStream, static_cast<std::uint64_t>(m)}));
      gram_[m] = cv_[m]->full_gram();
    } else {
      gram_[m] = gram(centered);
    }
  }
  for (int k = 0; k < p_; ++k)
    if (flags[k]) constant_.push_back(k);
}

double DcaAnalysis::fixed_lambda(int j) const {
  const auto& f = config_.lambda.fixed;
  return f.size() == 1 ? f[0] : f[static_cast<std::size_t>(j)];
}

CommonNeighborhood DcaAnalysis::estimate(int j) const {
  require(j >= 0 && j < p_, "node index out of range");
  CommonNeighborhood out;
  out.node = j;
  for (int m = 0; m < 2; ++m) {
    const Matrix& s = gram_[m];
    const double lmax = lambda_max(s, j);
    if (!(lmax > 0.0) || contains(constant_, j)) continue;
    double lambda;
    if (config_.lambda.cross_validated()) {
      const auto grid = lambda_grid(lmax, config_.grid_size, config_.grid_ratio);
      lambda = cv_[m]->select(j, grid, config_.cv_lasso).lambda;
    } else {
      lambda = fixed_lambda(j);
    }
    const LassoFit fit = lasso_covariance(s, j, lambda, config_.lasso);
    if (!fit.converged)
      fail(ErrorCode::NotConverged, "lasso for node " + std::to_string(j) + " did not converge");
    out.lambdas[m] = lambda;
    out.supports[m] = set_difference(estimated_neighborhood(fit), constant_);
  }
  out.common = set_intersection(out.supports[0], out.supports[1]);
  return out;
}

NodeTestResult DcaAnalysis::test(int j, const NodeSet& common, TestKind kind) const {
  DcaConfig cfg = config_;
  cfg.test = kind;
  return test_node(test_[0], test_[1], j, common, cfg, constant_);
}

std::pair<CommonNeighborhood, TestData> estimate_common_neighborhood(const DataMatrix& x1, const DataMatrix& x2,
                                                                      int j, const DcaConfig& config) {
  const DcaAnalysis analysis(x1, x2, config);
  return {analysis.estimate(j), TestData{analysis.test_data(0), analysis.test_data(1)}};
}

NodeTestResult test_node(const DataMatrix& x1, const DataMatrix& x2, int j, const NodeSet& common,
                         const DcaConfig& config, const NodeSet& excluded) {
  config.validate();
  require(x1.p() == x2.p(), "datasets must have the same number of variables");
  const int p = x1.p();
  require(j >= 0 && j < p, "node index out of range");
  for (int k : common) require(k >= 0 && k < p && k != j, "common neighborhood must exclude the node itself");

  NodeTestResult out;
  out.node = j;
  out.kind = config.test;
  out.common_neighborhood = common;
  if (contains(excluded, j)) {
    out.error = "node has zero variance; not tested";
    return out;
  }
  const NodeSet cond = set_difference(common, excluded);
  NodeSet others;
  for (int k = 0; k < p; ++k)
    if (k != j) others.push_back(k);
  out.candidates = set_difference(set_difference(others, common), excluded);
  if (out.candidates.empty()) return out;

  const double level = sidak_level(config.alpha);
  const std::array<const DataMatrix*, 2> data{&x1, &x2};
  if (config.test == TestKind::individual) {
    double smallest = 1.0;
    for (int m = 0; m < 2; ++m) {
      out.pvalues[m] = individual_tests(*data[m], j, cond, out.candidates);
      out.adjusted[m] = holm_adjust(out.pvalues[m]);
      for (double a : out.adjusted[m]) smallest = std::min(smallest, a);
    }
    out.node_pvalue = combine_two(smallest, smallest);
    out.differential_partners = out.partners_at(config.alpha);
    out.reject = smallest <= level;
  } else {
    for (int m = 0; m < 2; ++m)
      out.group_pvalues[m] =
          group_test(*data[m], j, cond, out.candidates, config.perms,
                     derive_seed(config.seed, {kPermStream, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(j)}));
    out.node_pvalue = combine_two(out.group_pvalues[0], out.group_pvalues[1]);
    out.reject = std::min(out.group_pvalues[0], out.group_pvalues[1]) <= level;
  }
  return out;
}

double edge_rule_level(EdgeRule rule, double alpha) { return rule == EdgeRule::or_rule ? alpha / 2.0 : alpha; }

std::vector<Edge> combine_edges(const std::vector<NodeTestResult>& nodes, EdgeRule rule, double node_level) {
  std::vector<NodeSet> partners(nodes.size());
  std::vector<int> index;
  int p = 0;
  for (const auto& r : nodes) p = std::max(p, r.node + 1);
  std::vector<const NodeSet*> by_node(static_cast<std::size_t>(p), nullptr);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    partners[i] = nodes[i].partners_at(node_level);
    by_node[static_cast<std::size_t>(nodes[i].node)] = &partners[i];
  }
  std::set<Edge> edges;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int j = nodes[i].node;
    for (int k : partners[i]) {
      if (rule == EdgeRule::or_rule) {
        edges.insert(Edge::of(j, k));
      } else if (k < p && by_node[k] != nullptr && contains(*by_node[k], j)) {
        edges.insert(Edge::of(j, k));
      }
    }
  }
  return {edges.begin(), edges.end()};
}

NetworkTestResult dca_network(const DataMatrix& x1, const DataMatrix& x2, const DcaConfig& config, int threads) {
  config.validate();
  require(x1.p() == x2.p(), "datasets must have the same number of variables");
  require(x1.n() >= 20 && x2.n() >= 20, "each dataset needs at least 20 rows");
  const DcaAnalysis analysis(x1, x2, config);
  const int p = x1.p();

  NetworkTestResult out;
  out.nodes.resize(static_cast<std::size_t>(p));
  parallel_for(static_cast<std::size_t>(p), resolve_threads(threads), [&](std::size_t i) {
    const int j = static_cast<int>(i);
    NodeTestResult r;
    r.node = j;
    r.kind = config.test;
    try {
      const CommonNeighborhood ne = analysis.estimate(j);
      r = analysis.test(j, ne.common, config.test);
    } catch (const Error& e) {
      r.error = e.what();
      r.reject = false;
      r.node_pvalue = 1.0;
    }
    out.nodes[i] = std::move(r);
  });

  out.excluded_columns = analysis.constant_columns();
  for (int k : out.excluded_columns)
    out.warnings.push_back("column " + std::to_string(k) + " has zero variance and was excluded from testing");
  for (const auto& r : out.nodes)
    if (!r.error.empty()) out.warnings.push_back("node " + std::to_string(r.node) + ": " + r.error);

  std::vector<double> node_p;
  for (const auto& r : out.nodes) node_p.push_back(r.node_pvalue);
  const auto decision = holm(node_p, config.alpha);
  for (int j = 0; j < p; ++j)
    if (decision.reject[j]) out.differential_nodes.push_back(j);
  out.network_reject = !out.differential_nodes.empty();
  out.differential_edges = combine_edges(out.nodes, config.edge_rule, edge_rule_level(config.edge_rule, config.alpha));
  return out;
}

const char* to_string(EstimationMode mode) { return mode == EstimationMode::naive ? "naive" : "split"; }
const char* to_string(TestKind kind) { return kind == TestKind::individual ? "individual" : "group"; }
const char* to_string(EdgeRule rule) { return rule == EdgeRule::or_rule ? "or" : "and"; }

}  // namespace dca
