#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dca/graphs.hpp"
#include "dca/inference.hpp"
#include "dca/lasso.hpp"
#include "dca/numerics.hpp"

namespace dca {

enum class EstimationMode { naive, split };
enum class TestKind { individual, group };
enum class EdgeRule { or_rule, and_rule };

struct LambdaPolicy {
  int folds = 10;
  /// Empty: cross-validate every node. One value: used for every node and
  /// both networks. p values: one per node.
  std::vector<double> fixed;

  bool cross_validated() const { return fixed.empty(); }
};

struct DcaConfig {
  double alpha = 0.1;
  EstimationMode mode = EstimationMode::naive;
  TestKind test = TestKind::individual;
  EdgeRule edge_rule = EdgeRule::or_rule;
  LambdaPolicy lambda;
  int perms = 999;
  std::uint64_t seed = 1;
  int grid_size = 50;
  double grid_ratio = 1e-2;
  LassoOptions lasso;
  /// Path fits inside cross-validation only rank penalties, so they stop earlier.
  LassoOptions cv_lasso{1e-6, 1e-5, 10000};

  void validate() const;
};

struct CommonNeighborhood {
  int node = 0;
  NodeSet common;  // supp(beta^I) intersect supp(beta^II)
  std::array<NodeSet, 2> supports;
  std::array<double, 2> lambdas{0.0, 0.0};
};

struct TestData {
  DataMatrix x1;
  DataMatrix x2;
};

struct NodeTestResult {
  int node = 0;
  TestKind kind = TestKind::individual;
  NodeSet common_neighborhood;
  NodeSet candidates;
  /// Individual mode: raw and Holm-adjusted p-values aligned with candidates.
  std::array<std::vector<double>, 2> pvalues;
  std::array<std::vector<double>, 2> adjusted;
  /// Group mode: one p-value per network.
  std::array<double, 2> group_pvalues{1.0, 1.0};
  /// Sidak combination 1 - (1 - min p)^2 of the two network-level p-values;
  /// node_pvalue <= alpha exactly when the node is rejected at alpha.
  double node_pvalue = 1.0;
  bool reject = false;
  NodeSet differential_partners;
  std::string error;

  /// Candidates rejected in either network when the node is tested at `level`.
  NodeSet partners_at(double level) const;
  PValueSet pvalue_set() const;
};

struct NetworkTestResult {
  std::vector<NodeTestResult> nodes;
  NodeSet differential_nodes;
  std::vector<Edge> differential_edges;
  bool network_reject = false;
  NodeSet excluded_columns;
  std::vector<std::string> warnings;
};

/// Data prepared once per dataset pair: the estimation/test split, centered
/// Gram matrices and cross-validation folds. Node-level calls are const and
/// safe to run concurrently.
class DcaAnalysis {
 public:
  DcaAnalysis(const DataMatrix& x1, const DataMatrix& x2, const DcaConfig& config);

  const DcaConfig& config() const { return config_; }
  int p() const { return p_; }
  const DataMatrix& test_data(int network) const { return test_[network]; }
  const DataMatrix& estimation_data(int network) const { return estimation_[network]; }
  /// Columns with zero variance in any estimation or test matrix.
  const NodeSet& constant_columns() const { return constant_; }

  CommonNeighborhood estimate(int j) const;
  NodeTestResult test(int j, const NodeSet& common, TestKind kind) const;

 private:
  double fixed_lambda(int j) const;

  DcaConfig config_;
  int p_;
  std::array<DataMatrix, 2> estimation_;
  std::array<DataMatrix, 2> test_;
  std::array<Matrix, 2> gram_;
  std::array<std::optional<CrossValidation>, 2> cv_;
  NodeSet constant_;
};

/// Estimation step for node j: lasso on the estimation portion of each
/// dataset; naive mode returns the full data for testing, split mode the
/// complementary halves.
std::pair<CommonNeighborhood, TestData> estimate_common_neighborhood(const DataMatrix& x1, const DataMatrix& x2,
                                                                      int j, const DcaConfig& config);

/// Testing step for node j given the estimated common neighborhood. Each
/// network's family is tested at sidak_level(alpha); `excluded` columns are
/// dropped from candidates and from the conditioning set.
NodeTestResult test_node(const DataMatrix& x1, const DataMatrix& x2, int j, const NodeSet& common,
                         const DcaConfig& config, const NodeSet& excluded = {});

/// Full pipeline over every node, node-level Holm at alpha and edge
/// aggregation (OR rule at alpha/2, AND rule at alpha).
NetworkTestResult dca_network(const DataMatrix& x1, const DataMatrix& x2, const DcaConfig& config, int threads = 1);

/// Differential edges from node results tested at `node_level`.
std::vector<Edge> combine_edges(const std::vector<NodeTestResult>& nodes, EdgeRule rule, double node_level);

/// Level used for node-wise tests under an edge rule.
double edge_rule_level(EdgeRule rule, double alpha);

const char* to_string(EstimationMode mode);
const char* to_string(TestKind kind);
const char* to_string(EdgeRule rule);

}  // namespace dca
