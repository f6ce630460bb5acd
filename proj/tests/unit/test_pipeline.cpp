#include <doctest.h>

#include <algorithm>

#include "dca/errors.hpp"
#include "dca/graphs.hpp"
#include "dca/pipeline.hpp"
#include "oracles.hpp"

using namespace dca;

namespace {

bool has_edge(const std::vector<Edge>& edges, int a, int b) {
  return std::find(edges.begin(), edges.end(), Edge::of(a, b)) != edges.end();
}

}  // namespace

TEST_CASE("identical datasets give the common support of either fit") {
  const DataMatrix x = sample_mvn(oracle::sigma_one(), 200, 1);
  DcaConfig cfg;
  for (int j = 0; j < 3; ++j) {
    const auto [ne, data] = estimate_common_neighborhood(x, x, j, cfg);
    CHECK(ne.supports[0] == ne.supports[1]);
    CHECK(ne.common == ne.supports[0]);
    CHECK(data.x1.values() == x.values());
  }
}

TEST_CASE("split mode is deterministic and uses complementary halves") {
  const DataMatrix x1 = sample_mvn(oracle::sigma_one(), 101, 2);
  const DataMatrix x2 = sample_mvn(oracle::sigma_two(), 100, 3);
  DcaConfig cfg;
  cfg.mode = EstimationMode::split;
  cfg.seed = 42;
  const DcaAnalysis a(x1, x2, cfg), b(x1, x2, cfg);
  CHECK(a.estimation_data(0).n() == 51);
  CHECK(a.test_data(0).n() == 50);
  CHECK(a.estimation_data(1).n() == 50);
  CHECK(a.test_data(0).values() == b.test_data(0).values());
  CHECK(a.estimate(0).common == b.estimate(0).common);
  // Every original row lands in exactly one half.
  Matrix both(101, 3);
  both << a.estimation_data(0).values(), a.test_data(0).values();
  for (int i = 0; i < 101; ++i) {
    int found = 0;
    for (int r = 0; r < 101; ++r) found += both.row(r) == x1.values().row(i) ? 1 : 0;
    CHECK(found == 1);
  }
}

TEST_CASE("node results respect the candidate invariants") {
  const DataMatrix x1 = sample_mvn(oracle::sigma_one(), 300, 5);
  const DataMatrix x2 = sample_mvn(oracle::sigma_two(), 300, 6);
  DcaConfig cfg;
  const auto res = dca_network(x1, x2, cfg);
  REQUIRE(res.nodes.size() == 3);
  for (const auto& r : res.nodes) {
    NodeSet expected;
    for (int k = 0; k < 3; ++k)
      if (k != r.node && !contains(r.common_neighborhood, k)) expected.push_back(k);
    CHECK(r.candidates == expected);
    CHECK(is_subset(r.differential_partners, r.candidates));
    CHECK(r.pvalues[0].size() == r.candidates.size());
  }
  CHECK(res.network_reject == !res.differential_nodes.empty());
}

TEST_CASE("a node whose common neighborhood covers everything is never rejected") {
  const DataMatrix x1 = sample_mvn(oracle::sigma_one(), 100, 7);
  const DataMatrix x2 = sample_mvn(oracle::sigma_two(), 100, 8);
  DcaConfig cfg;
  const auto r = test_node(x1, x2, 2, {0, 1}, cfg);
  CHECK(r.candidates.empty());
  CHECK_FALSE(r.reject);
  cfg.test = TestKind::group;
  CHECK_FALSE(test_node(x1, x2, 2, {0, 1}, cfg).reject);
}

TEST_CASE("toy pair at large n finds the differential edges") {
  int common_hits = 0, node_hits = 0, edge_hits = 0, spurious = 0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    const DataMatrix x1 = sample_mvn(oracle::sigma_one(), 10000, 100 + r);
    const DataMatrix x2 = sample_mvn(oracle::sigma_two(), 10000, 200 + r);
    DcaConfig cfg;
    cfg.seed = r;
    cfg.lambda.fixed = {0.05};
    const auto res = dca_network(x1, x2, cfg);
    common_hits += res.nodes[0].common_neighborhood == NodeSet{1} ? 1 : 0;
    node_hits += res.nodes[2].reject ? 1 : 0;
    edge_hits += has_edge(res.differential_edges, 0, 2) && has_edge(res.differential_edges, 1, 2) ? 1 : 0;
    spurious += has_edge(res.differential_edges, 0, 1) ? 1 : 0;
  }
  CHECK(common_hits >= 18);
  CHECK(node_hits >= 19);
  CHECK(edge_hits >= 18);
  CHECK(spurious <= 2);
}

TEST_CASE("cross-validated toy pair keeps coverage and never flags the shared edge") {
  for (int r = 0; r < 10; ++r) {
    const DataMatrix x1 = sample_mvn(oracle::sigma_one(), 10000, 100 + r);
    const DataMatrix x2 = sample_mvn(oracle::sigma_two(), 10000, 200 + r);
    DcaConfig cfg;
    cfg.seed = r;
    const auto res = dca_network(x1, x2, cfg);
    CHECK(contains(res.nodes[0].common_neighborhood, 1));
    CHECK(contains(res.nodes[1].common_neighborhood, 0));
    CHECK_FALSE(has_edge(res.differential_edges, 0, 1));
  }
}

TEST_CASE("AND-rule edges are a subset of OR-rule edges at matched levels") {
  const Graph g1 = gen_power_law_graph(15, 20, 5.0, 1);
  const Graph g2 = hub_knockout(g1, 6, 2, 2);
  const auto [m1, m2] = build_pair(g1, g2, 0.5, 0.1, 3);
  for (int r = 0; r < 5; ++r) {
    const DataMatrix x1 = sample_mvn(invert_spd(m1.omega), 150, 10 + r);
    const DataMatrix x2 = sample_mvn(invert_spd(m2.omega), 150, 20 + r);
    DcaConfig cfg;
    cfg.seed = r;
    const auto res = dca_network(x1, x2, cfg);
    for (double level : {0.05, 0.1}) {
      const auto orr = combine_edges(res.nodes, EdgeRule::or_rule, level);
      const auto andr = combine_edges(res.nodes, EdgeRule::and_rule, level);
      for (const Edge& e : andr) CHECK(std::find(orr.begin(), orr.end(), e) != orr.end());
    }
  }
}

TEST_CASE("pipeline output is reproducible") {
  const DataMatrix x1 = sample_mvn(oracle::sigma_one(), 120, 31);
  const DataMatrix x2 = sample_mvn(oracle::sigma_two(), 120, 32);
  DcaConfig cfg;
  cfg.mode = EstimationMode::split;
  cfg.test = TestKind::group;
  cfg.perms = 199;
  const auto a = dca_network(x1, x2, cfg, 1);
  const auto b = dca_network(x1, x2, cfg, 3);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].group_pvalues == b.nodes[i].group_pvalues);
    CHECK(a.nodes[i].common_neighborhood == b.nodes[i].common_neighborhood);
  }
  CHECK(a.differential_nodes == b.differential_nodes);
}

TEST_CASE("constant columns are excluded with a warning") {
  Matrix v = sample_mvn(SymMatrix::identity(4), 60, 3).values();
  v.col(3).setConstant(2.0);
  const DataMatrix x1(v);
  const DataMatrix x2 = sample_mvn(SymMatrix::identity(4), 60, 4);
  const auto res = dca_network(x1, x2, DcaConfig{});
  CHECK(res.excluded_columns == NodeSet{3});
  CHECK_FALSE(res.warnings.empty());
  for (const auto& r : res.nodes) CHECK_FALSE(contains(r.candidates, 3));
  CHECK_FALSE(res.nodes[3].reject);
}

TEST_CASE("configuration is validated") {
  DcaConfig cfg;
  cfg.test = TestKind::group;
  cfg.perms = 50;
  CHECK_THROWS_AS(cfg.validate(), Error);
  DcaConfig c2;
  c2.alpha = 1.5;
  CHECK_THROWS_AS(c2.validate(), Error);
  const DataMatrix small = sample_mvn(SymMatrix::identity(3), 10, 1);
  CHECK_THROWS_AS(dca_network(small, small, DcaConfig{}), Error);
  const DataMatrix a = sample_mvn(SymMatrix::identity(3), 40, 1);
  const DataMatrix b = sample_mvn(SymMatrix::identity(4), 40, 1);
  CHECK_THROWS_AS(dca_network(a, b, DcaConfig{}), Error);
}

TEST_CASE("equal models rarely give a network rejection") {
  int rejects = 0;
  const int reps = 60;
  for (int r = 0; r < reps; ++r) {
    const DataMatrix x1 = sample_mvn(oracle::sigma_one(), 200, 3000 + r);
    const DataMatrix x2 = sample_mvn(oracle::sigma_one(), 200, 4000 + r);
    DcaConfig cfg;
    cfg.seed = r;
    rejects += dca_network(x1, x2, cfg).network_reject ? 1 : 0;
  }
  CHECK(rejects / double(reps) <= 0.15);
}
