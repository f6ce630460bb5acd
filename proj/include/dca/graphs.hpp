#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dca/numerics.hpp"

namespace dca {

/// Undirected edge, stored with a < b.
struct Edge {
  int a;
  int b;

  static Edge of(int j, int k) { return j < k ? Edge{j, k} : Edge{k, j}; }
  auto operator<=>(const Edge&) const = default;
};

class Graph {
 public:
  explicit Graph(int p);
  Graph(int p, const std::vector<Edge>& edges);

  int p() const { return p_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_edge(int j, int k) const;
  /// Returns false if the edge was already present.
  bool add_edge(int j, int k);
  bool remove_edge(int j, int k);

  int degree(int j) const;
  NodeSet neighborhood(int j) const;
  /// Neighborhood of every node, computed in one pass.
  std::vector<NodeSet> neighborhoods() const;

  bool operator==(const Graph&) const = default;

 private:
  void check_node(int j) const;

  int p_;
  std::set<Edge> edges_;
};

NodeSet neighborhood(const Graph& g, int j);

/// Random graph with exactly `edge_count` edges whose degree sequence follows a
/// discrete power law P(d) ~ d^-power on [1, p-1], rescaled to 2*edge_count
/// and realized by stub matching (up to 100 restarts).
Graph gen_power_law_graph(int p, int edge_count, double power, std::uint64_t seed);

struct KnockoutResult {
  Graph graph;
  NodeSet knocked_out;
};

/// Picks `knockout` nodes uniformly (without replacement) among the `hub_pool`
/// highest-degree nodes (ties by lower index), drops their edges, and adds
/// uniformly random new edges until the original edge count is restored.
KnockoutResult hub_knockout_detailed(const Graph& g, int hub_pool, int knockout, std::uint64_t seed);
Graph hub_knockout(const Graph& g, int hub_pool, int knockout, std::uint64_t seed);

struct PrecisionModel {
  Graph graph;
  SymMatrix omega;
};

/// Paired precision matrices: off-diagonals +-magnitude on the edges (shared
/// edges keep the network-I value), diagonal = row absolute sum + u with u set
/// so that the smallest eigenvalue equals `min_eig`.
std::pair<PrecisionModel, PrecisionModel> build_pair(const Graph& g1, const Graph& g2, double magnitude,
                                                     double min_eig, std::uint64_t seed);

/// Graph whose edges are the nonzero off-diagonal entries of `omega`.
Graph support_graph(const SymMatrix& omega, double zero_tol = 0.0);

/// "p=<count>" header followed by one "j,k" line per edge (0-indexed, sorted).
std::string to_edge_list(const Graph& g);
Graph parse_edge_list(std::string_view text);

}  // namespace dca
