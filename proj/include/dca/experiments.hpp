#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dca/graphs.hpp"
#include "dca/pipeline.hpp"

namespace dca {

enum class Method { dca_naive_individual, dca_split_individual, dca_naive_group, dca_split_group, quant };

const char* to_string(Method method);
Method parse_method(const std::string& name);

struct SimConfig {
  int p = 50;
  int edge_count = 50;
  double power = 5.0;
  int hub_pool = 20;
  int knockout = 10;
  double magnitude = 0.5;
  double min_eig = 0.1;
  std::vector<int> n_values{100, 200, 400};
  int reps = 100;
  DcaConfig dca;
  std::vector<Method> methods{Method::dca_naive_individual, Method::dca_split_individual, Method::quant};
  int quant_perms = 99;
  std::uint64_t seed = 20160701;
  int threads = 0;  // 0: all hardware threads

  void validate() const;
  static SimConfig desk();
  static SimConfig full_scale();
};

/// Decisions z[r][j] and per-repetition ground truth.
using DecisionMatrix = std::vector<std::vector<bool>>;

struct MetricValue {
  long long numerator = 0;
  long long denominator = 0;
  /// numerator / denominator; empty when the denominator is zero.
  std::optional<double> value() const;
};

/// Average false positive rate over null nodes of every repetition.
MetricValue t1er_counts(const DecisionMatrix& z, const DecisionMatrix& null_mask);
double t1er(const DecisionMatrix& z, const DecisionMatrix& null_mask);
/// Rejection rate over nodes whose neighborhoods differ by at least t members.
MetricValue power_counts(const DecisionMatrix& z, const std::vector<std::vector<int>>& diff_sizes, int t);
double power_t(const DecisionMatrix& z, const std::vector<std::vector<int>>& diff_sizes, int t);

inline constexpr std::array<int, 4> kPowerThresholds{1, 3, 5, 10};

struct EdgeCounts {
  long long true_positive = 0;
  long long false_positive = 0;
  long long differential = 0;      // edges present in exactly one network
  long long non_differential = 0;  // all other node pairs
};

struct MethodSummary {
  Method method = Method::dca_naive_individual;
  int n = 0;
  MetricValue t1er;
  std::array<MetricValue, kPowerThresholds.size()> power;
  /// DCA only: null nodes whose estimated common neighborhood covers the
  /// true one, and the false positive rate among them.
  std::optional<MetricValue> coverage;
  std::optional<MetricValue> t1er_given_coverage;
  std::optional<EdgeCounts> edges;  // individual DCA only
};

struct Histogram {
  double lo = -1.0;
  double hi = 1.0;
  std::vector<long long> counts;
};

struct SimulationReport {
  SimConfig config;
  std::vector<MethodSummary> summaries;  // method-major, then n in config order
  std::vector<std::uint64_t> rep_seeds;
  std::vector<int> failed_reps;
  std::vector<std::string> failures;
  /// Nonzero off-diagonal partial correlations of network I, repetition 0.
  Histogram partial_correlations;
  double wall_time_seconds = 0.0;
};

struct SimulationGraphs {
  Graph g1;
  Graph g2;
  NodeSet knocked_out;
};

/// Graph pair of repetition r.
SimulationGraphs simulation_graphs(const SimConfig& cfg, int rep);

SimulationReport run_simulation(const SimConfig& cfg);

}  // namespace dca
