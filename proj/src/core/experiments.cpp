#include "dca/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>
#include <map>
#include <memory>
#include <set>

#include "dca/comparators.hpp"
#include "dca/errors.hpp"
#include "dca/parallel.hpp"
#include "dca/rng.hpp"

namespace dca {

namespace {

constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kKnockoutStream = 2;
constexpr std::uint64_t kWeightStream = 3;
constexpr std::uint64_t kDataStream = 4;
constexpr std::uint64_t kDcaStream = 5;
constexpr std::uint64_t kQuantStream = 6;
constexpr int kHistogramBins = 40;

struct Cell {
  std::vector<bool> z;
  std::vector<bool> covered;  // DCA only
  EdgeCounts edges;
};

struct RepOutcome {
  std::vector<bool> null_mask;
  std::vector<int> diff_sizes;
  std::vector<std::vector<Cell>> cells;  // [method][n]
  std::vector<double> partial_correlations;
};

bool is_dca(Method m) { return m != Method::quant; }
bool is_individual(Method m) { return m == Method::dca_naive_individual || m == Method::dca_split_individual; }
EstimationMode mode_of(Method m) {
  return (m == Method::dca_split_individual || m == Method::dca_split_group) ? EstimationMode::split
                                                                             : EstimationMode::naive;
}
TestKind kind_of(Method m) { return is_individual(m) ? TestKind::individual : TestKind::group; }

void check_shapes(const DecisionMatrix& z, std::size_t reps, const std::vector<std::size_t>& widths) {
  require(z.size() == reps, "decision matrix and mask disagree on repetitions");
  for (std::size_t r = 0; r < reps; ++r) require(z[r].size() == widths[r], "decision matrix and mask disagree on nodes");
}

EdgeCounts count_edges(const std::vector<Edge>& predicted, const std::set<Edge>& truth, int p) {
  EdgeCounts out;
  out.differential = static_cast<long long>(truth.size());
  out.non_differential = static_cast<long long>(p) * (p - 1) / 2 - out.differential;
  for (const Edge& e : predicted) (truth.count(e) ? out.true_positive : out.false_positive) += 1;
  return out;
}

RepOutcome run_rep(const SimConfig& cfg, int rep) {
  const SimulationGraphs graphs = simulation_graphs(cfg, rep);
  const std::uint64_t seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(rep)});
  const auto [m1, m2] = build_pair(graphs.g1, graphs.g2, cfg.magnitude, cfg.min_eig, derive_seed(seed, {kWeightStream}));
  const std::array<SymMatrix, 2> sigma{invert_spd(m1.omega), invert_spd(m2.omega)};
  const int p = cfg.p;

  RepOutcome out;
  const auto ne1 = graphs.g1.neighborhoods();
  const auto ne2 = graphs.g2.neighborhoods();
  std::vector<NodeSet> ne0(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    out.null_mask.push_back(ne1[j] == ne2[j]);
    out.diff_sizes.push_back(static_cast<int>(symmetric_difference(ne1[j], ne2[j]).size()));
    ne0[j] = set_intersection(ne1[j], ne2[j]);
  }
  std::set<Edge> truth;
  std::set_symmetric_difference(graphs.g1.edges().begin(), graphs.g1.edges().end(), graphs.g2.edges().begin(),
                                graphs.g2.edges().end(), std::inserter(truth, truth.end()));
  if (rep == 0) {
    const Matrix& om = m1.omega.matrix();
    for (const Edge& e : graphs.g1.edges())
      out.partial_correlations.push_back(-om(e.a, e.b) / std::sqrt(om(e.a, e.a) * om(e.b, e.b)));
  }

  out.cells.assign(cfg.methods.size(), std::vector<Cell>(cfg.n_values.size()));
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    const int n = cfg.n_values[ni];
    const auto nid = static_cast<std::uint64_t>(n);
    const DataMatrix x1 = sample_mvn(sigma[0], n, derive_seed(seed, {kDataStream, nid, 0}));
    const DataMatrix x2 = sample_mvn(sigma[1], n, derive_seed(seed, {kDataStream, nid, 1}));

    // One analysis per estimation mode, shared by both test kinds.
    std::map<EstimationMode, std::vector<CommonNeighborhood>> estimates;
    std::map<EstimationMode, std::unique_ptr<DcaAnalysis>> analyses;
    DcaConfig dcfg = cfg.dca;
    dcfg.seed = derive_seed(seed, {kDcaStream, nid});

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const Method method = cfg.methods[mi];
      Cell& cell = out.cells[mi][ni];
      cell.z.assign(static_cast<std::size_t>(p), false);
      if (method == Method::quant) {
        const auto res = quant_tests(x1, x2, cfg.quant_perms, derive_seed(seed, {kQuantStream, nid}));
        for (int j = 0; j < p; ++j) cell.z[j] = res[j].pvalue <= cfg.dca.alpha;
        continue;
      }
      const EstimationMode mode = mode_of(method);
      if (!analyses.count(mode)) {
        DcaConfig c = dcfg;
        c.mode = mode;
        auto analysis = std::make_unique<DcaAnalysis>(x1, x2, c);
        std::vector<CommonNeighborhood> est(static_cast<std::size_t>(p));
        for (int j = 0; j < p; ++j) est[j] = analysis->estimate(j);
        estimates[mode] = std::move(est);
        analyses[mode] = std::move(analysis);
      }
      const DcaAnalysis& analysis = *analyses[mode];
      const auto& est = estimates[mode];
      std::vector<NodeTestResult> nodes(static_cast<std::size_t>(p));
      cell.covered.assign(static_cast<std::size_t>(p), false);
      for (int j = 0; j < p; ++j) {
        cell.covered[j] = is_subset(ne0[j], est[j].common);
        try {
          nodes[j] = analysis.test(j, est[j].common, kind_of(method));
        } catch (const Error& e) {
          nodes[j].node = j;
          nodes[j].error = e.what();
        }
        cell.z[j] = nodes[j].reject;
      }
      if (is_individual(method))
        cell.edges = count_edges(combine_edges(nodes, cfg.dca.edge_rule, edge_rule_level(cfg.dca.edge_rule, cfg.dca.alpha)),
                                 truth, p);
    }
  }
  return out;
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::dca_naive_individual: return "dca_naive_individual";
    case Method::dca_split_individual: return "dca_split_individual";
    case Method::dca_naive_group: return "dca_naive_group";
    case Method::dca_split_group: return "dca_split_group";
    case Method::quant: return "quant";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::dca_naive_individual, Method::dca_split_individual, Method::dca_naive_group,
                   Method::dca_split_group, Method::quant})
    if (name == to_string(m)) return m;
  fail(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

void SimConfig::validate() const {
  require(p >= 2, "p must be at least 2");
  require(edge_count >= 0 && edge_count <= p * (p - 1) / 2, "edge_count must lie in [0, p(p-1)/2]");
  require(power > 1.0, "power must exceed 1");
  require(knockout >= 0 && knockout <= hub_pool && hub_pool <= p, "need 0 <= knockout <= hub_pool <= p");
  require(magnitude > 0.0, "magnitude must be positive");
  require(min_eig > 0.0, "min_eig must be positive");
  require(!n_values.empty(), "n_values must not be empty");
  for (int n : n_values) require(n >= 20, "every n must be at least 20");
  require(reps >= 1, "reps must be at least 1");
  require(!methods.empty(), "methods must not be empty");
  if (std::find(methods.begin(), methods.end(), Method::quant) != methods.end())
    require(quant_perms >= 99, "quant_perms must be at least 99");
  DcaConfig check = dca;
  const bool group = std::find(methods.begin(), methods.end(), Method::dca_naive_group) != methods.end() ||
                     std::find(methods.begin(), methods.end(), Method::dca_split_group) != methods.end();
  check.test = group ? TestKind::group : TestKind::individual;
  check.validate();
}

SimConfig SimConfig::desk() { return SimConfig{}; }

SimConfig SimConfig::full_scale() {
  SimConfig cfg;
  cfg.p = 200;
  cfg.edge_count = 398;
  cfg.hub_pool = 100;
  cfg.knockout = 20;
  cfg.n_values = {100, 200, 400, 800};
  cfg.reps = 100;
  return cfg;
}

std::optional<double> MetricValue::value() const {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

MetricValue t1er_counts(const DecisionMatrix& z, const DecisionMatrix& null_mask) {
  std::vector<std::size_t> widths;
  for (const auto& row : null_mask) widths.push_back(row.size());
  check_shapes(z, null_mask.size(), widths);
  MetricValue out;
  for (std::size_t r = 0; r < z.size(); ++r)
    for (std::size_t j = 0; j < z[r].size(); ++j)
      if (null_mask[r][j]) {
        ++out.denominator;
        out.numerator += z[r][j] ? 1 : 0;
      }
  return out;
}

double t1er(const DecisionMatrix& z, const DecisionMatrix& null_mask) {
  const auto v = t1er_counts(z, null_mask).value();
  if (!v) fail(ErrorCode::UndefinedMetric, "no null nodes: T1ER is undefined");
  return *v;
}

MetricValue power_counts(const DecisionMatrix& z, const std::vector<std::vector<int>>& diff_sizes, int t) {
  require(t >= 1, "threshold t must be at least 1");
  std::vector<std::size_t> widths;
  for (const auto& row : diff_sizes) widths.push_back(row.size());
  check_shapes(z, diff_sizes.size(), widths);
  MetricValue out;
  for (std::size_t r = 0; r < z.size(); ++r)
    for (std::size_t j = 0; j < z[r].size(); ++j)
      if (diff_sizes[r][j] >= t) {
        ++out.denominator;
        out.numerator += z[r][j] ? 1 : 0;
      }
  return out;
}

double power_t(const DecisionMatrix& z, const std::vector<std::vector<int>>& diff_sizes, int t) {
  const auto v = power_counts(z, diff_sizes, t).value();
  if (!v) fail(ErrorCode::UndefinedMetric, "no node differs by at least " + std::to_string(t) + ": power is undefined");
  return *v;
}

SimulationGraphs simulation_graphs(const SimConfig& cfg, int rep) {
  cfg.validate();
  require(rep >= 0 && rep < cfg.reps, "repetition index out of range");
  const std::uint64_t seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(rep)});
  Graph g1 = gen_power_law_graph(cfg.p, cfg.edge_count, cfg.power, derive_seed(seed, {kGraphStream}));
  KnockoutResult k = hub_knockout_detailed(g1, cfg.hub_pool, cfg.knockout, derive_seed(seed, {kKnockoutStream}));
  return {std::move(g1), std::move(k.graph), std::move(k.knocked_out)};
}

SimulationReport run_simulation(const SimConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SimulationReport report;
  report.config = cfg;
  for (int r = 0; r < cfg.reps; ++r) report.rep_seeds.push_back(derive_seed(cfg.seed, {static_cast<std::uint64_t>(r)}));

  std::vector<std::optional<RepOutcome>> outcomes(static_cast<std::size_t>(cfg.reps));
  std::vector<std::string> errors(static_cast<std::size_t>(cfg.reps));
  parallel_for(outcomes.size(), resolve_threads(cfg.threads), [&](std::size_t r) {
    try {
      outcomes[r] = run_rep(cfg, static_cast<int>(r));
    } catch (const Error& e) {
      errors[r] = e.what();
    }
  });
  for (int r = 0; r < cfg.reps; ++r)
    if (!outcomes[r]) {
      report.failed_reps.push_back(r);
      report.failures.push_back("repetition " + std::to_string(r) + ": " + errors[r]);
    }
  if (report.failed_reps.size() * 10 > static_cast<std::size_t>(cfg.reps))
    fail(ErrorCode::SimulationAborted, std::to_string(report.failed_reps.size()) + " of " + std::to_string(cfg.reps) +
                                           " repetitions failed; first: " + report.failures.front());

  DecisionMatrix null_mask;
  std::vector<std::vector<int>> diff_sizes;
  for (const auto& o : outcomes)
    if (o) {
      null_mask.push_back(o->null_mask);
      diff_sizes.push_back(o->diff_sizes);
    }

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
      const Method method = cfg.methods[mi];
      DecisionMatrix z;
      for (const auto& o : outcomes)
        if (o) z.push_back(o->cells[mi][ni].z);
      MethodSummary s;
      s.method = method;
      s.n = cfg.n_values[ni];
      s.t1er = t1er_counts(z, null_mask);
      for (std::size_t t = 0; t < kPowerThresholds.size(); ++t) s.power[t] = power_counts(z, diff_sizes, kPowerThresholds[t]);
      if (is_dca(method)) {
        MetricValue cov, cond;
        for (const auto& o : outcomes) {
          if (!o) continue;
          const Cell& c = o->cells[mi][ni];
          for (std::size_t j = 0; j < c.z.size(); ++j) {
            ++cov.denominator;
            if (!c.covered[j]) continue;
            ++cov.numerator;
            if (o->null_mask[j]) {
              ++cond.denominator;
              cond.numerator += c.z[j] ? 1 : 0;
            }
          }
        }
        s.coverage = cov;
        s.t1er_given_coverage = cond;
      }
      if (is_individual(method)) {
        EdgeCounts e;
        for (const auto& o : outcomes) {
          if (!o) continue;
          const EdgeCounts& c = o->cells[mi][ni].edges;
          e.true_positive += c.true_positive;
          e.false_positive += c.false_positive;
          e.differential += c.differential;
          e.non_differential += c.non_differential;
        }
        s.edges = e;
      }
      report.summaries.push_back(std::move(s));
    }

  report.partial_correlations.counts.assign(kHistogramBins, 0);
  if (outcomes[0])
    for (double v : outcomes[0]->partial_correlations) {
      const int bin = std::clamp(static_cast<int>(std::floor((v + 1.0) / 2.0 * kHistogramBins)), 0, kHistogramBins - 1);
      ++report.partial_correlations.counts[bin];
    }
  report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace dca
