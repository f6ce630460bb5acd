#include "dca/serialize.hpp"

#include <charconv>
#include <set>

#include "dca/errors.hpp"

namespace dca {

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(ErrorCode::InvalidArgument, where + ": unknown field '" + key + "'");
  }
}

template <class T>
T field(const Json& j, const char* key, const std::string& where) {
  const Json& v = j.at(key);
  const std::string name = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(ErrorCode::InvalidArgument, name + ": expected a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(ErrorCode::InvalidArgument, name + ": expected a string");
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned()) fail(ErrorCode::InvalidArgument, name + ": expected a nonnegative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(ErrorCode::InvalidArgument, name + ": expected an integer");
    const auto raw = v.get<long long>();
    if (raw < std::numeric_limits<T>::min() || raw > std::numeric_limits<T>::max())
      fail(ErrorCode::InvalidArgument, name + ": out of range");
  } else {
    if (!v.is_number()) fail(ErrorCode::InvalidArgument, name + ": expected a number");
  }
  return v.get<T>();
}

Json metric(const MetricValue& m) {
  Json j;
  const auto v = m.value();
  j["value"] = v ? Json(*v) : Json(nullptr);
  j["numerator"] = m.numerator;
  j["denominator"] = m.denominator;
  return j;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string name_of(const std::vector<std::string>& names, int j) {
  return j < static_cast<int>(names.size()) ? names[j] : "V" + std::to_string(j + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const DcaConfig& cfg) {
  Json j;
  j["alpha"] = cfg.alpha;
  j["mode"] = to_string(cfg.mode);
  j["test"] = to_string(cfg.test);
  j["edge_rule"] = to_string(cfg.edge_rule);
  j["folds"] = cfg.lambda.folds;
  j["lambda"] = cfg.lambda.fixed;
  j["perms"] = cfg.perms;
  j["seed"] = cfg.seed;
  j["grid_size"] = cfg.grid_size;
  j["grid_ratio"] = cfg.grid_ratio;
  return j;
}

DcaConfig dca_config_from_json(const Json& j, DcaConfig base) {
  const std::string where = "dca";
  reject_unknown(j, {"alpha", "mode", "test", "edge_rule", "folds", "lambda", "perms", "seed", "grid_size", "grid_ratio"},
                 where);
  if (j.contains("alpha")) base.alpha = field<double>(j, "alpha", where);
  if (j.contains("mode")) {
    const auto s = field<std::string>(j, "mode", where);
    if (s == "naive") base.mode = EstimationMode::naive;
    else if (s == "split") base.mode = EstimationMode::split;
    else fail(ErrorCode::InvalidArgument, where + ".mode: expected naive or split");
  }
  if (j.contains("test")) {
    const auto s = field<std::string>(j, "test", where);
    if (s == "individual") base.test = TestKind::individual;
    else if (s == "group") base.test = TestKind::group;
    else fail(ErrorCode::InvalidArgument, where + ".test: expected individual or group");
  }
  if (j.contains("edge_rule")) {
    const auto s = field<std::string>(j, "edge_rule", where);
    if (s == "or") base.edge_rule = EdgeRule::or_rule;
    else if (s == "and") base.edge_rule = EdgeRule::and_rule;
    else fail(ErrorCode::InvalidArgument, where + ".edge_rule: expected or or and");
  }
  if (j.contains("folds")) base.lambda.folds = field<int>(j, "folds", where);
  if (j.contains("lambda")) {
    const Json& l = j.at("lambda");
    base.lambda.fixed.clear();
    if (l.is_number()) {
      base.lambda.fixed.push_back(l.get<double>());
    } else if (l.is_array()) {
      for (const Json& v : l) {
        if (!v.is_number()) fail(ErrorCode::InvalidArgument, where + ".lambda: expected numbers");
        base.lambda.fixed.push_back(v.get<double>());
      }
    } else if (!l.is_null()) {
      fail(ErrorCode::InvalidArgument, where + ".lambda: expected a number, an array or null");
    }
  }
  if (j.contains("perms")) base.perms = field<int>(j, "perms", where);
  if (j.contains("seed")) base.seed = field<std::uint64_t>(j, "seed", where);
  if (j.contains("grid_size")) base.grid_size = field<int>(j, "grid_size", where);
  if (j.contains("grid_ratio")) base.grid_ratio = field<double>(j, "grid_ratio", where);
  return base;
}

Json to_json(const SimConfig& cfg) {
  Json j;
  j["p"] = cfg.p;
  j["edge_count"] = cfg.edge_count;
  j["power"] = cfg.power;
  j["hub_pool"] = cfg.hub_pool;
  j["knockout"] = cfg.knockout;
  j["magnitude"] = cfg.magnitude;
  j["min_eig"] = cfg.min_eig;
  j["n_values"] = cfg.n_values;
  j["reps"] = cfg.reps;
  Json d = to_json(cfg.dca);
  d.erase("mode");
  d.erase("test");
  d.erase("seed");
  j["dca"] = d;
  Json methods = Json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["quant_perms"] = cfg.quant_perms;
  j["seed"] = cfg.seed;
  return j;
}

SimConfig sim_config_from_json(const Json& j, SimConfig base) {
  const std::string where = "config";
  reject_unknown(j, {"p", "edge_count", "power", "hub_pool", "knockout", "magnitude", "min_eig", "n_values", "reps",
                     "dca", "methods", "quant_perms", "seed", "threads"},
                 where);
  if (j.contains("p")) base.p = field<int>(j, "p", where);
  if (j.contains("edge_count")) base.edge_count = field<int>(j, "edge_count", where);
  if (j.contains("power")) base.power = field<double>(j, "power", where);
  if (j.contains("hub_pool")) base.hub_pool = field<int>(j, "hub_pool", where);
  if (j.contains("knockout")) base.knockout = field<int>(j, "knockout", where);
  if (j.contains("magnitude")) base.magnitude = field<double>(j, "magnitude", where);
  if (j.contains("min_eig")) base.min_eig = field<double>(j, "min_eig", where);
  if (j.contains("n_values")) {
    const Json& v = j.at("n_values");
    if (!v.is_array()) fail(ErrorCode::InvalidArgument, where + ".n_values: expected an array of integers");
    base.n_values.clear();
    for (const Json& e : v) {
      if (!e.is_number_integer()) fail(ErrorCode::InvalidArgument, where + ".n_values: expected an array of integers");
      base.n_values.push_back(e.get<int>());
    }
  }
  if (j.contains("reps")) base.reps = field<int>(j, "reps", where);
  if (j.contains("dca")) base.dca = dca_config_from_json(j.at("dca"), base.dca);
  if (j.contains("methods")) {
    const Json& v = j.at("methods");
    if (!v.is_array()) fail(ErrorCode::InvalidArgument, where + ".methods: expected an array of method names");
    base.methods.clear();
    std::set<std::string> seen;
    for (const Json& e : v) {
      if (!e.is_string()) fail(ErrorCode::InvalidArgument, where + ".methods: expected an array of method names");
      const auto name = e.get<std::string>();
      if (!seen.insert(name).second) fail(ErrorCode::InvalidArgument, where + ".methods: duplicate '" + name + "'");
      base.methods.push_back(parse_method(name));
    }
  }
  if (j.contains("quant_perms")) base.quant_perms = field<int>(j, "quant_perms", where);
  if (j.contains("seed")) base.seed = field<std::uint64_t>(j, "seed", where);
  if (j.contains("threads")) base.threads = field<int>(j, "threads", where);
  base.validate();
  return base;
}

Json to_json(const NetworkTestResult& result, const std::vector<std::string>& names) {
  Json nodes = Json::array();
  for (const NodeTestResult& r : result.nodes) {
    Json n;
    n["j"] = r.node;
    n["name"] = name_of(names, r.node);
    n["ne0"] = r.common_neighborhood;
    n["candidates"] = r.candidates;
    Json pv;
    if (r.kind == TestKind::individual) {
      pv["I"] = r.pvalues[0];
      pv["II"] = r.pvalues[1];
      Json adj;
      adj["I"] = r.adjusted[0];
      adj["II"] = r.adjusted[1];
      n["pvalues"] = pv;
      n["adjusted"] = adj;
    } else {
      pv["I"] = r.group_pvalues[0];
      pv["II"] = r.group_pvalues[1];
      n["pvalues"] = pv;
    }
    n["node_pvalue"] = r.node_pvalue;
    n["reject"] = r.reject;
    n["partners"] = r.differential_partners;
    n["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
    nodes.push_back(n);
  }
  Json edges = Json::array();
  for (const Edge& e : result.differential_edges) edges.push_back({e.a, e.b});
  Json j;
  j["nodes"] = nodes;
  j["differential_edges"] = edges;
  j["differential_nodes"] = result.differential_nodes;
  j["network_reject"] = result.network_reject;
  j["excluded_columns"] = result.excluded_columns;
  j["warnings"] = result.warnings;
  return j;
}

Json quant_to_json(const std::vector<QuantTestResult>& results, double alpha, const std::vector<std::string>& names) {
  std::vector<double> pvals;
  for (const auto& r : results) pvals.push_back(r.pvalue);
  const auto decision = holm(pvals, alpha);
  Json nodes = Json::array();
  NodeSet flagged;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    Json n;
    n["j"] = r.node;
    n["name"] = name_of(names, r.node);
    n["statistic"] = r.statistic;
    n["pvalue"] = r.pvalue;
    n["perms"] = r.perms;
    n["reject"] = static_cast<bool>(decision.reject[i]);
    if (decision.reject[i]) flagged.push_back(r.node);
    nodes.push_back(n);
  }
  Json j;
  j["alpha"] = alpha;
  j["nodes"] = nodes;
  j["rejected_nodes"] = flagged;
  return j;
}

Json to_json(const ConditionReport& report) {
  Json a2;
  a2["q"] = report.a2.q;
  a2["b_min"] = optional_number(report.a2.b_min);
  a2["terms"] = {report.a2.lambda_q, optional_number(report.a2.rate_term), optional_number(report.a2.ratio_term)};
  Json a3;
  a3["noiseless_support"] = report.a3.noiseless_support;
  a3["true_neighborhood"] = report.a3.true_neighborhood;
  a3["sup_off_support"] = report.a3.sup_off_support;
  a3["margin"] = report.a3.margin;
  a3["min_inverse_term"] = optional_number(report.a3.min_inverse_term);
  Json re;
  re["support"] = report.re_support ? Json(*report.re_support) : Json(nullptr);
  re["constant"] = optional_number(report.re_constant);
  re["note"] = report.re_note;
  Json j;
  j["node"] = report.node;
  j["lambda"] = report.lambda;
  j["a2"] = a2;
  j["a3"] = a3;
  j["restricted_eigenvalue"] = re;
  return j;
}

Json to_json(const SimulationReport& report) {
  Json results = Json::array();
  for (const MethodSummary& s : report.summaries) {
    Json r;
    r["method"] = to_string(s.method);
    r["n"] = s.n;
    r["t1er"] = metric(s.t1er);
    Json power;
    for (std::size_t t = 0; t < kPowerThresholds.size(); ++t) power[std::to_string(kPowerThresholds[t])] = metric(s.power[t]);
    r["power"] = power;
    r["coverage"] = s.coverage ? metric(*s.coverage) : Json(nullptr);
    r["t1er_given_coverage"] = s.t1er_given_coverage ? metric(*s.t1er_given_coverage) : Json(nullptr);
    if (s.edges) {
      Json e;
      e["true_positive"] = s.edges->true_positive;
      e["false_positive"] = s.edges->false_positive;
      e["differential"] = s.edges->differential;
      e["non_differential"] = s.edges->non_differential;
      r["edges"] = e;
    } else {
      r["edges"] = nullptr;
    }
    results.push_back(r);
  }
  Json hist;
  hist["lo"] = report.partial_correlations.lo;
  hist["hi"] = report.partial_correlations.hi;
  hist["counts"] = report.partial_correlations.counts;
  Json j;
  j["config"] = to_json(report.config);
  j["reps_completed"] = report.config.reps - static_cast<int>(report.failed_reps.size());
  j["failed_reps"] = report.failed_reps;
  j["failures"] = report.failures;
  j["rep_seeds"] = report.rep_seeds;
  j["results"] = results;
  j["partial_correlation_histogram"] = hist;
  return j;
}

std::string metrics_csv(const SimulationReport& report) {
  std::string out = "method,n,metric,value\n";
  auto row = [&](const MethodSummary& s, const std::string& name, std::optional<double> v) {
    out += std::string(to_string(s.method)) + "," + std::to_string(s.n) + "," + name + "," +
           (v ? format_double(*v) : std::string("NA")) + "\n";
  };
  for (const MethodSummary& s : report.summaries) {
    row(s, "t1er", s.t1er.value());
    for (std::size_t t = 0; t < kPowerThresholds.size(); ++t)
      row(s, "p" + std::to_string(kPowerThresholds[t]), s.power[t].value());
    if (s.coverage) row(s, "coverage", s.coverage->value());
    if (s.t1er_given_coverage) row(s, "t1er_given_coverage", s.t1er_given_coverage->value());
    if (s.edges) {
      const auto& e = *s.edges;
      row(s, "edge_tpr", e.differential ? std::optional<double>(double(e.true_positive) / e.differential) : std::nullopt);
      row(s, "edge_fpr",
          e.non_differential ? std::optional<double>(double(e.false_positive) / e.non_differential) : std::nullopt);
    }
  }
  return out;
}

}  // namespace dca
