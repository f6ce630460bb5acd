#include "dca/dca.h"

#include <algorithm>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "dca/comparators.hpp"
#include "dca/conditions.hpp"
#include "dca/dataset.hpp"
#include "dca/errors.hpp"
#include "dca/experiments.hpp"
#include "dca/pipeline.hpp"
#include "dca/serialize.hpp"

struct dca_dataset {
  dca::Dataset data;
};

struct dca_result {
  std::string json;
  std::string csv;
};

namespace {

thread_local std::string last_error;

dca_status status_of(dca::ErrorCode code) {
  using dca::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::DomainError:
    case ErrorCode::DimensionTooLarge:
      return DCA_ERR_INVALID_ARGUMENT;
    case ErrorCode::ParseError:
    case ErrorCode::NonNumericCell:
      return DCA_ERR_PARSE;
    case ErrorCode::IoError: return DCA_ERR_IO;
    case ErrorCode::NotPositiveDefinite: return DCA_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::RankDeficient: return DCA_ERR_RANK_DEFICIENT;
    case ErrorCode::InsufficientSamples: return DCA_ERR_INSUFFICIENT_SAMPLES;
    case ErrorCode::NotConverged: return DCA_ERR_NOT_CONVERGED;
    case ErrorCode::InvalidFit:
    case ErrorCode::InfeasibleDegreeSequence:
    case ErrorCode::UndefinedMetric:
    case ErrorCode::SimulationAborted:
      return DCA_ERR_NUMERICAL;
  }
  return DCA_ERR_INTERNAL;
}

// Runs f, translating exceptions into a status and the thread's last error.
template <class F>
dca_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return DCA_OK;
  } catch (const dca::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("ParseError: invalid JSON: ") + e.what();
    return DCA_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DCA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DCA_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return DCA_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) dca::fail(dca::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

dca::Json parse_config(const char* text) {
  if (text == nullptr || *text == '\0') return dca::Json::object();
  dca::Json j = dca::Json::parse(text);
  if (!j.is_object()) dca::fail(dca::ErrorCode::InvalidArgument, "configuration must be a JSON object");
  return j;
}

int take_threads(dca::Json& j) {
  int threads = 0;
  if (j.contains("threads")) {
    if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 0)
      dca::fail(dca::ErrorCode::InvalidArgument, "threads must be a nonnegative integer");
    threads = j["threads"].get<int>();
    j.erase("threads");
  }
  return threads;
}

void emit(dca_result** out, dca::Json payload, std::string csv = {}) {
  auto r = std::make_unique<dca_result>();
  r->json = payload.dump(2);
  r->csv = std::move(csv);
  *out = r.release();
}

dca::SimConfig sim_config(const char* config_json, int full_scale) {
  const dca::Json j = parse_config(config_json);
  return dca::sim_config_from_json(j, full_scale ? dca::SimConfig::full_scale() : dca::SimConfig::desk());
}

}  // namespace

extern "C" {

const char* dca_version(void) { return DCA_VERSION_STRING; }

const char* dca_status_string(dca_status status) {
  switch (status) {
    case DCA_OK: return "ok";
    case DCA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DCA_ERR_PARSE: return "parse error";
    case DCA_ERR_IO: return "i/o error";
    case DCA_ERR_NOT_POSITIVE_DEFINITE: return "matrix not positive definite";
    case DCA_ERR_RANK_DEFICIENT: return "rank deficient design";
    case DCA_ERR_INSUFFICIENT_SAMPLES: return "insufficient samples";
    case DCA_ERR_NOT_CONVERGED: return "did not converge";
    case DCA_ERR_NUMERICAL: return "numerical failure";
    case DCA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dca_last_error(void) { return last_error.c_str(); }

int dca_status_is_input_error(dca_status status) {
  return status == DCA_ERR_INVALID_ARGUMENT || status == DCA_ERR_PARSE || status == DCA_ERR_IO;
}

dca_status dca_dataset_read_csv(const char* path, int has_header, int standardize, dca_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new dca_dataset{dca::ingest_csv(path, has_header != 0, standardize != 0)};
  });
}

dca_status dca_dataset_from_values(const double* row_major, size_t rows, size_t cols, dca_dataset** out) {
  return guarded([&] {
    need(row_major, "values");
    need(out, "out");
    dca::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i)
      for (size_t k = 0; k < cols; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row_major[i * cols + k];
    const dca::Vector var = dca::column_variances(m);
    dca::NodeSet zero;
    for (Eigen::Index k = 0; k < var.size(); ++k)
      if (!(var[k] > 0.0)) zero.push_back(static_cast<int>(k));
    *out = new dca_dataset{dca::Dataset{dca::DataMatrix(std::move(m)), {}, "<memory>", zero, {}}};
  });
}

size_t dca_dataset_rows(const dca_dataset* d) { return d ? static_cast<size_t>(d->data.matrix.n()) : 0; }
size_t dca_dataset_cols(const dca_dataset* d) { return d ? static_cast<size_t>(d->data.matrix.p()) : 0; }

const char* dca_dataset_name(const dca_dataset* d, size_t column) {
  if (d == nullptr || column >= d->data.variable_names.size()) return nullptr;
  return d->data.variable_names[column].c_str();
}

const int* dca_dataset_zero_variance(const dca_dataset* d, size_t* count) {
  if (count) *count = d ? d->data.zero_variance.size() : 0;
  return d && !d->data.zero_variance.empty() ? d->data.zero_variance.data() : nullptr;
}

void dca_dataset_free(dca_dataset* d) { delete d; }

const char* dca_result_json(const dca_result* r) { return r ? r->json.c_str() : ""; }
const char* dca_result_csv(const dca_result* r) { return r ? r->csv.c_str() : ""; }
void dca_result_free(dca_result* r) { delete r; }

dca_status dca_test(const dca_dataset* x1, const dca_dataset* x2, const char* config_json, dca_result** out) {
  return guarded([&] {
    need(x1, "x1");
    need(x2, "x2");
    need(out, "out");
    dca::Json j = parse_config(config_json);
    const int threads = take_threads(j);
    const dca::DcaConfig cfg = dca::dca_config_from_json(j);
    if (x1->data.matrix.p() != x2->data.matrix.p())
      dca::fail(dca::ErrorCode::InvalidArgument, "datasets have different numbers of variables (" +
                                                     std::to_string(x1->data.matrix.p()) + " and " +
                                                     std::to_string(x2->data.matrix.p()) + ")");
    const auto result = dca::dca_network(x1->data.matrix, x2->data.matrix, cfg, threads);
    emit(out, dca::to_json(result, x1->data.variable_names));
  });
}

dca_status dca_quant(const dca_dataset* x1, const dca_dataset* x2, const char* config_json, dca_result** out) {
  return guarded([&] {
    need(x1, "x1");
    need(x2, "x2");
    need(out, "out");
    dca::Json j = parse_config(config_json);
    const int threads = take_threads(j);
    int perms = 999;
    double alpha = 0.1;
    std::uint64_t seed = 1;
    for (const auto& [key, v] : j.items()) {
      if (key == "perms" && v.is_number_integer()) perms = v.get<int>();
      else if (key == "alpha" && v.is_number()) alpha = v.get<double>();
      else if (key == "seed" && v.is_number_unsigned()) seed = v.get<std::uint64_t>();
      else dca::fail(dca::ErrorCode::InvalidArgument, "quant: unknown or mistyped field '" + key + "'");
    }
    dca::require(perms >= 99, "perms must be at least 99");
    if (!(alpha > 0.0 && alpha < 1.0)) dca::fail(dca::ErrorCode::DomainError, "alpha must lie in (0, 1)");
    if (x1->data.matrix.p() != x2->data.matrix.p())
      dca::fail(dca::ErrorCode::InvalidArgument, "datasets have different numbers of variables");
    const auto res = dca::quant_tests(x1->data.matrix, x2->data.matrix, perms, seed, threads);
    emit(out, dca::quant_to_json(res, alpha, x1->data.variable_names));
  });
}

dca_status dca_check(const dca_dataset* sigma_data, const char* config_json, dca_result** out) {
  return guarded([&] {
    need(sigma_data, "sigma");
    need(out, "out");
    dca::Json j = parse_config(config_json);
    take_threads(j);
    std::optional<int> node;
    std::optional<double> lambda;
    std::optional<int> n;
    std::optional<dca::NodeSet> support;
    double c = 3.0;
    for (const auto& [key, v] : j.items()) {
      if (key == "node" && v.is_number_integer()) node = v.get<int>();
      else if (key == "lambda" && v.is_number()) lambda = v.get<double>();
      else if (key == "n" && v.is_number_integer()) n = v.get<int>();
      else if (key == "c" && v.is_number()) c = v.get<double>();
      else if (key == "re_support" && v.is_array()) support = dca::make_node_set(v.get<std::vector<int>>());
      else if (key == "re_support" && v.is_null()) support.reset();
      else dca::fail(dca::ErrorCode::InvalidArgument, "check: unknown or mistyped field '" + key + "'");
    }
    dca::require(node.has_value(), "check: node is required");
    dca::require(lambda.has_value(), "check: lambda is required");
    const dca::Matrix& m = sigma_data->data.matrix.values();
    dca::require(m.rows() == m.cols(), "sigma must be square, got " + std::to_string(m.rows()) + "x" +
                                           std::to_string(m.cols()));
    const dca::SymMatrix sigma(m);
    try {
      dca::cholesky(sigma);
    } catch (const dca::Error&) {
      dca::fail(dca::ErrorCode::InvalidArgument, "sigma is not positive definite");
    }
    dca::require(*node >= 0 && *node < sigma.dim(), "check: node out of range");

    dca::ConditionReport report;
    report.node = *node;
    report.lambda = *lambda;
    report.a2 = dca::a2_quantities(dca::invert_spd(sigma), *node, *lambda, n);
    report.a3 = dca::a3_quantities(sigma, *node, *lambda);
    // Default: the regression design of the node with its true neighborhood.
    dca::Matrix design = m;
    dca::NodeSet re_support;
    if (support) {
      re_support = *support;
    } else {
      std::vector<int> keep;
      for (int k = 0; k < sigma.dim(); ++k)
        if (k != *node) keep.push_back(k);
      design.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
      for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = 0; b < keep.size(); ++b)
          design(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(keep[a], keep[b]);
      for (int k : report.a3.true_neighborhood)
        re_support.push_back(static_cast<int>(std::find(keep.begin(), keep.end(), k) - keep.begin()));
    }
    report.re_support = support ? *support : report.a3.true_neighborhood;
    if (re_support.empty()) {
      report.re_note = "not computed: empty support";
    } else if (design.rows() > dca::kRestrictedEigenvalueMaxDim) {
      report.re_note = "not computed: dimension above " + std::to_string(dca::kRestrictedEigenvalueMaxDim);
    } else {
      report.re_constant = dca::restricted_eigenvalue(dca::SymMatrix(design), re_support, c);
      report.re_note = support ? "full matrix, given support" : "covariance of the other nodes, true neighborhood";
    }
    emit(out, dca::to_json(report));
  });
}

dca_status dca_simulate(const char* config_json, int full_scale, dca_result** out) {
  return guarded([&] {
    need(out, "out");
    const dca::SimulationReport report = dca::run_simulation(sim_config(config_json, full_scale));
    dca::Json j = dca::to_json(report);
    j["wall_time_seconds"] = report.wall_time_seconds;
    emit(out, std::move(j), dca::metrics_csv(report));
  });
}

dca_status dca_default_sim_config(const char* config_json, int full_scale, dca_result** out) {
  return guarded([&] {
    need(out, "out");
    emit(out, dca::to_json(sim_config(config_json, full_scale)));
  });
}

dca_status dca_simulation_graphs(const char* config_json, int full_scale, int rep, dca_result** out) {
  return guarded([&] {
    need(out, "out");
    const auto graphs = dca::simulation_graphs(sim_config(config_json, full_scale), rep);
    dca::Json j;
    j["rep"] = rep;
    j["g1"] = dca::to_edge_list(graphs.g1);
    j["g2"] = dca::to_edge_list(graphs.g2);
    j["knocked_out"] = graphs.knocked_out;
    emit(out, std::move(j));
  });
}

}  // extern "C"
