#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dca/comparators.hpp"
#include "dca/conditions.hpp"
#include "dca/experiments.hpp"
#include "dca/pipeline.hpp"

namespace dca {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

Json to_json(const DcaConfig& cfg);
/// Reads the keys present in `j` over `base`. Unknown keys and wrong types
/// raise InvalidArgument naming the field.
DcaConfig dca_config_from_json(const Json& j, DcaConfig base = {});

Json to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const Json& j, SimConfig base = SimConfig::desk());

Json to_json(const NetworkTestResult& result, const std::vector<std::string>& names);
Json quant_to_json(const std::vector<QuantTestResult>& results, double alpha, const std::vector<std::string>& names);

struct ConditionReport {
  int node = 0;
  double lambda = 0.0;
  A2Quantities a2;
  A3Quantities a3;
  std::optional<NodeSet> re_support;
  std::optional<double> re_constant;
  std::string re_note;
};
Json to_json(const ConditionReport& report);

/// Report payload; wall time is left to the caller's manifest.
Json to_json(const SimulationReport& report);
/// Flat method,n,metric,value table; undefined metrics are written as NA.
std::string metrics_csv(const SimulationReport& report);

}  // namespace dca
