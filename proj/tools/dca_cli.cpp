// Command-line front end. Every subcommand writes JSON with an embedded run
// manifest; `dca rerun` replays a manifest.
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dca/dca.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchemaVersion = "1.0";

enum Exit { kOk = 0, kInput = 2, kNumerical = 3 };

// Carries an exit code out of a command.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void input_failure(const std::string& message) { throw Failure{kInput, message}; }

void check(dca_status status) {
  if (status == DCA_OK) return;
  throw Failure{dca_status_is_input_error(status) ? kInput : kNumerical, dca_last_error()};
}

struct DatasetPtr {
  dca_dataset* p = nullptr;
  ~DatasetPtr() { dca_dataset_free(p); }
};

struct ResultPtr {
  dca_result* p = nullptr;
  ~ResultPtr() { dca_result_free(p); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_failure("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) input_failure("cannot write '" + path.string() + "'");
}

std::string sha256_file(const std::string& path) {
  const std::string data = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Failure{kNumerical, "sha256 failed"};
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    input_failure(what + " is not valid JSON: " + e.what());
  }
}

DatasetPtr load(const std::string& path, bool header, bool standardize) {
  DatasetPtr d;
  check(dca_dataset_read_csv(path.c_str(), header ? 1 : 0, standardize ? 1 : 0, &d.p));
  return d;
}

// Arguments of a run, as recorded in the manifest. Output locations are not
// part of it.
struct Run {
  std::string command;
  Json args;
  int threads = 0;
};

struct Outcome {
  Json payload;
  Json config;
  Json seeds;
  Json inputs = Json::array();
  std::string csv;  // simulate only
  double wall_time = -1.0;
};

Json input_record(const std::string& path) { return Json{{"path", path}, {"sha256", sha256_file(path)}}; }

template <class T>
T arg(const Json& args, const char* key) {
  if (!args.contains(key)) input_failure(std::string("manifest is missing argument '") + key + "'");
  return args.at(key).get<T>();
}

Outcome run_test(const Json& a, int threads) {
  Outcome o;
  const auto d1 = arg<std::string>(a, "data1"), d2 = arg<std::string>(a, "data2");
  const bool header = arg<bool>(a, "header"), standardize = arg<bool>(a, "standardize");
  DatasetPtr x1 = load(d1, header, standardize);
  DatasetPtr x2 = load(d2, header, standardize);
  if (dca_dataset_cols(x1.p) != dca_dataset_cols(x2.p))
    input_failure("datasets have different numbers of variables: " + std::to_string(dca_dataset_cols(x1.p)) + " in '" +
                  d1 + "', " + std::to_string(dca_dataset_cols(x2.p)) + " in '" + d2 + "'");
  o.config = {{"alpha", arg<double>(a, "alpha")},
              {"mode", arg<std::string>(a, "mode")},
              {"test", arg<std::string>(a, "test")},
              {"edge_rule", arg<std::string>(a, "edge_rule")},
              {"folds", arg<int>(a, "folds")},
              {"lambda", a.contains("lambda") ? a.at("lambda") : Json(nullptr)},
              {"perms", arg<int>(a, "perms")},
              {"seed", arg<std::uint64_t>(a, "seed")}};
  Json cfg = o.config;
  cfg["threads"] = threads;
  ResultPtr r;
  check(dca_test(x1.p, x2.p, cfg.dump().c_str(), &r.p));
  o.payload = Json::parse(dca_result_json(r.p));
  o.seeds = {{"seed", o.config["seed"]}};
  o.inputs.push_back(input_record(d1));
  o.inputs.push_back(input_record(d2));
  return o;
}

Outcome run_quant(const Json& a, int threads) {
  Outcome o;
  const auto d1 = arg<std::string>(a, "data1"), d2 = arg<std::string>(a, "data2");
  const int perms = arg<int>(a, "perms");
  if (perms < 99) input_failure("--perms must be at least 99 (got " + std::to_string(perms) + ")");
  DatasetPtr x1 = load(d1, arg<bool>(a, "header"), arg<bool>(a, "standardize"));
  DatasetPtr x2 = load(d2, arg<bool>(a, "header"), arg<bool>(a, "standardize"));
  if (dca_dataset_cols(x1.p) != dca_dataset_cols(x2.p)) input_failure("datasets have different numbers of variables");
  o.config = {{"perms", perms}, {"alpha", arg<double>(a, "alpha")}, {"seed", arg<std::uint64_t>(a, "seed")}};
  Json cfg = o.config;
  cfg["threads"] = threads;
  ResultPtr r;
  check(dca_quant(x1.p, x2.p, cfg.dump().c_str(), &r.p));
  o.payload = Json::parse(dca_result_json(r.p));
  o.seeds = {{"seed", o.config["seed"]}};
  o.inputs.push_back(input_record(d1));
  o.inputs.push_back(input_record(d2));
  return o;
}

Outcome run_check(const Json& a) {
  Outcome o;
  const auto path = arg<std::string>(a, "sigma");
  DatasetPtr s = load(path, false, false);
  o.config = {{"node", arg<int>(a, "node")}, {"lambda", arg<double>(a, "lambda")}};
  if (a.contains("n") && !a["n"].is_null()) o.config["n"] = a["n"];
  if (a.contains("re_support") && !a["re_support"].is_null()) o.config["re_support"] = a["re_support"];
  ResultPtr r;
  check(dca_check(s.p, o.config.dump().c_str(), &r.p));
  o.payload = Json::parse(dca_result_json(r.p));
  o.seeds = Json::object();
  o.inputs.push_back(input_record(path));
  return o;
}

Outcome run_simulate(const Json& a, int threads) {
  Outcome o;
  const bool full = arg<bool>(a, "full_scale");
  const Json& given = a.at("config");
  ResultPtr resolved;
  check(dca_default_sim_config(given.dump().c_str(), full ? 1 : 0, &resolved.p));
  o.config = Json::parse(dca_result_json(resolved.p));
  Json cfg = o.config;
  cfg["threads"] = threads;
  ResultPtr r;
  check(dca_simulate(cfg.dump().c_str(), full ? 1 : 0, &r.p));
  o.payload = Json::parse(dca_result_json(r.p));
  o.wall_time = o.payload.value("wall_time_seconds", -1.0);
  o.payload.erase("wall_time_seconds");
  o.seeds = {{"seed", o.config["seed"]}, {"rep_seeds", o.payload["rep_seeds"]}};
  o.csv = dca_result_csv(r.p);
  return o;
}

Outcome dispatch(const Run& run) {
  if (run.command == "test") return run_test(run.args, run.threads);
  if (run.command == "quant") return run_quant(run.args, run.threads);
  if (run.command == "check") return run_check(run.args);
  if (run.command == "simulate") return run_simulate(run.args, run.threads);
  input_failure("unknown command '" + run.command + "' in manifest");
}

// Runs a command and writes its document(s). For simulate `out` is a
// directory receiving report.json and metrics.csv.
void execute(const Run& run, const std::string& out, const std::vector<std::string>& argv) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = dispatch(run);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json manifest;
  manifest["command"] = run.command;
  manifest["argv"] = argv;
  manifest["args"] = run.args;
  manifest["config"] = o.config;
  manifest["seeds"] = o.seeds;
  manifest["library_version"] = dca_version();
  manifest["inputs"] = o.inputs;
  manifest["threads"] = run.threads;
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_now();
  manifest["wall_time_seconds"] = o.wall_time >= 0.0 ? o.wall_time : wall;

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = run.command;
  doc["manifest"] = manifest;
  for (auto& [key, value] : o.payload.items()) doc[key] = value;
  const std::string text = doc.dump(2) + "\n";

  if (run.command == "simulate") {
    write_file(fs::path(out) / "report.json", text);
    write_file(fs::path(out) / "metrics.csv", o.csv);
  } else if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
}

Run from_manifest(const std::string& path, int threads_override) {
  const Json doc = parse_json(read_file(path), "'" + path + "'");
  if (!doc.is_object() || !doc.contains("manifest")) input_failure("'" + path + "' has no manifest");
  const Json& m = doc.at("manifest");
  Run run{m.at("command").get<std::string>(), m.at("args"), m.value("threads", 0)};
  if (threads_override > 0) run.threads = threads_override;
  for (const Json& input : m.value("inputs", Json::array())) {
    const auto p = input.at("path").get<std::string>();
    if (sha256_file(p) != input.at("sha256").get<std::string>())
      input_failure("input '" + p + "' changed since the recorded run (checksum mismatch)");
  }
  return run;
}

int thread_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("DCA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential connectivity analysis of two Gaussian graphical models"};
  app.set_version_flag("--version", std::string(dca_version()));
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: DCA_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  // test
  auto* test = app.add_subcommand("test", "Test each node for differential connectivity");
  std::string data1, data2, out, mode = "naive", kind = "individual", edge_rule = "or";
  double alpha = 0.1;
  std::uint64_t seed = 1;
  int perms = 999, folds = 10;
  std::vector<double> lambda;
  bool standardize = false, header = false;
  for (auto* sub : {test}) {
    sub->add_option("--data1", data1, "CSV samples of network I")->required();
    sub->add_option("--data2", data2, "CSV samples of network II")->required();
    sub->add_option("--alpha", alpha, "Family-wise level")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--mode", mode, "Estimation mode")->check(CLI::IsMember({"naive", "split"}));
    sub->add_option("--test", kind, "Test kind")->check(CLI::IsMember({"individual", "group"}));
    sub->add_option("--edge-rule", edge_rule, "Edge aggregation")->check(CLI::IsMember({"or", "and"}));
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--perms", perms, "Permutations for group tests");
    sub->add_option("--folds", folds, "Cross-validation folds");
    sub->add_option("--lambda", lambda, "Fixed lasso penalty (one value or one per node) instead of cross-validation");
    sub->add_option("--out", out, "Output JSON file (default stdout)");
    sub->add_flag("--standardize", standardize, "Center and scale columns to unit variance");
    sub->add_flag("--header", header, "First CSV row holds variable names");
  }

  auto* quant = app.add_subcommand("quant", "Quantitative permutation test of every node");
  int qperms = 999;
  double qalpha = 0.1;
  std::uint64_t qseed = 1;
  std::string qdata1, qdata2, qout;
  bool qheader = false, qstandardize = false;
  quant->add_option("--data1", qdata1, "CSV samples of network I")->required();
  quant->add_option("--data2", qdata2, "CSV samples of network II")->required();
  quant->add_option("--perms", qperms, "Permutations (>= 99)");
  quant->add_option("--alpha", qalpha, "Level for the Holm-corrected flags")->check(CLI::Range(0.0, 1.0));
  quant->add_option("--seed", qseed, "Random seed");
  quant->add_option("--out", qout, "Output JSON file (default stdout)");
  quant->add_flag("--standardize", qstandardize, "Center and scale columns to unit variance");
  quant->add_flag("--header", qheader, "First CSV row holds variable names");

  auto* checkc = app.add_subcommand("check", "Condition diagnostics for a covariance matrix");
  std::string sigma, cout_path;
  int node = 0;
  double clambda = 0.0;
  int cn = 0;
  std::vector<int> re_support;
  checkc->add_option("--sigma", sigma, "CSV square covariance matrix, no header")->required();
  checkc->add_option("--node", node, "Node index (0-based)")->required();
  checkc->add_option("--lambda", clambda, "Lasso penalty")->required();
  checkc->add_option("--n", cn, "Sample size for the rate term")->check(CLI::PositiveNumber);
  checkc->add_option("--re-support", re_support, "Support for the restricted eigenvalue (comma separated)")
      ->delimiter(',');
  checkc->add_option("--out", cout_path, "Output JSON file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Simulation study of type-I error and power");
  std::string config_path, sout;
  bool full_scale = false;
  simulate->add_option("--config", config_path, "JSON simulation config (defaults to the desk configuration)");
  simulate->add_option("--out", sout, "Output directory")->required();
  simulate->add_flag("--full-scale", full_scale, "Start from the full-scale configuration (p=200, n up to 800)");

  auto* rerun = app.add_subcommand("rerun", "Re-execute a run from the manifest embedded in its output");
  std::string manifest_path, rout;
  rerun->add_option("--manifest", manifest_path, "JSON output of an earlier run")->required();
  rerun->add_option("--out", rout, "Output file (directory for simulate)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  const int nthreads = thread_count(threads);
  try {
    if (*test) {
      Json a{{"data1", data1}, {"data2", data2}, {"alpha", alpha}, {"mode", mode}, {"test", kind},
             {"edge_rule", edge_rule}, {"seed", seed}, {"perms", perms}, {"folds", folds},
             {"standardize", standardize}, {"header", header}};
      if (!lambda.empty()) a["lambda"] = lambda;
      execute({"test", a, nthreads}, out, args);
    } else if (*quant) {
      Json a{{"data1", qdata1}, {"data2", qdata2}, {"perms", qperms}, {"alpha", qalpha},
             {"seed", qseed}, {"standardize", qstandardize}, {"header", qheader}};
      execute({"quant", a, nthreads}, qout, args);
    } else if (*checkc) {
      Json a{{"sigma", sigma}, {"node", node}, {"lambda", clambda}};
      a["n"] = cn > 0 ? Json(cn) : Json(nullptr);
      a["re_support"] = re_support.empty() ? Json(nullptr) : Json(re_support);
      execute({"check", a, nthreads}, cout_path, args);
    } else if (*simulate) {
      Json config = Json::object();
      if (!config_path.empty()) config = parse_json(read_file(config_path), "config '" + config_path + "'");
      if (!config.is_object()) input_failure("config must be a JSON object");
      Json a{{"config", config}, {"full_scale", full_scale}};
      execute({"simulate", a, nthreads}, sout, args);
    } else if (*rerun) {
      execute(from_manifest(manifest_path, nthreads), rout, args);
    }
  } catch (const Failure& f) {
    std::cerr << "dca: " << f.message << "\n";
    return f.code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "dca: malformed manifest or config: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "dca: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
