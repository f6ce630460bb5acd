#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <functional>

#include "dca/dataset.hpp"
#include "dca/errors.hpp"
#include "dca/serialize.hpp"

using namespace dca;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("csv with header, quotes and CRLF") {
  const std::string text = "\xEF\xBB\xBF" "a,\"b, c\",d\r\n1,2,3\r\n\r\n 4 ,+5,6e-1\r\n";
  const Dataset d = parse_csv(text, true, false);
  CHECK(d.variable_names == std::vector<std::string>{"a", "b, c", "d"});
  CHECK(d.matrix.n() == 2);
  CHECK(d.matrix(1, 0) == 4.0);
  CHECK(d.matrix(1, 1) == 5.0);
  CHECK(d.matrix(1, 2) == 0.6);
}

TEST_CASE("csv errors name the cell") {
  try {
    parse_csv("1,2\n3,NA\n", false, false);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonNumericCell);
    CHECK(std::string(e.what()).find("line 2, column 2") != std::string::npos);
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
  CHECK(code_of([] { parse_csv("1,2\n3\n", false, false); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_csv("1,2\n3,inf\n", false, false); }) == ErrorCode::NonNumericCell);
  CHECK(code_of([] { parse_csv("1,\"2\n", false, false); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_csv("1,2,5\n", true, false); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_csv("1\n2\n", false, false); }) == ErrorCode::ParseError);
  CHECK(code_of([] { ingest_csv("/nonexistent/file.csv", false, false); }) == ErrorCode::IoError);
}

TEST_CASE("standardization and zero-variance columns") {
  const Dataset d = parse_csv("1,5,2\n2,5,4\n3,5,9\n", false, true);
  CHECK(d.zero_variance == NodeSet{1});
  CHECK_FALSE(d.warnings.empty());
  CHECK(d.matrix.values().col(0).mean() == doctest::Approx(0.0));
  const Vector var = column_variances(d.matrix.values());
  CHECK(var(0) == doctest::Approx(1.0));
  CHECK(var(2) == doctest::Approx(1.0));
}

TEST_CASE("symmetric matrix files") {
  const std::string path = "dataset_test_sigma.csv";
  {
    std::ofstream out(path);
    out << "1.5,-0.5\n-0.5,1.5\n";
  }
  CHECK(read_sym_matrix_csv(path)(0, 1) == -0.5);
  {
    std::ofstream out(path);
    out << "1,2,3\n4,5,6\n";
  }
  CHECK(code_of([&] { read_sym_matrix_csv(path); }) == ErrorCode::InvalidArgument);
  std::remove(path.c_str());
}

TEST_CASE("shortest double formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("dca config json round trip and unknown keys") {
  DcaConfig cfg;
  cfg.alpha = 0.05;
  cfg.mode = EstimationMode::split;
  cfg.edge_rule = EdgeRule::and_rule;
  cfg.lambda.fixed = {0.2, 0.3};
  const DcaConfig back = dca_config_from_json(to_json(cfg));
  CHECK(back.alpha == 0.05);
  CHECK(back.mode == EstimationMode::split);
  CHECK(back.edge_rule == EdgeRule::and_rule);
  CHECK(back.lambda.fixed == std::vector<double>{0.2, 0.3});
  CHECK_THROWS_AS(dca_config_from_json(Json{{"alpah", 0.1}}), Error);
  CHECK_THROWS_AS(dca_config_from_json(Json{{"alpha", "high"}}), Error);
}
