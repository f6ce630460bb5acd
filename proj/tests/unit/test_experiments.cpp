#include <doctest.h>

#include "dca/errors.hpp"
#include "dca/experiments.hpp"
#include "dca/rng.hpp"
#include "dca/serialize.hpp"
#include "oracles.hpp"

using namespace dca;

namespace {

SimConfig tiny_config() {
  SimConfig cfg;
  cfg.p = 12;
  cfg.edge_count = 12;
  cfg.hub_pool = 4;
  cfg.knockout = 2;
  cfg.n_values = {60};
  cfg.reps = 3;
  cfg.methods = {Method::dca_naive_individual, Method::dca_split_group, Method::quant};
  cfg.dca.perms = 99;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("t1er arithmetic") {
  const DecisionMatrix z{{true, false, false, true}, {false, true}};
  const DecisionMatrix null{{true, true, true, false}, {true, true}};
  const auto m = t1er_counts(z, null);
  CHECK(m.numerator == 2);
  CHECK(m.denominator == 5);
  CHECK(t1er(z, null) == doctest::Approx(0.4));
  CHECK(t1er({{false, false}}, {{true, true}}) == 0.0);
  CHECK(t1er({{true, true}}, {{true, true}}) == 1.0);
  CHECK_THROWS_AS(t1er({{true}}, {{false}}), Error);
  CHECK_FALSE(t1er_counts({{true}}, {{false}}).value());
}

TEST_CASE("power arithmetic") {
  const DecisionMatrix z{{true, false, true}};
  const std::vector<std::vector<int>> diff{{0, 2, 5}};
  CHECK(power_t(z, diff, 1) == doctest::Approx(0.5));
  CHECK(power_t(z, diff, 3) == 1.0);
  CHECK(power_t({{true, true}}, {{1, 4}}, 1) == 1.0);
  CHECK_THROWS_AS(power_t(z, diff, 6), Error);
  CHECK_THROWS_AS(power_t(z, diff, 0), Error);
}

TEST_CASE("metrics agree with an independent recount") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    DecisionMatrix z(4), mask(4);
    for (int r = 0; r < 4; ++r)
      for (int j = 0; j < 7; ++j) {
        z[r].push_back(rng.coin());
        mask[r].push_back(rng.coin());
      }
    const auto m = t1er_counts(z, mask);
    if (m.denominator == 0) continue;
    CHECK(*m.value() == doctest::Approx(oracle::recount_rate(z, mask)));
  }
}

TEST_CASE("knockout zero gives an all-null design") {
  SimConfig cfg = tiny_config();
  cfg.knockout = 0;
  cfg.methods = {Method::dca_naive_individual};
  const auto report = run_simulation(cfg);
  REQUIRE(report.summaries.size() == 1);
  const auto& s = report.summaries[0];
  CHECK(s.t1er.denominator == static_cast<long long>(cfg.p) * cfg.reps);
  for (const auto& pw : s.power) CHECK_FALSE(pw.value());
  CHECK(*s.t1er.value() <= 0.3);
  const auto g = simulation_graphs(cfg, 0);
  CHECK(g.g1 == g.g2);
}

TEST_CASE("simulation is reproducible and well formed") {
  const SimConfig cfg = tiny_config();
  const auto a = run_simulation(cfg);
  SimConfig threaded = cfg;
  threaded.threads = 3;
  const auto b = run_simulation(threaded);
  Json ja = to_json(a), jb = to_json(b);
  ja["config"].erase("threads");
  jb["config"].erase("threads");
  CHECK(ja == jb);
  CHECK(a.summaries.size() == 3);
  CHECK(a.rep_seeds.size() == 3);
  for (const auto& s : a.summaries) {
    REQUIRE(s.t1er.value());
    CHECK(*s.t1er.value() >= 0.0);
    CHECK(*s.t1er.value() <= 1.0);
    CHECK(s.power[0].denominator >= s.power[1].denominator);
    CHECK(s.power[1].denominator >= s.power[2].denominator);
    CHECK(s.coverage.has_value() == (s.method != Method::quant));
  }
  long long total = 0;
  for (long long c : a.partial_correlations.counts) total += c;
  CHECK(total == cfg.edge_count);
}

TEST_CASE("simulation graphs follow the configuration") {
  const SimConfig cfg = tiny_config();
  const auto g = simulation_graphs(cfg, 1);
  CHECK(g.g1.edge_count() == 12u);
  CHECK(g.g2.edge_count() == 12u);
  CHECK(g.knocked_out.size() == 2u);
  CHECK(simulation_graphs(cfg, 1).g2 == g.g2);
  CHECK_FALSE(simulation_graphs(cfg, 2).g1 == g.g1);
}

TEST_CASE("method names round trip") {
  for (Method m : {Method::dca_naive_individual, Method::dca_split_individual, Method::dca_naive_group,
                   Method::dca_split_group, Method::quant})
    CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("bogus"), Error);
}

TEST_CASE("configuration validation") {
  SimConfig cfg = tiny_config();
  cfg.knockout = 5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = tiny_config();
  cfg.n_values = {};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = tiny_config();
  cfg.quant_perms = 10;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_NOTHROW(SimConfig::full_scale().validate());
  CHECK_NOTHROW(SimConfig::desk().validate());
}
