// End-to-end reports: structure, determinism, route selection, guards.

#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "lq/catalog.hpp"
#include "lq/pipeline.hpp"

using namespace lq;
using Json = nlohmann::ordered_json;

namespace {

int count_failed_entries(const Json& node) {
  int failed = 0;
  if (node.is_object()) {
    if (node.contains("pass") && node.at("pass").is_boolean() &&
        node.contains("name") && !node.at("pass").get<bool>())
      ++failed;
    for (const auto& [k, v] : node.items()) failed += count_failed_entries(v);
  } else if (node.is_array()) {
    for (const auto& v : node) failed += count_failed_entries(v);
  }
  return failed;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("full report on the f0 problem passes and is complete") {
  Problem p = get_problem("pg27_f0");
  RunOptions opt;
  RunResult r = run_pipeline(p, opt);
  CHECK(r.pass);
  Json report = Json::parse(r.report_json);
  CHECK(report.at("problem") == "pg27_f0");
  CHECK(report.at("pass") == true);
  for (const char* sec :
       {"symmetries", "commuting", "straightening", "first_integrals",
        "reduced_factors"}) {
    CAPTURE(sec);
    REQUIRE(report.at("steps").contains(sec));
    CHECK(report.at("steps").at(sec).at("pass") == true);
  }
  CHECK(report.contains("trajectories"));
  CHECK(count_failed_entries(report) == 0);
}

TEST_CASE("reports are byte-identical across runs") {
  Problem p = get_problem("pg27_f0");
  RunOptions opt;
  RunResult a = run_pipeline(p, opt);
  RunResult b = run_pipeline(p, opt);
  CHECK(a.report_json == b.report_json);
}

TEST_CASE("route selection prunes the other branch") {
  Problem p = get_problem("example9");
  RunOptions opt;
  opt.route = Route::Central;
  Json central = Json::parse(run_pipeline(p, opt).report_json);
  CHECK(central.at("steps").contains("first_integrals"));
  CHECK_FALSE(central.at("steps").contains("reduced_factors"));

  opt.route = Route::Lateral;
  Json lateral = Json::parse(run_pipeline(p, opt).report_json);
  CHECK_FALSE(lateral.at("steps").contains("first_integrals"));
  CHECK(lateral.at("steps").contains("reduced_factors"));
}

TEST_CASE("equal lambdas abort with the guard message, report intact") {
  Problem p = get_problem("pg27_f0");
  p.lambda2 = p.lambda1;
  RunOptions opt;
  RunResult r = run_pipeline(p, opt);
  CHECK_FALSE(r.pass);
  CHECK(r.report_json.find("equivalent symmetry pairs") != std::string::npos);
  // Partial report still parses and carries the earlier sections.
  Json report = Json::parse(r.report_json);
  CHECK(report.at("steps").contains("symmetries"));
}

TEST_CASE("an empty IC list verifies trivially") {
  Problem p = get_problem("pg27_f0");
  RunOptions opt;
  RunResult r = verify_trajectories(p, {}, opt, std::nullopt, "");
  CHECK(r.pass);
  Json report = Json::parse(r.report_json);
  CHECK(report.at("trajectories").empty());
}

TEST_CASE("an initial condition on the singular locus is rejected") {
  Problem p = get_problem("pg27_f0");
  RunOptions opt;
  RunResult r =
      verify_trajectories(p, {{0.0, 0.0, 1.0, 0.5}}, opt, std::nullopt, "");
  CHECK_FALSE(r.pass);
  CHECK(r.report_json.find("inadmissible") != std::string::npos);
}

TEST_CASE("trajectory verification with matched closed-form constants") {
  Problem p = get_problem("pg27_f0");
  RunOptions opt;
  // IC taken on the closed-form solution with C1 = 0.3, C2 = 0.7.
  IcRequest ic{-0.3, -0.594436283126708030, -1.529057704400574950, 0.2};
  RunResult r = verify_trajectories(p, {ic}, opt,
                                    std::make_pair(0.3, 0.7), "");
  CHECK(r.pass);
  Json report = Json::parse(r.report_json);
  const Json& checks = report.at("trajectories").at(0).at("checks");
  bool saw_closed = false, saw_endpoint = false;
  for (const auto& e : checks.at("entries")) {
    if (e.at("name") == "closed_form_residual") {
      saw_closed = true;
      CHECK(e.at("value").get<double>() <= 1e-9);
    }
    if (e.at("name") == "endpoint_u") {
      saw_endpoint = true;
      CHECK(e.at("value").get<double>() <= 1e-6);
    }
  }
  CHECK(saw_closed);
  CHECK(saw_endpoint);
}

TEST_CASE("csv export writes the dense trajectory table") {
  Problem p = get_problem("pg27_airy");
  RunOptions opt;
  RunResult r = verify_trajectories(p, {{0.0, 1.0, 0.0, 0.4}}, opt,
                                    std::nullopt, "./lq_test_");
  CHECK(r.pass);
  std::ifstream in("./lq_test_pg27_airy_ic0.csv");
  REQUIRE(in.good());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 130);  // header + 129 samples
  in.close();
  std::remove("./lq_test_pg27_airy_ic0.csv");
}

TEST_CASE("run report on the autonomous problem includes the factor data") {
  Problem p = get_problem("example9");
  RunOptions opt;
  RunResult r = run_pipeline(p, opt);
  CHECK(r.pass);
  for (const char* needle :
       {"mu1", "mu2", "div(M)", "reduction(w1)", "reduction(w2)",
        "drift(I1)", "drift(I2)"}) {
    CAPTURE(needle);
    CHECK(r.report_json.find(needle) != std::string::npos);
  }
}

}  // TEST_SUITE
