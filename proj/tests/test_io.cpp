#include <doctest.h>

#include <cmath>
#include <limits>
#include <json.hpp>
#include <string>
#include <variant>

#include "fracest/error.hpp"
#include "fracest/estimator.hpp"
#include "fracest/experiments.hpp"
#include "fracest/io.hpp"
#include "fracest/selftest.hpp"

using namespace fracest;

#ifndef FRACEST_FIXTURES
#define FRACEST_FIXTURES "tests/fixtures"
#endif

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_sample_text(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("fixture sample reproduces an independent evaluation") {
    const auto v = ingest_sample(std::string(FRACEST_FIXTURES) + "/uniform_200.csv");
    REQUIRE(std::holds_alternative<Sample>(v));
    const auto& s = std::get<Sample>(v);
    CHECK(s.size() == 200);
    const auto pe = confidence_interval(s, 0.5, FractionalOrder(0.25));
    CHECK(pe.value == doctest::Approx(0.33102123481022886).epsilon(1e-13));
    CHECK(pe.stderr == doctest::Approx(0.05500991744929320).epsilon(1e-12));
    CHECK(pe.ci_low == doctest::Approx(0.22320377781709271).epsilon(1e-9));
    CHECK(pe.ci_high == doctest::Approx(0.43883869180336500).epsilon(1e-9));
  }

  TEST_CASE("comments, blank lines and two columns") {
    const auto one = parse_sample_text("# header\n\n0.5\n  0.25 \n");
    REQUIRE(std::holds_alternative<Sample>(one));
    CHECK(std::get<Sample>(one).size() == 2);
    const auto two = parse_sample_text("0.1,0.2\n0.3, 0.4\n");
    REQUIRE(std::holds_alternative<Sample2D>(two));
    CHECK(std::get<Sample2D>(two).pairs()[1].second == 0.4);
  }

  TEST_CASE("errors name the offending line") {
    CHECK(error_of("0.1\n-0.2\n").find("line 2") != std::string::npos);
    CHECK(error_of("0.1\nabc\n").find("line 2") != std::string::npos);
    CHECK(error_of("0.1,0.2\n0.3\n").find("line 2") != std::string::npos);
    CHECK(error_of("# only comments\n").find("no data") != std::string::npos);
    CHECK(error_of("0.1\nnan\n").find("line 2") != std::string::npos);
  }

  TEST_CASE("missing files are I/O errors") {
    CHECK_THROWS_AS(ingest_sample("/nonexistent/sample.csv"), IoError);
  }

  TEST_CASE("key=value config") {
    const auto kv = parse_kv("a=1\n# c\n b = x y \n");
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "x y");
    CHECK_THROWS_AS(parse_kv("a=1\na=2\n"), InvalidInput);
    CHECK_THROWS_AS(parse_kv("novalue\n"), InvalidInput);
  }

  TEST_CASE("number formatting round trips") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  }

  TEST_CASE("report serialization") {
    McReport r;
    r.experiment = "demo";
    r.seed = 7;
    r.reps = 3;
    r.scalars["zeta"] = 0.5;
    r.scalars["bad"] = std::numeric_limits<double>::quiet_NaN();
    r.series["alpha"] = {0.1, 0.2};
    r.flags["pass"] = true;
    r.strings["law"] = "uniform";
    const std::string js = report_json(r);
    const auto j = nlohmann::json::parse(js);
    CHECK(j["experiment"] == "demo");
    CHECK(j["seed"] == 7);
    CHECK(j["bad"].is_null());
    CHECK(j["alpha"][1] == 0.2);
    CHECK(j["pass"] == true);
    // keys come out sorted
    CHECK(js.find("\"alpha\"") < js.find("\"bad\""));
    CHECK(js.find("\"pass\"") < js.find("\"zeta\""));
    const std::string csv = report_csv(r);
    CHECK(csv.rfind("key,value\n", 0) == 0);
    CHECK(csv.find("alpha[1],0.20000000000000001\n") != std::string::npos);
    CHECK(csv.find("pass,1\n") != std::string::npos);
  }

  TEST_CASE("FNV-1a digests") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xabcull) == "0000000000000abc");
  }

  TEST_CASE("experiment registry") {
    const auto names = experiment_names();
    CHECK(names.size() >= 14);
    CHECK_THROWS_AS(run_experiment("no-such-experiment", {}, 1, 1), InvalidInput);
    CHECK_THROWS_AS(run_experiment("kiefer", {{"bogus", "1"}}, 1, 1), InvalidInput);
    const auto a = run_experiment("kiefer", {{"n", "50"}, {"reps", "300"}}, 5, 1);
    const auto b = run_experiment("kiefer", {{"n", "50"}, {"reps", "300"}}, 5, 3);
    CHECK(report_json(a) == report_json(b));
  }

  TEST_CASE("selftest passes") {
    for (const auto& c : run_selftest()) {
      INFO(c.name << ": " << c.detail);
      CHECK(c.passed);
    }
  }
}
