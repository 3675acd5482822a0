#include "doctest.h"

#include "finsler/config.hpp"
#include "finsler/errors.hpp"
#include "finsler/runner.hpp"

#include <json.hpp>

#include <string>

using namespace finsler;

namespace {

std::string message_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kSmall = R"({
  "metric": {"family": "euclidean", "n": 2},
  "measure": {"kind": "lebesgue"},
  "base_points": [[0, 0]],
  "grids": {"directions": 8, "h": 0.05, "r_max": 1.0},
  "suite": [{"check": "riccati"}, {"check": "volume", "r": 0.5, "R": 1.0}, {"check": "iso_bound", "r": 1.0}]
})";

} // namespace

TEST_CASE("config parsing and validation")
{
    const RunConfig c = parse_config(kSmall);
    CHECK(c.metric.family() == Family::euclidean);
    CHECK(c.suite.size() == 3);
    CHECK(c.suite[1].r == 0.5);
    CHECK(c.suite[1].p == 2.0);
    CHECK(c.directions == 8);
    CHECK(c.hash.size() == 16);

    SUBCASE("hash ignores key order and whitespace")
    {
        const std::string a = R"({"metric": {"n": 2, "family": "euclidean"}, "measure": {"kind": "lebesgue"}})";
        const std::string b = R"({"measure":{"kind":"lebesgue"},"metric":{"family":"euclidean","n":2}})";
        CHECK(parse_config(a).hash == parse_config(b).hash);
        CHECK(parse_config(a).hash != c.hash);
    }
    SUBCASE("defaults")
    {
        const RunConfig d = parse_config(R"({"metric": {"family": "randers", "n": 2, "b0": [0.3, 0]},
                                             "measure": {"kind": "busemann_hausdorff"}})");
        CHECK(d.base_points.size() == 5);
        CHECK(d.suite.size() == default_suite(d).size());
        CHECK(d.h == 0.01);
        CHECK(d.metric.F(Vec::Zero(2), Vec::Unit(2, 0)) == doctest::Approx(1.3));
    }
    SUBCASE("errors name the field")
    {
        CHECK(message_of("{").find("ConfigError") == 0);
        CHECK(message_of(R"({"metric": {"family": "torus", "n": 2}, "measure": {"kind": "lebesgue"}})")
                  .find("metric.family") != std::string::npos);
        CHECK(message_of(R"({"metric": {"family": "euclidean", "n": 4}, "measure": {"kind": "lebesgue"}})")
                  .find("metric.n") != std::string::npos);
        CHECK(message_of(R"({"metric": {"family": "euclidean", "n": 2}, "measure": {"kind": "lebesgue"}, "extra": 1})")
                  .find("extra: unknown field") != std::string::npos);
        CHECK(message_of(R"({"metric": {"family": "euclidean", "n": 2}, "measure": {"kind": "lebesgue"},
                             "suite": [{"check": "volume", "p": 1.0, "r": 0.5, "R": 1.0}]})")
                  .find("suite[0].p") != std::string::npos);
        CHECK(message_of(R"({"metric": {"family": "euclidean", "n": 2}, "measure": {"kind": "lebesgue"},
                             "suite": [{"check": "volume", "r": 0.505, "R": 1.0}]})")
                  .find("suite[0].r") != std::string::npos);
        CHECK(message_of(R"({"metric": {"family": "euclidean", "n": 2}, "measure": {"kind": "lebesgue"},
                             "points": [{"x": [0, 0], "y": [1, 0]}, {"x": [0, 0], "y": [0, 0]}]})")
                  .find("points[1].y") != std::string::npos);
        CHECK(message_of(R"({"metric": {"family": "randers", "n": 2, "b0": [1.5, 0]}, "measure": {"kind": "lebesgue"}})")
                  .find("metric") != std::string::npos);
        CHECK(message_of(R"({"metric": {"family": "poincare", "n": 2}, "measure": {"kind": "lebesgue"},
                             "base_points": [[2, 0]]})")
                  .find("base_points[0]") != std::string::npos);
    }
    CHECK(nlohmann::json::parse(catalog_json()).at("checks").size() == check_kinds().size());
}

TEST_CASE("verify runs are deterministic and classified")
{
    RunConfig c = parse_config(kSmall);
    RunOptions o;
    o.write_files = false;
    o.jobs = 1;
    const VerifyOutcome a = run_verify(c, o);
    o.jobs = 3;
    const VerifyOutcome b = run_verify(c, o);
    CHECK(a.summary == b.summary);
    CHECK(a.exit_code == exit_pass);
    CHECK(nlohmann::json::parse(a.summary).at("reports").size() == a.reports.size());

    c.measure = MeasureSpec::gaussian(2);
    c.base_points = {Vec::Constant(2, 0.2)};
    CHECK(run_verify(c, o).exit_code == exit_unmet);

    std::vector<ReportEntry> reps(2);
    reps[0].report.status = Status::threshold_unmet;
    reps[1].report.status = Status::informational;
    CHECK(exit_code_for(reps) == exit_unmet);
    reps[1].report.status = Status::fail;
    CHECK(exit_code_for(reps) == exit_fail);
}

TEST_CASE("pointwise compute output")
{
    const RunConfig c = parse_config(R"({"metric": {"family": "funk", "n": 2}, "measure": {"kind": "busemann_hausdorff"},
                                         "points": [{"x": [0, 0], "y": [1, 0]}]})");
    const auto j = nlohmann::json::parse(run_compute(c));
    const auto& p = j.at("points").at(0);
    CHECK(p.at("F").get<double>() == doctest::Approx(1.0));
    // Constant S = (n + 1)/2 F for the Funk metric with its Busemann-Hausdorff measure.
    CHECK(p.at("S").get<double>() == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(p.at("ric").get<double>() == doctest::Approx(-0.25).epsilon(1e-6));
}
