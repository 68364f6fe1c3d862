#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lvdiff/config.hpp"
#include "lvdiff/errors.hpp"
#include "lvdiff/expr.hpp"
#include "lvdiff/phase_diagram.hpp"
#include "lvdiff/scenarios.hpp"
#include "lvdiff/suites.hpp"

using namespace lvdiff;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lvdiff_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing") {
    const json j = json::parse(R"J({
        "grid": {"dim": 1, "points": 65, "extent": 2.0},
        "model": "competition",
        "params": {"d1": 0.5, "c1": 1.2},
        "rates": {"r1": "1+0.5*cos(pi*x)", "r2": "1"},
        "sweep": {"d1": {"min": 0.01, "max": 10, "count": 4, "log": true}},
        "tolerances": {"residual": 1e-9},
        "T": 100, "seed": 42, "output": "o"})J");
    const ExperimentConfig c = config_from_json(j);
    CHECK(c.grid.make() == Grid::line(2.0, 65));
    CHECK(c.model == ModelKind::competition);
    CHECK(c.param("c1") == 1.2);
    CHECK(c.param_or("b1", 3.0) == 3.0);
    CHECK_THROWS_AS(c.param("b1"), ConfigError);
    CHECK(c.tolerance_or("residual", 1.0) == 1e-9);
    CHECK(c.horizon == 100.0);
    CHECK(c.seed == 42u);
    const auto d1 = c.sweep_d1.values();
    REQUIRE(d1.size() == 4);
    CHECK(d1.front() == doctest::Approx(0.01));
    CHECK(d1[1] == doctest::Approx(0.1));
    CHECK(d1.back() == doctest::Approx(10.0));
    CHECK(c.rate("r2", c.grid.make()).values() == std::vector<double>(65, 1.0));
    // Echo parses back to the same config.
    CHECK(config_from_json(c.to_json()).to_json() == c.to_json());

    const json g2 = json::parse(R"J({"grid": {"dim": 2, "points": [9, 5], "extent": [1, 0.5]}})J");
    CHECK(config_from_json(g2).grid.make() == Grid::box(1.0, 0.5, 9, 5));
}

TEST_CASE("config errors") {
    auto bad = [](const char* s) { return config_from_json(json::parse(s)); };
    CHECK_THROWS_AS(bad(R"J({"model": "nope"})J"), ConfigError);
    CHECK_THROWS_AS(bad(R"J({"grid": {"dim": 3}})J"), ConfigError);
    CHECK_THROWS_AS(bad(R"J({"grid": {"points": 2}})J"), PreconditionError);
    CHECK_THROWS_AS(bad(R"J({"rates": {"r1": "1+*2"}})J"), ParseError);
    CHECK_THROWS_AS(bad(R"J({"rates": {"r1": {"file": "/nonexistent.csv"}}})J"), ConfigError);
    CHECK_THROWS_AS(bad(R"J({"params": {"d1": "x"}})J"), ConfigError);
    CHECK_THROWS_AS(bad(R"J({"T": -1})J"), ConfigError);
    CHECK_THROWS_AS(bad(R"J({"tolerances": {"residual": 0}})J"), ConfigError);
    CHECK_THROWS_AS(bad(R"J({"sweep": {"d1": {"min": 0}}})J"), ConfigError);
    CHECK_THROWS_AS(bad("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("growth-rate hypothesis") {
    const Grid g = Grid::line(1.0, 33);
    const ScalarField one = ScalarField::constant(g, 1.0);
    const ScalarField cosine = parse_expression("1+0.5*cos(pi*x)").sample(g);
    CHECK(validate_h1(cosine, one).ok);
    CHECK(validate_h1(one, cosine).ok);
    CHECK_FALSE(validate_h1(one, one).ok);
    CHECK_FALSE(validate_h1(parse_expression("x-0.5").sample(g), one).ok);
    CHECK_FALSE(validate_h1(ScalarField::constant(g, 0.0), cosine).ok);
    CHECK_THROWS_AS(require_h1(one, one), ConfigError);
    CHECK_FALSE(validate_h1(one, ScalarField::constant(Grid::line(1.0, 17), 1.0)).ok);
}

TEST_CASE("suites") {
    CHECK(suite_names().size() == 12);
    ExperimentConfig cfg;
    cfg.grid.points = {65, 1};
    CHECK_THROWS_AS(run_suite("lemma99", cfg), ConfigError);
    cfg.params["samples"] = 2;
    const SuiteReport r = run_suite("lemma21", cfg);
    CHECK(r.pass);
    CHECK_FALSE(r.checks.empty());
    CHECK(r.to_json()["pass"] == true);
    CHECK(r.summary().rfind("lemma21: PASS", 0) == 0);

    SuiteReport fake;
    fake.suite = "demo";
    fake.statement = "s";
    fake.pass = false;
    fake.checks.push_back({"good", true, "a", {}});
    fake.checks.push_back({"bad", false, "b holds", {}});
    CHECK(fake.summary() == "demo: FAIL (s)\n  PASS good\n  FAIL bad: violated \"b holds\"\n");
}

TEST_CASE("phase diagram output is deterministic") {
    const Grid g = Grid::line(1.0, 65);
    const RatePair rp = standard_pair(g);
    PhaseDiagramOptions o;
    o.d1_values = {0.01, 0.1, 1.0};
    o.d2_values = {0.1, 1.0};
    o.simulate = true;
    o.T = 50.0;
    o.seed = 7;
    const CompetitionParams base{1, 1, 1, 1.3, 1, rp.r1, rp.r2};

    o.threads = 1;
    const fs::path a = scratch("a");
    write_phase_diagram(phase_diagram(base, o), a.string(), o.seed);
    o.threads = 3;
    const fs::path b = scratch("b");
    write_phase_diagram(phase_diagram(base, o), b.string(), o.seed);
    for (const char* f : {"phase.csv", "regions.dat", "phi.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "phase.csv").rfind("# seed 7 ", 0) == 0);
}
