#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dftlab/io/config.hpp"
#include "dftlab/verify/verify.hpp"

using namespace dftlab;

TEST_CASE("RunConfig JSON round trip") {
    RunConfig c;
    c.potential.a = 2.0;
    c.seed = 42;
    c.ps = {1.5, 3.0};
    c.multiplier = "block:-2";
    const auto j = c.to_json();
    const auto d = RunConfig::from_json(j);
    CHECK(d.to_json() == j);
    CHECK(d.potential.a.value() == 2.0);
    CHECK(d.seed == 42);
    d.validate();
    CHECK(d.make_multiplier()(0.3) == lp_block(lp_bump(), -2)(0.3));
}

TEST_CASE("validation errors") {
    RunConfig c;
    CHECK_THROWS_AS(c.validate(), ConfigError);  // aubin without a
    c.potential.a = 1.0;
    c.validate();
    auto bad = [&](auto mutate) {
        RunConfig b = c;
        mutate(b);
        CHECK_THROWS_AS(b.validate(), ConfigError);
    };
    bad([](RunConfig& b) { b.potential.name = "yukawa"; });
    bad([](RunConfig& b) { b.potential.a = -1.0; });
    bad([](RunConfig& b) { b.n = 4; });
    bad([](RunConfig& b) { b.j_min = 5; });
    bad([](RunConfig& b) { b.ps = {1.0}; });
    bad([](RunConfig& b) { b.multiplier = "sharp"; });
    bad([](RunConfig& b) { b.suite = "half"; });
    bad([](RunConfig& b) { b.grading = "lumpy"; });
    CHECK_THROWS_AS(RunConfig::from_json({{"colour", 1}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json({{"n", "many"}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.json"), ConfigError);
    CHECK_THROWS_AS(suite_criteria("none"), ConfigError);
}

TEST_CASE("partial configs keep defaults and reports embed the config") {
    const auto c = RunConfig::from_json({{"potential", {{"name", "free"}}}, {"r_max", 50.0}});
    CHECK(c.n == 8192);
    CHECK(c.r_max == 50.0);
    c.validate();
    CHECK(c.make_potential().is_zero());
    CHECK(c.make_spectral_grid().j_min == -6);

    const auto dir = std::filesystem::temp_directory_path() / "dftlab_config_test";
    write_json_report(dir / "r.json", {{"value", 1}}, c);
    std::ifstream in(dir / "r.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["config"] == c.to_json());
    CHECK(j["value"] == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("suites") {
    CHECK(suite_criteria("all").size() == 12);
    CHECK(suite_criteria("free-only") == std::vector<int>{1, 8});
}
