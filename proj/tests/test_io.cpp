#include <doctest.h>

#include "lorenz/errors.hpp"
#include "lorenz/io.hpp"
#include "support.hpp"

using namespace lorenz;
using namespace testsupport;

TEST_CASE("map specs parse with tolerance overrides and diagnostics") {
    const auto m = io::map_from_string(
        R"({"c":0.5,"alpha":2,"beta":2,"v1":0.9,"v0":0.1,"eps_value":1e-8})");
    CHECK(m.c() == 0.5);
    CHECK(m.v1() == 0.9);
    CHECK(m.tol().eps_value == 1e-8);

    CHECK_THROWS_AS(io::map_from_string("{\"c\":0.5}"), ConfigError);
    CHECK_THROWS_AS(io::map_from_string("not json"), ConfigError);
    CHECK_THROWS_AS(io::map_from_string(R"({"c":"x","alpha":2,"beta":2,"v1":1,"v0":0})"),
                    ConfigError);
}

TEST_CASE("report serialization round trips the map spec") {
    const auto m = instance_C();
    const auto j = io::map_to_json(m);
    const auto m2 = io::map_from_json(j);
    CHECK(m2.c() == m.c());
    CHECK(m2.v1() == m.v1());
    CHECK(m2.v0() == m.v0());
}

TEST_CASE("tabular exports have one row per item") {
    const auto F = instance_F();
    const auto orb = iterate(F, {0.25, Side::Left}, 5);
    const auto table = io::orbit_to_table(orb);
    CHECK(std::count(table.begin(), table.end(), '\n') == 6);

    const auto d = first_return(F, Interval(0.0, 1.0), 100, 500, 1e-4);
    const auto dt = io::decomposition_to_table(d);
    CHECK(std::count(dt.begin(), dt.end(), '\n') == (long)d.branches.size());
}

TEST_CASE("sweep spec parsing and row count") {
    const auto spec = io::sweep_from_json(io::json::parse(R"({
        "c": 0.5, "alpha": 2.0, "beta": 2.0,
        "v1": {"lo": 0.1, "hi": 0.9, "steps": 3},
        "v0": {"lo": 0.0, "hi": 0.5, "steps": 2},
        "params": {"max_period": 4, "orbit_length": 2000, "transient": 200,
                    "samples": 4, "rotation_n": 500, "lambda_budget": 256,
                    "lambda_horizon": 100, "basin_iters": 500, "grid": 256},
        "workers": 2
    })"));
    CHECK(spec.size() == 6);
    const std::string csv = io::run_sweep(spec);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7); // header + 6 rows
    // rejected rows still appear exactly once
    CHECK(csv.find("rejected") != std::string::npos);
}

TEST_CASE("sweeps are byte-identical across runs and worker counts") {
    auto spec = io::sweep_from_json(io::json::parse(R"({
        "c": 0.5, "alpha": 2.0, "beta": 2.0,
        "v1": {"lo": 0.15, "hi": 0.95, "steps": 4},
        "v0": {"lo": 0.05, "hi": 0.1, "steps": 2},
        "params": {"max_period": 4, "orbit_length": 2000, "transient": 200,
                    "samples": 4, "rotation_n": 500, "lambda_budget": 256,
                    "lambda_horizon": 100, "basin_iters": 500, "grid": 256,
                    "seed": 20260810}
    })"));
    spec.workers = 1;
    const std::string a = io::run_sweep(spec);
    const std::string b = io::run_sweep(spec);
    CHECK(a == b);
    spec.workers = 4;
    const std::string c = io::run_sweep(spec);
    CHECK(a == c);
}
