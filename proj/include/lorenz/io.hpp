#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "lorenz/classifier.hpp"
#include "lorenz/map.hpp"
#include "lorenz/orbit.hpp"
#include "lorenz/params.hpp"
#include "lorenz/renormalization.hpp"

namespace lorenz::io {

using json = nlohmann::ordered_json;

// fixed shortest-roundtrip formatting, used everywhere a double reaches a file
std::string format_double(double x);

// map specification: {"c":..,"alpha":..,"beta":..,"v1":..,"v0":..} with
// optional tolerance overrides; throws ConfigError with the offending field
StandardLorenzMap map_from_json(const json& j);
StandardLorenzMap map_from_string(const std::string& text);
json map_to_json(const StandardLorenzMap& m);

json validation_to_json(const ValidationReport& rep);
json orbit_to_json(const Orbit& orb);
json cover_to_json(const IntervalCover& cover);
json decomposition_to_json(const ReturnMapDecomposition& d);
json tower_to_json(const RenormTower& t);
json report_to_json(const AttractorReport& rep);

std::string orbit_to_table(const Orbit& orb);
std::string cover_to_table(const IntervalCover& cover);
std::string decomposition_to_table(const ReturnMapDecomposition& d);
std::string tower_to_table(const RenormTower& t);

// analysis parameter block shared by CLI subcommands and sweeps
json params_to_json(const AnalysisParams& p);
AnalysisParams params_from_json(const json& j, AnalysisParams base = {});

// one parameter axis of a sweep grid
struct SweepAxis {
    double lo = 0.0, hi = 0.0;
    std::size_t steps = 1;
    double at(std::size_t i) const {
        return steps <= 1 ? lo : lo + (hi - lo) * double(i) / double(steps - 1);
    }
};

struct SweepSpec {
    SweepAxis c{0.5, 0.5, 1};
    SweepAxis alpha{2.0, 2.0, 1};
    SweepAxis beta{2.0, 2.0, 1};
    SweepAxis v1{1.0, 1.0, 1};
    SweepAxis v0{0.0, 0.0, 1};
    AnalysisParams params;
    std::size_t workers = 1;

    std::size_t size() const {
        return c.steps * alpha.steps * beta.steps * v1.steps * v0.steps;
    }
};

SweepSpec sweep_from_json(const json& j);

// grid sweep with a bounded worker pool; rows come back in grid order and the
// whole output is a pure function of (spec, seed)
std::string run_sweep(const SweepSpec& spec);
std::string sweep_csv_header();

} // namespace lorenz::io
