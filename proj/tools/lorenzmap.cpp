#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lorenz/cherry.hpp"
#include "lorenz/classifier.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/io.hpp"
#include "lorenz/orbit.hpp"
#include "lorenz/periodic.hpp"
#include "lorenz/return_map.hpp"

namespace {

using lorenz::io::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lorenz::ConfigError("cannot open file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// --map accepts inline JSON or @file
lorenz::StandardLorenzMap load_map(const std::string& arg, const lorenz::AnalysisParams&) {
    const std::string text = !arg.empty() && arg.front() == '@' ? slurp(arg.substr(1)) : arg;
    return lorenz::io::map_from_string(text);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw lorenz::ConfigError("cannot open output file: " + out_path);
        out << text;
    }
}

lorenz::StandardLorenzMap require_valid(const lorenz::StandardLorenzMap& m) {
    const auto rep = lorenz::validate(m);
    if (!rep.valid) {
        std::string msg = "invalid map parameters:";
        for (const auto& v : rep.violations) msg += "\n  " + v.code + ": " + v.message;
        throw lorenz::ConfigError(msg);
    }
    return m;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contracting Lorenz map analysis"};
    app.require_subcommand(1);

    std::string map_arg, out_path, spec_path;
    lorenz::AnalysisParams params;
    bool tabular = false;

    auto add_common = [&](CLI::App* cmd, bool needs_map = true) {
        if (needs_map)
            cmd->add_option("--map", map_arg, "map spec as JSON or @file")->required();
        cmd->add_option("--out", out_path, "output path (default: stdout)");
        cmd->add_option("--seed", params.seed, "randomness seed");
        cmd->add_option("--max-period", params.max_period, "periodic search bound");
        cmd->add_option("--horizon", params.horizon, "iteration horizon");
        cmd->add_option("--grid", params.grid, "cover grid size");
        cmd->add_option("--depth", params.depth, "tower depth bound");
    };

    auto* c_validate = app.add_subcommand("validate", "check map parameters");
    add_common(c_validate);

    auto* c_orbit = app.add_subcommand("orbit", "forward orbit");
    double orbit_x = 0.5;
    std::string orbit_side = "left";
    std::size_t orbit_n = 100;
    add_common(c_orbit);
    c_orbit->add_option("--x", orbit_x, "starting point")->required();
    c_orbit->add_option("--side", orbit_side, "approach side at c (left|right)");
    c_orbit->add_option("--n", orbit_n, "number of iterates");
    c_orbit->add_flag("--tab", tabular, "tabular output");

    auto* c_periodic = app.add_subcommand("periodic", "periodic orbits by itinerary search");
    add_common(c_periodic);

    auto* c_return = app.add_subcommand("return-map", "first-return decomposition");
    double ret_lo = 0.0, ret_hi = 1.0;
    add_common(c_return);
    c_return->add_option("--lo", ret_lo, "interval lower end")->required();
    c_return->add_option("--hi", ret_hi, "interval upper end")->required();
    c_return->add_flag("--tab", tabular, "tabular output");

    auto* c_renorm = app.add_subcommand("renorm", "renormalization tower");
    add_common(c_renorm);
    c_renorm->add_flag("--tab", tabular, "tabular output");

    auto* c_rotation = app.add_subcommand("rotation", "rotation number of the return gap map");
    double rho = -1.0, conj_amp = 0.0;
    std::size_t rot_n = 100000;
    add_common(c_rotation, false);
    c_rotation->add_option("--map", map_arg, "map spec as JSON or @file");
    c_rotation->add_option("--rho", rho, "synthetic rigid rotation angle");
    c_rotation->add_option("--conjugacy", conj_amp, "conjugacy amplitude for --rho");
    c_rotation->add_option("--n", rot_n, "averaging length");

    auto* c_classify = app.add_subcommand("classify", "attractor classification");
    add_common(c_classify);

    auto* c_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
    c_sweep->add_option("--spec", spec_path, "sweep spec JSON file")->required();
    c_sweep->add_option("--out", out_path, "output CSV path");
    c_sweep->add_option("--seed", params.seed, "randomness seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_validate->parsed()) {
            const auto m = load_map(map_arg, params);
            const auto rep = lorenz::validate(m);
            emit(lorenz::io::validation_to_json(rep).dump(2), out_path);
            return rep.valid ? 0 : 1;
        }
        if (c_orbit->parsed()) {
            const auto m = require_valid(load_map(map_arg, params));
            const lorenz::Side side =
                orbit_side == "right" ? lorenz::Side::Right : lorenz::Side::Left;
            const auto orb = lorenz::iterate(m, {orbit_x, side}, orbit_n);
            emit(tabular ? lorenz::io::orbit_to_table(orb)
                         : lorenz::io::orbit_to_json(orb).dump(2),
                 out_path);
            return 0;
        }
        if (c_periodic->parsed()) {
            const auto m = require_valid(load_map(map_arg, params));
            const auto scan = lorenz::periodic_orbits(m, params.max_period);
            json out = json::array();
            for (const auto& o : scan.orbits)
                out.push_back({{"period", o.period},
                               {"itinerary", o.itinerary},
                               {"points", o.points},
                               {"multiplier", o.multiplier},
                               {"stability", lorenz::to_string(o.stability)}});
            emit(out.dump(2), out_path);
            return 0;
        }
        if (c_return->parsed()) {
            const auto m = require_valid(load_map(map_arg, params));
            const auto d = lorenz::first_return(m, lorenz::Interval(ret_lo, ret_hi),
                                                params.horizon);
            emit(tabular ? lorenz::io::decomposition_to_table(d)
                         : lorenz::io::decomposition_to_json(d).dump(2),
                 out_path);
            return 0;
        }
        if (c_renorm->parsed()) {
            const auto m = require_valid(load_map(map_arg, params));
            const auto tower = lorenz::build_tower(m, params.depth, params.max_period,
                                                   params.lambda_budget,
                                                   params.lambda_horizon, params.grid);
            emit(tabular ? lorenz::io::tower_to_table(tower)
                         : lorenz::io::tower_to_json(tower).dump(2),
                 out_path);
            return 0;
        }
        if (c_rotation->parsed()) {
            json out;
            if (rho >= 0.0) {
                const auto g = lorenz::make_rotation_gap_map(rho, conj_amp);
                const auto est = lorenz::rotation_number(g, rot_n);
                out["value"] = est.value;
                out["n"] = est.n;
                out["error_bound"] = est.error_bound;
                if (est.rational_lock)
                    out["rational_lock"] = {est.rational_lock->first,
                                            est.rational_lock->second};
            } else {
                if (map_arg.empty())
                    throw lorenz::ConfigError("rotation needs --map or --rho");
                const auto m = require_valid(load_map(map_arg, params));
                params.rotation_n = rot_n;
                const auto tower = lorenz::build_tower(m, params.depth, params.max_period,
                                                       params.lambda_budget,
                                                       params.lambda_horizon, params.grid);
                const auto verdict = lorenz::cherry_verdict(m, tower, params);
                out["cherry_evidence"] = verdict.cherry;
                if (!verdict.failed_clause.empty())
                    out["failed_clause"] = verdict.failed_clause;
                if (verdict.rotation) {
                    out["value"] = verdict.rotation->value;
                    out["n"] = verdict.rotation->n;
                    out["error_bound"] = verdict.rotation->error_bound;
                    if (verdict.rotation->rational_lock)
                        out["rational_lock"] = {verdict.rotation->rational_lock->first,
                                                verdict.rotation->rational_lock->second};
                }
            }
            emit(out.dump(2), out_path);
            return 0;
        }
        if (c_classify->parsed()) {
            const auto m = require_valid(load_map(map_arg, params));
            const auto rep = lorenz::classify(m, params);
            emit(lorenz::io::report_to_json(rep).dump(2), out_path);
            return 0;
        }
        if (c_sweep->parsed()) {
            json j = json::parse(slurp(spec_path), nullptr, false);
            if (j.is_discarded())
                throw lorenz::ConfigError("sweep spec is not valid JSON: " + spec_path);
            auto spec = lorenz::io::sweep_from_json(j);
            if (c_sweep->count("--seed")) spec.params.seed = params.seed;
            emit(lorenz::io::run_sweep(spec), out_path);
            return 0;
        }
    } catch (const lorenz::LinkedIntervalsDetected& e) {
        std::cerr << "internal invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const lorenz::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const lorenz::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
