#include "lorenz/io.hpp"

#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include "lorenz/errors.hpp"

namespace lorenz::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

double need_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string("missing or non-numeric field '") + key + "'");
    return j[key].get<double>();
}

double opt_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ConfigError(std::string("non-numeric field '") + key + "'");
    return j[key].get<double>();
}

} // namespace

StandardLorenzMap map_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("map specification must be a JSON object");
    Tolerances tol;
    tol.eps_point = opt_number(j, "eps_point", tol.eps_point);
    tol.eps_critical = opt_number(j, "eps_critical", tol.eps_critical);
    tol.eps_value = opt_number(j, "eps_value", tol.eps_value);
    tol.max_bisect = static_cast<int>(opt_number(j, "max_bisect", tol.max_bisect));
    return StandardLorenzMap(need_number(j, "c"), need_number(j, "alpha"),
                             need_number(j, "beta"), need_number(j, "v1"),
                             need_number(j, "v0"), tol);
}

StandardLorenzMap map_from_string(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("map specification is not valid JSON");
    return map_from_json(j);
}

json map_to_json(const StandardLorenzMap& m) {
    return json{{"c", m.c()},   {"alpha", m.alpha()}, {"beta", m.beta()},
                {"v1", m.v1()}, {"v0", m.v0()}};
}

json validation_to_json(const ValidationReport& rep) {
    json out;
    out["valid"] = rep.valid;
    out["violations"] = json::array();
    for (const auto& v : rep.violations)
        out["violations"].push_back({{"code", v.code}, {"message", v.message}});
    if (rep.valid) {
        out["left_critical_value"] = rep.left_critical_value;
        out["right_critical_value"] = rep.right_critical_value;
        out["derivative_vanishes_at_critical"] = rep.derivative_vanishes_at_critical;
    }
    return out;
}

json orbit_to_json(const Orbit& orb) {
    json out;
    out["start"] = orb.start.x;
    out["side"] = to_string(orb.start.side);
    out["points"] = orb.points;
    if (orb.hit_critical_at) out["hit_critical_at"] = *orb.hit_critical_at;
    out["side_resolution"] = to_string(orb.side_resolution);
    return out;
}

json cover_to_json(const IntervalCover& cover) {
    json out;
    out["grid"] = cover.grid_size();
    out["cells"] = cover.cell_count();
    out["fraction"] = cover.fraction();
    out["intervals"] = json::array();
    for (const auto& iv : cover.intervals())
        out["intervals"].push_back({iv.lo, iv.hi});
    return out;
}

json decomposition_to_json(const ReturnMapDecomposition& d) {
    json out;
    out["J"] = {d.J.lo, d.J.hi};
    out["covered_fraction"] = d.covered_fraction;
    out["horizon"] = d.horizon;
    out["horizon_exhausted"] = d.horizon_exhausted;
    out["branches"] = json::array();
    for (const auto& br : d.branches)
        out["branches"].push_back({{"domain", {br.domain.lo, br.domain.hi}},
                                   {"return_time", br.return_time},
                                   {"image", {br.image.lo, br.image.hi}},
                                   {"touches_critical", br.touches_critical}});
    return out;
}

json tower_to_json(const RenormTower& t) {
    json out;
    out["depth"] = t.depth();
    out["depth_limit_hit"] = t.depth_limit_hit;
    out["levels"] = json::array();
    for (std::size_t i = 0; i < t.levels.size(); ++i) {
        const auto& lvl = t.levels[i];
        json rec;
        rec["level"] = i + 1;
        rec["a"] = lvl.record.J.lo;
        rec["b"] = lvl.record.J.hi;
        rec["period_a"] = lvl.f_period_a;
        rec["period_b"] = lvl.f_period_b;
        rec["view_period_a"] = lvl.record_local.period_a;
        rec["view_period_b"] = lvl.record_local.period_b;
        rec["trapping"] = json::array();
        for (const auto& iv : lvl.K_J) rec["trapping"].push_back({iv.lo, iv.hi});
        out["levels"].push_back(rec);
    }
    if (t.solenoid_cover) out["solenoid_cover"] = cover_to_json(*t.solenoid_cover);
    return out;
}

json params_to_json(const AnalysisParams& p) {
    json out;
    out["seed"] = p.seed;
    out["max_period"] = p.max_period;
    out["horizon"] = p.horizon;
    out["grid"] = p.grid;
    out["depth"] = p.depth;
    out["solenoid_depth_threshold"] = p.solenoid_depth_threshold;
    out["transient"] = p.transient;
    out["orbit_length"] = p.orbit_length;
    out["samples"] = p.samples;
    out["rotation_n"] = p.rotation_n;
    out["lambda_budget"] = p.lambda_budget;
    out["lambda_horizon"] = p.lambda_horizon;
    out["basin_grid"] = p.basin_grid;
    out["basin_iters"] = p.basin_iters;
    out["basin_radius"] = p.basin_radius;
    return out;
}

AnalysisParams params_from_json(const json& j, AnalysisParams base) {
    AnalysisParams p = base;
    if (!j.is_object()) return p;
    auto grab = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    grab("seed", p.seed);
    grab("max_period", p.max_period);
    grab("horizon", p.horizon);
    grab("grid", p.grid);
    grab("depth", p.depth);
    grab("solenoid_depth_threshold", p.solenoid_depth_threshold);
    grab("transient", p.transient);
    grab("orbit_length", p.orbit_length);
    grab("samples", p.samples);
    grab("rotation_n", p.rotation_n);
    grab("lambda_budget", p.lambda_budget);
    grab("lambda_horizon", p.lambda_horizon);
    grab("basin_grid", p.basin_grid);
    grab("basin_iters", p.basin_iters);
    grab("basin_radius", p.basin_radius);
    return p;
}

json report_to_json(const AttractorReport& rep) {
    json out;
    out["kind"] = to_string(rep.kind);
    if (!rep.detail.empty()) out["detail"] = rep.detail;
    out["params"] = params_to_json(rep.params);
    if (!rep.attractors.empty()) {
        out["attractors"] = json::array();
        for (const auto& o : rep.attractors)
            out["attractors"].push_back({{"period", o.period},
                                         {"itinerary", o.itinerary},
                                         {"points", o.points},
                                         {"multiplier", o.multiplier},
                                         {"stability", to_string(o.stability)}});
        out["basin_fraction"] = rep.basin_fraction;
    }
    out["tower_depth"] = rep.tower_depth;
    out["depth_limit_hit"] = rep.depth_limit_hit;
    out["lambda_cover"] = cover_to_json(rep.lambda_cover);
    out["critical_cover"] = cover_to_json(rep.critical_cover);
    if (rep.trapping) {
        json tr;
        tr["base"] = {rep.trapping->base.lo, rep.trapping->base.hi};
        tr["ell"] = rep.trapping->ell;
        tr["r"] = rep.trapping->r;
        tr["components"] = json::array();
        for (const auto& iv : rep.trapping->components)
            tr["components"].push_back({iv.lo, iv.hi});
        tr["invariance_samples"] = rep.trapping->invariance_samples;
        tr["invariance_escapes"] = rep.trapping->invariance_escapes;
        out["trapping"] = tr;
    }
    out["evidence"] = json::array();
    for (const auto& e : rep.evidence)
        out["evidence"].push_back({{"name", e.name}, {"value", e.value}, {"pass", e.pass}});
    out["periodic_density"] = {{"cells_total", rep.periodic_density.cells_total},
                               {"cells_with_point", rep.periodic_density.cells_with_point},
                               {"fraction", rep.periodic_density.fraction},
                               {"pass", rep.periodic_density.pass}};
    out["entropy_lower_bound"] = rep.entropy_lower_bound;
    out["lyapunov_witnesses"] = json::array();
    for (const auto& w : rep.lyapunov_witnesses)
        out["lyapunov_witnesses"].push_back(
            {{"point", w.point}, {"period", w.period}, {"exponent", w.exponent}});
    if (rep.rotation) {
        json rot;
        rot["value"] = rep.rotation->value;
        rot["n"] = rep.rotation->n;
        rot["error_bound"] = rep.rotation->error_bound;
        if (rep.rotation->rational_lock)
            rot["rational_lock"] = {rep.rotation->rational_lock->first,
                                    rep.rotation->rational_lock->second};
        out["rotation"] = rot;
    }
    return out;
}

std::string orbit_to_table(const Orbit& orb) {
    std::ostringstream os;
    for (std::size_t i = 0; i < orb.points.size(); ++i)
        os << i << '\t' << format_double(orb.points[i]) << '\n';
    return os.str();
}

std::string cover_to_table(const IntervalCover& cover) {
    std::ostringstream os;
    for (const auto& iv : cover.intervals())
        os << format_double(iv.lo) << '\t' << format_double(iv.hi) << '\n';
    return os.str();
}

std::string decomposition_to_table(const ReturnMapDecomposition& d) {
    std::ostringstream os;
    for (const auto& br : d.branches)
        os << format_double(br.domain.lo) << '\t' << format_double(br.domain.hi) << '\t'
           << br.return_time << '\t' << format_double(br.image.lo) << '\t'
           << format_double(br.image.hi) << '\n';
    return os.str();
}

std::string tower_to_table(const RenormTower& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.levels.size(); ++i) {
        const auto& lvl = t.levels[i];
        os << format_double(lvl.record.J.lo) << '\t' << format_double(lvl.record.J.hi)
           << '\t' << lvl.f_period_a << '\t' << lvl.f_period_b << '\t' << (i + 1) << '\n';
    }
    return os.str();
}

SweepSpec sweep_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("sweep specification must be a JSON object");
    SweepSpec spec;
    auto axis = [&](const char* key, SweepAxis fallback) {
        if (!j.contains(key)) return fallback;
        const json& a = j[key];
        if (a.is_number()) return SweepAxis{a.get<double>(), a.get<double>(), 1};
        if (!a.is_object() || !a.contains("lo") || !a.contains("hi") || !a.contains("steps"))
            throw ConfigError(std::string("axis '") + key +
                              "' needs lo/hi/steps or a single number");
        SweepAxis ax{a["lo"].get<double>(), a["hi"].get<double>(),
                     a["steps"].get<std::size_t>()};
        if (ax.steps == 0) throw ConfigError(std::string("axis '") + key + "' has zero steps");
        return ax;
    };
    spec.c = axis("c", spec.c);
    spec.alpha = axis("alpha", spec.alpha);
    spec.beta = axis("beta", spec.beta);
    spec.v1 = axis("v1", spec.v1);
    spec.v0 = axis("v0", spec.v0);
    if (j.contains("params")) spec.params = params_from_json(j["params"]);
    if (j.contains("workers")) spec.workers = j["workers"].get<std::size_t>();
    if (spec.workers == 0) spec.workers = 1;
    return spec;
}

std::string sweep_csv_header() {
    return "c,alpha,beta,v1,v0,valid,kind,depth,rotation,entropy_bound,lambda_cells,"
           "evidence_passes\n";
}

std::string run_sweep(const SweepSpec& spec) {
    const std::size_t total = spec.size();
    std::vector<std::string> rows(total);

    auto point = [&](std::size_t idx) {
        std::size_t rest = idx;
        const std::size_t i_c = rest % spec.c.steps;
        rest /= spec.c.steps;
        const std::size_t i_a = rest % spec.alpha.steps;
        rest /= spec.alpha.steps;
        const std::size_t i_b = rest % spec.beta.steps;
        rest /= spec.beta.steps;
        const std::size_t i_v1 = rest % spec.v1.steps;
        rest /= spec.v1.steps;
        const std::size_t i_v0 = rest;
        return StandardLorenzMap(spec.c.at(i_c), spec.alpha.at(i_a), spec.beta.at(i_b),
                                 spec.v1.at(i_v1), spec.v0.at(i_v0));
    };

    auto work = [&](std::size_t idx) {
        const StandardLorenzMap m = point(idx);
        std::ostringstream os;
        os << format_double(m.c()) << ',' << format_double(m.alpha()) << ','
           << format_double(m.beta()) << ',' << format_double(m.v1()) << ','
           << format_double(m.v0()) << ',';
        const ValidationReport val = validate(m);
        if (!val.valid) {
            os << "0,rejected,0,,," << "0,0\n";
            rows[idx] = os.str();
            return;
        }
        AnalysisParams p = spec.params;
        p.seed = spec.params.seed ^ (0x5347524944ULL + idx); // per-point stream
        const AttractorReport rep = classify(m, p);
        std::size_t passes = 0;
        for (const auto& e : rep.evidence)
            if (e.pass) ++passes;
        os << "1," << to_string(rep.kind) << ',' << rep.tower_depth << ',';
        if (rep.rotation) os << format_double(rep.rotation->value);
        os << ',' << format_double(rep.entropy_lower_bound) << ','
           << rep.lambda_cover.cell_count() << ',' << passes << '\n';
        rows[idx] = os.str();
    };

    if (spec.workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t nw = std::min(spec.workers, total);
        pool.reserve(nw);
        for (std::size_t w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
                    work(i);
            });
        for (auto& t : pool) t.join();
    }

    std::string out = sweep_csv_header();
    for (const auto& row : rows) out += row;
    return out;
}

} // namespace lorenz::io
