#include "lorenz/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "lorenz/errors.hpp"
#include "lorenz/orbit.hpp"
#include "lorenz/rng.hpp"

namespace lorenz {

const char* to_string(AttractorKind k) {
    switch (k) {
        case AttractorKind::PeriodicAttractors: return "periodic-attractors";
        case AttractorKind::SolenoidEvidence: return "solenoid-evidence";
        case AttractorKind::CherryEvidence: return "cherry-evidence";
        case AttractorKind::ChaoticCycleOfIntervals: return "chaotic-cycle-of-intervals";
        case AttractorKind::CantorWanderingEvidence: return "cantor-wandering-evidence";
        case AttractorKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

TrappingRegion trapping_region_for_base(const StandardLorenzMap& map, Interval base,
                                        const AnalysisParams& params);

} // namespace

TrappingRegion trapping_region(const StandardLorenzMap& map, const AnalysisParams& params) {
    // base: the smallest detected renormalization interval, else (0,1)
    RenormTower tower = build_tower(map, params.depth, params.max_period,
                                    params.lambda_budget, params.lambda_horizon, params.grid);
    const Interval base =
        tower.levels.empty() ? Interval(0.0, 1.0) : tower.levels.back().record.J;
    return trapping_region_for_base(map, base, params);
}

namespace {

TrappingRegion trapping_region_for_base(const StandardLorenzMap& map, Interval base,
                                        const AnalysisParams& params) {
    TrappingRegion U;
    const double c = map.c();
    U.base = base;

    // minimal l, r with f^l((a,c)) and f^r((c,b)) inside (a,b), by forward
    // interval propagation with straddle splitting
    std::vector<std::vector<Interval>> trail_left, trail_right;
    auto propagate = [&](Side s, std::vector<std::vector<Interval>>& trail) -> std::size_t {
        std::vector<Interval> cur{s == Side::Left ? Interval(U.base.lo, c)
                                                  : Interval(c, U.base.hi)};
        for (std::size_t j = 1; j <= params.horizon; ++j) {
            cur = interval_set_image(map, cur, map.tol().eps_point);
            bool inside = true;
            for (const auto& iv : cur)
                inside = inside && iv.lo >= U.base.lo - map.tol().eps_value &&
                         iv.hi <= U.base.hi + map.tol().eps_value;
            if (inside) return j;
            trail.push_back(cur);
        }
        throw NoReturnWithinHorizon("half-interval image never re-enters the base");
    };
    U.ell = propagate(Side::Left, trail_left);
    U.r = propagate(Side::Right, trail_right);

    std::vector<Interval> comps{U.base};
    for (const auto& step : trail_left)
        for (const auto& iv : step) comps.push_back(iv);
    for (const auto& step : trail_right)
        for (const auto& iv : step) comps.push_back(iv);
    // components meeting only at periodic endpoints stay separate
    U.components = merge_overlapping(std::move(comps), -map.tol().eps_point);

    // forward-invariance sampling
    Rng rng(params.seed ^ 0x7261707065725fULL);
    const double total = U.total_length();
    U.invariance_samples = 10000;
    U.invariance_escapes = 0;
    for (std::size_t i = 0; i < U.invariance_samples; ++i) {
        double t = rng.uniform() * total;
        double x = U.base.midpoint();
        for (const auto& iv : U.components) {
            if (t <= iv.length()) {
                x = iv.lo + t;
                break;
            }
            t -= iv.length();
        }
        if (std::abs(x - c) <= map.tol().eps_critical) continue;
        const double y = map.eval(x, side_of(map, x));
        if (!U.contains(y, map.tol().eps_value)) ++U.invariance_escapes;
    }
    return U;
}

} // namespace

AttractorEstimate attractor_estimate(const StandardLorenzMap& map, const TrappingRegion& U,
                                     std::size_t samples, const AnalysisParams& params) {
    AttractorEstimate est;
    est.generic = IntervalCover(params.grid);

    // quasi-random seeds over the component union (golden-ratio sequence)
    const double total = U.total_length();
    const std::size_t per_seed = std::max<std::size_t>(params.orbit_length / samples, 1000);
    double phase = 0.5;
    for (std::size_t s = 0; s < samples; ++s) {
        phase += 0.6180339887498949;
        phase -= std::floor(phase);
        double t = phase * total;
        double x = U.base.midpoint();
        for (const auto& iv : U.components) {
            if (t <= iv.length()) {
                x = iv.lo + t;
                break;
            }
            t -= iv.length();
        }
        IntervalCover cov = omega_estimate(map, SignedPoint(x, Side::Left), params.transient,
                                           per_seed, params.grid);
        est.generic = IntervalCover::unite(est.generic, cov);
    }
    est.generic.normalize();

    // critical-orbit closure covers include the whole orbits of c- and c+
    est.critical = IntervalCover(params.grid);
    for (Side s : {Side::Left, Side::Right}) {
        IntervalCover cov = omega_estimate(map, SignedPoint(map.c(), s), 0,
                                           params.transient + params.orbit_length / 4,
                                           params.grid);
        cov.mark(map.c());
        est.critical = IntervalCover::unite(est.critical, cov);
    }
    est.critical.normalize();
    est.merged = IntervalCover::unite(est.generic, est.critical);
    return est;
}

double entropy_lower_bound(const ReturnMapDecomposition& decomp, double eps_value) {
    // fullness read at the scale of J; deep branches carry Koebe-sized
    // distortion in their extrapolated image endpoints
    const double tol = std::max(eps_value * 10.0, decomp.J.length() * 1e-5);
    std::size_t full = 0;
    std::size_t t_max = 0;
    for (const auto& br : decomp.branches) {
        if (std::abs(br.image.lo - decomp.J.lo) <= tol &&
            std::abs(br.image.hi - decomp.J.hi) <= tol) {
            ++full;
            t_max = std::max(t_max, br.return_time);
        }
    }
    if (full < 2) return 0.0;
    return std::log(double(full)) / double(t_max);
}

TransitivityEvidence transitivity_check(const StandardLorenzMap& map, const IntervalCover& cover,
                                        std::size_t trials, std::size_t horizon,
                                        double delta, std::uint64_t seed) {
    TransitivityEvidence ev;
    const auto& cells = cover.cells();
    if (cells.size() <= 1) {
        // a single-cell cover is swept trivially
        ev.all_reached = true;
        return ev;
    }
    Rng rng(seed ^ 0x7472616e73ULL);
    const double w = 1.0 / cover.grid_size();
    const std::size_t target =
        static_cast<std::size_t>(std::ceil((1.0 - delta) * double(cells.size())));

    for (std::size_t t = 0; t < trials; ++t) {
        const auto cell = cells[rng.below(cells.size())];
        const double lo = cell * w + 0.1 * w * rng.uniform();
        TransitivityTrial trial;
        trial.V = Interval(lo, lo + 2.5 * w);
        std::vector<Interval> set{trial.V};
        IntervalCover hit(cover.grid_size());
        hit.mark_interval(trial.V.lo, trial.V.hi);
        std::size_t it = 0;
        auto covered = [&] {
            std::size_t n = 0;
            for (auto k : cells)
                if (hit.contains_cell(k)) ++n;
            return n;
        };
        std::size_t reached_cells = covered();
        while (it < horizon && reached_cells < target) {
            set = interval_set_image(map, set, 0.25 * w);
            for (const auto& iv : set) hit.mark_interval(iv.lo, iv.hi);
            hit.normalize();
            ++it;
            reached_cells = covered();
        }
        trial.iterations = it;
        trial.coverage = double(reached_cells) / double(cells.size());
        trial.reached = reached_cells >= target;
        ev.all_reached = ev.all_reached && trial.reached;
        ev.trials.push_back(trial);
    }
    return ev;
}

namespace {

// per-component interior gaps of a cover (uncovered runs strictly between
// occupied cells of the same trapping component)
std::vector<Interval> component_gaps(const IntervalCover& cover,
                                     const std::vector<Interval>& components) {
    std::vector<Interval> gaps;
    const double w = 1.0 / cover.grid_size();
    for (const auto& comp : components) {
        std::int64_t first = -1, last = -1;
        const auto clo = cover.cell_of(comp.lo + 0.5 * w);
        const auto chi = cover.cell_of(comp.hi - 0.5 * w);
        for (auto k = clo; k <= chi; ++k) {
            if (!cover.contains_cell(k)) continue;
            if (first < 0) first = k;
            last = k;
        }
        if (first < 0) continue;
        std::int64_t run = -1;
        for (std::int64_t k = first; k <= last; ++k) {
            if (!cover.contains_cell(static_cast<std::uint32_t>(k))) {
                if (run < 0) run = k;
            } else if (run >= 0) {
                gaps.emplace_back(run * w, k * w);
                run = -1;
            }
        }
    }
    return gaps;
}

// Periodic shadow of a near-recurrence: the itinerary word read off the orbit
// segment is pulled back through the branch inverses. Backward iteration
// contracts for expanding cycles, so a couple of sweeps converge where a
// forward root search would be hopeless for long words.
struct ShadowCycle {
    std::vector<double> points; // cycle points in word order
    double multiplier = 1.0;
};

std::optional<ShadowCycle> shadow_periodic_cycle(const StandardLorenzMap& m,
                                                 const std::vector<double>& orbit,
                                                 std::size_t j, std::size_t period) {
    std::vector<Side> w(period);
    for (std::size_t i = 0; i < period; ++i) w[i] = side_of(m, orbit[j + i]);

    double p = orbit[j];
    double prev = p;
    bool converged = false;
    for (int sweep = 0; sweep < 24 && !converged; ++sweep) {
        double y = p;
        for (std::size_t i = period; i-- > 0;) {
            try {
                y = m.invert_exact(w[i], y);
            } catch (const ValueOutsideBranchImage&) {
                return std::nullopt; // the word is not admissible
            }
        }
        converged = std::abs(y - prev) <= 1e-13;
        prev = p = y;
    }
    if (!converged) return std::nullopt;

    // reconstruct the cycle alongside its multiplier by pulling back the
    // whole loop once more, suffix by suffix
    ShadowCycle cyc;
    cyc.points.assign(period, 0.0);
    double y = p;
    for (std::size_t i = period; i-- > 0;) {
        y = m.invert_exact(w[i], y);
        cyc.points[i] = y;
    }
    for (std::size_t i = 0; i < period; ++i) {
        if (std::abs(cyc.points[i] - m.c()) <= m.tol().eps_critical) return std::nullopt;
        if (side_of(m, cyc.points[i]) != w[i]) return std::nullopt;
        cyc.multiplier *= std::abs(m.derivative1(cyc.points[i]));
    }
    return cyc;
}

struct DensityScanResult {
    PeriodicDensity density;
    std::vector<LyapunovWitness> witnesses;
};

// Shadow near-recurrences of a long generic orbit into genuine repelling
// periodic orbits, then mark every cover cell such an orbit visits. A few
// long cycles blanket the attractor, so the scan needs far fewer shadowing
// runs than cells.
DensityScanResult periodic_density_scan(const StandardLorenzMap& m, const IntervalCover& cover,
                                        const AnalysisParams& params) {
    DensityScanResult out;
    const auto& cells = cover.cells();
    out.density.cells_total = cells.size();
    if (cells.empty()) return out;

    const std::uint32_t grid = cover.grid_size();
    const double w = 1.0 / grid;

    // long orbit from a seeded point, with first-visit index per cell
    const std::size_t len = std::max<std::size_t>(params.orbit_length, 200000);
    std::vector<double> orbit;
    orbit.reserve(len);
    Rng rng(params.seed ^ 0x64656e73ULL);
    double x = 0.1 + 0.8 * rng.uniform();
    for (std::size_t i = 0; i < params.transient; ++i) x = m.eval(x, Side::Left);
    std::vector<std::int64_t> first_visit(grid, -1);
    for (std::size_t i = 0; i < len; ++i) {
        orbit.push_back(x);
        const auto cell = cover.cell_of(x);
        if (first_visit[cell] < 0) first_visit[cell] = static_cast<std::int64_t>(i);
        x = m.eval(x, Side::Left);
    }

    const double close = 2.5 * w;
    const std::size_t max_recur = std::min<std::size_t>(len / 2, 8 * grid);
    std::vector<bool> marked(grid, false);
    std::size_t shadow_budget = 256;

    for (auto cell : cells) {
        if (marked[cell]) continue;
        if (shadow_budget == 0) break;
        const std::int64_t j0 = first_visit[cell];
        if (j0 < 0) continue;
        const std::size_t j = static_cast<std::size_t>(j0);
        std::size_t found = 0;
        for (std::size_t p = 1; p <= max_recur && j + p < len; ++p) {
            if (std::abs(orbit[j + p] - orbit[j]) <= close) {
                found = p;
                break;
            }
        }
        if (!found) continue;
        --shadow_budget;
        auto cyc = shadow_periodic_cycle(m, orbit, j, found);
        if (!cyc) continue;
        if (cyc->multiplier <= 1.0 + m.tol().eps_value) continue;
        // mark every cover cell the verified cycle visits
        for (double y : cyc->points) {
            const auto kc = cover.cell_of(y);
            if (cover.contains_cell(kc)) marked[kc] = true;
        }
        if (out.witnesses.size() < 64) {
            const double expo = std::log(cyc->multiplier) / double(found);
            if (expo >= 1e-3) out.witnesses.push_back({cyc->points[0], found, expo});
        }
    }
    for (auto cell : cells)
        if (marked[cell]) ++out.density.cells_with_point;
    out.density.fraction = out.density.cells_total
                               ? double(out.density.cells_with_point) /
                                     double(out.density.cells_total)
                               : 0.0;
    out.density.pass = out.density.fraction >= 0.9;
    return out;
}

// nice interval bounded by a repelling periodic pair, wide enough for a
// tractable return decomposition; entropy evidence comes from its full
// branches
std::optional<ReturnMapDecomposition> entropy_decomposition(const StandardLorenzMap& m,
                                                            const PeriodicOrbitScan& scan,
                                                            const AnalysisParams& params) {
    const double c = m.c();
    std::vector<std::pair<double, std::size_t>> left, right;
    for (const auto& o : scan.orbits) {
        if (o.stability != Stability::Repelling) continue;
        for (double p : o.points) {
            if (p < c - m.tol().eps_point) left.push_back({p, o.period});
            else if (p > c + m.tol().eps_point) right.push_back({p, o.period});
        }
    }
    std::sort(left.begin(), left.end(), [](auto& a, auto& b) { return a.first > b.first; });
    std::sort(right.begin(), right.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < std::min<std::size_t>(left.size(), 4); ++i)
        for (std::size_t j = 0; j < std::min<std::size_t>(right.size(), 4); ++j) {
            const Interval J(left[i].first, right[j].first);
            if (J.length() < 0.01) continue; // microscopic boxes cost more than they teach
            NiceInterval ni = is_nice(m, J, 2000);
            if (!ni.nice()) continue;
            try {
                auto d = first_return(m, J, std::min<std::size_t>(params.horizon, 5000), 2000,
                                      J.length() * 1e-4);
                if (!d.branches.empty()) return d;
            } catch (const Error&) {
            }
        }
    return std::nullopt;
}

} // namespace

AttractorReport classify(const StandardLorenzMap& map, const AnalysisParams& params) {
    AttractorReport rep;
    rep.params = params;

    // (1) periodic attractors short-circuit everything else
    PeriodicOrbitScan scan = periodic_orbits(map, params.max_period);
    {
        std::vector<PeriodicOrbit> att = scan.attractors();
        if (!att.empty()) {
            if (att.size() > 2)
                throw Error("more than two periodic attractors located; this contradicts "
                            "the negative-Schwarzian bound and indicates a numerical fault");
            rep.kind = AttractorKind::PeriodicAttractors;
            rep.attractors = att;

            // basin sampling: fraction of a uniform grid that converges; an
            // orbit near an attracting cycle stays near, so sparse checks
            // suffice
            std::vector<double> targets;
            for (const auto& o : att)
                for (double p : o.points) targets.push_back(p);
            std::sort(targets.begin(), targets.end());
            auto near_target = [&](double x) {
                auto it = std::lower_bound(targets.begin(), targets.end(), x);
                if (it != targets.end() && std::abs(*it - x) <= params.basin_radius)
                    return true;
                return it != targets.begin() &&
                       std::abs(*std::prev(it) - x) <= params.basin_radius;
            };
            std::size_t converged = 0;
            for (std::size_t i = 0; i < params.basin_grid; ++i) {
                double x = double(i) / double(params.basin_grid - 1);
                bool ok = false;
                for (std::size_t k = 0; k < params.basin_iters && !ok; ++k) {
                    if (k % 64 == 0 && near_target(x)) ok = true;
                    x = map.eval(x, Side::Left);
                }
                ok = ok || near_target(x);
                if (ok) ++converged;
            }
            rep.basin_fraction = double(converged) / double(params.basin_grid);
            rep.evidence.push_back({"basin-fraction", rep.basin_fraction,
                                    rep.basin_fraction > 0.5});
            rep.evidence.push_back(
                {"attractor-count", double(att.size()), att.size() <= 2});
            return rep;
        }
    }

    // (2) deep towers with the depth limit hit are solenoid evidence
    const std::size_t max_depth = std::max(params.depth, params.solenoid_depth_threshold);
    RenormTower tower = build_tower(map, max_depth, params.max_period, params.lambda_budget,
                                    params.lambda_horizon, params.grid);
    rep.tower_depth = tower.depth();
    rep.depth_limit_hit = tower.depth_limit_hit;
    if (tower.depth() >= params.solenoid_depth_threshold && tower.depth_limit_hit) {
        rep.kind = AttractorKind::SolenoidEvidence;
        if (tower.solenoid_cover) rep.lambda_cover = *tower.solenoid_cover;
        rep.evidence.push_back({"tower-depth", double(tower.depth()), true});
        bool nested = true;
        for (std::size_t i = 0; i + 1 < tower.levels.size(); ++i)
            nested = nested && tower.levels[i].record.J.strictly_contains_interval(
                                   tower.levels[i + 1].record.J);
        rep.evidence.push_back({"nesting", nested ? 1.0 : 0.0, nested});
        return rep;
    }

    // (3) Cherry evidence on the deepest view
    CherryVerdict cv = cherry_verdict(map, tower, params);
    if (cv.cherry) {
        rep.kind = AttractorKind::CherryEvidence;
        rep.lambda_cover = cv.omega_left;
        rep.critical_cover = cv.omega_right;
        rep.rotation = cv.rotation;
        rep.evidence.push_back(
            {"omega-sides-agree", cv.omega_sides_agree ? 1.0 : 0.0, cv.omega_sides_agree});
        if (cv.rotation)
            rep.evidence.push_back({"rotation-estimate", cv.rotation->value, true});
        return rep;
    }
    rep.detail = "cherry: " + cv.failed_clause;

    // (4) trapping region and attractor covers
    TrappingRegion U = trapping_region_for_base(
        map, tower.levels.empty() ? Interval(0.0, 1.0) : tower.levels.back().record.J,
        params);
    AttractorEstimate est = attractor_estimate(map, U, params.samples, params);
    rep.trapping = U;
    rep.critical_cover = est.critical;
    rep.evidence.push_back({"trapping-escapes", double(U.invariance_escapes),
                            U.invariance_escapes == 0});

    const bool contained = est.critical.subset_of(est.generic, 1);
    rep.evidence.push_back({"critical-inside-generic", contained ? 1.0 : 0.0, contained});

    // gap persistence across one grid refinement
    std::vector<Interval> gaps = component_gaps(est.generic, U.components);
    AnalysisParams fine = params;
    fine.grid = params.grid * 4;
    fine.orbit_length = params.orbit_length * 2;
    fine.seed = params.seed * 0x9e3779b97f4a7c15ULL + 17;
    AttractorEstimate est_fine = attractor_estimate(map, U, params.samples, fine);
    std::vector<Interval> persistent;
    const double coarse_w = 1.0 / params.grid;
    for (const auto& g : gaps) {
        if (g.length() < coarse_w) continue;
        const Interval core(g.lo + coarse_w, g.hi - coarse_w);
        if (core.degenerate()) continue;
        bool open_in_fine = true;
        for (auto k = est_fine.generic.cell_of(core.lo) + 1;
             k + 1 <= est_fine.generic.cell_of(core.hi) && open_in_fine; ++k)
            open_in_fine = !est_fine.generic.contains_cell(k);
        if (open_in_fine) persistent.push_back(g);
    }
    rep.evidence.push_back({"persistent-gaps", double(persistent.size()), true});

    const bool few_components =
        est.generic.intervals().size() <= params.max_cycle_components;
    const bool has_c_neighborhood =
        est.generic.contains_point(map.c() - 1.5 / params.grid) ||
        est.generic.contains_point(map.c() + 1.5 / params.grid);

    // attached measurements for the chaotic candidates
    auto attach_chaotic_evidence = [&](const IntervalCover& lambda) {
        DensityScanResult dens = periodic_density_scan(map, lambda, params);
        rep.periodic_density = dens.density;
        rep.lyapunov_witnesses = dens.witnesses;
        rep.evidence.push_back({"periodic-density", dens.density.fraction,
                                dens.density.pass});
        std::size_t strong = 0;
        for (const auto& wit : rep.lyapunov_witnesses)
            if (wit.exponent >= 1e-3) ++strong;
        rep.evidence.push_back({"lyapunov-witnesses", double(strong), strong >= 5});
        // base decomposition first (it pins the whole-interval shift bound),
        // then a periodic-pair interval when the base has no full branches
        try {
            auto base_d = first_return(map, U.base, std::min<std::size_t>(params.horizon, 5000),
                                       2000, U.base.length() * 1e-4);
            rep.entropy_lower_bound = entropy_lower_bound(base_d, map.tol().eps_value);
        } catch (const Error&) {
        }
        if (rep.entropy_lower_bound == 0.0) {
            if (auto ed = entropy_decomposition(map, scan, params))
                rep.entropy_lower_bound =
                    std::max(rep.entropy_lower_bound,
                             entropy_lower_bound(*ed, map.tol().eps_value));
        }
        rep.evidence.push_back({"entropy-lower-bound", rep.entropy_lower_bound,
                                rep.entropy_lower_bound > 0.0});
    };

    if (persistent.empty() && few_components && has_c_neighborhood && contained) {
        rep.kind = AttractorKind::ChaoticCycleOfIntervals;
        rep.lambda_cover = est.generic;
        attach_chaotic_evidence(rep.lambda_cover);
        return rep;
    }

    if (!persistent.empty()) {
        // a Cantor signature needs its gaps free of periodic points and of the
        // critical orbits
        bool clean = true;
        for (const auto& g : persistent) {
            for (const auto& o : scan.orbits)
                if (o.intersects(g.lo, g.hi)) clean = false;
            for (auto k = est.critical.cell_of(g.lo) + 1; k + 1 <= est.critical.cell_of(g.hi);
                 ++k)
                if (est.critical.contains_cell(k)) clean = false;
        }
        if (clean && contained) {
            rep.kind = AttractorKind::CantorWanderingEvidence;
            rep.lambda_cover = est.critical;
            attach_chaotic_evidence(rep.lambda_cover);
            return rep;
        }
        rep.kind = AttractorKind::Inconclusive;
        rep.detail += "; persistent gaps with periodic or critical material inside";
        rep.lambda_cover = est.merged;
        return rep;
    }

    rep.kind = AttractorKind::Inconclusive;
    rep.detail += few_components ? "; attractor cover misses a neighborhood of c"
                                 : "; attractor cover fragments beyond the component cap";
    rep.lambda_cover = est.merged;
    return rep;
}

} // namespace lorenz
