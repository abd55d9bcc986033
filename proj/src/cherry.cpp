#include "lorenz/cherry.hpp"

#include <cmath>

#include "lorenz/errors.hpp"
#include "lorenz/orbit.hpp"
#include "lorenz/periodic.hpp"

namespace lorenz {

std::optional<std::pair<long long, long long>> min_denominator_rational(double value,
                                                                        double tol) {
    const double lo = value - tol, hi = value + tol;
    if (lo <= 0.0 && hi >= 0.0) return std::make_pair(0LL, 1LL);
    if (lo <= 1.0 && hi >= 1.0) return std::make_pair(1LL, 1LL);
    if (hi < 0.0 || lo > 1.0) return std::nullopt;
    long long an = 0, ad = 1, bn = 1, bd = 1;
    for (int it = 0; it < 1 << 20; ++it) {
        const long long mn = an + bn, md = ad + bd;
        const double med = double(mn) / double(md);
        if (med < lo) { an = mn; ad = md; }
        else if (med > hi) { bn = mn; bd = md; }
        else return std::make_pair(mn, md);
    }
    return std::nullopt;
}

GapMap as_gap_map(const ReturnMapDecomposition& decomp, const SystemHandle& sys) {
    const Tolerances& tol = sys.tol();
    if (decomp.branches.size() != 2)
        throw WrongBranchCount("gap map needs exactly two return branches, got " +
                               std::to_string(decomp.branches.size()));
    const ReturnBranch& L = decomp.branches[0];
    const ReturnBranch& R = decomp.branches[1];
    const double a = decomp.J.lo, len = decomp.J.length();
    const double c = sys.critical();
    const double slack = 1e-6 * len + 10.0 * tol.eps_point;
    if (std::abs(L.domain.lo - a) > slack || std::abs(R.domain.hi - decomp.J.hi) > slack ||
        std::abs(L.domain.hi - c) > slack || std::abs(R.domain.lo - c) > slack)
        throw WrongBranchCount("return branches must abut at the critical point and cover J");

    GapMap g;
    g.J = decomp.J;
    g.theta_c = (c - a) / len;
    g.left_return_time = L.return_time;
    g.right_return_time = R.return_time;
    auto norm = [a, len](double x) { return (x - a) / len; };
    g.left_lo = norm(L.image.lo);
    g.left_hi = norm(L.image.hi);
    g.right_lo = norm(R.image.lo);
    g.right_hi = norm(R.image.hi);

    const double eps = tol.eps_value / len;
    if (g.left_hi <= g.right_lo + eps) {
        // interior gap between the two critical values
        g.right_wraps = false;
        g.gap_start = g.left_hi;
        g.gap_length = std::max(0.0, g.right_lo - g.left_hi);
    } else if (g.right_hi <= g.left_lo + eps) {
        // rotation phase: the right image sits below the left one, through the cut
        g.right_wraps = true;
        g.gap_start = g.left_hi;
        g.gap_length = std::max(0.0, 1.0 - g.left_hi + g.right_lo);
    } else {
        throw BranchOverlap("return branch images overlap on the circle: left (" +
                            std::to_string(g.left_lo) + ", " + std::to_string(g.left_hi) +
                            "), right (" + std::to_string(g.right_lo) + ", " +
                            std::to_string(g.right_hi) + ")");
    }

    const std::size_t tl = L.return_time, tr = R.return_time;
    const double theta_c = g.theta_c;
    SystemHandle h = sys;
    g.eval = [h, a, len, theta_c, tl, tr](double theta, Side side) {
        theta -= std::floor(theta);
        double x;
        std::size_t steps;
        if (std::abs(theta - theta_c) <= h.tol().eps_critical) {
            x = h.eval(h.critical(), side);
            steps = (side == Side::Left ? tl : tr) - 1;
        } else {
            x = h.eval(a + len * theta, side);
            steps = (theta < theta_c ? tl : tr) - 1;
        }
        for (std::size_t j = 0; j < steps; ++j) x = h.eval(x, side);
        double out = (x - a) / len;
        if (out < 0.0) out += 1.0;
        if (out >= 1.0) out -= 1.0;
        return out;
    };
    return g;
}

GapMap make_rotation_gap_map(double rho, double conjugacy_amp) {
    GapMap g;
    g.J = Interval(0.0, 1.0);
    // conjugacy h and its inverse by bisection; h is a circle diffeo for amp<1
    auto h = [conjugacy_amp](double t) {
        return t + conjugacy_amp * std::sin(2.0 * M_PI * t) / (2.0 * M_PI);
    };
    auto hinv = [h](double y) {
        double lo = y - 0.25, hi = y + 0.25;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (h(mid) < y) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    // the interval presentation jumps where the unconjugated angle wraps
    auto wrap0 = [](double t) { return t - std::floor(t); };
    g.theta_c = wrap0(h(1.0 - rho));
    auto wrap = wrap0;
    g.eval = [h, hinv, rho, wrap](double theta, Side) {
        return wrap(h(wrap(hinv(wrap(theta)) + rho)));
    };
    g.left_lo = g.eval(0.0, Side::Left);
    g.left_hi = 1.0;
    g.right_lo = 0.0;
    g.right_hi = g.left_lo;
    g.right_wraps = true;
    g.gap_start = 1.0;
    g.gap_length = 0.0;
    return g;
}

RotationEstimate rotation_number(const GapMap& g, std::size_t n) {
    const double kick = g.right_wraps ? 1.0 : 0.0;
    auto run = [&](std::size_t steps) {
        double seed_shift = 0.0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            double theta = g.theta_c + 0.5 * (1.0 - g.theta_c) + seed_shift;
            theta -= std::floor(theta);
            double total = 0.0;
            bool ok = true;
            for (std::size_t k = 0; k < steps; ++k) {
                if (std::abs(theta - g.theta_c) < 1e-13) {
                    ok = false;
                    break;
                }
                const double next = g.eval(theta, theta < g.theta_c ? Side::Left : Side::Right);
                double disp = next - theta;
                if (theta > g.theta_c) disp += kick;
                // in the wrap phase an image at the cut may have been reduced mod 1
                if (g.right_wraps && disp < -0.5) disp += 1.0;
                total += disp;
                theta = next;
            }
            if (ok) return total / double(steps);
            seed_shift += 10.0 * 1e-10;
        }
        throw OrbitHitGap("rotation orbit kept hitting the critical puncture");
    };

    RotationEstimate est;
    est.n = n;
    est.error_bound = 1.0 / double(n);
    double v = run(n);
    v -= std::floor(v);
    est.value = v;
    double v2 = run(2 * n);
    v2 -= std::floor(v2);
    est.refined_value = v2;

    const auto r1 = min_denominator_rational(est.value, est.error_bound);
    const auto r2 = min_denominator_rational(v2, 0.5 * est.error_bound);
    const double max_den = std::sqrt(double(n));
    if (r1 && r2 && *r1 == *r2 && double(r1->second) <= max_den) est.rational_lock = *r1;
    return est;
}

namespace {

// first-return time to the open interval, one-sided continuation at c
std::size_t rt(const SystemHandle& m, double x, double a, double b, std::size_t horizon,
               Side side = Side::Left) {
    for (std::size_t j = 1; j <= horizon; ++j) {
        x = std::abs(x - m.critical()) <= m.tol().eps_critical
                ? m.eval(m.critical(), side)
                : m.eval(x, side);
        if (x > a && x < b) return j;
    }
    return 0;
}

double push(const SystemHandle& m, double x, Side side, std::size_t steps) {
    for (std::size_t j = 0; j < steps; ++j)
        x = std::abs(x - m.critical()) <= m.tol().eps_critical ? m.eval(m.critical(), side)
                                                               : m.eval(x, side);
    return x;
}

} // namespace

std::optional<ReturnMapDecomposition> extract_two_branch_return(const SystemHandle& sys,
                                                                std::size_t orbit_budget,
                                                                std::size_t horizon) {
    const double c = sys.critical();
    struct Rec {
        bool left;
        std::size_t k;
        double x;
    };
    std::vector<Rec> recs;
    {
        double x = sys.eval(c, Side::Right);
        double best_l = -1.0, best_r = 2.0;
        for (std::size_t k = 1; k <= orbit_budget; ++k) {
            if (x < c && x > best_l) {
                best_l = x;
                recs.push_back({true, k, x});
            } else if (x > c && x < best_r) {
                best_r = x;
                recs.push_back({false, k, x});
            }
            if (std::abs(x - c) <= sys.tol().eps_critical) break; // super-attractor
            x = sys.eval(x, Side::Left);
        }
    }

    // candidate boxes from consecutive opposite-side records, deepest first
    std::vector<Interval> boxes;
    for (std::size_t i = 1; i < recs.size(); ++i)
        if (recs[i].left != recs[i - 1].left) {
            const double a = recs[i].left ? recs[i].x : recs[i - 1].x;
            const double b = recs[i].left ? recs[i - 1].x : recs[i].x;
            boxes.emplace_back(a, b);
        }

    for (auto it = boxes.rbegin(); it != boxes.rend(); ++it) {
        const Interval J = *it;
        // per-side return times must be constant at sampling resolution
        constexpr int kSamples = 24;
        std::size_t t_left = 0, t_right = 0;
        bool clean = true;
        for (int i = 1; i <= kSamples && clean; ++i) {
            const double x = J.lo + (c - J.lo) * (double(i) / (kSamples + 1));
            const std::size_t t = rt(sys, x, J.lo, J.hi, horizon);
            if (t == 0 || (t_left && t != t_left)) clean = false;
            t_left = t;
        }
        for (int i = 1; i <= kSamples && clean; ++i) {
            const double x = c + (J.hi - c) * (double(i) / (kSamples + 1));
            const std::size_t t = rt(sys, x, J.lo, J.hi, horizon);
            if (t == 0 || (t_right && t != t_right)) clean = false;
            t_right = t;
        }
        if (!clean) continue;

        ReturnMapDecomposition d;
        d.J = J;
        d.horizon = horizon;
        d.covered_fraction = 1.0;
        ReturnBranch L;
        L.domain = Interval(J.lo, c);
        L.return_time = t_left;
        L.touches_critical = true;
        L.image = Interval(push(sys, J.lo, Side::Right, t_left),
                           push(sys, sys.eval(c, Side::Left), Side::Left, t_left - 1));
        ReturnBranch R;
        R.domain = Interval(c, J.hi);
        R.return_time = t_right;
        R.touches_critical = true;
        R.image = Interval(push(sys, sys.eval(c, Side::Right), Side::Right, t_right - 1),
                           push(sys, J.hi, Side::Left, t_right));
        d.branches = {L, R};
        return d;
    }
    return std::nullopt;
}

CherryVerdict cherry_verdict(const StandardLorenzMap& map, const RenormTower& tower,
                             const AnalysisParams& params) {
    CherryVerdict v;
    // clause (iv) first: periodic or super-attractors end the story
    PeriodicOrbitScan scan = periodic_orbits(map, params.max_period);
    for (const auto& o : scan.orbits) {
        if (o.stability == Stability::SuperAttractor) {
            v.failed_clause = "super-attractor detected";
            return v;
        }
        if (o.stability == Stability::Attracting) {
            v.failed_clause = "attracting periodic orbit of period " +
                              std::to_string(o.period);
            return v;
        }
    }

    SystemHandle h = tower.deepest_view ? *tower.deepest_view : SystemHandle(map);
    PeriodicOrbitScan hscan = periodic_orbits(h, params.max_period);
    bool interior_periodic = false;
    for (const auto& o : hscan.orbits) {
        if (o.stability == Stability::SuperAttractor) {
            v.failed_clause = "super-attractor detected in the return view";
            return v;
        }
        for (double p : o.points)
            if (p > h.tol().eps_point && p < 1.0 - h.tol().eps_point)
                interior_periodic = true;
    }

    std::optional<ReturnMapDecomposition> decomp;
    if (interior_periodic) {
        // periodic points persist near the critical point: the only candidate
        // left is the whole-interval decomposition, the view's own branches
        ReturnMapDecomposition d;
        d.J = Interval(0.0, 1.0);
        d.horizon = 1;
        d.covered_fraction = 1.0;
        ReturnBranch L;
        L.domain = Interval(0.0, h.critical());
        L.return_time = 1;
        L.touches_critical = true;
        L.image = Interval(0.0, h.eval(h.critical(), Side::Left));
        ReturnBranch R;
        R.domain = Interval(h.critical(), 1.0);
        R.return_time = 1;
        R.touches_critical = true;
        R.image = Interval(h.eval(h.critical(), Side::Right), 1.0);
        d.branches = {L, R};
        decomp = d;
    } else {
        decomp = extract_two_branch_return(h, params.cherry_orbit_budget, params.horizon);
        if (!decomp) {
            v.failed_clause = "no two-branch return structure located";
            return v;
        }
    }

    try {
        v.gap_map = as_gap_map(*decomp, h);
    } catch (const BranchOverlap&) {
        v.failed_clause = "return branch images overlap";
        return v;
    } catch (const WrongBranchCount&) {
        v.failed_clause = "return decomposition is not two-branch";
        return v;
    }

    // clause (iii): no periodic orbit meets the interval
    for (const auto& o : hscan.orbits)
        if (o.intersects(decomp->J.lo, decomp->J.hi)) {
            v.failed_clause = "periodic orbit of period " + std::to_string(o.period) +
                              " meets the return interval";
            return v;
        }

    v.rotation = rotation_number(*v.gap_map, params.rotation_n);
    if (v.rotation->rational_lock) {
        v.failed_clause = "rational rotation lock " +
                          std::to_string(v.rotation->rational_lock->first) + "/" +
                          std::to_string(v.rotation->rational_lock->second);
        return v;
    }

    // evidence accepted; attach the critical omega covers of the original map
    v.omega_left = omega_estimate(map, SignedPoint(map.c(), Side::Left), params.transient,
                                  params.orbit_length / 10, params.grid);
    v.omega_right = omega_estimate(map, SignedPoint(map.c(), Side::Right), params.transient,
                                   params.orbit_length / 10, params.grid);
    v.omega_sides_agree = v.omega_left.subset_of(v.omega_right, 1) &&
                          v.omega_right.subset_of(v.omega_left, 1);
    v.J_original = decomp->J; // view coordinates when a tower is present
    v.cherry = true;
    return v;
}

} // namespace lorenz
