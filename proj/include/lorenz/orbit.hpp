#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/interval.hpp"
#include "lorenz/map.hpp"

namespace lorenz {

// Forward orbit record. hit_critical_at is the first index whose point lies
// within eps_critical of c; the orbit continues through the one-sided value
// chosen by side_resolution.
struct Orbit {
    SignedPoint start;
    std::vector<double> points; // points[0] == start.x
    std::optional<std::size_t> hit_critical_at;
    Side side_resolution = Side::Left;
};

template <LorenzSystem M>
Orbit iterate(const M& m, SignedPoint p, std::size_t n,
              std::optional<Side> side_resolution = std::nullopt) {
    Orbit orb;
    orb.start = p;
    orb.side_resolution = side_resolution.value_or(p.side);
    orb.points.reserve(n + 1);
    orb.points.push_back(p.x);
    double x = p.x;
    Side side = p.side; // side used at the NEXT critical hit
    for (std::size_t k = 0; k < n; ++k) {
        if (near_critical(m, x)) {
            if (!orb.hit_critical_at) orb.hit_critical_at = k;
            x = m.eval(m.critical(), side);
            side = orb.side_resolution;
        } else {
            x = m.eval(x, side);
        }
        orb.points.push_back(x);
    }
    return orb;
}

// Grid cover of the cells visited by iterates transient..transient+length.
template <LorenzSystem M>
IntervalCover omega_estimate(const M& m, SignedPoint p, std::size_t transient,
                             std::size_t length, std::uint32_t grid) {
    IntervalCover cover(grid);
    double x = p.x;
    Side side = p.side;
    auto advance = [&] {
        if (near_critical(m, x)) x = m.eval(m.critical(), side);
        else x = m.eval(x, side);
    };
    for (std::size_t k = 0; k < transient; ++k) advance();
    for (std::size_t k = 0; k < length; ++k) {
        advance();
        cover.mark(x);
    }
    cover.normalize();
    return cover;
}

// At most one preimage per branch; the critical point joins the set when y is
// a one-sided critical value, mirroring f^{-1}(x) = {c} u {y : f(y) = x}.
template <LorenzSystem M>
std::vector<SignedPoint> preimages(const M& m, double y) {
    std::vector<SignedPoint> out;
    const Tolerances& tol = m.tol();
    const double c = m.critical();
    const double v1 = left_value(m), v0 = right_value(m);
    if (std::abs(y - v1) <= tol.eps_value) {
        out.push_back({c, Side::Left});
    } else if (y >= -tol.eps_value && y < v1) {
        out.push_back({m.invert(Side::Left, y), Side::Left});
    }
    if (std::abs(y - v0) <= tol.eps_value) {
        out.push_back({c, Side::Right});
    } else if (y > v0 && y <= 1.0 + tol.eps_value) {
        out.push_back({m.invert(Side::Right, y), Side::Right});
    }
    return out;
}

// Breadth-first preimage tree, one node per grid cell and level; returns the
// cover of cells holding nodes in the deep half of the tree.
template <LorenzSystem M>
IntervalCover alpha_estimate(const M& m, double x, std::size_t depth, std::uint32_t grid) {
    IntervalCover probe(grid);
    std::vector<double> level{x};
    IntervalCover deep(grid);
    bool any = false;
    for (std::size_t d = 1; d <= depth; ++d) {
        std::vector<double> next;
        std::vector<bool> seen(grid, false);
        next.reserve(level.size() * 2);
        for (double y : level) {
            for (const SignedPoint& q : preimages(m, y)) {
                const auto cell = probe.cell_of(q.x);
                if (seen[cell]) continue;
                seen[cell] = true;
                next.push_back(q.x);
            }
        }
        level = std::move(next);
        if (level.empty()) break;
        any = true;
        if (2 * d >= depth)
            for (double q : level) deep.mark(q);
    }
    if (!any) throw PreimageTreeEmpty("point has no preimages");
    deep.normalize();
    return deep;
}

struct LyapunovEstimate {
    double value = 0.0; // (1/n) sum log |Df|
    std::size_t n = 0;
    bool aborted_at_critical = false;
};

template <LorenzSystem M>
LyapunovEstimate lyapunov(const M& m, SignedPoint p, std::size_t n) {
    LyapunovEstimate est;
    double x = p.x;
    Side side = p.side;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (near_critical(m, x)) {
            est.aborted_at_critical = true;
            break;
        }
        acc += std::log(std::abs(m.derivative1(x)));
        x = m.eval(x, side);
        ++est.n;
    }
    est.value = est.n ? acc / static_cast<double>(est.n) : 0.0;
    return est;
}

// Forward images of an interval under f, split whenever an image straddles
// the critical point. Endpoints are pushed as one-sided limits.
template <LorenzSystem M>
std::vector<Interval> interval_image(const M& m, const Interval& iv) {
    const double c = m.critical();
    const Tolerances& tol = m.tol();
    std::vector<Interval> out;
    // endpoints are pushed as limits from inside the interval
    auto push = [&](double lo, double hi) {
        const double a = m.eval(lo, Side::Right);
        const double b = m.eval(hi, Side::Left);
        if (b - a > 0.0) out.emplace_back(a, b);
    };
    if (iv.lo < c - tol.eps_critical && iv.hi > c + tol.eps_critical) {
        push(iv.lo, c);
        push(c, iv.hi);
    } else {
        push(iv.lo, iv.hi);
    }
    return out;
}

inline std::vector<Interval> merge_overlapping(std::vector<Interval> ivs, double eps = 0.0) {
    if (ivs.empty()) return ivs;
    std::sort(ivs.begin(), ivs.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    out.push_back(ivs.front());
    for (std::size_t i = 1; i < ivs.size(); ++i) {
        if (ivs[i].lo <= out.back().hi + eps)
            out.back().hi = std::max(out.back().hi, ivs[i].hi);
        else
            out.push_back(ivs[i]);
    }
    return out;
}

// One forward step of a set of intervals, with straddle splitting and merging.
template <LorenzSystem M>
std::vector<Interval> interval_set_image(const M& m, const std::vector<Interval>& set,
                                         double merge_eps = 0.0) {
    std::vector<Interval> out;
    for (const Interval& iv : set)
        for (Interval& im : interval_image(m, iv)) out.push_back(im);
    return merge_overlapping(std::move(out), merge_eps);
}

} // namespace lorenz
