#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/interval.hpp"
#include "lorenz/map.hpp"

namespace lorenz {

enum class NiceVerdict { Nice, NotNice, Undetermined };

struct NiceInterval {
    Interval interval;
    std::size_t horizon = 0;
    NiceVerdict verdict = NiceVerdict::Undetermined;
    // witness for NotNice: which boundary point re-entered, at which iterate
    double witness_point = 0.0;
    std::size_t witness_iterate = 0;
    double witness_value = 0.0;

    bool nice() const { return verdict == NiceVerdict::Nice; }
};

namespace detail {

// Forward orbit of a boundary point. Detects periodic closure early (the
// boundary of a renormalization interval cycles exactly, and iterating a
// repelling cycle past its period only accumulates error), and runs both
// side-continuations when the orbit lands on the critical point.
template <LorenzSystem M>
struct BoundaryProbe {
    bool entered = false;      // some iterate fell strictly inside (a,b)
    bool ambiguous = false;    // critical hit whose side-continuations disagree
    std::size_t enter_at = 0;
    double enter_value = 0.0;
    std::optional<std::size_t> closure_period; // orbit returned to its start
};

template <LorenzSystem M>
BoundaryProbe<M> probe_boundary(const M& m, double start, double a, double b,
                                std::size_t horizon, Side side, int split_budget = 2) {
    const Tolerances& tol = m.tol();
    BoundaryProbe<M> r;
    double x = start;
    for (std::size_t j = 1; j <= horizon; ++j) {
        if (near_critical(m, x)) {
            // follow both limits; a definite verdict needs agreement
            if (split_budget <= 0) {
                r.ambiguous = true;
                return r;
            }
            auto rl = probe_boundary(m, m.eval(m.critical(), Side::Left), a, b,
                                     horizon - j, Side::Left, split_budget - 1);
            auto rr = probe_boundary(m, m.eval(m.critical(), Side::Right), a, b,
                                     horizon - j, Side::Right, split_budget - 1);
            if (rl.ambiguous || rr.ambiguous || rl.entered != rr.entered) {
                r.ambiguous = true;
                return r;
            }
            if (rl.entered) {
                r.entered = true;
                r.enter_at = j + rl.enter_at;
                r.enter_value = rl.enter_value;
            }
            return r;
        }
        x = m.eval(x, side);
        if (x > a + tol.eps_point && x < b - tol.eps_point) {
            r.entered = true;
            r.enter_at = j;
            r.enter_value = x;
            return r;
        }
        if (std::abs(x - start) <= tol.eps_point) {
            r.closure_period = j;
            return r; // periodic boundary orbit: the cycle repeats
        }
    }
    return r;
}

} // namespace detail

// Nice-interval check: no iterate of either boundary point may land strictly
// inside the open interval.
template <LorenzSystem M>
NiceInterval is_nice(const M& m, const Interval& J, std::size_t horizon) {
    NiceInterval out;
    out.interval = J;
    out.horizon = horizon;
    for (double e : {J.lo, J.hi}) {
        // approach side pointing into [0,1] (irrelevant away from c)
        auto probe = detail::probe_boundary(m, e, J.lo, J.hi, horizon, Side::Left);
        if (probe.ambiguous) {
            out.verdict = NiceVerdict::Undetermined;
            return out;
        }
        if (probe.entered) {
            out.verdict = NiceVerdict::NotNice;
            out.witness_point = e;
            out.witness_iterate = probe.enter_at;
            out.witness_value = probe.enter_value;
            return out;
        }
    }
    out.verdict = NiceVerdict::Nice;
    return out;
}

struct ReturnBranch {
    Interval domain;
    std::size_t return_time = 0;
    Interval image;
    bool touches_critical = false; // c on the boundary of the domain
};

struct ReturnMapDecomposition {
    Interval J;
    std::vector<ReturnBranch> branches; // sorted by domain
    double covered_fraction = 0.0;
    std::size_t horizon = 0;
    bool horizon_exhausted = false; // some piece of J never returned in time
};

namespace detail {

// first-return time of x to the open interval (a,b); 0 if none within horizon
template <LorenzSystem M>
std::size_t return_time(const M& m, double x, double a, double b, std::size_t horizon,
                        Side side = Side::Left) {
    for (std::size_t j = 1; j <= horizon; ++j) {
        x = near_critical(m, x) ? m.eval(m.critical(), side) : m.eval(x, side);
        if (x > a && x < b) return j;
    }
    return 0;
}

// one-sided limit of f^n at x from inside direction `side`, with snapping at
// the critical point: once the orbit passes within the snap band of c, the
// continuation through the exact one-sided critical value kills the
// accumulated error (the true boundary orbit hits c exactly there)
template <LorenzSystem M>
double push_limit(const M& m, double x, Side side, std::size_t n, double snap_band) {
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(x - m.critical()) <= snap_band)
            x = m.eval(m.critical(), side);
        else
            x = m.eval(x, side);
    }
    return x;
}

// Richardson limit of f^R from inside the branch: the domain endpoints of a
// return branch are only known to bisection accuracy, and pushing them
// forward amplifies that error by |Df^R|; extrapolating from three interior
// probes sidesteps it.
template <LorenzSystem M>
double image_limit(const M& m, double endpoint, Side inward, std::size_t n, double width) {
    const double d = (inward == Side::Right ? 1.0 : -1.0) * width * 1e-3;
    const double f1 = push_limit(m, endpoint + d, inward, n, 0.0);
    const double f2 = push_limit(m, endpoint + 2.0 * d, inward, n, 0.0);
    const double f3 = push_limit(m, endpoint + 3.0 * d, inward, n, 0.0);
    return 3.0 * f1 - 3.0 * f2 + f3;
}

} // namespace detail

// First-return decomposition of a nice interval J: J is partitioned into
// maximal open intervals of constant return time, located by recursive
// subdivision of a uniform scan with bisection at the time breakpoints.
template <LorenzSystem M>
ReturnMapDecomposition first_return(const M& m, const Interval& J, std::size_t horizon,
                                    std::size_t scan_points = 10000,
                                    double min_branch_width = 1e-7) {
    {
        NiceInterval ni = is_nice(m, J, std::min<std::size_t>(horizon, 100000));
        if (ni.verdict == NiceVerdict::NotNice)
            throw NotNiceError("first_return requires a nice interval; boundary " +
                               std::to_string(ni.witness_point) + " re-enters at iterate " +
                               std::to_string(ni.witness_iterate));
    }
    const Tolerances& tol = m.tol();
    ReturnMapDecomposition out;
    out.J = J;
    out.horizon = horizon;

    const double a = J.lo, b = J.hi;
    auto rt = [&](double x) { return detail::return_time(m, x, a, b, horizon); };

    struct Seg {
        double lo, hi;
        std::size_t tlo, thi;
    };
    std::vector<Seg> stack;
    std::vector<std::pair<Interval, std::size_t>> pieces; // (domain, time)
    double missing = 0.0;

    // seed scan, splitting at the critical point which is always a breakpoint.
    // The outermost seeds sit just inside J: the boundary points themselves lie
    // outside the open interval and would fake a breakpoint at each end.
    const double inset = std::max(J.length() * 1e-12, 1e-14);
    std::vector<double> seeds;
    seeds.reserve(scan_points + 3);
    for (std::size_t i = 0; i <= scan_points; ++i)
        seeds.push_back(a + (b - a) * double(i) / double(scan_points));
    seeds.front() = a + inset;
    seeds.back() = b - inset;
    const double c = m.critical();
    if (c > a && c < b) {
        seeds.push_back(c - tol.eps_critical);
        seeds.push_back(c + tol.eps_critical);
        std::sort(seeds.begin(), seeds.end());
    }
    std::vector<std::size_t> times(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) times[i] = rt(seeds[i]);

    for (std::size_t i = 0; i + 1 < seeds.size(); ++i)
        stack.push_back({seeds[i], seeds[i + 1], times[i], times[i + 1]});

    // merge adjacent equal-time segments later; first resolve breakpoints
    std::vector<Seg> resolved;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        if (s.tlo == s.thi) {
            resolved.push_back(s);
            continue;
        }
        if (s.hi - s.lo <= std::max(tol.eps_point, min_branch_width * 1e-2)) {
            // unresolvable sliver between two branch families
            missing += s.hi - s.lo;
            continue;
        }
        const double mid = 0.5 * (s.lo + s.hi);
        const std::size_t tm = rt(mid);
        stack.push_back({s.lo, mid, s.tlo, tm});
        stack.push_back({mid, s.hi, tm, s.thi});
    }
    std::sort(resolved.begin(), resolved.end(),
              [](const Seg& x, const Seg& y) { return x.lo < y.lo; });

    // stitch equal-time neighbours into branches
    std::size_t i = 0;
    while (i < resolved.size()) {
        std::size_t j = i;
        while (j + 1 < resolved.size() && resolved[j + 1].tlo == resolved[i].tlo &&
               resolved[j + 1].lo - resolved[j].hi <= 10.0 * tol.eps_point)
            ++j;
        const double lo = resolved[i].lo, hi = resolved[j].hi;
        const std::size_t t = resolved[i].tlo;
        i = j + 1;
        if (t == 0) {
            missing += hi - lo;
            out.horizon_exhausted = true;
            continue;
        }
        if (hi - lo < min_branch_width) {
            missing += hi - lo;
            continue;
        }
        pieces.emplace_back(Interval(lo, hi), t);
    }

    for (auto& [dom, t] : pieces) {
        ReturnBranch br;
        br.domain = dom;
        br.return_time = t;
        br.touches_critical = std::abs(dom.lo - c) <= 100.0 * tol.eps_point ||
                              std::abs(dom.hi - c) <= 100.0 * tol.eps_point;
        br.image = Interval(detail::image_limit(m, dom.lo, Side::Right, t, dom.length()),
                            detail::image_limit(m, dom.hi, Side::Left, t, dom.length()));
        out.branches.push_back(br);
    }
    std::sort(out.branches.begin(), out.branches.end(),
              [](const ReturnBranch& x, const ReturnBranch& y) {
                  return x.domain.lo < y.domain.lo;
              });

    double covered = 0.0;
    for (const auto& br : out.branches) covered += br.domain.length();
    out.covered_fraction = covered / J.length();
    return out;
}

struct BranchCheck {
    ReturnBranch branch;
    std::string law;  // which statement was checked
    bool pass = false;
    double error = 0.0;
};

struct BranchStructureReport {
    std::vector<BranchCheck> checks;
    bool all_pass = true;
};

// Runtime form of the return-branch laws for nice intervals: a branch whose
// boundary avoids c has full image endpoints at the corresponding side of J,
// and a branch starting (ending) at the boundary of J has that boundary point
// periodic with period equal to the return time.
template <LorenzSystem M>
BranchStructureReport check_full_branches(const M& m, const ReturnMapDecomposition& d) {
    BranchStructureReport rep;
    const Tolerances& tol = m.tol();
    const double a = d.J.lo, b = d.J.hi, c = m.critical();
    auto near = [&](double x, double y) { return std::abs(x - y) <= 100.0 * tol.eps_point; };

    for (const ReturnBranch& br : d.branches) {
        const bool lo_at_c = near(br.domain.lo, c);
        const bool hi_at_c = near(br.domain.hi, c);
        if (!lo_at_c) {
            BranchCheck chk;
            chk.branch = br;
            chk.law = "image reaches the left boundary";
            chk.error = std::abs(br.image.lo - a);
            chk.pass = chk.error <= tol.eps_value * 10.0;
            rep.checks.push_back(chk);
        }
        if (!hi_at_c) {
            BranchCheck chk;
            chk.branch = br;
            chk.law = "image reaches the right boundary";
            chk.error = std::abs(br.image.hi - b);
            chk.pass = chk.error <= tol.eps_value * 10.0;
            rep.checks.push_back(chk);
        }
        if (near(br.domain.lo, a)) {
            BranchCheck chk;
            chk.branch = br;
            chk.law = "adjacent boundary point is periodic with the return time";
            const double img = detail::push_limit(m, a, Side::Right, br.return_time,
                                                  tol.eps_critical);
            chk.error = std::abs(img - a);
            chk.pass = chk.error <= tol.eps_value * 10.0;
            rep.checks.push_back(chk);
        }
        if (near(br.domain.hi, b)) {
            BranchCheck chk;
            chk.branch = br;
            chk.law = "adjacent boundary point is periodic with the return time";
            const double img = detail::push_limit(m, b, Side::Left, br.return_time,
                                                  tol.eps_critical);
            chk.error = std::abs(img - b);
            chk.pass = chk.error <= tol.eps_value * 10.0;
            rep.checks.push_back(chk);
        }
    }
    for (const auto& chk : rep.checks) rep.all_pass = rep.all_pass && chk.pass;
    return rep;
}

// Periodic points of return branches marching toward each boundary of J: the
// sequences a_n -> a and b_n -> b whose orbits avoid (a_n, b), resp. (a, b_n).
// A periodic boundary yields the constant sequence.
template <LorenzSystem M>
std::pair<std::vector<double>, std::vector<double>> periodic_approximants(
    const M& m, const Interval& J, std::size_t k, std::size_t max_period,
    std::size_t horizon = 100000) {
    const Tolerances& tol = m.tol();
    ReturnMapDecomposition d = first_return(m, J, std::min(horizon, std::size_t(100000)));

    auto harvest = [&](bool toward_left) {
        std::vector<double> out;
        const double boundary = toward_left ? J.lo : J.hi;
        // boundary already periodic: constant sequence
        {
            double x = boundary;
            for (std::size_t j = 1; j <= max_period; ++j) {
                x = m.eval(x, toward_left ? Side::Right : Side::Left);
                if (std::abs(x - boundary) <= 10.0 * tol.eps_point) {
                    out.assign(k, boundary);
                    return out;
                }
            }
        }
        // orbit of a return branch with full image has a fixed point of f^R
        std::vector<const ReturnBranch*> order;
        for (const auto& br : d.branches) order.push_back(&br);
        std::sort(order.begin(), order.end(), [&](const ReturnBranch* x, const ReturnBranch* y) {
            return toward_left ? x->domain.lo < y->domain.lo : x->domain.hi > y->domain.hi;
        });
        for (const ReturnBranch* br : order) {
            if (out.size() >= k) break;
            if (br->return_time > max_period) continue;
            if (br->touches_critical) continue;
            // bisect f^R(x) - x over the branch
            double lo = br->domain.lo + br->domain.length() * 1e-6;
            double hi = br->domain.hi - br->domain.length() * 1e-6;
            auto g = [&](double x) {
                return detail::push_limit(m, x, Side::Left, br->return_time, 0.0) - x;
            };
            double glo = g(lo), ghi = g(hi);
            if ((glo < 0.0) == (ghi < 0.0)) continue;
            for (int it = 0; it < tol.max_bisect; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((g(mid) < 0.0) == (glo < 0.0)) lo = mid;
                else hi = mid;
            }
            const double p = 0.5 * (lo + hi);
            // verify the defining avoidance property up to the horizon
            const double wa = toward_left ? p : J.lo;
            const double wb = toward_left ? J.hi : p;
            if (detail::return_time(m, p, wa, wb, std::min(horizon, std::size_t(10000))) == 0)
                out.push_back(p);
        }
        if (out.empty())
            throw NoApproximantFound("no periodic approximant of period <= " +
                                     std::to_string(max_period));
        return out;
    };

    return {harvest(true), harvest(false)};
}

} // namespace lorenz
