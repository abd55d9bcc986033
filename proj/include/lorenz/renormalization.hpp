#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/interval.hpp"
#include "lorenz/map.hpp"
#include "lorenz/orbit.hpp"
#include "lorenz/periodic.hpp"
#include "lorenz/return_map.hpp"

namespace lorenz {

// Type-erased handle to any LorenzSystem; lets renormalized views nest to
// arbitrary depth while the generic kernels stay templated.
class SystemHandle {
    struct Iface {
        virtual ~Iface() = default;
        virtual double eval(double x, Side s) const = 0;
        virtual double critical() const = 0;
        virtual double derivative1(double x) const = 0;
        virtual double invert(Side s, double y) const = 0;
        virtual const Tolerances& tol() const = 0;
    };
    template <LorenzSystem M>
    struct Impl final : Iface {
        M m;
        explicit Impl(M mm) : m(std::move(mm)) {}
        double eval(double x, Side s) const override { return m.eval(x, s); }
        double critical() const override { return m.critical(); }
        double derivative1(double x) const override { return m.derivative1(x); }
        double invert(Side s, double y) const override { return m.invert(s, y); }
        const Tolerances& tol() const override { return m.tol(); }
    };
    std::shared_ptr<const Iface> p_;

public:
    template <LorenzSystem M>
    explicit SystemHandle(M m) : p_(std::make_shared<Impl<M>>(std::move(m))) {}

    double eval(double x, Side s = Side::Left) const { return p_->eval(x, s); }
    double critical() const { return p_->critical(); }
    double derivative1(double x) const { return p_->derivative1(x); }
    double invert(Side s, double y) const { return p_->invert(s, y); }
    const Tolerances& tol() const { return p_->tol(); }
};
static_assert(LorenzSystem<SystemHandle>);

// One verified renormalization interval. Coordinates refer to the system the
// record was detected on; period_a/period_b are the boundary periods under
// that system, and the rescale is A(x) = a + (b-a) x.
struct RenormalizationRecord {
    Interval J;
    std::size_t period_a = 0; // l
    std::size_t period_b = 0; // r
    double rescale_offset = 0.0;
    double rescale_scale = 1.0;

    double rescale(double x) const { return rescale_offset + rescale_scale * x; }
    double rescale_inv(double x) const { return (x - rescale_offset) / rescale_scale; }
};

// The rescaled first-return map g = A^{-1} o f^{l or r} o A on [0,1] minus its
// critical point (c - a)/(b - a). Evaluates through the parent system.
class RenormalizedView {
public:
    RenormalizedView(SystemHandle parent, RenormalizationRecord rec)
        : parent_(std::move(parent)), rec_(std::move(rec)),
          c_((parent_.critical() - rec_.J.lo) / rec_.J.length()) {}

    double critical() const { return c_; }
    const Tolerances& tol() const { return parent_.tol(); }
    const RenormalizationRecord& record() const { return rec_; }
    const SystemHandle& parent() const { return parent_; }

    double eval(double x, Side side = Side::Left) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        const double a = rec_.J.lo, len = rec_.J.length();
        double y;
        std::size_t steps;
        if (std::abs(x - c_) <= tol().eps_critical) {
            y = parent_.eval(parent_.critical(), side);
            steps = (side == Side::Left ? rec_.period_a : rec_.period_b) - 1;
        } else {
            y = parent_.eval(a + len * x, side);
            steps = (x < c_ ? rec_.period_a : rec_.period_b) - 1;
        }
        for (std::size_t j = 0; j < steps; ++j) y = parent_.eval(y, side);
        return (y - a) / len;
    }

    // chain rule through the parent composition; the affine rescale cancels
    double derivative1(double x) const {
        if (std::abs(x - c_) <= tol().eps_critical) throw CriticalPointDerivative(x);
        const double a = rec_.J.lo, len = rec_.J.length();
        const std::size_t steps = x < c_ ? rec_.period_a : rec_.period_b;
        double y = a + len * x;
        double d = 1.0;
        for (std::size_t j = 0; j < steps; ++j) {
            d *= parent_.derivative1(y);
            y = parent_.eval(y, x < c_ ? Side::Left : Side::Right);
        }
        return d;
    }

    double invert(Side side, double y) const {
        double lo = side == Side::Left ? 0.0 : c_;
        double hi = side == Side::Left ? c_ : 1.0;
        const double ylo = eval(lo, Side::Right), yhi = eval(hi, Side::Left);
        if (y < ylo - tol().eps_value || y > yhi + tol().eps_value)
            throw ValueOutsideBranchImage(y, ylo, yhi);
        for (int i = 0; i < tol().max_bisect; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (eval(mid, side == Side::Left ? Side::Left : Side::Right) < y) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    SystemHandle parent_;
    RenormalizationRecord rec_;
    double c_;
};
static_assert(LorenzSystem<RenormalizedView>);

namespace detail {

// boundary orbit of a periodic point stays out of the open interval for one
// full cycle (then it repeats)
template <LorenzSystem M>
bool cycle_avoids(const M& m, double p, std::size_t period, const Interval& J) {
    double x = p;
    const double eps = m.tol().eps_point;
    for (std::size_t j = 0; j < period; ++j) {
        x = m.eval(x, side_of(m, x));
        if (x > J.lo + eps && x < J.hi - eps) return false;
    }
    return true;
}

template <LorenzSystem M>
bool inclusion_sweep(const M& m, double from, double to, Side side, std::size_t steps,
                     const Interval& J, std::size_t samples = 1000) {
    const double slack = m.tol().eps_value;
    for (std::size_t i = 0; i <= samples; ++i) {
        double x = from + (to - from) * double(i) / double(samples);
        double y = x;
        for (std::size_t j = 0; j < steps; ++j)
            y = near_critical(m, y) ? m.eval(m.critical(), side) : m.eval(y, side);
        if (y < J.lo - slack || y > J.hi + slack) return false;
    }
    return true;
}

} // namespace detail

// Renormalization detection via the boundary-period equivalences: J = (a,b)
// with a, b periodic (repelling), J nice, and f^{period(a)}([a,c)) and
// f^{period(b)}((c,b]) inside [a,b]. Candidates come from the periodic-orbit
// scan, nearest the critical point first.
template <LorenzSystem M>
std::vector<RenormalizationRecord> detect_renormalization(const M& m, std::size_t max_period,
                                                          std::size_t horizon = 0) {
    (void)horizon; // periodic boundaries need only one verified cycle
    const double c = m.critical();
    const Tolerances& tol = m.tol();
    PeriodicOrbitScan scan = periodic_orbits(m, max_period);

    // Only an orbit's largest point below c can be a left boundary (any other
    // orbit point in (a, c] would sit inside the interval), and symmetrically
    // on the right; the opposite-side extremes give O(1) niceness pre-checks.
    struct OrbitSummary {
        double amax = -1.0;    // largest orbit point < c
        double bmin = 2.0;     // smallest orbit point > c
        std::size_t period = 0;
    };
    std::vector<OrbitSummary> orbs;
    for (const auto& o : scan.orbits) {
        if (o.stability != Stability::Repelling) continue;
        OrbitSummary s;
        s.period = o.period;
        for (double p : o.points) {
            if (p < c - tol.eps_point) s.amax = std::max(s.amax, p);
            else if (p > c + tol.eps_point) s.bmin = std::min(s.bmin, p);
        }
        orbs.push_back(s);
    }

    // one-sided critical-value orbits, tabled once: f^j(c-) and f^j(c+)
    std::vector<double> lval(max_period + 1), rval(max_period + 1);
    {
        SignedPoint pl(c, Side::Left), pr(c, Side::Right);
        for (std::size_t j = 1; j <= max_period; ++j) {
            pl = step(m, pl);
            pr = step(m, pr);
            lval[j] = pl.x;
            rval[j] = pr.x;
        }
    }

    std::vector<RenormalizationRecord> records;
    for (const OrbitSummary& A : orbs) {
        if (A.amax < 0.0) continue;
        const double a = A.amax;
        for (const OrbitSummary& B : orbs) {
            if (B.bmin > 1.0) continue;
            const double b = B.bmin;
            if (a <= tol.eps_point && b >= 1.0 - tol.eps_point)
                continue; // the whole interval is not a proper renormalization
            // niceness from the orbit extremes: a cycle avoids (a,b) exactly
            // when its below-c points stay <= a and its above-c points >= b
            if (A.bmin < b - tol.eps_point) continue;
            if (B.amax > a + tol.eps_point) continue;
            // O(1) critical-value probes before the full sweep
            if (lval[A.period] < a - tol.eps_value || lval[A.period] > b + tol.eps_value)
                continue;
            if (rval[B.period] < a - tol.eps_value || rval[B.period] > b + tol.eps_value)
                continue;
            const Interval J(a, b);
            if (!detail::inclusion_sweep(m, a, c - tol.eps_critical, Side::Left, A.period, J))
                continue;
            if (!detail::inclusion_sweep(m, b, c + tol.eps_critical, Side::Right, B.period, J))
                continue;
            RenormalizationRecord rec;
            rec.J = J;
            rec.period_a = A.period;
            rec.period_b = B.period;
            rec.rescale_offset = a;
            rec.rescale_scale = J.length();
            records.push_back(rec);
        }
    }
    // drop duplicates (distinct orbit pairs can propose the same interval)
    std::sort(records.begin(), records.end(),
              [](const RenormalizationRecord& a, const RenormalizationRecord& b) {
                  if (a.J.lo != b.J.lo) return a.J.lo < b.J.lo;
                  return a.J.hi < b.J.hi;
              });
    records.erase(std::unique(records.begin(), records.end(),
                              [&](const RenormalizationRecord& a,
                                  const RenormalizationRecord& b) {
                                  return std::abs(a.J.lo - b.J.lo) <= tol.eps_point &&
                                         std::abs(a.J.hi - b.J.hi) <= tol.eps_point;
                              }),
                  records.end());
    std::sort(records.begin(), records.end(),
              [](const RenormalizationRecord& a, const RenormalizationRecord& b) {
                  return a.J.length() > b.J.length();
              });
    return records;
}

// Re-verify a record and hand out the rescaled return-map view.
template <LorenzSystem M>
RenormalizedView renormalize(const M& m, const RenormalizationRecord& rec) {
    const double c = m.critical();
    const Tolerances& tol = m.tol();
    const bool ok =
        detail::cycle_avoids(m, rec.J.lo, rec.period_a, rec.J) &&
        detail::cycle_avoids(m, rec.J.hi, rec.period_b, rec.J) &&
        detail::inclusion_sweep(m, rec.J.lo, c - tol.eps_critical, Side::Left,
                                rec.period_a, rec.J) &&
        detail::inclusion_sweep(m, rec.J.hi, c + tol.eps_critical, Side::Right,
                                rec.period_b, rec.J);
    if (!ok) throw RecordInvalid("renormalization record fails its inclusion re-check");
    return RenormalizedView(SystemHandle(m), rec);
}

// Renormalization cycle U_J, the sampled never-entering set Lambda_J, and the
// nice trapping region K_J assembled from its gaps.
struct CycleSets {
    std::vector<Interval> U_J;
    std::vector<Interval> K_J;
    IntervalCover lambda_sample;
};

template <LorenzSystem M>
CycleSets cycle_sets(const M& m, const RenormalizationRecord& rec, std::size_t sample_budget,
                     std::size_t horizon = 2000, std::uint32_t grid = 4096) {
    (void)renormalize(m, rec); // RecordInvalid on failure
    const double c = m.critical();
    CycleSets out;

    // forward images of the two halves, split at c where they straddle
    std::vector<Interval> acc;
    for (Side s : {Side::Left, Side::Right}) {
        const Interval half = s == Side::Left ? Interval(rec.J.lo, c) : Interval(c, rec.J.hi);
        const std::size_t reps = s == Side::Left ? rec.period_a : rec.period_b;
        std::vector<Interval> cur{half};
        acc.push_back(half);
        for (std::size_t i = 1; i <= reps; ++i) {
            cur = interval_set_image(m, cur);
            for (const auto& iv : cur) acc.push_back(iv);
        }
    }
    // cycle components share periodic endpoints but stay disjoint as open sets
    out.U_J = merge_overlapping(std::move(acc), -m.tol().eps_point);

    // sampled Lambda_J: orbits that never meet the open interval J. The
    // boundary cycle survives by definition and is inserted exactly; grid
    // samples alone can miss the thin invariant dust between cycle pieces.
    out.lambda_sample = IntervalCover(grid);
    std::vector<double> survivors;
    for (Side s : {Side::Left, Side::Right}) {
        double p = s == Side::Left ? rec.J.lo : rec.J.hi;
        const std::size_t per = s == Side::Left ? rec.period_a : rec.period_b;
        for (std::size_t j = 0; j < per; ++j) {
            survivors.push_back(p);
            p = m.eval(p, side_of(m, p));
        }
    }
    for (std::size_t i = 0; i <= sample_budget; ++i) {
        const double x = double(i) / double(sample_budget);
        if (x > rec.J.lo && x < rec.J.hi) continue;
        double y = x;
        bool enters = false;
        for (std::size_t j = 0; j < horizon && !enters; ++j) {
            y = m.eval(y, Side::Left);
            enters = y > rec.J.lo && y < rec.J.hi;
        }
        if (!enters) survivors.push_back(x);
    }
    std::sort(survivors.begin(), survivors.end());
    for (double s : survivors) out.lambda_sample.mark(s);
    out.lambda_sample.normalize();

    // gaps of the sampled survivor set that contain a cycle component
    std::vector<Interval> gaps;
    double prev = 0.0;
    for (double s : survivors) {
        if (s - prev > 0.0) gaps.emplace_back(prev, s);
        prev = s;
    }
    if (prev < 1.0) gaps.emplace_back(prev, 1.0);
    for (const Interval& g : gaps)
        for (const Interval& u : out.U_J)
            if (g.contains(u.midpoint())) {
                out.K_J.push_back(g);
                break;
            }
    return out;
}

struct TowerLevel {
    RenormalizationRecord record_local; // coordinates of the level's own view
    RenormalizationRecord record;       // rescaled to original coordinates
    std::size_t f_period_a = 0;         // boundary periods under the original map
    std::size_t f_period_b = 0;
    std::vector<Interval> K_J;          // original coordinates
};

struct RenormTower {
    std::vector<TowerLevel> levels; // strictly nested, outermost first
    bool depth_limit_hit = false;
    std::optional<IntervalCover> solenoid_cover; // intersection of the K covers
    std::optional<SystemHandle> deepest_view;    // view after the last record

    std::size_t depth() const { return levels.size(); }
};

// Pairwise nesting law: two distinct renormalization intervals never link and
// never share a boundary point.
inline void verify_non_linking(const std::vector<Interval>& js, double eps) {
    for (std::size_t i = 0; i < js.size(); ++i)
        for (std::size_t j = i + 1; j < js.size(); ++j) {
            const Interval &p = js[i], &q = js[j];
            const bool identical =
                std::abs(p.lo - q.lo) <= eps && std::abs(p.hi - q.hi) <= eps;
            if (identical) continue;
            const bool p_in_q = q.strictly_contains_interval(p, eps);
            const bool q_in_p = p.strictly_contains_interval(q, eps);
            if (!p_in_q && !q_in_p)
                throw LinkedIntervalsDetected(p.lo, p.hi, q.lo, q.hi);
        }
}

// Tower construction: repeatedly detect the widest proper renormalization
// interval of the current view, rescale, and recurse. Records are mapped back
// to original coordinates with their boundary periods under the original map.
template <LorenzSystem M>
RenormTower build_tower(const M& m, std::size_t max_depth, std::size_t max_period,
                        std::size_t lambda_budget = 4096, std::size_t lambda_horizon = 2000,
                        std::uint32_t grid = 4096) {
    RenormTower tower;
    SystemHandle cur{m};
    double off = 0.0, scale = 1.0;

    for (std::size_t depth = 0; depth < max_depth; ++depth) {
        auto recs = detect_renormalization(cur, max_period);
        if (recs.empty()) {
            tower.deepest_view = cur;
            return finish_tower(m, tower, grid);
        }
        const RenormalizationRecord local = recs.front();

        TowerLevel lvl;
        lvl.record_local = local;
        lvl.record.J = Interval(off + scale * local.J.lo, off + scale * local.J.hi);
        lvl.record.rescale_offset = lvl.record.J.lo;
        lvl.record.rescale_scale = lvl.record.J.length();
        lvl.record.period_a = local.period_a;
        lvl.record.period_b = local.period_b;
        lvl.f_period_a = original_period(m, lvl.record.J.lo, max_period << (depth + 1));
        lvl.f_period_b = original_period(m, lvl.record.J.hi, max_period << (depth + 1));

        // trapping region of this level in original coordinates
        RenormalizationRecord orec = lvl.record;
        orec.period_a = lvl.f_period_a;
        orec.period_b = lvl.f_period_b;
        if (orec.period_a && orec.period_b) {
            CycleSets cs = cycle_sets(m, orec, lambda_budget, lambda_horizon, grid);
            lvl.K_J = cs.K_J;
        }

        tower.levels.push_back(std::move(lvl));
        cur = SystemHandle(RenormalizedView(cur, local));
        off = off + scale * local.J.lo;
        scale = scale * local.J.length();
    }
    tower.depth_limit_hit = true;
    tower.deepest_view = cur;
    return finish_tower(m, tower, grid);
}

namespace detail_tower {
inline IntervalCover cover_of(const std::vector<Interval>& ivs, std::uint32_t grid) {
    IntervalCover c(grid);
    for (const auto& iv : ivs) c.mark_interval(iv.lo, iv.hi);
    c.normalize();
    return c;
}
} // namespace detail_tower

template <LorenzSystem M>
std::size_t original_period(const M& m, double p, std::size_t bound) {
    double x = p;
    for (std::size_t j = 1; j <= bound; ++j) {
        x = m.eval(x, side_of(m, x));
        if (std::abs(x - p) <= 100.0 * m.tol().eps_point) return j;
    }
    return 0;
}

template <LorenzSystem M>
RenormTower finish_tower(const M& m, RenormTower& tower, std::uint32_t grid) {
    std::vector<Interval> js;
    for (const auto& lvl : tower.levels) js.push_back(lvl.record.J);
    verify_non_linking(js, m.tol().eps_point);
    for (std::size_t i = 0; i + 1 < js.size(); ++i)
        if (!js[i].strictly_contains_interval(js[i + 1], 0.0))
            throw LinkedIntervalsDetected(js[i].lo, js[i].hi, js[i + 1].lo, js[i + 1].hi);
    if (tower.levels.size() >= 2) {
        IntervalCover inter = detail_tower::cover_of(tower.levels.front().K_J, grid);
        for (std::size_t i = 1; i < tower.levels.size(); ++i)
            inter = IntervalCover::intersect(inter,
                                             detail_tower::cover_of(tower.levels[i].K_J, grid));
        tower.solenoid_cover = inter;
    }
    return std::move(tower);
}

} // namespace lorenz
