#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace lorenz {

// Closed/open flags are carried for reporting; interval arithmetic below treats
// intervals as their closures and resolves boundary questions with tolerances.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool closed_lo = false;
    bool closed_hi = false;

    Interval() = default;
    Interval(double l, double h, bool cl = false, bool ch = false)
        : lo(l), hi(h), closed_lo(cl), closed_hi(ch) {}

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool degenerate(double eps = 0.0) const { return hi - lo <= eps; }

    bool contains(double x, double eps = 0.0) const { return x > lo - eps && x < hi + eps; }
    bool strictly_contains(double x, double eps = 0.0) const {
        return x > lo + eps && x < hi - eps;
    }
    bool contains_interval(const Interval& o, double eps = 0.0) const {
        return o.lo >= lo - eps && o.hi <= hi + eps;
    }
    // closure(o) inside the open interior of *this
    bool strictly_contains_interval(const Interval& o, double eps = 0.0) const {
        return o.lo > lo + eps && o.hi < hi - eps;
    }
    bool overlaps(const Interval& o, double eps = 0.0) const {
        return std::max(lo, o.lo) < std::min(hi, o.hi) - eps;
    }

    static Interval open(double l, double h) { return Interval(l, h, false, false); }
    static Interval closed(double l, double h) { return Interval(l, h, true, true); }
};

// Two open intervals are linked if each contains exactly one boundary point of
// the other; nested or disjoint pairs are not linked.
inline bool linked(const Interval& p, const Interval& q, double eps = 0.0) {
    const bool p_in_q = q.strictly_contains(p.lo, eps) != q.strictly_contains(p.hi, eps);
    const bool q_in_p = p.strictly_contains(q.lo, eps) != p.strictly_contains(q.hi, eps);
    return p_in_q && q_in_p;
}

// Finite grid cover of [0,1]: the canonical desk-scale stand-in for omega/alpha
// limit sets and attractor supports. Stored as sorted disjoint cell runs.
class IntervalCover {
public:
    IntervalCover() = default;
    explicit IntervalCover(std::uint32_t grid) : grid_(grid) {}

    std::uint32_t grid_size() const { return grid_; }

    std::uint32_t cell_of(double x) const {
        if (x <= 0.0) return 0;
        if (x >= 1.0) return grid_ - 1;
        auto k = static_cast<std::uint32_t>(x * grid_);
        return k >= grid_ ? grid_ - 1 : k;
    }

    void mark(double x) { cells_.push_back(cell_of(x)); dirty_ = true; }
    void mark_cell(std::uint32_t k) { cells_.push_back(k); dirty_ = true; }
    void mark_interval(double lo, double hi) {
        if (hi < lo) std::swap(lo, hi);
        const std::uint32_t a = cell_of(lo), b = cell_of(hi);
        for (std::uint32_t k = a; k <= b; ++k) cells_.push_back(k);
        dirty_ = true;
    }

    void normalize() const {
        if (!dirty_) return;
        auto& c = const_cast<std::vector<std::uint32_t>&>(cells_);
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        const_cast<bool&>(dirty_) = false;
    }

    std::size_t cell_count() const { normalize(); return cells_.size(); }
    double fraction() const { return grid_ ? double(cell_count()) / grid_ : 0.0; }
    bool empty() const { return cell_count() == 0; }

    bool contains_cell(std::uint32_t k) const {
        normalize();
        return std::binary_search(cells_.begin(), cells_.end(), k);
    }
    bool contains_point(double x) const { return contains_cell(cell_of(x)); }

    const std::vector<std::uint32_t>& cells() const { normalize(); return cells_; }

    // merged runs of occupied cells, as subintervals of [0,1]
    std::vector<Interval> intervals() const {
        normalize();
        std::vector<Interval> out;
        const double w = 1.0 / grid_;
        std::size_t i = 0;
        while (i < cells_.size()) {
            std::size_t j = i;
            while (j + 1 < cells_.size() && cells_[j + 1] == cells_[j] + 1) ++j;
            out.emplace_back(cells_[i] * w, (cells_[j] + 1) * w, true, true);
            i = j + 1;
        }
        return out;
    }

    // uncovered runs strictly between the first and last occupied cell
    std::vector<Interval> interior_gaps() const {
        normalize();
        std::vector<Interval> out;
        const double w = 1.0 / grid_;
        for (std::size_t i = 0; i + 1 < cells_.size(); ++i)
            if (cells_[i + 1] > cells_[i] + 1)
                out.emplace_back((cells_[i] + 1) * w, cells_[i + 1] * w, false, false);
        return out;
    }

    // set operations (covers must share the grid)
    static IntervalCover unite(const IntervalCover& a, const IntervalCover& b) {
        IntervalCover r(a.grid_);
        r.cells_ = a.cells();
        r.cells_.insert(r.cells_.end(), b.cells().begin(), b.cells().end());
        r.dirty_ = true;
        return r;
    }
    static IntervalCover intersect(const IntervalCover& a, const IntervalCover& b) {
        IntervalCover r(a.grid_);
        std::set_intersection(a.cells().begin(), a.cells().end(), b.cells().begin(),
                              b.cells().end(), std::back_inserter(r.cells_));
        return r;
    }
    // every cell of *this within `margin` cells of some cell of `other`
    bool subset_of(const IntervalCover& other, std::uint32_t margin = 0) const {
        normalize();
        other.normalize();
        for (auto k : cells_) {
            bool ok = false;
            for (std::int64_t d = -static_cast<std::int64_t>(margin);
                 d <= static_cast<std::int64_t>(margin) && !ok; ++d) {
                const std::int64_t q = static_cast<std::int64_t>(k) + d;
                if (q >= 0 && q < static_cast<std::int64_t>(grid_))
                    ok = other.contains_cell(static_cast<std::uint32_t>(q));
            }
            if (!ok) return false;
        }
        return true;
    }

private:
    std::uint32_t grid_ = 4096;
    std::vector<std::uint32_t> cells_;
    bool dirty_ = false;
};

} // namespace lorenz
