#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/map.hpp"

namespace lorenz {

enum class Stability { Attracting, Repelling, Neutral, SuperAttractor };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::Attracting: return "attracting";
        case Stability::Repelling: return "repelling";
        case Stability::Neutral: return "neutral";
        case Stability::SuperAttractor: return "super-attractor";
    }
    return "?";
}

struct PeriodicOrbit {
    std::string itinerary;      // letters over {L,R}, letter k = side of points[k]
    std::vector<double> points; // in orbit order, points[0] is the smallest
    std::size_t period = 0;
    double multiplier = 0.0; // |Df^period| along the orbit
    Stability stability = Stability::Repelling;

    double min_point() const { return *std::min_element(points.begin(), points.end()); }
    bool intersects(double lo, double hi) const {
        for (double p : points)
            if (p > lo && p < hi) return true;
        return false;
    }
};

namespace detail {

// lexicographically minimal rotation (canonical representative of the cyclic word)
inline bool is_minimal_rotation(const std::vector<Side>& w) {
    const std::size_t n = w.size();
    for (std::size_t r = 1; r < n; ++r)
        for (std::size_t i = 0; i < n; ++i) {
            const Side a = w[i], b = w[(i + r) % n];
            if (a != b) {
                if (b < a) return false; // a later rotation is smaller
                break;
            }
        }
    return true;
}

inline bool is_primitive(const std::vector<Side>& w) {
    const std::size_t n = w.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d) continue;
        bool rep = true;
        for (std::size_t i = d; i < n && rep; ++i) rep = w[i] == w[i % d];
        if (rep) return false;
    }
    return true;
}

// Backward propagation of the maximal domain on which the branch composition
// f_w is defined and monotone. Returns false when the domain is empty.
template <LorenzSystem M>
bool word_domain(const M& m, const std::vector<Side>& w, double& lo, double& hi) {
    const double c = m.critical();
    const Tolerances& tol = m.tol();
    double klo = 0.0, khi = 1.0; // constraint interval carried backwards
    for (std::size_t j = w.size(); j-- > 0;) {
        const Side s = w[j];
        const double dlo = (s == Side::Left) ? 0.0 : c;
        const double dhi = (s == Side::Left) ? c : 1.0;
        const double ylo = std::max(klo, m.eval(dlo, Side::Right));
        const double yhi = std::min(khi, m.eval(dhi, Side::Left));
        if (ylo >= yhi) return false;
        klo = std::max(dlo, m.invert(s, ylo));
        khi = std::min(dhi, m.invert(s, yhi));
        if (khi - klo <= tol.eps_critical) return false;
    }
    lo = klo;
    hi = khi;
    return true;
}

template <LorenzSystem M>
double apply_word(const M& m, const std::vector<Side>& w, double x) {
    for (Side s : w) x = m.eval(x, s);
    return x;
}

} // namespace detail

struct PeriodicOrbitScan {
    std::vector<PeriodicOrbit> orbits; // sorted by (period, min point)
    bool truncated = false;            // word-tree budget was hit
    std::vector<PeriodicOrbit> super_attractors() const {
        std::vector<PeriodicOrbit> out;
        for (const auto& o : orbits)
            if (o.stability == Stability::SuperAttractor) out.push_back(o);
        return out;
    }
    std::vector<PeriodicOrbit> attractors() const {
        std::vector<PeriodicOrbit> out;
        for (const auto& o : orbits)
            if (o.stability == Stability::Attracting ||
                o.stability == Stability::SuperAttractor)
                out.push_back(o);
        return out;
    }
};

// Itinerary search for all periodic orbits of period <= max_period: one domain
// propagation and root scan per canonical primitive word, then point-set
// deduplication. The fixed points 0 and 1 are structural and always reported.
template <LorenzSystem M>
PeriodicOrbitScan periodic_orbits(const M& m, std::size_t max_period,
                                  std::size_t word_budget = 1u << 22) {
    PeriodicOrbitScan scan;
    const double c = m.critical();
    const Tolerances& tol = m.tol();

    std::vector<std::vector<double>> found_sets; // sorted point sets, for dedup

    auto classify = [&](const std::vector<double>& pts, double mult) {
        for (double p : pts)
            if (std::abs(p - c) <= tol.eps_critical) return Stability::SuperAttractor;
        if (mult < 1.0 - tol.eps_value) return Stability::Attracting;
        if (mult > 1.0 + tol.eps_value) return Stability::Repelling;
        return Stability::Neutral;
    };

    auto add_orbit = [&](double x0, std::size_t n) {
        std::vector<double> pts;
        pts.reserve(n);
        double x = x0;
        for (std::size_t k = 0; k < n; ++k) {
            pts.push_back(x);
            x = m.eval(x, side_of(m, x));
        }
        if (std::abs(x - x0) > 10.0 * tol.eps_value) return; // failed closure
        std::vector<double> key = pts;
        std::sort(key.begin(), key.end());
        for (const auto& k : found_sets) {
            if (k.size() != key.size()) continue;
            bool same = true;
            for (std::size_t i = 0; i < k.size() && same; ++i)
                same = std::abs(k[i] - key[i]) <= 100.0 * tol.eps_point;
            if (same) return;
        }
        found_sets.push_back(key);

        // rotate so the smallest point comes first
        const std::size_t imin = static_cast<std::size_t>(
            std::min_element(pts.begin(), pts.end()) - pts.begin());
        std::rotate(pts.begin(), pts.begin() + imin, pts.end());

        PeriodicOrbit orb;
        orb.points = pts;
        orb.period = n;
        double mult = 1.0;
        for (double p : pts) {
            orb.itinerary.push_back(p < c ? 'L' : 'R');
            if (std::abs(p - c) > tol.eps_critical)
                mult *= std::abs(m.derivative1(p));
            else
                mult = 0.0;
        }
        orb.multiplier = mult;
        orb.stability = classify(pts, mult);
        scan.orbits.push_back(std::move(orb));
    };

    // structural fixed points
    add_orbit(0.0, 1);
    add_orbit(1.0, 1);

    // super-attractors: a critical orbit that returns to c within max_period;
    // {c, f(c_s), ..., f^{k-1}(c_s)} cycles with period k when f^k(c_s) = c
    for (Side s : {Side::Left, Side::Right}) {
        double x = m.eval(c, s); // f^1(c_s)
        for (std::size_t k = 1; k <= max_period; ++k) {
            if (std::abs(x - c) <= tol.eps_critical) {
                PeriodicOrbit orb;
                orb.period = k;
                double y = c;
                for (std::size_t j = 0; j < k; ++j) {
                    orb.points.push_back(y);
                    orb.itinerary.push_back(j == 0 ? (s == Side::Left ? 'L' : 'R')
                                                   : (y < c ? 'L' : 'R'));
                    y = m.eval(y, j == 0 ? s : side_of(m, y));
                }
                orb.multiplier = 0.0;
                orb.stability = Stability::SuperAttractor;
                scan.orbits.push_back(std::move(orb));
                break;
            }
            x = m.eval(x, side_of(m, x));
        }
    }

    std::size_t budget = word_budget;
    std::vector<Side> w;
    for (std::size_t n = 1; n <= max_period && !scan.truncated; ++n) {
        w.assign(n, Side::Left);
        // enumerate all binary words of length n via counter
        const std::uint64_t total = 1ull << n;
        for (std::uint64_t code = 0; code < total; ++code) {
            for (std::size_t i = 0; i < n; ++i)
                w[i] = (code >> (n - 1 - i)) & 1 ? Side::Right : Side::Left;
            if (!detail::is_minimal_rotation(w) || !detail::is_primitive(w)) continue;
            if (budget-- == 0) {
                scan.truncated = true;
                break;
            }
            double lo, hi;
            if (!detail::word_domain(m, w, lo, hi)) continue;

            // endpoint roots first (branch boundaries are often periodic)
            for (double e : {lo, hi}) {
                const double img = detail::apply_word(m, w, e);
                if (std::abs(img - e) <= 10.0 * tol.eps_point) add_orbit(e, n);
            }
            // 64-point pre-scan for interior sign changes, leftmost first
            constexpr int kScan = 64;
            double px = lo, pv = detail::apply_word(m, w, lo) - lo;
            for (int i = 1; i <= kScan; ++i) {
                const double x = lo + (hi - lo) * i / kScan;
                const double v = detail::apply_word(m, w, x) - x;
                if (v == 0.0) add_orbit(x, n);
                if ((pv < 0.0) != (v < 0.0) && pv != 0.0 && v != 0.0) {
                    double a = px, b = x;
                    bool alo = pv < 0.0;
                    for (int it = 0; it < m.tol().max_bisect; ++it) {
                        const double mid = 0.5 * (a + b);
                        const bool neg = detail::apply_word(m, w, mid) - mid < 0.0;
                        if (neg == alo) a = mid;
                        else b = mid;
                    }
                    add_orbit(0.5 * (a + b), n);
                }
                px = x;
                pv = v;
            }
        }
    }

    std::sort(scan.orbits.begin(), scan.orbits.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
                  if (a.period != b.period) return a.period < b.period;
                  return a.min_point() < b.min_point();
              });
    return scan;
}

struct MinimalPeriodResult {
    PeriodicOrbit orbit;
    bool unique = true;            // variational-principle uniqueness, checked empirically
    std::size_t competitors = 0;   // other minimal-period orbits meeting the window
};

// Minimal-period periodic orbit intersecting the one-sided window (c-eps, c)
// or (c, c+eps).
template <LorenzSystem M>
MinimalPeriodResult minimal_period_orbit(const M& m, Side side, double eps,
                                         std::size_t max_period) {
    const double c = m.critical();
    const double lo = side == Side::Left ? c - eps : c;
    const double hi = side == Side::Left ? c : c + eps;
    PeriodicOrbitScan scan = periodic_orbits(m, max_period);
    const PeriodicOrbit* best = nullptr;
    std::size_t competitors = 0;
    for (const auto& o : scan.orbits) {
        if (!o.intersects(lo, hi)) continue;
        if (!best || o.period < best->period) {
            best = &o;
            competitors = 0;
        } else if (o.period == best->period) {
            ++competitors;
        }
    }
    if (!best)
        throw NoPeriodicOrbitInWindow("no periodic orbit of period <= " +
                                      std::to_string(max_period) + " meets the window");
    return {*best, competitors == 0, competitors};
}

} // namespace lorenz
