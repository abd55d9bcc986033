#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/interval.hpp"

namespace lorenz {

// Approach side at the critical point: Left realizes the limit from below
// (critical value v1), Right the limit from above (v0).
enum class Side : int { Left = 0, Right = 1 };

inline Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

// A point of [0,1] tagged with an approach side. The side only matters on the
// critical orbit; elsewhere both sides agree.
struct SignedPoint {
    double x = 0.0;
    Side side = Side::Left;

    SignedPoint() = default;
    SignedPoint(double x_, Side s = Side::Left) : x(x_), side(s) {}
};

struct Tolerances {
    double eps_point = 1e-10;    // point identity
    double eps_critical = 1e-12; // treat-as-critical band around c
    double eps_value = 1e-9;     // image comparisons
    int max_bisect = 80;         // branch-inversion iterations

    bool valid() const {
        return eps_point > 0 && eps_critical > 0 && eps_value > 0 && max_bisect > 0 &&
               eps_critical <= eps_point;
    }
};

struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    bool valid = false;
    std::vector<Violation> violations;
    // recorded for valid maps
    double left_critical_value = 0.0;  // v1 = f(c-)
    double right_critical_value = 0.0; // v0 = f(c+)
    bool derivative_vanishes_at_critical = false;
};

// The standard contracting Lorenz family with affine scalings:
//   f(x) = v1 * (1 - ((c-x)/c)^alpha)            on [0, c)
//   f(x) = v0 + (1-v0) * ((x-c)/(1-c))^beta      on (c, 1]
// Fixes 0 and 1, has one-sided critical values v1, v0, and one-sided
// derivative 0 at c for alpha, beta > 1. Immutable after construction.
class StandardLorenzMap {
public:
    StandardLorenzMap(double c, double alpha, double beta, double v1, double v0,
                      Tolerances tol = {})
        : c_(c), alpha_(alpha), beta_(beta), v1_(v1), v0_(v0), tol_(tol) {}

    double c() const { return c_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double v1() const { return v1_; }
    double v0() const { return v0_; }

    double critical() const { return c_; }
    const Tolerances& tol() const { return tol_; }

    // one-sided evaluation; endpoints are pinned exactly
    double eval(double x, Side side = Side::Left) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        const double d = x - c_;
        if (d < -tol_.eps_critical)
            return v1_ * (1.0 - std::pow((c_ - x) / c_, alpha_));
        if (d > tol_.eps_critical)
            return v0_ + (1.0 - v0_) * std::pow((x - c_) / (1.0 - c_), beta_);
        return side == Side::Left ? v1_ : v0_;
    }
    double eval(SignedPoint p) const { return eval(p.x, p.side); }

    // closed-form derivative of the active branch; order 1, 2 or 3
    double derivative(double x, int order = 1) const {
        if (std::abs(x - c_) < tol_.eps_critical) throw CriticalPointDerivative(x);
        if (x < c_) {
            const double u = (c_ - x) / c_;
            switch (order) {
                case 1: return v1_ * alpha_ / c_ * std::pow(u, alpha_ - 1.0);
                case 2:
                    return -v1_ * alpha_ * (alpha_ - 1.0) / (c_ * c_) *
                           std::pow(u, alpha_ - 2.0);
                case 3:
                    return v1_ * alpha_ * (alpha_ - 1.0) * (alpha_ - 2.0) /
                           (c_ * c_ * c_) * std::pow(u, alpha_ - 3.0);
            }
        } else {
            const double q = 1.0 - c_, w = (x - c_) / q, s = 1.0 - v0_;
            switch (order) {
                case 1: return s * beta_ / q * std::pow(w, beta_ - 1.0);
                case 2: return s * beta_ * (beta_ - 1.0) / (q * q) * std::pow(w, beta_ - 2.0);
                case 3:
                    return s * beta_ * (beta_ - 1.0) * (beta_ - 2.0) / (q * q * q) *
                           std::pow(w, beta_ - 3.0);
            }
        }
        throw Error("derivative order must be 1, 2 or 3");
    }

    // first derivative, the hot-path spelling used by generic kernels
    double derivative1(double x) const { return derivative(x, 1); }

    // Sf = D3f/Df - 3/2 (D2f/Df)^2 from the closed-form derivatives
    double schwarzian(double x) const {
        const double d1 = derivative(x, 1);
        const double d2 = derivative(x, 2);
        const double d3 = derivative(x, 3);
        const double r = d2 / d1;
        return d3 / d1 - 1.5 * r * r;
    }

    // closed image of a branch
    Interval branch_image(Side side) const {
        return side == Side::Left ? Interval::closed(0.0, v1_) : Interval::closed(v0_, 1.0);
    }
    Interval branch_domain(Side side) const {
        return side == Side::Left ? Interval(0.0, c_, true, false)
                                  : Interval(c_, 1.0, false, true);
    }

    // Monotone bisection inversion refined to eps_point; returns c when y is
    // the branch's critical value. Newton is useless here (Df -> 0 at c).
    double invert_branch(Side side, double y) const {
        check_in_image(side, y);
        double lo, hi;
        if (side == Side::Left) { lo = 0.0; hi = c_; }
        else { lo = c_; hi = 1.0; }
        for (int i = 0; i < tol_.max_bisect && hi - lo > tol_.eps_point * 0.01; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (eval(mid, side) < y) lo = mid;
            else hi = mid;
        }
        return clamp_result(side, 0.5 * (lo + hi), y);
    }

    // exact algebraic inversion; used by the interior kernels where the
    // per-call cost of bisection would dominate
    double invert_exact(Side side, double y) const {
        check_in_image(side, y);
        if (side == Side::Left) {
            const double t = std::min(std::max(1.0 - y / v1_, 0.0), 1.0);
            return clamp_result(side, c_ * (1.0 - std::pow(t, 1.0 / alpha_)), y);
        }
        const double t = std::min(std::max((y - v0_) / (1.0 - v0_), 0.0), 1.0);
        return clamp_result(side, c_ + (1.0 - c_) * std::pow(t, 1.0 / beta_), y);
    }

    // generic-kernel inversion hook
    double invert(Side side, double y) const { return invert_exact(side, y); }

private:
    void check_in_image(Side side, double y) const {
        const Interval im = branch_image(side);
        if (y < im.lo - tol_.eps_value || y > im.hi + tol_.eps_value)
            throw ValueOutsideBranchImage(y, im.lo, im.hi);
    }
    double clamp_result(Side side, double x, double y) const {
        // pin the exact endpoints of the branch
        if (side == Side::Left) {
            if (y >= v1_ - tol_.eps_critical) return c_;
            if (y <= tol_.eps_critical * v1_ && x < tol_.eps_point) return 0.0;
        } else {
            if (y <= v0_ + tol_.eps_critical) return c_;
            if (y >= 1.0 - tol_.eps_critical && x > 1.0 - tol_.eps_point) return 1.0;
        }
        return x;
    }

    double c_, alpha_, beta_, v1_, v0_;
    Tolerances tol_;
};

ValidationReport validate(const StandardLorenzMap& spec);

// Requirements for the generic dynamical kernels (orbits, return maps,
// renormalization). Satisfied by StandardLorenzMap and by renormalized views.
template <typename M>
concept LorenzSystem = requires(const M& m, double x, Side s) {
    { m.critical() } -> std::convertible_to<double>;
    { m.eval(x, s) } -> std::convertible_to<double>;
    { m.derivative1(x) } -> std::convertible_to<double>;
    { m.invert(s, x) } -> std::convertible_to<double>;
    { m.tol() } -> std::convertible_to<Tolerances>;
};

// one forward step with the paper's one-sided bookkeeping: orientation
// preservation keeps the approach side of a limit unchanged
template <LorenzSystem M>
SignedPoint step(const M& m, SignedPoint p) {
    return {m.eval(p.x, p.side), p.side};
}

template <LorenzSystem M>
bool near_critical(const M& m, double x) {
    return std::abs(x - m.critical()) <= m.tol().eps_critical;
}

template <LorenzSystem M>
Side side_of(const M& m, double x) {
    return x < m.critical() ? Side::Left : Side::Right;
}

// one-sided critical values of any system
template <LorenzSystem M>
double left_value(const M& m) { return m.eval(m.critical(), Side::Left); }
template <LorenzSystem M>
double right_value(const M& m) { return m.eval(m.critical(), Side::Right); }

} // namespace lorenz
