#pragma once

#include <cmath>
#include <vector>

#include "lorenz/map.hpp"
#include "lorenz/rng.hpp"

namespace testsupport {

using lorenz::Rng;
using lorenz::Side;
using lorenz::StandardLorenzMap;

// the named instances used across the suite
inline StandardLorenzMap instance_F() { return {0.5, 2.0, 2.0, 1.0, 0.0}; }
inline StandardLorenzMap instance_C() { return {0.5, 2.0, 2.0, 0.2, 0.1}; }
// symmetric family members located by the cascade scan
inline StandardLorenzMap instance_pair() { return {0.5, 2.0, 2.0, 0.8, 0.2}; }
inline StandardLorenzMap instance_twice() { return {0.5, 2.0, 2.0, 0.88, 0.12}; }
inline StandardLorenzMap instance_deep() { return {0.5, 2.0, 2.0, 0.892, 0.108}; }
inline constexpr double kAccumulationV1 = 0.8924864464399613;
inline StandardLorenzMap instance_solenoid() {
    return {0.5, 2.0, 2.0, kAccumulationV1, 1.0 - kAccumulationV1};
}
inline StandardLorenzMap instance_band() { return {0.5, 2.0, 2.0, 0.9, 0.1}; }

// pseudo-random valid parameter draw
inline StandardLorenzMap random_map(Rng& rng) {
    const double c = rng.uniform(0.15, 0.85);
    const double alpha = rng.uniform(1.2, 3.5);
    const double beta = rng.uniform(1.2, 3.5);
    const double v1 = rng.uniform(0.05, 1.0);
    const double v0 = rng.uniform(0.0, v1 * 0.999);
    return {c, alpha, beta, v1, v0};
}

// central finite differences with Richardson refinement: the independent
// oracle for closed-form derivatives
inline double fd_derivative(const StandardLorenzMap& m, double x, int order, double h) {
    auto f = [&](double t) { return m.eval(t, Side::Left); };
    auto d = [&](double hh) {
        switch (order) {
            case 1: return (f(x + hh) - f(x - hh)) / (2.0 * hh);
            case 2: return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh);
            default:
                return (f(x + 2.0 * hh) - 2.0 * f(x + hh) + 2.0 * f(x - hh) -
                        f(x - 2.0 * hh)) /
                       (2.0 * hh * hh * hh);
        }
    };
    const double c1 = d(h), c2 = d(h / 2.0);
    const double p = order == 1 ? 4.0 : (order == 2 ? 4.0 : 4.0);
    return (p * c2 - c1) / (p - 1.0);
}

inline double fd_schwarzian(const StandardLorenzMap& m, double x) {
    const double h = std::abs(x - m.c()) / 20.0;
    const double d1 = fd_derivative(m, x, 1, h);
    const double d2 = fd_derivative(m, x, 2, h);
    const double d3 = fd_derivative(m, x, 3, h);
    const double r = d2 / d1;
    return d3 / d1 - 1.5 * r * r;
}

// closed-form Schwarzian of a pure power-law branch, the second algebraic route
inline double powerlaw_schwarzian(const StandardLorenzMap& m, double x) {
    if (x < m.c()) {
        const double g = m.alpha();
        return -(g * g - 1.0) / (2.0 * (m.c() - x) * (m.c() - x));
    }
    const double g = m.beta();
    return -(g * g - 1.0) / (2.0 * (x - m.c()) * (x - m.c()));
}

} // namespace testsupport
