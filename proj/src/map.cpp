#include "lorenz/map.hpp"

namespace lorenz {

ValidationReport validate(const StandardLorenzMap& m) {
    ValidationReport rep;
    auto fail = [&rep](const char* code, const std::string& msg) {
        rep.violations.push_back({code, msg});
    };

    if (!(m.c() > 0.0 && m.c() < 1.0))
        fail("c_range", "c must lie in (0,1), got " + std::to_string(m.c()));
    if (!(m.alpha() > 1.0))
        fail("alpha_range", "alpha must exceed 1, got " + std::to_string(m.alpha()));
    if (!(m.beta() > 1.0))
        fail("beta_range", "beta must exceed 1, got " + std::to_string(m.beta()));
    if (!(m.v1() > 0.0 && m.v1() <= 1.0))
        fail("v1_range", "v1 must lie in (0,1], got " + std::to_string(m.v1()));
    if (!(m.v0() >= 0.0 && m.v0() < 1.0))
        fail("v0_range", "v0 must lie in [0,1), got " + std::to_string(m.v0()));
    if (!(m.v0() < m.v1()))
        fail("value_order", "v0 must be smaller than v1 (standing assumption)");
    if (!m.tol().valid())
        fail("tolerances", "tolerances must be positive with eps_critical <= eps_point");

    rep.valid = rep.violations.empty();
    if (rep.valid) {
        rep.left_critical_value = m.v1();
        rep.right_critical_value = m.v0();
        // alpha, beta > 1 makes both one-sided derivatives vanish at c
        rep.derivative_vanishes_at_critical = true;
    }
    return rep;
}

} // namespace lorenz
