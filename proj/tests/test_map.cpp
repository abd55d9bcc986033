#include <doctest.h>

#include <cmath>

#include "lorenz/map.hpp"
#include "lorenz/rng.hpp"
#include "support.hpp"

using namespace lorenz;
using namespace testsupport;

TEST_CASE("validate accepts the reference instances") {
    CHECK(validate(instance_F()).valid);
    CHECK(validate(instance_C()).valid);
    const auto rep = validate(instance_F());
    CHECK(rep.left_critical_value == 1.0);
    CHECK(rep.right_critical_value == 0.0);
    CHECK(rep.derivative_vanishes_at_critical);
}

TEST_CASE("validate reports each violated constraint") {
    auto has = [](const ValidationReport& r, const std::string& code) {
        for (const auto& v : r.violations)
            if (v.code == code) return true;
        return false;
    };
    CHECK(has(validate({0.5, 1.0, 2.0, 1.0, 0.0}), "alpha_range"));
    CHECK(has(validate({0.0, 2.0, 2.0, 1.0, 0.0}), "c_range"));
    CHECK(has(validate({0.5, 2.0, 0.9, 1.0, 0.0}), "beta_range"));
    CHECK(has(validate({0.5, 2.0, 2.0, 0.0, 0.0}), "v1_range"));
    CHECK(has(validate({0.5, 2.0, 2.0, 0.5, 1.0}), "v0_range"));
    CHECK(has(validate({0.5, 2.0, 2.0, 0.3, 0.4}), "value_order"));
}

TEST_CASE("evaluation matches the branch formulas") {
    const auto F = instance_F();
    CHECK(F.eval(0.25) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(F.eval(F.c(), Side::Left) == 1.0);
    CHECK(F.eval(F.c(), Side::Right) == 0.0);
    const auto C = instance_C();
    CHECK(C.eval(0.75) == doctest::Approx(0.325).epsilon(1e-14));
    // endpoint images are pinned exactly
    CHECK(F.eval(0.0) == 0.0);
    CHECK(F.eval(1.0) == 1.0);
    CHECK(C.eval(0.0) == 0.0);
    CHECK(C.eval(1.0) == 1.0);
}

TEST_CASE("closed-form derivatives at the reference points") {
    const auto F = instance_F();
    CHECK(F.derivative(0.25, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(F.derivative(0.75, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(F.derivative(0.25, 2) == doctest::Approx(-8.0).epsilon(1e-12));
    CHECK(F.derivative(0.0, 1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(F.derivative(F.c()), CriticalPointDerivative);
    CHECK_THROWS_AS(F.schwarzian(F.c() + 1e-14), CriticalPointDerivative);
}

TEST_CASE("schwarzian closed form, power-law route and finite differences") {
    const auto F = instance_F();
    CHECK(F.schwarzian(0.25) == doctest::Approx(-24.0).epsilon(1e-12));
    CHECK(F.schwarzian(0.1) == doctest::Approx(-9.375).epsilon(1e-12));

    Rng rng(2026);
    for (int i = 0; i < 100; ++i) {
        const auto m = random_map(rng);
        double x = rng.uniform();
        if (std::abs(x - m.c()) < 1e-3) x = m.c() + (x < m.c() ? -1e-3 : 1e-3);
        const double closed = m.schwarzian(x);
        CHECK(closed < 0.0);
        CHECK(closed == doctest::Approx(powerlaw_schwarzian(m, x)).epsilon(1e-10));
        CHECK(closed == doctest::Approx(fd_schwarzian(m, x)).epsilon(1e-4));
    }
}

TEST_CASE("derivative closed forms agree with finite differences") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto m = random_map(rng);
        double x = rng.uniform(0.02, 0.98);
        if (std::abs(x - m.c()) < 1e-3) continue;
        const double h = std::min(std::abs(x - m.c()), std::min(x, 1.0 - x)) / 30.0;
        const double fd = fd_derivative(m, x, 1, h);
        CHECK(m.derivative(x, 1) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("branch monotonicity on random same-branch pairs") {
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const auto m = random_map(rng);
        const bool left = rng.uniform() < 0.5;
        double lo = left ? 0.0 : m.c(), hi = left ? m.c() : 1.0;
        double x = rng.uniform(lo + 1e-9, hi - 1e-9);
        double y = rng.uniform(lo + 1e-9, hi - 1e-9);
        if (x > y) std::swap(x, y);
        if (y - x < 1e-12) continue;
        const Side s = left ? Side::Left : Side::Right;
        CHECK(m.eval(x, s) < m.eval(y, s));
    }
}

TEST_CASE("branch inversion round trip") {
    const auto F = instance_F();
    CHECK(F.invert_branch(Side::Left, 0.75) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(F.invert_branch(Side::Right, 0.25) == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(F.invert_branch(Side::Left, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

    Rng rng(13);
    for (int i = 0; i < 10000; ++i) {
        const auto m = random_map(rng);
        const bool left = rng.uniform() < 0.5;
        const Side s = left ? Side::Left : Side::Right;
        const Interval im = m.branch_image(s);
        const double y = rng.uniform(im.lo, im.hi);
        const double x = m.invert_branch(s, y);
        CHECK(std::abs(m.eval(x, s) - y) <= 1e-9);
        // the exact inversion is a second route to the same point
        CHECK(std::abs(m.invert_exact(s, y) - x) <= 1e-8);
    }
    CHECK_THROWS_AS(F.invert_branch(Side::Right, -0.5), ValueOutsideBranchImage);
    CHECK_THROWS_AS(instance_C().invert_branch(Side::Left, 0.5), ValueOutsideBranchImage);
}

TEST_CASE("one-sided derivatives vanish at the critical point (power-law bound)") {
    Rng rng(17);
    for (int i = 0; i < 50; ++i) {
        // the stated bound is a power-law estimate for exponents >= 2
        auto m = StandardLorenzMap(rng.uniform(0.2, 0.8), rng.uniform(2.0, 3.5),
                                   rng.uniform(2.0, 3.5), rng.uniform(0.4, 1.0),
                                   rng.uniform(0.0, 0.3));
        if (!validate(m).valid) continue;
        const double d = 1e-4;
        const double bound = std::max(m.v1(), 1.0 - m.v0()) * std::max(m.alpha(), m.beta()) *
                             d * 2.0 / std::min(m.c(), 1.0 - m.c());
        CHECK(m.derivative(m.c() - d, 1) < bound);
        CHECK(m.derivative(m.c() + d, 1) < bound);
    }
}
