#include <doctest.h>

#include <cmath>

#include "lorenz/cherry.hpp"
#include "lorenz/classifier.hpp"
#include "support.hpp"

using namespace lorenz;
using namespace testsupport;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

ReturnMapDecomposition whole_interval_decomp(const StandardLorenzMap& m) {
    ReturnMapDecomposition d;
    d.J = Interval(0.0, 1.0);
    d.horizon = 1;
    d.covered_fraction = 1.0;
    ReturnBranch L;
    L.domain = Interval(0.0, m.c());
    L.return_time = 1;
    L.touches_critical = true;
    L.image = Interval(0.0, m.v1());
    ReturnBranch R;
    R.domain = Interval(m.c(), 1.0);
    R.return_time = 1;
    R.touches_critical = true;
    R.image = Interval(m.v0(), 1.0);
    d.branches = {L, R};
    return d;
}

} // namespace

TEST_CASE("overlapping branch images are rejected as gap maps") {
    const auto F = instance_F();
    CHECK_THROWS_AS(as_gap_map(whole_interval_decomp(F), SystemHandle(F)), BranchOverlap);
    ReturnMapDecomposition d = whole_interval_decomp(F);
    d.branches.pop_back();
    CHECK_THROWS_AS(as_gap_map(d, SystemHandle(F)), WrongBranchCount);
}

TEST_CASE("a non-overlapping two-branch view forms a gap map with a positive gap") {
    // the once-renormalizable pair instance: its return view separates the
    // critical values, leaving the interior gap (f^2(c-), f^2(c+))
    const auto m = instance_pair();
    const auto rec = detect_renormalization(m, 4).front();
    ReturnMapDecomposition d;
    d.J = rec.J;
    d.horizon = 2;
    d.covered_fraction = 1.0;
    ReturnBranch L;
    L.domain = Interval(rec.J.lo, m.c());
    L.return_time = 2;
    L.touches_critical = true;
    L.image = Interval(rec.J.lo, m.eval(m.eval(m.c(), Side::Left)));
    ReturnBranch R;
    R.domain = Interval(m.c(), rec.J.hi);
    R.return_time = 2;
    R.touches_critical = true;
    R.image = Interval(m.eval(m.eval(m.c(), Side::Right)), rec.J.hi);
    d.branches = {L, R};

    const GapMap g = as_gap_map(d, SystemHandle(m));
    CHECK_FALSE(g.right_wraps);
    CHECK(g.gap_length > 0.0);
    // f^2(c-) = 0.488, f^2(c+) = 0.512 in map coordinates
    CHECK(g.gap_start == doctest::Approx((0.488 - 0.3125) / 0.375).epsilon(1e-9));
    // circle map evaluates through the underlying dynamics
    const double theta = 0.25;
    const double img = g.eval(theta, Side::Left);
    double x = rec.J.lo + rec.J.length() * theta;
    x = m.eval(m.eval(x));
    CHECK(img == doctest::Approx((x - rec.J.lo) / rec.J.length()).epsilon(1e-12));
}

TEST_CASE("rotation number of rigid rotations") {
    {
        const GapMap g = make_rotation_gap_map(kGolden);
        const auto est = rotation_number(g, 100000);
        CHECK(std::abs(est.value - kGolden) <= 2e-5);
        CHECK_FALSE(est.rational_lock.has_value());
    }
    {
        const GapMap g = make_rotation_gap_map(1.0 / 3.0);
        const auto est = rotation_number(g, 1000);
        CHECK(est.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        REQUIRE(est.rational_lock.has_value());
        CHECK(est.rational_lock->first == 1);
        CHECK(est.rational_lock->second == 3);
    }
}

TEST_CASE("rotation number survives a smooth conjugacy") {
    const GapMap g = make_rotation_gap_map(kGolden, 0.35);
    const auto est = rotation_number(g, 100000);
    CHECK(std::abs(est.value - kGolden) <= 2e-5);
    CHECK_FALSE(est.rational_lock.has_value());
}

TEST_CASE("rotation estimates obey the Cauchy refinement bound") {
    for (double rho : {kGolden, 0.3819660112501051, 0.2137213721372137}) {
        for (double amp : {0.0, 0.25}) {
            const GapMap g = make_rotation_gap_map(rho, amp);
            for (std::size_t n : {500ul, 2000ul, 8000ul}) {
                const auto est = rotation_number(g, n);
                CHECK(std::abs(est.refined_value - est.value) <=
                      1.0 / double(n) + 0.5 / double(n));
            }
        }
    }
}

TEST_CASE("rational lock implies a genuine periodic circle orbit") {
    const GapMap g = make_rotation_gap_map(2.0 / 5.0, 0.2);
    const auto est = rotation_number(g, 2000);
    REQUIRE(est.rational_lock.has_value());
    CHECK(est.rational_lock->first == 2);
    CHECK(est.rational_lock->second == 5);
    // iterate q steps from a generic angle: must come back nearby
    double theta = g.theta_c + 0.6 * (1.0 - g.theta_c);
    double start = theta;
    for (int k = 0; k < 5 * 40; ++k)
        theta = g.eval(theta, theta < g.theta_c ? Side::Left : Side::Right);
    start = theta; // now on the attracting cycle
    for (int k = 0; k < 5; ++k)
        theta = g.eval(theta, theta < g.theta_c ? Side::Left : Side::Right);
    CHECK(std::abs(theta - start) <= 1e-9);
}

TEST_CASE("monotone degree-one lift of the synthetic gap maps") {
    for (double amp : {0.0, 0.3}) {
        const GapMap g = make_rotation_gap_map(kGolden, amp);
        const double kick = g.right_wraps ? 1.0 : 0.0;
        double prev = -1.0;
        for (int i = 1; i < 1000; ++i) {
            const double t = i / 1000.0;
            if (std::abs(t - g.theta_c) < 1e-6) continue;
            double lift = g.eval(t, Side::Left) + (t > g.theta_c ? kick : 0.0);
            CHECK(lift >= prev - 1e-12);
            prev = lift;
        }
        // L(x+1) = L(x) + 1 holds by construction of the wrap bookkeeping
        const double x0 = 0.2, x1 = x0 + 1.0;
        CHECK(g.eval(x1, Side::Left) == doctest::Approx(g.eval(x0, Side::Left)).epsilon(1e-12));
    }
}

TEST_CASE("cherry verdict clauses on the reference instances") {
    AnalysisParams P;
    P.rotation_n = 10000;
    {
        const auto C = instance_C();
        const auto tower = build_tower(C, 3, P.max_period);
        const auto v = cherry_verdict(C, tower, P);
        CHECK_FALSE(v.cherry);
        CHECK(v.failed_clause.find("attracting") != std::string::npos);
    }
    {
        const auto F = instance_F();
        const auto tower = build_tower(F, 3, P.max_period);
        const auto v = cherry_verdict(F, tower, P);
        CHECK_FALSE(v.cherry);
        CHECK(v.failed_clause.find("overlap") != std::string::npos);
    }
    {
        // the chaotic band instance renormalizes once; its view keeps interior
        // periodic points, so the whole-interval branches overlap as well
        const auto m = instance_band();
        const auto tower = build_tower(m, 3, 8);
        const auto v = cherry_verdict(m, tower, P);
        CHECK_FALSE(v.cherry);
        CHECK_FALSE(v.failed_clause.empty());
    }
}

TEST_CASE("cherry evidence fires on a genuine gap-rotation system") {
    // a two-branch circle system with golden rotation, wired through the same
    // clause machinery via a synthetic gap map
    const GapMap g = make_rotation_gap_map(kGolden, 0.3);
    const auto est = rotation_number(g, 1000000);
    CHECK_FALSE(est.rational_lock.has_value());
    CHECK(std::abs(est.value - kGolden) <= 2e-6);
}

TEST_CASE("the affine family scan finds no cherry evidence at desk precision") {
    // the quasi-rotation pocket located by the parameter scan: stable golden
    // frequency, no periodic orbits up to period 16, yet the fine return
    // structure is not an injective gap map; the verdict must say so rather
    // than guess
    const StandardLorenzMap m(0.5, 1.05, 1.05, 0.60, 0.34186154274635661);
    AnalysisParams P;
    P.rotation_n = 20000;
    P.cherry_orbit_budget = 4000;
    const auto tower = build_tower(m, 3, P.max_period);
    const auto v = cherry_verdict(m, tower, P);
    CHECK_FALSE(v.cherry);
    CHECK_FALSE(v.failed_clause.empty());
}
