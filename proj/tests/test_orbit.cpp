#include <doctest.h>

#include <cmath>

#include "lorenz/orbit.hpp"
#include "support.hpp"

using namespace lorenz;
using namespace testsupport;

TEST_CASE("iterate follows the known F orbit") {
    const auto F = instance_F();
    const Orbit orb = iterate(F, {0.25, Side::Left}, 4);
    REQUIRE(orb.points.size() == 5);
    const double expect[] = {0.25, 0.75, 0.25, 0.75, 0.25};
    for (int i = 0; i < 5; ++i)
        CHECK(orb.points[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    CHECK_FALSE(orb.hit_critical_at.has_value());
}

TEST_CASE("iterate records the critical hit and continues one-sided") {
    const auto F = instance_F();
    const Orbit orb = iterate(F, {0.5, Side::Left}, 2);
    REQUIRE(orb.points.size() == 3);
    CHECK(orb.points[1] == 1.0);
    CHECK(orb.points[2] == 1.0);
    REQUIRE(orb.hit_critical_at.has_value());
    CHECK(*orb.hit_critical_at == 0);

    const Orbit right = iterate(F, {0.5, Side::Right}, 2);
    CHECK(right.points[1] == 0.0);
}

TEST_CASE("iterate matches pointwise evaluation on C") {
    const auto C = instance_C();
    const Orbit orb = iterate(C, {0.9, Side::Left}, 3);
    CHECK(orb.points[1] == doctest::Approx(0.676).epsilon(1e-12));
    CHECK(orb.points[2] == doctest::Approx(0.2115136).epsilon(1e-9));
    CHECK(orb.points[3] == doctest::Approx(0.13342).epsilon(1e-4));
}

TEST_CASE("orbit consistency: every recorded transition re-evaluates") {
    Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        const auto m = random_map(rng);
        const Orbit orb = iterate(m, {rng.uniform(0.01, 0.99), Side::Left}, 200);
        for (std::size_t k = 0; k + 1 < orb.points.size(); ++k) {
            if (std::abs(orb.points[k] - m.c()) <= m.tol().eps_critical) continue;
            CHECK(std::abs(m.eval(orb.points[k], Side::Left) - orb.points[k + 1]) <= 1e-9);
        }
    }
}

TEST_CASE("omega estimate on the descending instance C") {
    const auto C = instance_C();
    const IntervalCover cov = omega_estimate(C, {0.9, Side::Left}, 10000, 1000, 1000);
    CHECK(cov.cell_count() == 1);
    CHECK(cov.contains_point(0.0));
}

TEST_CASE("omega estimate on the exactly periodic orbit of F") {
    const auto F = instance_F();
    const IntervalCover cov = omega_estimate(F, {0.25, Side::Left}, 10, 100, 1000);
    CHECK(cov.cell_count() == 2);
    CHECK(cov.contains_point(0.25));
    CHECK(cov.contains_point(0.75));
}

TEST_CASE("omega estimate of a generic F orbit fills the interval") {
    const auto F = instance_F();
    const IntervalCover cov = omega_estimate(F, {0.2137, Side::Left}, 10000, 1000000, 1000);
    CHECK(cov.fraction() >= 0.99);
}

TEST_CASE("omega monotonicity under doubled length") {
    Rng rng(29);
    for (int t = 0; t < 5; ++t) {
        const auto m = random_map(rng);
        const SignedPoint p{rng.uniform(0.01, 0.99), Side::Left};
        const IntervalCover a = omega_estimate(m, p, 1000, 5000, 512);
        const IntervalCover b = omega_estimate(m, p, 1000, 10000, 512);
        CHECK(a.subset_of(b, 0));
    }
}

TEST_CASE("preimages follow the paper convention at critical values") {
    const auto F = instance_F();
    {
        const auto pre = preimages(F, 0.75);
        REQUIRE(pre.size() == 2);
        CHECK(pre[0].x == doctest::Approx(0.25).epsilon(1e-9));
        CHECK(pre[1].x == doctest::Approx(0.9330127018922193).epsilon(1e-9));
    }
    {
        const auto pre = preimages(F, 1.0); // v1 = 1 triggers the {c} clause
        REQUIRE(pre.size() == 2);
        CHECK(pre[0].x == doctest::Approx(0.5));
        CHECK(pre[0].side == Side::Left);
        CHECK(pre[1].x == doctest::Approx(1.0));
    }
    {
        const auto C = instance_C();
        const auto pre = preimages(C, 0.0);
        REQUIRE(pre.size() == 1);
        CHECK(pre[0].x == doctest::Approx(0.0));
    }
}

TEST_CASE("preimage soundness on random targets") {
    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        const auto m = random_map(rng);
        const double y = rng.uniform();
        for (const SignedPoint& q : preimages(m, y)) {
            if (std::abs(q.x - m.c()) <= m.tol().eps_critical) continue;
            CHECK(std::abs(m.eval(q.x, q.side) - y) <= 1e-9);
        }
    }
}

TEST_CASE("alpha estimate: fixed point 0 of C only pulls back to itself") {
    const auto C = instance_C();
    const IntervalCover cov = alpha_estimate(C, 0.0, 12, 1000);
    CHECK(cov.cell_count() == 1);
    CHECK(cov.contains_point(0.0));
}

TEST_CASE("alpha estimate: preimage tree of F fills the interval") {
    const auto F = instance_F();
    const IntervalCover cov = alpha_estimate(F, 0.75, 20, 1000);
    CHECK(cov.fraction() >= 0.99);
}

TEST_CASE("alpha estimate: the fixed endpoint stays in its own tree") {
    Rng rng(37);
    for (int i = 0; i < 5; ++i) {
        const auto m = random_map(rng);
        const IntervalCover cov = alpha_estimate(m, 1.0, 1, 512);
        CHECK(cov.contains_point(1.0));
    }
}

TEST_CASE("lyapunov estimates at the reference points") {
    const auto F = instance_F();
    const auto C = instance_C();
    CHECK(lyapunov(F, {0.25, Side::Left}, 10000).value ==
          doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(lyapunov(F, {0.0, Side::Left}, 100).value ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(lyapunov(C, {0.0, Side::Left}, 100).value ==
          doctest::Approx(std::log(0.8)).epsilon(1e-12));
    CHECK(lyapunov(C, {0.0, Side::Left}, 100).value < 0.0);

    const auto aborted = lyapunov(F, {0.5, Side::Left}, 10);
    CHECK(aborted.aborted_at_critical);
}

TEST_CASE("lyapunov recomputes from the stored orbit") {
    Rng rng(41);
    for (int t = 0; t < 10; ++t) {
        const auto m = random_map(rng);
        const SignedPoint p{rng.uniform(0.01, 0.99), Side::Left};
        const auto est = lyapunov(m, p, 500);
        if (est.aborted_at_critical) continue;
        const Orbit orb = iterate(m, p, est.n);
        double acc = 0.0;
        for (std::size_t k = 0; k < est.n; ++k)
            acc += std::log(std::abs(m.derivative1(orb.points[k])));
        CHECK(est.value == doctest::Approx(acc / double(est.n)).epsilon(1e-12));
    }
}
