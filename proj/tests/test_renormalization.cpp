#include <doctest.h>

#include <cmath>

#include "lorenz/renormalization.hpp"
#include "support.hpp"

using namespace lorenz;
using namespace testsupport;

TEST_CASE("C and F admit no renormalization interval") {
    CHECK(detect_renormalization(instance_C(), 8).empty());
    CHECK(detect_renormalization(instance_F(), 4).empty());
}

TEST_CASE("the pair instance is once renormalizable with the exact boundary") {
    const auto m = instance_pair(); // v1 = 0.8: a = 1/(4 v1) exactly
    const auto recs = detect_renormalization(m, 4);
    REQUIRE(!recs.empty());
    const auto& r = recs.front();
    CHECK(r.J.lo == doctest::Approx(0.3125).epsilon(1e-10));
    CHECK(r.J.hi == doctest::Approx(0.6875).epsilon(1e-10));
    CHECK(r.period_a == 2);
    CHECK(r.period_b == 2);

    // re-verify the defining inclusions at fresh sample points
    Rng rng(59);
    for (int i = 0; i < 10000; ++i) {
        const bool left = rng.uniform() < 0.5;
        double x = left ? rng.uniform(r.J.lo, m.c()) : rng.uniform(m.c(), r.J.hi);
        for (std::size_t j = 0; j < (left ? r.period_a : r.period_b); ++j)
            x = m.eval(x, left ? Side::Left : Side::Right);
        CHECK(x >= r.J.lo - 1e-9);
        CHECK(x <= r.J.hi + 1e-9);
    }
}

TEST_CASE("renormalized view is a contracting Lorenz map in its own right") {
    const auto m = instance_pair();
    const auto recs = detect_renormalization(m, 4);
    REQUIRE(!recs.empty());
    const RenormalizedView g = renormalize(m, recs.front());

    CHECK(g.eval(0.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(g.eval(1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.critical() == doctest::Approx(0.5).epsilon(1e-9));

    // monotone branches at sampled pairs
    Rng rng(61);
    for (int i = 0; i < 1000; ++i) {
        const bool left = rng.uniform() < 0.5;
        double lo = left ? 1e-6 : g.critical() + 1e-9;
        double hi = left ? g.critical() - 1e-9 : 1.0 - 1e-6;
        double x = rng.uniform(lo, hi), y = rng.uniform(lo, hi);
        if (x > y) std::swap(x, y);
        if (y - x < 1e-9) continue;
        const Side s = left ? Side::Left : Side::Right;
        CHECK(g.eval(x, s) <= g.eval(y, s) + 1e-12);
    }

    // one-sided derivative collapses near the critical point (non-flatness echo)
    CHECK(std::abs(g.derivative1(g.critical() - 1e-4)) < 1e-3);
    CHECK(std::abs(g.derivative1(g.critical() + 1e-4)) < 1e-3);

    // rescale round trip
    const auto& rec = recs.front();
    for (int i = 0; i < 1000; ++i) {
        const double x = i / 999.0;
        CHECK(rec.rescale_inv(rec.rescale(x)) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("renormalize rejects a corrupted record") {
    const auto m = instance_pair();
    auto recs = detect_renormalization(m, 4);
    REQUIRE(!recs.empty());
    auto bad = recs.front();
    bad.J.hi = 0.62; // no longer a periodic boundary
    bad.period_b = 2;
    CHECK_THROWS_AS(renormalize(m, bad), RecordInvalid);
}

TEST_CASE("cycle sets of the pair instance") {
    const auto m = instance_pair();
    const auto rec = detect_renormalization(m, 4).front();
    const CycleSets cs = cycle_sets(m, rec, 8192, 2000, 4096);

    // ell + r - 1 distinct cycle components: (v0, a), (a, b), (b, v1)
    REQUIRE(cs.U_J.size() == 3);
    CHECK(cs.U_J[0].lo == doctest::Approx(m.v0()).epsilon(1e-9));
    CHECK(cs.U_J[0].hi == doctest::Approx(rec.J.lo).epsilon(1e-9));
    CHECK(cs.U_J[1].lo == doctest::Approx(rec.J.lo).epsilon(1e-9));
    CHECK(cs.U_J[1].hi == doctest::Approx(rec.J.hi).epsilon(1e-9));
    CHECK(cs.U_J[2].hi == doctest::Approx(m.v1()).epsilon(1e-9));

    // each trapping component contains exactly one cycle component
    REQUIRE(cs.K_J.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        std::size_t inside = 0;
        for (const auto& u : cs.U_J)
            if (cs.K_J[i].contains(u.midpoint())) ++inside;
        CHECK(inside == 1);
    }

    // forward invariance of the trapping region by sampling
    Rng rng(67);
    std::size_t escapes = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto& comp = cs.K_J[rng.below(cs.K_J.size())];
        const double x = rng.uniform(comp.lo + 1e-12, comp.hi - 1e-12);
        if (std::abs(x - m.c()) <= m.tol().eps_critical) continue;
        const double y = m.eval(x, side_of(m, x));
        bool inside = false;
        for (const auto& k : cs.K_J) inside = inside || k.contains(y, 1e-9);
        if (!inside) ++escapes;
    }
    CHECK(escapes == 0);
}

TEST_CASE("whole-interval record view on F reproduces the trivial cycle") {
    // the degenerate record (0,1) with fixed boundaries: U covers (0,1) up to
    // the critical point and finitely many endpoint images
    const auto F = instance_F();
    RenormalizationRecord rec;
    rec.J = Interval(0.0, 1.0);
    rec.period_a = rec.period_b = 1;
    rec.rescale_offset = 0.0;
    rec.rescale_scale = 1.0;
    const CycleSets cs = cycle_sets(F, rec, 2048, 500, 1024);
    double covered = 0.0;
    for (const auto& u : cs.U_J) covered += u.length();
    CHECK(covered == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("towers of the scanned cascade instances") {
    {
        const auto tower = build_tower(instance_pair(), 5, 8);
        CHECK(tower.depth() == 1);
        CHECK_FALSE(tower.depth_limit_hit);
    }
    {
        const auto tower = build_tower(instance_twice(), 5, 8);
        REQUIRE(tower.depth() == 2);
        CHECK_FALSE(tower.depth_limit_hit);
        CHECK(tower.levels[0].record.J.strictly_contains_interval(tower.levels[1].record.J));
        CHECK(tower.levels[0].f_period_a == 2);
        CHECK(tower.levels[1].f_period_a == 4);
    }
    {
        const auto tower = build_tower(instance_solenoid(), 5, 8);
        CHECK(tower.depth() == 5);
        CHECK(tower.depth_limit_hit);
        // nesting shrinks toward the critical point
        double prev = 1.0;
        for (const auto& lvl : tower.levels) {
            const double reach = std::max(std::abs(lvl.record.J.lo - 0.5),
                                          std::abs(lvl.record.J.hi - 0.5));
            CHECK(reach <= prev + 1e-12);
            prev = reach;
            CHECK(lvl.record.J.contains(0.5));
        }
        // boundary periods double with the level
        std::size_t expect = 2;
        for (const auto& lvl : tower.levels) {
            CHECK(lvl.f_period_a == expect);
            CHECK(lvl.f_period_b == expect);
            expect *= 2;
        }
        REQUIRE(tower.solenoid_cover.has_value());
        CHECK(tower.solenoid_cover->cell_count() > 0);
    }
}

TEST_CASE("tower K covers nest level by level") {
    const auto tower = build_tower(instance_twice(), 5, 8, 8192, 2000, 4096);
    REQUIRE(tower.depth() == 2);
    IntervalCover k1(4096), k2(4096);
    for (const auto& iv : tower.levels[0].K_J) k1.mark_interval(iv.lo, iv.hi);
    for (const auto& iv : tower.levels[1].K_J) k2.mark_interval(iv.lo, iv.hi);
    CHECK(k2.subset_of(k1, 1));
    CHECK(k2.cell_count() < k1.cell_count());
}

TEST_CASE("non-linking verification flags a synthetic crossed pair") {
    std::vector<Interval> linked_pair{Interval(0.2, 0.6), Interval(0.4, 0.8)};
    CHECK_THROWS_AS(verify_non_linking(linked_pair, 1e-10), LinkedIntervalsDetected);
    std::vector<Interval> nested{Interval(0.2, 0.8), Interval(0.3, 0.7)};
    CHECK_NOTHROW(verify_non_linking(nested, 1e-10));
    std::vector<Interval> shared{Interval(0.2, 0.8), Interval(0.3, 0.8)};
    CHECK_THROWS_AS(verify_non_linking(shared, 1e-10), LinkedIntervalsDetected);
}

TEST_CASE("records across instances stay pairwise nested") {
    for (const auto& m : {instance_pair(), instance_twice(), instance_deep(),
                          instance_solenoid(), instance_band()}) {
        const auto recs = detect_renormalization(m, 8);
        std::vector<Interval> js;
        for (const auto& r : recs) js.push_back(r.J);
        CHECK_NOTHROW(verify_non_linking(js, m.tol().eps_point));
    }
}
