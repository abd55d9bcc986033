#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "lorenz/interval.hpp"
#include "lorenz/map.hpp"
#include "lorenz/params.hpp"
#include "lorenz/renormalization.hpp"
#include "lorenz/return_map.hpp"

namespace lorenz {

// A two-branch injective circle map in normalized coordinates: the source
// interval J with endpoints identified, rescaled to [0,1). The left branch
// carries (0, theta_c) onto [left_lo, left_hi), the right branch (theta_c, 1)
// onto (right_lo, right_hi]. Injectivity allows two phases: an interior gap
// between the critical values, or a wrap where the right image passes the cut.
struct GapMap {
    Interval J;
    double theta_c = 0.5;
    double left_lo = 0, left_hi = 0;   // F(a+), F(c-) normalized
    double right_lo = 0, right_hi = 0; // F(c+), F(b-) normalized
    bool right_wraps = false;          // rotation phase: right image below the cut
    double gap_start = 0, gap_length = 0; // critical gap arc, mod 1
    std::size_t left_return_time = 1, right_return_time = 1;
    std::function<double(double theta, Side side)> eval; // normalized circle map
};

struct RotationEstimate {
    double value = 0.0;       // in [0,1)
    std::size_t n = 0;        // averaging length
    double error_bound = 0.0; // 1/n
    std::optional<std::pair<long long, long long>> rational_lock; // p/q
    double refined_value = 0.0; // estimate at 2n, for the Cauchy check
};

// minimal-denominator rational inside [value-tol, value+tol] (Stern-Brocot)
std::optional<std::pair<long long, long long>> min_denominator_rational(double value,
                                                                        double tol);

// Circle-quotient view of a two-branch return decomposition. Throws
// WrongBranchCount unless the decomposition has exactly two branches abutting
// at the critical point and covering J, and BranchOverlap when the branch
// images intersect beyond endpoints on the circle.
GapMap as_gap_map(const ReturnMapDecomposition& decomp, const SystemHandle& sys);

// Synthetic gap map: rigid rotation by rho, optionally conjugated by the
// circle diffeomorphism theta + amp * sin(2 pi theta) / (2 pi).
GapMap make_rotation_gap_map(double rho, double conjugacy_amp = 0.0);

// Average lift displacement over n iterations from the midpoint of the right
// branch domain; error bound 1/n for monotone degree-one circle maps.
RotationEstimate rotation_number(const GapMap& g, std::size_t n);

struct CherryVerdict {
    bool cherry = false;
    std::string failed_clause; // empty on Cherry-evidence
    std::optional<GapMap> gap_map;
    std::optional<RotationEstimate> rotation;
    Interval J_original;           // box in original coordinates, when built
    IntervalCover omega_left;      // cover of omega(c-) of the original map
    IntervalCover omega_right;     // cover of omega(c+)
    bool omega_sides_agree = false;
};

// Cherry-evidence clauses on the deepest renormalization view (or the map
// itself): (i) some return interval around c carries a two-branch gap map,
// (ii) its rotation estimate has no rational lock, (iii) no periodic orbit up
// to max_period meets the interval, (iv) no super-attractor was detected.
CherryVerdict cherry_verdict(const StandardLorenzMap& map, const RenormTower& tower,
                             const AnalysisParams& params);

// Closest-return box extraction on an arbitrary system: the deepest interval
// around the critical point, bounded by one-sided closest returns of the
// critical orbit, whose first-return structure is exactly two branches.
std::optional<ReturnMapDecomposition> extract_two_branch_return(
    const SystemHandle& sys, std::size_t orbit_budget, std::size_t horizon);

} // namespace lorenz
