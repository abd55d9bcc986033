#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lorenz/cherry.hpp"
#include "lorenz/interval.hpp"
#include "lorenz/map.hpp"
#include "lorenz/params.hpp"
#include "lorenz/periodic.hpp"
#include "lorenz/renormalization.hpp"
#include "lorenz/return_map.hpp"

namespace lorenz {

// Finite union of intervals around the critical orbit with f(U \ {c}) inside U.
struct TrappingRegion {
    Interval base; // (a,b) around c
    std::size_t ell = 1, r = 1;
    std::vector<Interval> components; // sorted, disjoint
    std::size_t invariance_samples = 0;
    std::size_t invariance_escapes = 0;

    bool contains(double x, double eps = 0.0) const {
        for (const auto& iv : components)
            if (iv.contains(x, eps)) return true;
        return false;
    }
    double total_length() const {
        double s = 0.0;
        for (const auto& iv : components) s += iv.length();
        return s;
    }
};

TrappingRegion trapping_region(const StandardLorenzMap& map, const AnalysisParams& params);

// Generic-seed omega cover and critical-orbit closure cover, kept separate so
// a mismatch (the Cantor signature) stays visible.
struct AttractorEstimate {
    IntervalCover generic;
    IntervalCover critical;
    IntervalCover merged;
};

AttractorEstimate attractor_estimate(const StandardLorenzMap& map, const TrappingRegion& U,
                                     std::size_t samples, const AnalysisParams& params);

enum class AttractorKind {
    PeriodicAttractors,
    SolenoidEvidence,
    CherryEvidence,
    ChaoticCycleOfIntervals,
    CantorWanderingEvidence,
    Inconclusive,
};

const char* to_string(AttractorKind k);

struct EvidenceItem {
    std::string name;
    double value = 0.0;
    bool pass = false;
};

struct PeriodicDensity {
    std::size_t cells_total = 0;
    std::size_t cells_with_point = 0;
    double fraction = 0.0;
    bool pass = false; // >= 0.9
};

struct LyapunovWitness {
    double point = 0.0;
    std::size_t period = 0;
    double exponent = 0.0; // log(multiplier) / period
};

struct AttractorReport {
    AttractorKind kind = AttractorKind::Inconclusive;
    std::string detail;
    AnalysisParams params;

    std::vector<PeriodicOrbit> attractors; // periodic verdicts, at most two
    double basin_fraction = 0.0;

    std::size_t tower_depth = 0;
    bool depth_limit_hit = false;

    IntervalCover lambda_cover;
    IntervalCover critical_cover;
    std::optional<TrappingRegion> trapping;

    std::vector<EvidenceItem> evidence;
    PeriodicDensity periodic_density;
    double entropy_lower_bound = 0.0;
    std::vector<LyapunovWitness> lyapunov_witnesses;
    std::optional<RotationEstimate> rotation;
};

// log(k)/T for k full branches (image = J) with T the largest return time
// among them; 0 when fewer than two branches are full.
double entropy_lower_bound(const ReturnMapDecomposition& decomp, double eps_value);

struct TransitivityTrial {
    Interval V;
    std::size_t iterations = 0;
    double coverage = 0.0;
    bool reached = false;
};

struct TransitivityEvidence {
    std::vector<TransitivityTrial> trials;
    bool all_reached = true;
};

TransitivityEvidence transitivity_check(const StandardLorenzMap& map, const IntervalCover& cover,
                                        std::size_t trials, std::size_t horizon,
                                        double delta, std::uint64_t seed);

// The decision tree over the map's attractor type, with the measurements that
// back the verdict attached.
AttractorReport classify(const StandardLorenzMap& map, const AnalysisParams& params);

} // namespace lorenz
