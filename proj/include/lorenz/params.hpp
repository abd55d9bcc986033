#pragma once

#include <cstdint>

namespace lorenz {

// Knobs shared by the higher-level analyses. Every randomized step derives
// from `seed`, so a report plus its params pins the output bit-for-bit.
struct AnalysisParams {
    std::uint64_t seed = 0x1884c0deULL;

    std::size_t max_period = 16; // periodic-orbit search bound
    std::size_t horizon = 100000;
    std::uint32_t grid = 4096;

    std::size_t depth = 3;                    // tower depth bound
    std::size_t solenoid_depth_threshold = 3; // solenoid-evidence cutoff

    std::size_t transient = 10000;
    std::size_t orbit_length = 1000000;
    std::size_t samples = 64; // omega-cover seeds

    std::size_t rotation_n = 1000000;
    std::size_t cherry_orbit_budget = 20000; // closest-return search length

    std::size_t lambda_budget = 8192; // Lambda_J sampling
    std::size_t lambda_horizon = 2000;

    std::size_t basin_grid = 1000; // periodic-verdict basin sampling
    std::size_t basin_iters = 10000;
    double basin_radius = 1e-6;

    std::size_t max_cycle_components = 64; // cap for a cycle-of-intervals cover
    std::size_t transitivity_trials = 20;
    double transitivity_delta = 0.01;

    AnalysisParams scaled_up() const {
        AnalysisParams p = *this;
        p.grid *= 2;
        p.horizon *= 2;
        p.orbit_length *= 2;
        p.lambda_horizon *= 2;
        p.seed = seed * 0x9e3779b97f4a7c15ULL + 1;
        return p;
    }
};

} // namespace lorenz
