#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgarch/model.hpp"
#include "pgarch/stationarity.hpp"

namespace pgarch {

struct SimConfig {
    long long n_years = 1;   // path length T = n_years * S
    long long burn_in = -1;  // discarded leading observations; -1 means 50 * S
    std::uint64_t seed = 0;
    InnovationDist dist = InnovationDist::gaussian();
    /// A cached stationarity decision, when the caller has one. Not enforced:
    /// a failed check only produces a warning.
    std::optional<StationarityDecision> lyapunov_decision;
};

/**
 * Simulates a path of model (period, omega, alpha, beta) with the h-recursion
 * started from season-matched omega values, runs burn_in + T steps and keeps
 * the last T. Observation 1 of the result is season 1 (burn_in must be a
 * multiple of S). The returned Series carries the true volatility track.
 * Identical (spec, cfg) inputs produce bit-identical output.
 */
Series simulate_path(const PGarchSpec& spec, const SimConfig& cfg,
                     std::vector<std::string>* warnings = nullptr);

/**
 * One draw of the truncated stationary-solution series at season v:
 * B_v + sum_{k=1..K} (A_v A_{v-1} ... A_{v-k+1}) B_{v-k} on a fresh innovation
 * stream, with periodically indexed parameters. Coordinates are ordered as in
 * the companion state (y^2 lags first, then h lags). tail_ratio, when
 * requested, receives ||last term|| / ||sum|| as a convergence diagnostic.
 */
Eigen::VectorXd truncated_series_state(const PGarchSpec& spec, const InnovationDist& dist,
                                       int truncation_k, std::uint64_t seed, int season_v,
                                       double* tail_ratio = nullptr);

} // namespace pgarch
