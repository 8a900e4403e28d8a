#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "pgarch/model.hpp"

namespace pgarch {

/**
 * One season's realized companion matrix A_t for the squared-process state
 * Y_t = (y_t^2, ..., y_{t-q+1}^2, h_t, ..., h_{t-p+1})', together with the
 * intercept vector B_t = (omega_v eta^2, 0, ..., omega_v, 0, ...)'.
 *
 * Layout ((p+q) x (p+q)):
 *   row 1        : (alpha_{v,.} eta^2 | beta_{v,.} eta^2)
 *   rows 2..q    : shifted identity | zeros
 *   row q+1      : (alpha_{v,.}      | beta_{v,.})
 *   rows q+2..q+p: zeros | shifted identity
 */
struct CompanionMatrix {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
};

/// Requires p >= 1 and q >= 1 (the companion form is undefined otherwise).
CompanionMatrix build_companion(const PGarchSpec& spec, int season_v, double eta_sq);

/**
 * The S-blocked (Gladyshev-style) representation of one year: an rS x rS
 * matrix whose only nonzero block-column is the last, with block (k, S) equal
 * to the partial product A_k ... A_1, plus the stacked intercept whose block k
 * accumulates the matching partial-product sums. Used as a cross-check of the
 * per-season recursion, not as a production path.
 */
struct StackedCompanion {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
};

StackedCompanion build_stacked_companion(const PGarchSpec& spec,
                                         const std::vector<double>& eta_sq_by_season);

enum class StationarityDecision { StrictlyNegative, NonNegative, Inconclusive };

std::string to_string(StationarityDecision d);

/**
 * Monte Carlo estimate of the top Lyapunov exponent gamma^S of the random
 * companion products, per S-block. decision is a one-sided confidence call at
 * multiplier z: StrictlyNegative iff gamma_hat + z * std_error < 0,
 * NonNegative iff gamma_hat - z * std_error > 0, Inconclusive otherwise.
 */
struct LyapunovEstimate {
    double gamma_hat = 0.0;
    double std_error = 0.0;
    long long n_blocks = 0;
    StationarityDecision decision = StationarityDecision::Inconclusive;
    double z = 2.58;
};

/**
 * Estimates gamma^S by averaging log norms of renormalized S-block products
 * along one sequential realization (operator 1-norm). For q = 1, p = 0 the
 * exact scalar identity gamma^S = sum_v E log(alpha_v eta^2) is used instead,
 * estimated from independent draws.
 *
 * Requires n_blocks >= 100, and (p >= 1 and q >= 1) or (q = 1, p = 0).
 */
LyapunovEstimate lyapunov_mc(const PGarchSpec& spec, const InnovationDist& dist,
                             long long n_blocks, std::uint64_t seed, double z = 2.58);

/// rho(beta_S beta_{S-1} ... beta_1) over the p x p beta companion blocks.
/// A value >= 1 rules out a strictly periodically stationary solution.
double beta_spectral_radius(const PGarchSpec& spec);

struct DeltaMoment {
    double delta = 0.0;
    int n0 = 0;
    double upper_bound = 0.0; // the accepted confidence bound on E||A_{n0 S}...A_1||^delta
};

/**
 * Searches delta in {0.5, 0.25, 0.1, 0.05, 0.01} (descending) and
 * n0 in {1, ..., n0_max} for a pair whose Monte Carlo upper confidence bound
 * on E||A_{n0 S} ... A_1||^delta is below 1, certifying a finite fractional
 * moment. Empty result means the search failed, not that no moment exists.
 */
std::optional<DeltaMoment> moment_delta_search(const PGarchSpec& spec, const InnovationDist& dist,
                                               int n0_max, long long mc_size, std::uint64_t seed);

/**
 * The P-ARCH(1) strict-stationarity bound a = exp(-E log eta^2): the model is
 * strictly periodically stationary iff prod_v alpha_v < a. Quadrature for the
 * Gaussian case, Monte Carlo otherwise.
 */
double parch1_stationarity_bound(const InnovationDist& dist, long long mc_size,
                                 std::uint64_t seed);

/**
 * Unconditional variance E(y_{v}^2) = E(h_v) of the first-order model
 * (q = p = 1), with periodic index wraparound. Empty when the denominator
 * 1 - prod_v (alpha_v + beta_v) is <= 0 (the formula can be negative inside
 * the strict periodic stationarity domain).
 */
std::optional<double> unconditional_variance_p11(const PGarchSpec& spec, int season_v);

} // namespace pgarch
