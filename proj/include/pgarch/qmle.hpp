#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pgarch/likelihood.hpp"
#include "pgarch/model.hpp"

namespace pgarch {

struct FitOptions {
    InitScheme init = InitScheme::SampleInit;
    ParameterSpace space; // empty means the default box scaled to the data
    int n_starts = 5;
    int max_iters = 200;
    double grad_tol = 1e-7;
    /// Reject iterates with rho(prod beta_v) >= 1 - margin. This keeps every
    /// candidate inside the region where the filter is a contraction, without
    /// forcing each beta_v below 1 individually.
    bool enforce_beta_radius = true;
    double margin = 1e-3;
    std::uint64_t seed = 0; // disperses the multi-start points
    bool allow_pseudo_inverse = true;
};

struct FitResult {
    PGarchSpec theta_hat;
    double objective = 0.0;
    double score_norm = 0.0; // max-abs coordinate of the score at theta_hat
    Eigen::MatrixXd j_hat;
    double kappa_hat = 0.0;
    Eigen::MatrixXd covariance;
    std::vector<double> std_errors;
    std::vector<double> residuals;
    bool converged = false;
    int n_iters = 0;
    /// True where a coordinate of theta_hat sits on a box bound; normal-theory
    /// standard errors are not valid for flagged coordinates.
    std::vector<bool> boundary_flags;
    std::vector<std::string> warnings;
};

/**
 * Quasi-maximum likelihood fit: minimizes the averaged conditional criterion
 * over the box by projected quasi-Newton (analytic score, outer-product
 * curvature, backtracking line search), best of n_starts starting points.
 * Deterministic given (series, opts).
 */
FitResult fit(const Series& series, int period, int order_q, int order_p,
              const FitOptions& opts = {});

/**
 * Sandwich covariance of theta_hat: (kappa_hat - 1) * j_hat^{-1} / N with
 * j_hat per-year normalized, equivalently (kappa_hat - 1) times the inverse
 * of the un-normalized whole-sample outer-product sum. Falls back to a
 * pseudo-inverse (with a warning) when the information matrix has condition
 * number above 1e12; throws NumericalError instead if allow_pseudo_inverse
 * is false.
 */
std::pair<Eigen::MatrixXd, std::vector<double>> asymptotic_covariance(
    const Eigen::MatrixXd& j_hat, double kappa_hat, double n_years, int period,
    std::vector<std::string>* warnings = nullptr, bool allow_pseudo_inverse = true);

} // namespace pgarch
