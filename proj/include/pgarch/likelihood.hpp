#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pgarch/model.hpp"

namespace pgarch {

/**
 * Presample rule for the volatility filter.
 *
 * OmegaInit sets every presample y^2 and h to the season-matched intercept
 * omega (the alpha = beta = 0 approximation of the unconditional variance).
 * SampleInit borrows the squared in-sample observation of the matching season
 * from the first year; it needs T >= S.
 */
enum class InitScheme { OmegaInit, SampleInit };

/**
 * Conditional variance filter: h_t = omega_v + sum_i alpha_{v,i} y_{t-i}^2
 * + sum_j beta_{v,j} h_{t-j}, presample terms from the init scheme. Every
 * output is >= the season's omega, hence strictly positive.
 */
std::vector<double> volatility_filter(const PGarchSpec& theta, const Series& series,
                                      InitScheme init);

/// The averaged Gaussian quasi-likelihood criterion
/// C(theta) = (1 / T) sum_t [ y_t^2 / h_t + log h_t ]; the QMLE minimizes it.
double neg_avg_loglik(const PGarchSpec& theta, const Series& series, InitScheme init);

/// Mean fourth power of standardized residuals; the plug-in for E(eta^4).
double kappa_hat(const std::vector<double>& residuals);

/**
 * The filter plus its analytic first-derivative recursion and the derived
 * estimation quantities. The score is the exact gradient of the criterion
 * under both presample schemes: borrowed in-sample values are constants, and
 * the intercept scheme's omega-dependence is carried through the recursion.
 *
 * j_hat uses the per-year normalization (1/N) sum_t (1/h_t^2) dh_t dh_t',
 * the sample analog of summing one expectation per season.
 */
struct LikelihoodWork {
    std::vector<double> h_tilde;   // T filtered variances
    Eigen::MatrixXd dh;            // T x dim(theta), dh(t-1, k) = d h_t / d theta_k
    double objective = 0.0;        // C(theta)
    Eigen::VectorXd score;         // gradient of C
    Eigen::MatrixXd j_hat;         // per-year outer-product information matrix
    double kappa_hat = 0.0;        // mean residual fourth power
    std::vector<double> residuals; // y_t / sqrt(h_t)
};

LikelihoodWork score_and_info(const PGarchSpec& theta, const Series& series, InitScheme init);

} // namespace pgarch
