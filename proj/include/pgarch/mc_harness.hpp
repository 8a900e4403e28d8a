#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pgarch/model.hpp"
#include "pgarch/qmle.hpp"
#include "pgarch/simulation.hpp"

namespace pgarch {

/**
 * Replicated simulate-then-fit experiment results. Consistency runs fill the
 * bias / rmse tables over n_grid; normality runs fill coverage, KS statistics
 * and the sandwich diagnostics at a single N. Coordinates follow the
 * season-major flattening of theta.
 */
struct MonteCarloReport {
    PGarchSpec spec0;
    std::vector<std::string> coord_names;
    std::vector<long long> n_grid;
    int replications = 0;

    // per n_grid entry, per coordinate
    std::vector<std::vector<double>> bias;
    std::vector<std::vector<double>> rmse;
    std::vector<long long> exclusions;

    // normality block (largest N only)
    Eigen::MatrixXd scaled_errors; // included replications x dim, (theta_hat - theta0) / se
    std::vector<double> ci_coverage;
    std::vector<double> ks_distance;
    std::vector<double> ks_pvalue;
    /// Per coordinate: empirical variance of theta_hat across replications
    /// divided by the mean estimated sandwich variance.
    std::vector<double> sandwich_ratio;
    long long boundary_replications = 0;

    double j_cross_block_mass = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<std::string> warnings;
};

/**
 * Consistency experiment: for each N in n_grid, R independent
 * simulate -> fit replications of spec0; reports per-coordinate bias and RMSE.
 * Replication r at size N derives its generator from (seed, N, r), so results
 * do not depend on thread count. Fit failures become exclusions; more than 5%
 * exclusions in any cell fails the run.
 */
MonteCarloReport run_consistency(const PGarchSpec& spec0, const InnovationDist& dist,
                                 const std::vector<long long>& n_grid, int replications,
                                 const FitOptions& opts, std::uint64_t seed, int threads = 1);

/**
 * Normality experiment at a single N: collects standardized errors
 * (theta_hat - theta0) / se, 95% CI coverage, per-coordinate KS statistics
 * against the fitted-scale Gaussian, and the sandwich agreement ratio.
 * Replications whose fit touches the box boundary are counted and excluded
 * from the normality statistics.
 */
MonteCarloReport run_normality(const PGarchSpec& spec0, const InnovationDist& dist,
                               long long n_years, int replications, const FitOptions& opts,
                               std::uint64_t seed, int threads = 1);

/**
 * Long-run reference evaluation of the outer-product information matrix at
 * theta0: one simulated path of m_years, scored at the truth. Serves as the
 * population-J oracle; exactly block diagonal across seasons when p = 0.
 */
Eigen::MatrixXd j_reference(const PGarchSpec& spec0, const InnovationDist& dist,
                            long long m_years, std::uint64_t seed);

/// Relative Frobenius mass of the cross-season blocks of a season-major
/// information matrix: ||off-diagonal blocks||_F / ||J||_F.
double cross_block_mass(const Eigen::MatrixXd& j, int period);

} // namespace pgarch
