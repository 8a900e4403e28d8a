#include "pgarch/mc_harness.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "pgarch/rng.hpp"
#include "pgarch/stationarity.hpp"
#include "pgarch/stats.hpp"

namespace pgarch {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct Replication {
    bool ok = false;
    bool boundary = false;
    std::vector<double> theta_hat;
    std::vector<double> std_errors;
    std::vector<double> est_variance;
};

/// Runs replications 0..R-1 across a small thread pool. Slot r is fully
/// determined by (seed, n_years, r), so scheduling cannot change results.
std::vector<Replication> run_cell(const PGarchSpec& spec0, const InnovationDist& dist,
                                  long long n_years, int replications, const FitOptions& opts,
                                  std::uint64_t seed, int threads) {
    std::vector<Replication> slots(static_cast<size_t>(replications));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= replications) return;
            Replication& slot = slots[static_cast<size_t>(r)];
            try {
                SimConfig cfg;
                cfg.n_years = n_years;
                cfg.dist = dist;
                cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(n_years),
                                    static_cast<std::uint64_t>(r));
                const Series path = simulate_path(spec0, cfg);
                FitOptions fit_opts = opts;
                fit_opts.seed = mix_seed(seed, static_cast<std::uint64_t>(n_years),
                                         static_cast<std::uint64_t>(r), 1);
                const FitResult res =
                    fit(path, spec0.period, spec0.order_q, spec0.order_p, fit_opts);
                if (!res.converged) continue; // leaves slot.ok == false -> exclusion
                slot.theta_hat = res.theta_hat.flatten();
                slot.std_errors = res.std_errors;
                slot.est_variance.resize(slot.std_errors.size());
                for (size_t k = 0; k < slot.std_errors.size(); ++k)
                    slot.est_variance[k] = slot.std_errors[k] * slot.std_errors[k];
                for (bool b : res.boundary_flags) slot.boundary |= b;
                slot.ok = true;
            } catch (const std::exception&) {
                // excluded; counted by the caller
            }
        }
    };
    const int n_workers = std::max(1, std::min(threads, replications));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return slots;
}

void require_stationary(const PGarchSpec& spec0, const InnovationDist& dist, std::uint64_t seed) {
    require_valid(spec0);
    if (spec0.order_q == 0) {
        // Without squared-lag feedback the variance recursion is deterministic;
        // stationarity reduces to the beta radius (trivially true when p = 0).
        if (spec0.order_p >= 1 && beta_spectral_radius(spec0) >= 1.0)
            throw std::invalid_argument(
                "monte carlo harness: spec0 has beta spectral radius >= 1");
        return;
    }
    const LyapunovEstimate est = lyapunov_mc(spec0, dist, 2000, mix_seed(seed, 0x575a7));
    if (est.decision != StationarityDecision::StrictlyNegative)
        throw std::invalid_argument(
            "monte carlo harness: spec0 failed the stationarity check (decision: " +
            to_string(est.decision) + ", gamma_hat " + std::to_string(est.gamma_hat) + ")");
}

void add_dist_warnings(MonteCarloReport& report, const InnovationDist& dist) {
    if (dist.kind == DistKind::StudentT && dist.dof <= 5.0)
        report.warnings.push_back(
            "student-t dof " + std::to_string(dist.dof) +
            " puts the fourth moment at or near the boundary of existence; "
            "normal-theory covariance may be unreliable");
    if (!dist.non_degenerate_squared())
        throw std::invalid_argument("monte carlo harness: innovation law must have "
                                    "non-degenerate eta^2");
}

} // namespace

double cross_block_mass(const Eigen::MatrixXd& j, int period) {
    const int dim = static_cast<int>(j.rows());
    const int blk = dim / period;
    double off = 0.0;
    for (int a = 0; a < period; ++a)
        for (int b = 0; b < period; ++b)
            if (a != b) off += j.block(a * blk, b * blk, blk, blk).squaredNorm();
    const double total = j.squaredNorm();
    return total > 0.0 ? std::sqrt(off / total) : 0.0;
}

MonteCarloReport run_consistency(const PGarchSpec& spec0, const InnovationDist& dist,
                                 const std::vector<long long>& n_grid, int replications,
                                 const FitOptions& opts, std::uint64_t seed, int threads) {
    if (n_grid.size() < 2) throw std::invalid_argument("run_consistency: n_grid needs >= 2 sizes");
    for (size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("run_consistency: n_grid must be strictly increasing");
    if (replications < 2) throw std::invalid_argument("run_consistency: need >= 2 replications");
    require_stationary(spec0, dist, seed);

    MonteCarloReport report;
    report.spec0 = spec0;
    report.coord_names = spec0.coordinate_names();
    report.n_grid = n_grid;
    report.replications = replications;
    report.seed = seed;
    report.threads = threads;
    add_dist_warnings(report, dist);

    const int dim = spec0.dim();
    const std::vector<double> theta0 = spec0.flatten();
    for (long long n_years : n_grid) {
        const auto slots = run_cell(spec0, dist, n_years, replications, opts, seed, threads);
        std::vector<double> bias(static_cast<size_t>(dim), 0.0);
        std::vector<double> mse(static_cast<size_t>(dim), 0.0);
        long long included = 0;
        for (const auto& slot : slots) {
            if (!slot.ok) continue;
            ++included;
            for (int k = 0; k < dim; ++k) {
                const double err = slot.theta_hat[static_cast<size_t>(k)] -
                                   theta0[static_cast<size_t>(k)];
                bias[static_cast<size_t>(k)] += err;
                mse[static_cast<size_t>(k)] += err * err;
            }
        }
        const long long excluded = replications - included;
        if (excluded * 20 > replications)
            throw NumericalError("run_consistency: more than 5% of replications excluded at N = " +
                                 std::to_string(n_years));
        for (int k = 0; k < dim; ++k) {
            bias[static_cast<size_t>(k)] /= static_cast<double>(included);
            mse[static_cast<size_t>(k)] =
                std::sqrt(mse[static_cast<size_t>(k)] / static_cast<double>(included));
        }
        report.bias.push_back(std::move(bias));
        report.rmse.push_back(std::move(mse));
        report.exclusions.push_back(excluded);
    }
    return report;
}

MonteCarloReport run_normality(const PGarchSpec& spec0, const InnovationDist& dist,
                               long long n_years, int replications, const FitOptions& opts,
                               std::uint64_t seed, int threads) {
    if (replications < 10) throw std::invalid_argument("run_normality: need >= 10 replications");
    require_stationary(spec0, dist, seed);
    if (!std::isfinite(dist.fourth_moment()))
        throw std::invalid_argument("run_normality: innovation law must have E(eta^4) finite");

    MonteCarloReport report;
    report.spec0 = spec0;
    report.coord_names = spec0.coordinate_names();
    report.n_grid = {n_years};
    report.replications = replications;
    report.seed = seed;
    report.threads = threads;
    add_dist_warnings(report, dist);

    const int dim = spec0.dim();
    const std::vector<double> theta0 = spec0.flatten();
    const auto slots = run_cell(spec0, dist, n_years, replications, opts, seed, threads);

    // bias / rmse over every successful replication (boundary hits included)
    std::vector<double> bias(static_cast<size_t>(dim), 0.0);
    std::vector<double> mse(static_cast<size_t>(dim), 0.0);
    long long fitted = 0;
    for (const auto& slot : slots) {
        if (!slot.ok) continue;
        ++fitted;
        for (int k = 0; k < dim; ++k) {
            const double err =
                slot.theta_hat[static_cast<size_t>(k)] - theta0[static_cast<size_t>(k)];
            bias[static_cast<size_t>(k)] += err;
            mse[static_cast<size_t>(k)] += err * err;
        }
    }
    const long long excluded = replications - fitted;
    if (excluded * 20 > replications)
        throw NumericalError("run_normality: more than 5% of replications excluded");
    for (int k = 0; k < dim; ++k) {
        bias[static_cast<size_t>(k)] /= static_cast<double>(fitted);
        mse[static_cast<size_t>(k)] =
            std::sqrt(mse[static_cast<size_t>(k)] / static_cast<double>(fitted));
    }
    report.bias.push_back(std::move(bias));
    report.rmse.push_back(std::move(mse));
    report.exclusions.push_back(excluded);

    // normality statistics over interior fits only
    long long interior = 0;
    for (const auto& slot : slots)
        if (slot.ok && !slot.boundary) ++interior;
    report.boundary_replications = fitted - interior;

    report.scaled_errors = Eigen::MatrixXd::Zero(interior, dim);
    report.ci_coverage.assign(static_cast<size_t>(dim), 0.0);
    report.sandwich_ratio.assign(static_cast<size_t>(dim), 0.0);
    std::vector<double> mean_est_var(static_cast<size_t>(dim), 0.0);
    std::vector<std::vector<double>> errors(static_cast<size_t>(dim));
    long long row = 0;
    for (const auto& slot : slots) {
        if (!slot.ok || slot.boundary) continue;
        for (int k = 0; k < dim; ++k) {
            const double err =
                slot.theta_hat[static_cast<size_t>(k)] - theta0[static_cast<size_t>(k)];
            const double se = slot.std_errors[static_cast<size_t>(k)];
            const double std_err = se > 0.0 ? err / se : std::numeric_limits<double>::infinity();
            report.scaled_errors(row, k) = std_err;
            if (std::abs(std_err) <= kZ95) report.ci_coverage[static_cast<size_t>(k)] += 1.0;
            mean_est_var[static_cast<size_t>(k)] += slot.est_variance[static_cast<size_t>(k)];
            errors[static_cast<size_t>(k)].push_back(err);
        }
        ++row;
    }
    if (interior < 10)
        throw NumericalError("run_normality: fewer than 10 interior replications");

    report.ks_distance.resize(static_cast<size_t>(dim));
    report.ks_pvalue.resize(static_cast<size_t>(dim));
    for (int k = 0; k < dim; ++k) {
        report.ci_coverage[static_cast<size_t>(k)] /= static_cast<double>(interior);
        mean_est_var[static_cast<size_t>(k)] /= static_cast<double>(interior);

        std::vector<double> std_errs(static_cast<size_t>(interior));
        for (long long i = 0; i < interior; ++i)
            std_errs[static_cast<size_t>(i)] = report.scaled_errors(i, k);
        // fitted-scale Gaussian: mean pinned at 0, scale from the sample
        double scale_sq = 0.0;
        for (double e : std_errs) scale_sq += e * e;
        const double sigma = std::sqrt(scale_sq / static_cast<double>(interior));
        report.ks_distance[static_cast<size_t>(k)] = stats::ks_distance_gaussian(std_errs, sigma);
        report.ks_pvalue[static_cast<size_t>(k)] =
            stats::ks_pvalue(report.ks_distance[static_cast<size_t>(k)],
                             static_cast<size_t>(interior));

        const double emp_var = stats::variance(errors[static_cast<size_t>(k)]);
        report.sandwich_ratio[static_cast<size_t>(k)] =
            mean_est_var[static_cast<size_t>(k)] > 0.0
                ? emp_var / mean_est_var[static_cast<size_t>(k)]
                : std::numeric_limits<double>::infinity();
    }
    return report;
}

Eigen::MatrixXd j_reference(const PGarchSpec& spec0, const InnovationDist& dist,
                            long long m_years, std::uint64_t seed) {
    require_valid(spec0);
    if (m_years < 10) throw std::invalid_argument("j_reference: m_years must be >= 10");
    SimConfig cfg;
    cfg.n_years = m_years;
    cfg.dist = dist;
    cfg.seed = seed;
    const Series path = simulate_path(spec0, cfg);
    const LikelihoodWork work = score_and_info(spec0, path, InitScheme::SampleInit);
    return work.j_hat; // already per-year normalized
}

} // namespace pgarch
