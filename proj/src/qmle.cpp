#include "pgarch/qmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pgarch/rng.hpp"
#include "pgarch/stationarity.hpp"

namespace pgarch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> clip_to_box(std::vector<double> theta, const ParameterSpace& box) {
    for (size_t k = 0; k < theta.size(); ++k)
        theta[k] = std::clamp(theta[k], box.lower[k], box.upper[k]);
    return theta;
}

/// Rescales the beta block so rho(prod beta_v) stays below 1 - margin.
void enforce_radius(std::vector<double>& theta, int S, int q, int p, double margin) {
    if (p < 1) return;
    const int blk = 1 + q + p;
    auto radius = [&] {
        PGarchSpec s = PGarchSpec::from_flat(S, q, p, theta);
        return beta_spectral_radius(s);
    };
    double rho = radius();
    const double target = std::max(1e-6, 1.0 - margin - 1e-6);
    while (rho >= 1.0 - margin) {
        const double shrink = std::pow(target / rho, 1.0 / S);
        for (int v = 0; v < S; ++v)
            for (int j = 0; j < p; ++j) theta[static_cast<size_t>(v) * blk + 1 + q + j] *= shrink;
        rho = radius();
    }
}

double projected_gradient_norm(const std::vector<double>& theta, const Eigen::VectorXd& g,
                               const ParameterSpace& box) {
    double norm = 0.0;
    for (size_t k = 0; k < theta.size(); ++k) {
        const double stepped = std::clamp(theta[k] - g(static_cast<int>(k)), box.lower[k],
                                          box.upper[k]);
        norm = std::max(norm, std::abs(theta[k] - stepped));
    }
    return norm;
}

struct StartOutcome {
    std::vector<double> theta;
    double objective = kInf;
    double pg_norm = kInf;
    bool converged = false;
    int n_iters = 0;
    bool finite = false;
};

class BoxOptimizer {
  public:
    BoxOptimizer(const Series& series, int S, int q, int p, const FitOptions& opts,
                 const ParameterSpace& box)
        : series_(series), S_(S), q_(q), p_(p), opts_(opts), box_(box) {}

    double criterion(const std::vector<double>& theta) const {
        const PGarchSpec spec = PGarchSpec::from_flat(S_, q_, p_, theta);
        if (!validate_spec(spec).empty()) return kInf;
        const double c = neg_avg_loglik(spec, series_, opts_.init);
        return std::isfinite(c) ? c : kInf;
    }

    bool radius_ok(const std::vector<double>& theta) const {
        if (!opts_.enforce_beta_radius || p_ < 1) return true;
        const PGarchSpec spec = PGarchSpec::from_flat(S_, q_, p_, theta);
        return beta_spectral_radius(spec) < 1.0 - opts_.margin;
    }

    StartOutcome run(std::vector<double> theta) const {
        const int dim = static_cast<int>(theta.size());
        StartOutcome out;

        double c = criterion(theta);
        if (!std::isfinite(c)) return out;
        Eigen::VectorXd g(dim);
        Eigen::MatrixXd h(dim, dim);
        evaluate(theta, g, h);

        int it = 0;
        for (; it < opts_.max_iters; ++it) {
            const double pg = projected_gradient_norm(theta, g, box_);
            if (pg <= opts_.grad_tol) {
                out.converged = true;
                break;
            }
            // Gauss-Newton step restricted to the free coordinates: bound-pinned
            // coordinates whose gradient points outward stay fixed, which avoids
            // zigzagging against an active constraint. The outer-product
            // curvature is PSD; a small ridge keeps the solve well posed.
            std::vector<int> free_idx;
            free_idx.reserve(static_cast<size_t>(dim));
            for (int k = 0; k < dim; ++k) {
                const double th = theta[static_cast<size_t>(k)];
                const double tol = 1e-10 * (1.0 + std::abs(th));
                const bool at_lower = th - box_.lower[static_cast<size_t>(k)] <= tol && g(k) > 0.0;
                const bool at_upper = box_.upper[static_cast<size_t>(k)] - th <= tol && g(k) < 0.0;
                if (!at_lower && !at_upper) free_idx.push_back(k);
            }
            Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
            if (!free_idx.empty()) {
                const int nf = static_cast<int>(free_idx.size());
                Eigen::MatrixXd hf(nf, nf);
                Eigen::VectorXd gf(nf);
                for (int a = 0; a < nf; ++a) {
                    gf(a) = g(free_idx[static_cast<size_t>(a)]);
                    for (int b = 0; b < nf; ++b)
                        hf(a, b) = h(free_idx[static_cast<size_t>(a)],
                                     free_idx[static_cast<size_t>(b)]);
                }
                const double ridge = 1e-10 * std::max(1.0, hf.trace() / nf);
                const Eigen::VectorXd df =
                    (hf + ridge * Eigen::MatrixXd::Identity(nf, nf)).ldlt().solve(-gf);
                for (int a = 0; a < nf; ++a) d(free_idx[static_cast<size_t>(a)]) = df(a);
            }

            bool accepted = try_step(theta, c, g, d);
            if (!accepted) accepted = try_step(theta, c, g, -g); // steepest-descent fallback
            if (!accepted) break;
            evaluate(theta, g, h);
        }
        out.theta = std::move(theta);
        out.objective = c;
        out.pg_norm = projected_gradient_norm(out.theta, g, box_);
        out.converged = out.converged || out.pg_norm <= opts_.grad_tol;
        out.n_iters = it;
        out.finite = std::isfinite(c);
        return out;
    }

  private:
    void evaluate(const std::vector<double>& theta, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
        const PGarchSpec spec = PGarchSpec::from_flat(S_, q_, p_, theta);
        const LikelihoodWork work = score_and_info(spec, series_, opts_.init);
        g = work.score;
        h = work.j_hat * (static_cast<double>(S_) /
                          static_cast<double>(series_.size())); // whole-sample average curvature
    }

    bool try_step(std::vector<double>& theta, double& c, const Eigen::VectorXd& g,
                  const Eigen::VectorXd& d) const {
        const int dim = static_cast<int>(theta.size());
        double s = 1.0;
        while (s > 1e-12) {
            std::vector<double> cand(theta);
            for (int k = 0; k < dim; ++k)
                cand[static_cast<size_t>(k)] = std::clamp(theta[static_cast<size_t>(k)] + s * d(k),
                                                          box_.lower[static_cast<size_t>(k)],
                                                          box_.upper[static_cast<size_t>(k)]);
            if (cand == theta) return false;
            if (!radius_ok(cand)) {
                s *= 0.5;
                continue;
            }
            const double c_cand = criterion(cand);
            double pred = 0.0;
            for (int k = 0; k < dim; ++k)
                pred += g(k) * (cand[static_cast<size_t>(k)] - theta[static_cast<size_t>(k)]);
            const double target = pred < 0.0 ? c + 1e-4 * pred : c;
            if (std::isfinite(c_cand) && c_cand < target) {
                theta = std::move(cand);
                c = c_cand;
                return true;
            }
            s *= 0.5;
        }
        return false;
    }

    const Series& series_;
    int S_, q_, p_;
    const FitOptions& opts_;
    const ParameterSpace& box_;
};

std::vector<std::vector<double>> make_starts(const Series& series, int S, int q, int p,
                                             const FitOptions& opts, const ParameterSpace& box,
                                             double scale) {
    const int blk = 1 + q + p;
    const int dim = S * blk;
    std::vector<std::vector<double>> starts;

    // Moment-matched start: seasonal second moments for omega, light tails.
    std::vector<double> theta0(static_cast<size_t>(dim), 0.0);
    const long long T = series.size();
    for (int v = 0; v < S; ++v) {
        double acc = 0.0;
        long long n = 0;
        for (long long t = v + 1; t <= T; t += S, ++n) acc += series.y(t) * series.y(t);
        theta0[static_cast<size_t>(v) * blk] = n > 0 ? acc / static_cast<double>(n) : scale;
        for (int i = 0; i < q; ++i) theta0[static_cast<size_t>(v) * blk + 1 + i] = 0.05;
        if (p >= 1) theta0[static_cast<size_t>(v) * blk + 1 + q] = 0.8;
    }
    theta0 = clip_to_box(std::move(theta0), box);
    enforce_radius(theta0, S, q, p, opts.margin);
    starts.push_back(theta0);

    // Remaining starts: log-uniform spread through the box.
    for (int s = 1; s < opts.n_starts; ++s) {
        std::mt19937_64 gen(mix_seed(opts.seed, 0x57a7, static_cast<std::uint64_t>(s)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> theta(static_cast<size_t>(dim));
        for (int v = 0; v < S; ++v) {
            for (int k = 0; k < blk; ++k) {
                const size_t idx = static_cast<size_t>(v) * blk + k;
                const bool is_omega = (k == 0);
                double lo = std::max(box.lower[idx], is_omega ? 1e-3 * scale : 1e-3);
                double hi = std::min(box.upper[idx], is_omega ? 1e3 * scale : 2.0);
                if (!(hi > lo)) {
                    theta[idx] = std::clamp(lo, box.lower[idx], box.upper[idx]);
                    continue;
                }
                theta[idx] = lo * std::pow(hi / lo, unif(gen));
            }
        }
        theta = clip_to_box(std::move(theta), box);
        enforce_radius(theta, S, q, p, opts.margin);
        starts.push_back(std::move(theta));
    }
    return starts;
}

} // namespace

std::pair<Eigen::MatrixXd, std::vector<double>> asymptotic_covariance(
    const Eigen::MatrixXd& j_hat, double kappa_hat, double n_years, int period,
    std::vector<std::string>* warnings, bool allow_pseudo_inverse) {
    (void)period; // the per-year j_hat normalization already absorbs S
    const int dim = static_cast<int>(j_hat.rows());
    if (j_hat.cols() != dim) throw std::invalid_argument("asymptotic_covariance: J must be square");
    if (!(n_years >= 1.0)) throw std::invalid_argument("asymptotic_covariance: N must be >= 1");
    if (!(kappa_hat > 1.0))
        throw std::invalid_argument(
            "asymptotic_covariance: kappa_hat must exceed 1 (degenerate fourth moment)");
    if (warnings && kappa_hat - 1.0 < 1e-8)
        warnings->push_back("kappa_hat is within 1e-8 of 1; the sandwich covariance is "
                            "nearly degenerate");

    const Eigen::MatrixXd sym = 0.5 * (j_hat + j_hat.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const Eigen::VectorXd evals = eig.eigenvalues();
    const double lambda_max = evals.cwiseAbs().maxCoeff();
    const double cutoff = lambda_max * 1e-12;

    const bool ill = lambda_max <= 0.0 || evals.minCoeff() <= cutoff;
    if (ill) {
        if (!allow_pseudo_inverse)
            throw NumericalError("asymptotic_covariance: information matrix is rank deficient");
        if (warnings)
            warnings->push_back("information matrix condition number exceeds 1e12; "
                                "pseudo-inverse used");
    }

    Eigen::VectorXd inv_evals(dim);
    for (int k = 0; k < dim; ++k)
        inv_evals(k) = evals(k) > cutoff ? 1.0 / evals(k) : 0.0;
    Eigen::MatrixXd cov = eig.eigenvectors() * inv_evals.asDiagonal() *
                          eig.eigenvectors().transpose();
    cov *= (kappa_hat - 1.0) / n_years;
    cov = 0.5 * (cov + cov.transpose()).eval();

    std::vector<double> se(static_cast<size_t>(dim));
    for (int k = 0; k < dim; ++k) se[static_cast<size_t>(k)] = std::sqrt(std::max(0.0, cov(k, k)));
    return {std::move(cov), std::move(se)};
}

FitResult fit(const Series& series, int period, int order_q, int order_p,
              const FitOptions& opts) {
    if (period < 1 || order_q < 0 || order_p < 0)
        throw std::invalid_argument("fit: invalid (period, q, p)");
    const long long T = series.size();
    if (T % period != 0)
        throw DataError("length " + std::to_string(T) + " is not a multiple of period " +
                        std::to_string(period));
    const long long n_years = T / period;
    if (n_years < 10) throw DataError("fit: need at least 10 full periods of data");

    bool all_zero = true;
    for (double v : series.values) {
        if (!std::isfinite(v)) throw DataError("fit: series contains a non-finite value");
        if (v != 0.0) all_zero = false;
    }
    if (all_zero) throw DataError("fit: series is degenerate (all values zero)");

    Series work_series = series;
    work_series.period = period;

    double scale = 0.0;
    for (double v : work_series.values) scale += v * v;
    scale = std::max(scale / static_cast<double>(T), 1e-12);

    ParameterSpace box =
        opts.space.empty() ? ParameterSpace::default_box(period, order_q, order_p, scale)
                           : opts.space;
    const int dim = period * (1 + order_q + order_p);
    box.validate(dim);

    BoxOptimizer optimizer(work_series, period, order_q, order_p, opts, box);
    const auto starts = make_starts(work_series, period, order_q, order_p, opts, box, scale);

    StartOutcome best;
    bool any_finite = false;
    for (const auto& start : starts) {
        StartOutcome outcome = optimizer.run(start);
        if (!outcome.finite) continue;
        any_finite = true;
        const bool better = outcome.objective < best.objective ||
                            (outcome.objective == best.objective && outcome.theta < best.theta);
        if (!best.finite || better) best = std::move(outcome);
    }
    if (!any_finite)
        throw NumericalError("fit: no starting point produced a finite objective");

    FitResult result;
    result.theta_hat = PGarchSpec::from_flat(period, order_q, order_p, best.theta);
    result.converged = best.converged;
    result.n_iters = best.n_iters;

    const LikelihoodWork work = score_and_info(result.theta_hat, work_series, opts.init);
    result.objective = work.objective;
    result.score_norm = work.score.cwiseAbs().maxCoeff();
    result.j_hat = work.j_hat;
    result.kappa_hat = work.kappa_hat;
    result.residuals = work.residuals;

    result.boundary_flags.resize(static_cast<size_t>(dim), false);
    bool any_boundary = false;
    for (int k = 0; k < dim; ++k) {
        const double th = best.theta[static_cast<size_t>(k)];
        const double tol = 1e-8 * (1.0 + std::abs(th));
        if (th - box.lower[static_cast<size_t>(k)] <= tol ||
            box.upper[static_cast<size_t>(k)] - th <= tol) {
            result.boundary_flags[static_cast<size_t>(k)] = true;
            any_boundary = true;
        }
    }
    if (any_boundary)
        result.warnings.push_back(
            "estimate touches the parameter box; normal-theory standard errors are invalid "
            "for the flagged coordinates");

    if (work.kappa_hat > 1.0) {
        auto [cov, se] = asymptotic_covariance(work.j_hat, work.kappa_hat,
                                               static_cast<double>(n_years), period,
                                               &result.warnings, opts.allow_pseudo_inverse);
        result.covariance = std::move(cov);
        result.std_errors = std::move(se);
    } else {
        result.covariance = Eigen::MatrixXd::Zero(dim, dim);
        result.std_errors.assign(static_cast<size_t>(dim), 0.0);
        result.warnings.push_back("kappa_hat <= 1: sandwich covariance not available");
    }
    return result;
}

} // namespace pgarch
