#include "pgarch/stationarity.hpp"

#include <algorithm>
#include <cmath>

#include "pgarch/rng.hpp"
#include "pgarch/stats.hpp"

namespace pgarch {

namespace {

/// Operator 1-norm (maximum absolute column sum); submultiplicative.
double norm1(const Eigen::MatrixXd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

void require_matrix_orders(const PGarchSpec& spec, const char* who) {
    if (spec.order_p < 1 || spec.order_q < 1)
        throw std::invalid_argument(std::string(who) +
                                    ": companion form requires p >= 1 and q >= 1");
}

StationarityDecision decide(double gamma_hat, double std_error, double z) {
    if (gamma_hat + z * std_error < 0.0) return StationarityDecision::StrictlyNegative;
    if (gamma_hat - z * std_error > 0.0) return StationarityDecision::NonNegative;
    return StationarityDecision::Inconclusive;
}

} // namespace

std::string to_string(StationarityDecision d) {
    switch (d) {
        case StationarityDecision::StrictlyNegative: return "strictly_negative";
        case StationarityDecision::NonNegative: return "non_negative";
        case StationarityDecision::Inconclusive: return "inconclusive";
    }
    return "?";
}

CompanionMatrix build_companion(const PGarchSpec& spec, int season_v, double eta_sq) {
    require_matrix_orders(spec, "build_companion");
    if (season_v < 1 || season_v > spec.period)
        throw std::invalid_argument("build_companion: season out of range");
    if (eta_sq < 0.0) throw std::invalid_argument("build_companion: eta_sq must be >= 0");

    const int q = spec.order_q, p = spec.order_p, r = p + q;
    const auto& a_row = spec.alpha[season_v - 1];
    const auto& b_row = spec.beta[season_v - 1];

    CompanionMatrix cm;
    cm.a = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < q; ++i) {
        cm.a(0, i) = a_row[i] * eta_sq;
        cm.a(q, i) = a_row[i];
    }
    for (int j = 0; j < p; ++j) {
        cm.a(0, q + j) = b_row[j] * eta_sq;
        cm.a(q, q + j) = b_row[j];
    }
    for (int k = 1; k < q; ++k) cm.a(k, k - 1) = 1.0;          // y^2 lag shifts
    for (int k = 1; k < p; ++k) cm.a(q + k, q + k - 1) = 1.0;  // h lag shifts

    cm.b = Eigen::VectorXd::Zero(r);
    cm.b(0) = spec.omega[season_v - 1] * eta_sq;
    cm.b(q) = spec.omega[season_v - 1];
    return cm;
}

StackedCompanion build_stacked_companion(const PGarchSpec& spec,
                                         const std::vector<double>& eta_sq_by_season) {
    require_matrix_orders(spec, "build_stacked_companion");
    const int S = spec.period;
    if (static_cast<int>(eta_sq_by_season.size()) != S)
        throw std::invalid_argument("build_stacked_companion: need one eta^2 per season");

    const int r = spec.order_p + spec.order_q;
    StackedCompanion sc;
    sc.a = Eigen::MatrixXd::Zero(r * S, r * S);
    sc.b = Eigen::VectorXd::Zero(r * S);

    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(r, r);
    Eigen::VectorXd accum = Eigen::VectorXd::Zero(r);
    for (int k = 0; k < S; ++k) {
        const CompanionMatrix cm = build_companion(spec, k + 1, eta_sq_by_season[k]);
        prod = cm.a * prod;              // A_k ... A_1
        accum = cm.a * accum + cm.b;     // sum_j (A_k ... A_{j+1}) B_j
        sc.a.block(k * r, (S - 1) * r, r, r) = prod;
        sc.b.segment(k * r, r) = accum;
    }
    return sc;
}

LyapunovEstimate lyapunov_mc(const PGarchSpec& spec, const InnovationDist& dist,
                             long long n_blocks, std::uint64_t seed, double z) {
    require_valid(spec);
    if (n_blocks < 100) throw std::invalid_argument("lyapunov_mc: n_blocks must be >= 100");
    const int S = spec.period;

    std::vector<double> block_logs;
    block_logs.reserve(static_cast<size_t>(n_blocks));
    InnovationSampler sampler(dist, seed);

    if (spec.order_q == 1 && spec.order_p == 0) {
        // Scalar identity: gamma^S = sum_v log alpha_v + S * E log eta^2.
        double log_alpha_year = 0.0;
        for (int v = 0; v < S; ++v) {
            if (!(spec.alpha[v][0] > 0.0))
                throw NumericalError("lyapunov_mc: alpha[" + std::to_string(v + 1) +
                                     "][1] is zero; scalar log product degenerates");
            log_alpha_year += std::log(spec.alpha[v][0]);
        }
        for (long long k = 0; k < n_blocks; ++k) {
            double l = log_alpha_year;
            for (int v = 0; v < S; ++v) l += std::log(sampler.draw_sq());
            block_logs.push_back(l);
        }
    } else if (spec.order_p >= 1 && spec.order_q >= 1) {
        const int r = spec.order_p + spec.order_q;
        // Sequential product with per-block renormalization: the accumulated
        // log norms reproduce log||A_{nS}...A_1|| exactly.
        Eigen::MatrixXd carry = Eigen::MatrixXd::Identity(r, r);
        for (long long k = 0; k < n_blocks; ++k) {
            for (int v = 1; v <= S; ++v)
                carry = build_companion(spec, v, sampler.draw_sq()).a * carry;
            const double nrm = norm1(carry);
            if (!(nrm > 0.0) || !std::isfinite(nrm))
                throw NumericalError("lyapunov_mc: block product norm degenerated");
            block_logs.push_back(std::log(nrm));
            carry /= nrm;
        }
    } else {
        throw std::invalid_argument(
            "lyapunov_mc: orders must satisfy p >= 1 and q >= 1, or q = 1 and p = 0");
    }

    LyapunovEstimate est;
    est.n_blocks = n_blocks;
    est.z = z;
    est.gamma_hat = stats::mean(block_logs);
    est.std_error = stats::standard_deviation(block_logs) /
                    std::sqrt(static_cast<double>(n_blocks));
    est.decision = decide(est.gamma_hat, est.std_error, z);
    return est;
}

double beta_spectral_radius(const PGarchSpec& spec) {
    if (spec.order_p < 1)
        throw std::invalid_argument("beta_spectral_radius: requires p >= 1");
    const int p = spec.order_p;
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(p, p);
    for (int v = 0; v < spec.period; ++v) {
        Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(p, p);
        for (int j = 0; j < p; ++j) bm(0, j) = spec.beta[v][j];
        for (int k = 1; k < p; ++k) bm(k, k - 1) = 1.0;
        prod = bm * prod; // beta_S ... beta_1, latest season leftmost
    }
    if (p == 1) return std::abs(prod(0, 0));
    return prod.eigenvalues().cwiseAbs().maxCoeff();
}

std::optional<DeltaMoment> moment_delta_search(const PGarchSpec& spec,
                                               const InnovationDist& dist, int n0_max,
                                               long long mc_size, std::uint64_t seed) {
    require_valid(spec);
    if (n0_max < 1) throw std::invalid_argument("moment_delta_search: n0_max must be >= 1");
    if (mc_size < 100) throw std::invalid_argument("moment_delta_search: mc_size must be >= 100");
    const bool scalar = (spec.order_q == 1 && spec.order_p == 0);
    if (!scalar && (spec.order_p < 1 || spec.order_q < 1))
        throw std::invalid_argument(
            "moment_delta_search: orders must satisfy p >= 1 and q >= 1, or q = 1 and p = 0");

    const int S = spec.period;
    const double z = 2.58;

    // log||A_{n0 S} ... A_1|| samples per n0, computed on demand and cached so
    // every delta is judged on the same draws.
    std::vector<std::vector<double>> log_norm_cache(static_cast<size_t>(n0_max) + 1);
    auto log_norms = [&](int n0) -> const std::vector<double>& {
        auto& cache = log_norm_cache[static_cast<size_t>(n0)];
        if (!cache.empty()) return cache;
        cache.reserve(static_cast<size_t>(mc_size));
        InnovationSampler sampler(dist, mix_seed(seed, 0x0de17a, static_cast<std::uint64_t>(n0)));
        for (long long i = 0; i < mc_size; ++i) {
            double acc = 0.0;
            if (scalar) {
                for (int t = 0; t < n0 * S; ++t) {
                    const double a = spec.alpha[t % S][0];
                    if (!(a > 0.0))
                        throw NumericalError("moment_delta_search: zero alpha row with p = 0");
                    acc += std::log(a) + std::log(sampler.draw_sq());
                }
            } else {
                const int r = spec.order_p + spec.order_q;
                Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(r, r);
                for (int t = 0; t < n0 * S; ++t) {
                    prod = build_companion(spec, (t % S) + 1, sampler.draw_sq()).a * prod;
                    const double nrm = norm1(prod);
                    acc += std::log(nrm);
                    prod /= nrm;
                }
            }
            cache.push_back(acc);
        }
        return cache;
    };

    const double grid[] = {0.5, 0.25, 0.1, 0.05, 0.01};
    for (double delta : grid) {
        for (int n0 = 1; n0 <= n0_max; ++n0) {
            const auto& ls = log_norms(n0);
            std::vector<double> x(ls.size());
            for (size_t i = 0; i < ls.size(); ++i) x[i] = std::exp(delta * ls[i]);
            const double m = stats::mean(x);
            const double se = stats::standard_deviation(x) / std::sqrt(static_cast<double>(x.size()));
            const double upper = m + z * se;
            if (upper < 1.0) return DeltaMoment{delta, n0, upper};
        }
    }
    return std::nullopt;
}

double parch1_stationarity_bound(const InnovationDist& dist, long long mc_size,
                                 std::uint64_t seed) {
    if (dist.kind == DistKind::Gaussian) {
        // E log eta^2 = 4 * int u e^u phi(e^u) du after x = e^u; the integrand
        // vanishes double-exponentially on the right and exponentially on the left.
        auto integrand = [](double u) {
            const double x = std::exp(u);
            const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
            return u * x * phi;
        };
        const double e_log_eta_sq = 4.0 * stats::gauss_legendre(integrand, -45.0, 3.0, 96);
        return std::exp(-e_log_eta_sq);
    }
    if (mc_size < 100)
        throw std::invalid_argument("parch1_stationarity_bound: mc_size must be >= 100");
    InnovationSampler sampler(dist, seed);
    double acc = 0.0;
    for (long long i = 0; i < mc_size; ++i) acc += std::log(sampler.draw_sq());
    return std::exp(-acc / static_cast<double>(mc_size));
}

std::optional<double> unconditional_variance_p11(const PGarchSpec& spec, int season_v) {
    if (spec.order_q != 1 || spec.order_p != 1)
        throw std::invalid_argument("unconditional_variance_p11: requires q = 1 and p = 1");
    require_valid(spec);
    if (season_v < 1 || season_v > spec.period)
        throw std::invalid_argument("unconditional_variance_p11: season out of range");

    const int S = spec.period;
    auto phi = [&](int v) { // alpha_v + beta_v with periodic wraparound, v may be <= 0
        const int idx = season_of_any(v, S) - 1;
        return spec.alpha[idx][0] + spec.beta[idx][0];
    };
    auto omega = [&](int v) { return spec.omega[season_of_any(v, S) - 1]; };

    double numerator = omega(season_v);
    double prod = 1.0;
    for (int j = 1; j <= S - 1; ++j) {
        prod *= phi(season_v - (j - 1));
        numerator += prod * omega(season_v - j);
    }
    prod *= phi(season_v - (S - 1));
    const double denominator = 1.0 - prod;
    if (!(denominator > 0.0)) return std::nullopt;
    return numerator / denominator;
}

} // namespace pgarch
