#include "pgarch/simulation.hpp"

#include <cassert>
#include <cmath>

#include "pgarch/rng.hpp"

namespace pgarch {

Series simulate_path(const PGarchSpec& spec, const SimConfig& cfg,
                     std::vector<std::string>* warnings) {
    require_valid(spec);
    if (cfg.n_years < 1) throw std::invalid_argument("simulate_path: n_years must be >= 1");
    const int S = spec.period;
    const long long burn = cfg.burn_in < 0 ? 50LL * S : cfg.burn_in;
    if (burn % S != 0)
        throw std::invalid_argument("simulate_path: burn_in must be a multiple of the period");
    if (cfg.lyapunov_decision && *cfg.lyapunov_decision != StationarityDecision::StrictlyNegative &&
        warnings)
        warnings->push_back("cached stationarity check did not certify gamma^S < 0 (decision: " +
                            to_string(*cfg.lyapunov_decision) +
                            "); the path may not approximate a stationary solution");

    const long long T = cfg.n_years * S;
    const long long total = burn + T;
    const int q = spec.order_q, p = spec.order_p;

    std::vector<double> y(static_cast<size_t>(total) + 1, 0.0); // 1-based
    std::vector<double> h(static_cast<size_t>(total) + 1, 0.0);
    // Burn-in draws come from their own sub-stream, so changing the burn-in
    // length leaves the retained path's innovations untouched.
    InnovationSampler burn_sampler(cfg.dist, mix_seed(cfg.seed, 0xb119));
    InnovationSampler main_sampler(cfg.dist, cfg.seed);

    for (long long t = 1; t <= total; ++t) {
        double ht = spec.omega_at(t);
        for (int i = 1; i <= q; ++i) {
            const double y2 = (t - i >= 1) ? y[static_cast<size_t>(t - i)] * y[static_cast<size_t>(t - i)]
                                           : spec.omega_at(t - i);
            ht += spec.alpha_at(t, i) * y2;
        }
        for (int j = 1; j <= p; ++j) {
            const double hprev =
                (t - j >= 1) ? h[static_cast<size_t>(t - j)] : spec.omega_at(t - j);
            ht += spec.beta_at(t, j) * hprev;
        }
        assert(ht >= spec.omega_at(t));
        h[static_cast<size_t>(t)] = ht;
        y[static_cast<size_t>(t)] =
            std::sqrt(ht) * (t <= burn ? burn_sampler.draw() : main_sampler.draw());
    }

    Series out;
    out.period = S;
    out.values.assign(y.begin() + burn + 1, y.end());
    out.h_true.assign(h.begin() + burn + 1, h.end());
    return out;
}

Eigen::VectorXd truncated_series_state(const PGarchSpec& spec, const InnovationDist& dist,
                                       int truncation_k, std::uint64_t seed, int season_v,
                                       double* tail_ratio) {
    require_valid(spec);
    if (truncation_k < 1)
        throw std::invalid_argument("truncated_series_state: truncation must be >= 1");
    if (season_v < 1 || season_v > spec.period)
        throw std::invalid_argument("truncated_series_state: season out of range");
    if (spec.order_p < 1 || spec.order_q < 1)
        throw std::invalid_argument("truncated_series_state: requires p >= 1 and q >= 1");

    const int r = spec.order_p + spec.order_q;
    InnovationSampler sampler(dist, seed);

    // Time index runs v, v-1, ..., v-K; eta at index t feeds both B_t and A_t.
    auto season_at = [&](long long t) { return season_of_any(t, spec.period); };

    const double eta0 = sampler.draw_sq();
    CompanionMatrix head = build_companion(spec, season_at(season_v), eta0);
    Eigen::VectorXd sum = head.b;
    Eigen::MatrixXd prod = head.a; // A_v ... A_{v-k+1} after k steps
    Eigen::VectorXd last_term = Eigen::VectorXd::Zero(r);
    for (int k = 1; k <= truncation_k; ++k) {
        const long long t = static_cast<long long>(season_v) - k;
        const CompanionMatrix cm = build_companion(spec, season_at(t), sampler.draw_sq());
        last_term = prod * cm.b;
        sum += last_term;
        prod = prod * cm.a;
    }
    if (tail_ratio) {
        const double s = sum.cwiseAbs().sum();
        *tail_ratio = s > 0.0 ? last_term.cwiseAbs().sum() / s : 0.0;
    }
    return sum;
}

} // namespace pgarch
