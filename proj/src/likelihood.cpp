#include "pgarch/likelihood.hpp"

#include <cassert>
#include <cmath>

namespace pgarch {

namespace {

void check_inputs(const PGarchSpec& theta, const Series& series, InitScheme init) {
    require_valid(theta);
    if (series.period != theta.period)
        throw std::invalid_argument("volatility filter: series period does not match the model");
    const long long T = series.size();
    const long long d = std::max(theta.order_p, theta.order_q);
    if (T < std::max<long long>(d, 1))
        throw std::invalid_argument("volatility filter: series shorter than max(p, q)");
    if (init == InitScheme::SampleInit && T < theta.period)
        throw std::invalid_argument(
            "volatility filter: SampleInit needs at least one full period of data");
}

/// Presample value for index t <= 0. Both y^2 and h slots use the same rule.
double presample_value(const PGarchSpec& theta, const Series& series, InitScheme init,
                       long long t) {
    if (init == InitScheme::OmegaInit) return theta.omega_at(t);
    long long idx = t;
    while (idx < 1) idx += theta.period; // matching season in the first year
    const double y = series.y(idx);
    return y * y;
}

} // namespace

std::vector<double> volatility_filter(const PGarchSpec& theta, const Series& series,
                                      InitScheme init) {
    check_inputs(theta, series, init);
    const long long T = series.size();
    const int q = theta.order_q, p = theta.order_p;

    std::vector<double> h(static_cast<size_t>(T));
    for (long long t = 1; t <= T; ++t) {
        double ht = theta.omega_at(t);
        for (int i = 1; i <= q; ++i) {
            const double y2 = (t - i >= 1) ? series.y(t - i) * series.y(t - i)
                                           : presample_value(theta, series, init, t - i);
            ht += theta.alpha_at(t, i) * y2;
        }
        for (int j = 1; j <= p; ++j) {
            const double hprev = (t - j >= 1) ? h[static_cast<size_t>(t - j - 1)]
                                              : presample_value(theta, series, init, t - j);
            ht += theta.beta_at(t, j) * hprev;
        }
        assert(ht >= theta.omega_at(t));
        h[static_cast<size_t>(t - 1)] = ht;
    }
    return h;
}

double neg_avg_loglik(const PGarchSpec& theta, const Series& series, InitScheme init) {
    const auto h = volatility_filter(theta, series, init);
    const long long T = series.size();
    double acc = 0.0;
    for (long long t = 1; t <= T; ++t) {
        const double y = series.y(t);
        acc += y * y / h[static_cast<size_t>(t - 1)] + std::log(h[static_cast<size_t>(t - 1)]);
    }
    return acc / static_cast<double>(T);
}

double kappa_hat(const std::vector<double>& residuals) {
    if (residuals.empty()) throw std::invalid_argument("kappa_hat: empty residuals");
    double acc = 0.0;
    for (double r : residuals) {
        const double r2 = r * r;
        acc += r2 * r2;
    }
    return acc / static_cast<double>(residuals.size());
}

LikelihoodWork score_and_info(const PGarchSpec& theta, const Series& series, InitScheme init) {
    check_inputs(theta, series, init);
    const long long T = series.size();
    const int S = theta.period, q = theta.order_q, p = theta.order_p;
    const int dim = theta.dim();
    const int blk = 1 + q + p;
    const double n_years = static_cast<double>(T) / S;

    LikelihoodWork work;
    work.h_tilde.resize(static_cast<size_t>(T));
    work.dh = Eigen::MatrixXd::Zero(T, dim);
    work.residuals.resize(static_cast<size_t>(T));
    work.score = Eigen::VectorXd::Zero(dim);
    work.j_hat = Eigen::MatrixXd::Zero(dim, dim);

    double obj = 0.0, kappa_acc = 0.0;
    Eigen::VectorXd x(dim);
    for (long long t = 1; t <= T; ++t) {
        const int v = season_of(t, S) - 1;
        const int base = v * blk;
        x.setZero();

        double ht = theta.omega[v];
        x(base) = 1.0;
        for (int i = 1; i <= q; ++i) {
            const double y2 = (t - i >= 1) ? series.y(t - i) * series.y(t - i)
                                           : presample_value(theta, series, init, t - i);
            ht += theta.alpha[v][i - 1] * y2;
            x(base + i) = y2;
            // Under the intercept scheme the presample value is itself an omega
            // coordinate; carrying its derivative keeps the score the exact
            // gradient of the criterion.
            if (t - i < 1 && init == InitScheme::OmegaInit)
                x((season_of_any(t - i, S) - 1) * blk) += theta.alpha[v][i - 1];
        }
        for (int j = 1; j <= p; ++j) {
            const double hprev = (t - j >= 1) ? work.h_tilde[static_cast<size_t>(t - j - 1)]
                                              : presample_value(theta, series, init, t - j);
            ht += theta.beta[v][j - 1] * hprev;
            x(base + q + j) = hprev;
            if (t - j >= 1)
                x += theta.beta[v][j - 1] * work.dh.row(t - j - 1).transpose();
            else if (init == InitScheme::OmegaInit)
                x((season_of_any(t - j, S) - 1) * blk) += theta.beta[v][j - 1];
        }
        work.h_tilde[static_cast<size_t>(t - 1)] = ht;
        work.dh.row(t - 1) = x.transpose();

        const double y = series.y(t);
        const double y2 = y * y;
        const double inv_h = 1.0 / ht;
        obj += y2 * inv_h + std::log(ht);
        work.score += ((1.0 - y2 * inv_h) * inv_h) * x;
        work.j_hat.selfadjointView<Eigen::Lower>().rankUpdate(x, inv_h * inv_h);
        const double res = y * std::sqrt(inv_h);
        work.residuals[static_cast<size_t>(t - 1)] = res;
        kappa_acc += res * res * res * res;
    }

    const double inv_t = 1.0 / static_cast<double>(T);
    work.objective = obj * inv_t;
    work.score *= inv_t;
    work.j_hat = work.j_hat.selfadjointView<Eigen::Lower>();
    work.j_hat /= n_years;
    work.kappa_hat = kappa_acc * inv_t;
    return work;
}

} // namespace pgarch
