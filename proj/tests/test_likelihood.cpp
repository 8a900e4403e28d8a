#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pgarch/likelihood.hpp"
#include "pgarch/rng.hpp"
#include "pgarch/simulation.hpp"

using namespace pgarch;

namespace {

Series make_series(std::vector<double> values, int period) {
    Series s;
    s.values = std::move(values);
    s.period = period;
    return s;
}

/// Central differences away from zero bounds, second-order one-sided at them.
double fd_derivative(const PGarchSpec& theta, const Series& series, InitScheme init, int k) {
    auto flat = theta.flatten();
    const int S = theta.period, q = theta.order_q, p = theta.order_p;
    const double h = 1e-6 * (1.0 + std::abs(flat[static_cast<size_t>(k)]));
    auto value = [&](double x) {
        auto shifted = flat;
        shifted[static_cast<size_t>(k)] = x;
        return neg_avg_loglik(PGarchSpec::from_flat(S, q, p, shifted), series, init);
    };
    const double x0 = flat[static_cast<size_t>(k)];
    if (x0 - h <= 0.0 && k % (1 + q + p) != 0) // nonnegativity bound active
        return (-3.0 * value(x0) + 4.0 * value(x0 + h) - value(x0 + 2.0 * h)) / (2.0 * h);
    return (value(x0 + h) - value(x0 - h)) / (2.0 * h);
}

const PGarchSpec kSpec0 = PGarchSpec::pgarch11({0.5, 1.0}, {0.2, 0.3}, {0.3, 0.3});

} // namespace

TEST_CASE("two-step ARCH(1) filter by hand") {
    const auto spec = PGarchSpec::parch1({1.0}, {0.5});
    const auto series = make_series({2.0, 1.0}, 1);
    const auto h = volatility_filter(spec, series, InitScheme::OmegaInit);
    REQUIRE(h.size() == 2);
    CHECK(h[0] == doctest::Approx(1.5)); // 1 + 0.5 * omega
    CHECK(h[1] == doctest::Approx(3.0)); // 1 + 0.5 * 4

    const double expected =
        0.5 * ((4.0 / 1.5 + std::log(1.5)) + (1.0 / 3.0 + std::log(3.0)));
    CHECK(neg_avg_loglik(spec, series, InitScheme::OmegaInit) == doctest::Approx(expected));
}

TEST_CASE("filter is flat when alpha = beta = 0, whatever the init") {
    PGarchSpec spec;
    spec.period = 2;
    spec.order_q = 0;
    spec.order_p = 0;
    spec.omega = {0.7, 2.0};
    spec.alpha = {{}, {}};
    spec.beta = {{}, {}};
    const auto series = make_series({1.0, -2.0, 0.5, 3.0}, 2);
    for (auto init : {InitScheme::OmegaInit, InitScheme::SampleInit}) {
        const auto h = volatility_filter(spec, series, init);
        CHECK(h == std::vector<double>{0.7, 2.0, 0.7, 2.0});
    }
}

TEST_CASE("filter agrees with a straight-line reimplementation on both schemes") {
    const auto series =
        make_series({1.2, -0.4, 0.9, 2.2, -1.7, 0.3, 0.1, -0.8, 1.5, -2.1}, 2);
    for (auto init : {InitScheme::OmegaInit, InitScheme::SampleInit}) {
        const auto h = volatility_filter(kSpec0, series, init);
        // spreadsheet-style recursion, written independently of the production path
        double y0sq, h0;
        if (init == InitScheme::OmegaInit) {
            y0sq = 1.0; // omega of season 2 (index 0 wraps to season 2)
            h0 = 1.0;
        } else {
            y0sq = series.values[1] * series.values[1]; // y_2, the matching season
            h0 = y0sq;
        }
        std::vector<double> expect(10);
        for (int t = 1; t <= 10; ++t) {
            const int v = (t - 1) % 2;
            const double prev_y2 =
                t >= 2 ? series.values[t - 2] * series.values[t - 2] : y0sq;
            const double prev_h = t >= 2 ? expect[t - 2] : h0;
            expect[t - 1] = kSpec0.omega[v] + kSpec0.alpha[v][0] * prev_y2 +
                            kSpec0.beta[v][0] * prev_h;
        }
        for (int t = 0; t < 10; ++t) CHECK(h[t] == doctest::Approx(expect[t]).epsilon(1e-14));
    }
}

TEST_CASE("constant-variance criterion attains its analytic minimum") {
    PGarchSpec spec;
    spec.period = 1;
    spec.order_q = 0;
    spec.order_p = 0;
    spec.omega = {2.5};
    spec.alpha = {{}};
    spec.beta = {{}};
    const double c = 2.5;
    const auto series = make_series(std::vector<double>(50, std::sqrt(c)), 1);
    CHECK(neg_avg_loglik(spec, series, InitScheme::OmegaInit) ==
          doctest::Approx(1.0 + std::log(c)));
    for (double omega : {1.5, 2.0, 3.0, 5.0}) {
        spec.omega = {omega};
        CHECK(neg_avg_loglik(spec, series, InitScheme::OmegaInit) > 1.0 + std::log(c));
    }
}

TEST_CASE("the true parameter beats a perturbed one on most draws") {
    // a low intercept makes the +0.2 alpha bump clearly visible at 500 points
    const auto truth = PGarchSpec::pgarch11({0.1}, {0.15}, {0.3});
    auto bumped = truth;
    bumped.alpha[0][0] += 0.2;
    int wins = 0;
    for (int seed = 0; seed < 100; ++seed) {
        SimConfig cfg;
        cfg.n_years = 500;
        cfg.seed = 5000 + static_cast<std::uint64_t>(seed);
        const Series path = simulate_path(truth, cfg);
        if (neg_avg_loglik(truth, path, InitScheme::SampleInit) <
            neg_avg_loglik(bumped, path, InitScheme::SampleInit))
            ++wins;
    }
    CHECK(wins >= 95);
}

TEST_CASE("score vanishes at the seasonal second moment when q = p = 0") {
    const auto series = make_series({1.0, -2.0, 0.5, 3.0, -1.0, 0.25}, 1);
    double mean_sq = 0.0;
    for (double y : series.values) mean_sq += y * y;
    mean_sq /= static_cast<double>(series.values.size());
    PGarchSpec spec;
    spec.period = 1;
    spec.order_q = 0;
    spec.order_p = 0;
    spec.omega = {mean_sq};
    spec.alpha = {{}};
    spec.beta = {{}};
    const auto work = score_and_info(spec, series, InitScheme::OmegaInit);
    CHECK(std::abs(work.score(0)) < 1e-14);
    CHECK(work.dh(0, 0) == 1.0);
}

TEST_CASE("analytic score equals central finite differences") {
    SimConfig cfg;
    cfg.n_years = 300;
    cfg.seed = 91;
    const Series path = simulate_path(kSpec0, cfg);
    const auto work = score_and_info(kSpec0, path, InitScheme::SampleInit);
    for (int k = 0; k < kSpec0.dim(); ++k) {
        const double fd = fd_derivative(kSpec0, path, InitScheme::SampleInit, k);
        CHECK(std::abs(work.score(k) - fd) / std::max(1e-10, std::abs(fd)) < 1e-6);
    }
}

TEST_CASE("score stays correct on a zero boundary coordinate") {
    auto spec = kSpec0;
    spec.alpha[0][0] = 0.0; // sits on the nonnegativity bound
    SimConfig cfg;
    cfg.n_years = 300;
    cfg.seed = 92;
    const Series path = simulate_path(kSpec0, cfg);
    const auto work = score_and_info(spec, path, InitScheme::SampleInit);
    for (int k = 0; k < spec.dim(); ++k) {
        const double fd = fd_derivative(spec, path, InitScheme::SampleInit, k);
        CHECK(std::abs(work.score(k) - fd) / std::max(1e-10, std::abs(fd)) < 1e-6);
    }
}

TEST_CASE("initial values are forgotten as the sample grows") {
    SimConfig cfg;
    cfg.n_years = 2000;
    cfg.seed = 17;
    const Series path = simulate_path(kSpec0, cfg);

    auto gap_at = [&](long long n_obs) {
        Series prefix;
        prefix.period = 2;
        prefix.values.assign(path.values.begin(), path.values.begin() + n_obs);
        return std::abs(neg_avg_loglik(kSpec0, prefix, InitScheme::OmegaInit) -
                        neg_avg_loglik(kSpec0, prefix, InitScheme::SampleInit));
    };
    CHECK(gap_at(4000) < gap_at(250));

    // the per-observation effect dies geometrically: by mid-sample the two
    // filters coincide to machine precision
    const auto ha = volatility_filter(kSpec0, path, InitScheme::OmegaInit);
    const auto hb = volatility_filter(kSpec0, path, InitScheme::SampleInit);
    CHECK(std::abs(ha[1000] - hb[1000]) < 1e-12);
    CHECK(std::abs(ha.back() - hb.back()) < 1e-12);
}

TEST_CASE("duplicated seasons replicate the plain GARCH evaluation") {
    const auto s1 = PGarchSpec::pgarch11({0.8}, {0.15}, {0.45});
    const auto s2 = PGarchSpec::pgarch11({0.8, 0.8}, {0.15, 0.15}, {0.45, 0.45});
    SimConfig cfg;
    cfg.n_years = 500;
    cfg.seed = 23;
    Series path = simulate_path(s1, cfg);
    Series path2 = path;
    path2.period = 2;

    const auto wa = score_and_info(s1, path, InitScheme::OmegaInit);
    const auto wb = score_and_info(s2, path2, InitScheme::OmegaInit);
    CHECK(wa.objective == doctest::Approx(wb.objective).epsilon(1e-14));
    for (size_t t = 0; t < wa.h_tilde.size(); ++t)
        CHECK(wa.h_tilde[t] == doctest::Approx(wb.h_tilde[t]).epsilon(1e-14));
    // moving the shared coordinate of the S=1 model moves both seasonal copies
    for (int c = 0; c < 3; ++c)
        CHECK(wa.score(c) == doctest::Approx(wb.score(c) + wb.score(3 + c)).epsilon(1e-12));
}

TEST_CASE("outer-product information matrix is positive semidefinite") {
    SimConfig cfg;
    cfg.n_years = 200;
    cfg.seed = 29;
    const Series path = simulate_path(kSpec0, cfg);
    const auto work = score_and_info(kSpec0, path, InitScheme::SampleInit);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(work.j_hat);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("power-of-two rescaling is exact through the filter") {
    SimConfig cfg;
    cfg.n_years = 100;
    cfg.seed = 37;
    const Series path = simulate_path(kSpec0, cfg);
    Series scaled = path;
    for (double& y : scaled.values) y *= 2.0;
    auto spec_scaled = kSpec0;
    for (double& w : spec_scaled.omega) w *= 4.0;

    for (auto init : {InitScheme::OmegaInit, InitScheme::SampleInit}) {
        const auto h = volatility_filter(kSpec0, path, init);
        const auto hs = volatility_filter(spec_scaled, scaled, init);
        for (size_t t = 0; t < h.size(); ++t) CHECK(hs[t] == 4.0 * h[t]);
        const auto wa = score_and_info(kSpec0, path, init);
        const auto wb = score_and_info(spec_scaled, scaled, init);
        for (size_t t = 0; t < wa.residuals.size(); ++t)
            CHECK(wa.residuals[t] == wb.residuals[t]);
    }
}

TEST_CASE("kappa_hat") {
    CHECK(kappa_hat({1.0, -1.0, 1.0, -1.0}) == 1.0);
    CHECK(kappa_hat({0.0, 0.0, 0.0}) == 0.0); // degenerate input, flagged by callers
    CHECK_THROWS_AS(kappa_hat({}), std::invalid_argument);

    InnovationSampler sampler(InnovationDist::gaussian(), 12);
    std::vector<double> draws(1'000'000);
    for (double& d : draws) d = sampler.draw();
    const double k = kappa_hat(draws);
    CHECK(k > 2.95);
    CHECK(k < 3.05);
}

TEST_CASE("cross-season derivative blocks vanish for the P-ARCH(1)") {
    const auto spec = PGarchSpec::parch1({0.5, 1.0}, {0.3, 0.4});
    SimConfig cfg;
    cfg.n_years = 200;
    cfg.seed = 41;
    const Series path = simulate_path(spec, cfg);
    const auto work = score_and_info(spec, path, InitScheme::SampleInit);
    // season-1 rows may only load on season-1 coordinates, and conversely
    for (long long t = 1; t <= path.size(); ++t) {
        const int v = season_of(t, 2);
        const int other_base = (v == 1) ? 2 : 0;
        CHECK(work.dh(t - 1, other_base) == 0.0);
        CHECK(work.dh(t - 1, other_base + 1) == 0.0);
    }
    CHECK(work.j_hat.block(0, 2, 2, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(work.j_hat.block(2, 0, 2, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("filter input validation") {
    const auto mismatched = make_series({1.0, 2.0, 3.0}, 1);
    CHECK_THROWS_AS(volatility_filter(kSpec0, mismatched, InitScheme::OmegaInit),
                    std::invalid_argument); // series period disagrees with the model
    Series one;
    one.period = 2;
    one.values = {1.0};
    CHECK_THROWS_AS(volatility_filter(kSpec0, one, InitScheme::SampleInit),
                    std::invalid_argument); // SampleInit needs a full period
}
