#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pgarch/rng.hpp"
#include "pgarch/simulation.hpp"
#include "pgarch/stationarity.hpp"
#include "pgarch/stats.hpp"

using namespace pgarch;

namespace {

// E log chi^2_1 = -gamma_EM - log 2, from the digamma identity.
constexpr double kELogChiSq1 = -1.2703628454614782;
constexpr double kEulerMascheroni = 0.5772156649015329;

double norm1(const Eigen::MatrixXd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

double spectral_radius(const Eigen::MatrixXd& m) {
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("companion matrix matches the displayed layout") {
    const auto spec = PGarchSpec::pgarch11({1.0}, {0.3}, {0.5});
    const auto cm = build_companion(spec, 1, 2.0);
    REQUIRE(cm.a.rows() == 2);
    CHECK(cm.a(0, 0) == doctest::Approx(0.6));
    CHECK(cm.a(0, 1) == doctest::Approx(1.0));
    CHECK(cm.a(1, 0) == doctest::Approx(0.3));
    CHECK(cm.a(1, 1) == doctest::Approx(0.5));
    CHECK(cm.b(0) == doctest::Approx(2.0));
    CHECK(cm.b(1) == doctest::Approx(1.0));

    const auto zero = build_companion(spec, 1, 0.0);
    CHECK(zero.a.row(0).isZero());
    CHECK(zero.a(1, 0) == doctest::Approx(0.3));
    CHECK(zero.a(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("companion identity blocks for q = 2") {
    PGarchSpec spec;
    spec.period = 1;
    spec.order_q = 2;
    spec.order_p = 1;
    spec.omega = {1.0};
    spec.alpha = {{0.2, 0.1}};
    spec.beta = {{0.4}};
    const auto cm = build_companion(spec, 1, 1.7);
    REQUIRE(cm.a.rows() == 3);
    CHECK(cm.a(1, 0) == 1.0); // row 2 = (1, 0, 0)
    CHECK(cm.a(1, 1) == 0.0);
    CHECK(cm.a(1, 2) == 0.0);
    // row q+1 carries the unscaled coefficients
    CHECK(cm.a(2, 0) == doctest::Approx(0.2));
    CHECK(cm.a(2, 1) == doctest::Approx(0.1));
    CHECK(cm.a(2, 2) == doctest::Approx(0.4));
}

TEST_CASE("companion form rejects p = 0 or q = 0") {
    const auto parch = PGarchSpec::parch1({1.0}, {0.5});
    CHECK_THROWS_AS(build_companion(parch, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_stacked_companion(parch, {1.0}), std::invalid_argument);
}

TEST_CASE("stacked companion: single-block case collapses") {
    const auto spec = PGarchSpec::pgarch11({1.0}, {0.3}, {0.5});
    const auto sc = build_stacked_companion(spec, {1.3});
    const auto cm = build_companion(spec, 1, 1.3);
    CHECK((sc.a - cm.a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sc.b - cm.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stacked companion blocks agree with dense products") {
    const auto spec = PGarchSpec::pgarch11({0.5, 1.0}, {0.2, 0.3}, {0.3, 0.3});
    const std::vector<double> etas = {0.7, 2.1};
    const auto sc = build_stacked_companion(spec, etas);
    const auto a1 = build_companion(spec, 1, etas[0]);
    const auto a2 = build_companion(spec, 2, etas[1]);
    const int r = 2;
    REQUIRE(sc.a.rows() == 4);
    // only the last block-column is nonzero
    CHECK(sc.a.block(0, 0, 4, r).isZero());
    CHECK((sc.a.block(0, r, r, r) - a1.a).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sc.a.block(r, r, r, r) - a2.a * a1.a).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sc.b.segment(0, r) - a1.b).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sc.b.segment(r, r) - (a2.a * a1.b + a2.b)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("deterministic innovations reduce gamma to log rho of the year product") {
    const auto spec = PGarchSpec::pgarch11({0.5, 1.0}, {0.3, 0.2}, {0.1, 0.2});
    const auto est =
        lyapunov_mc(spec, InnovationDist::unit_constant(), 10000, 11);
    const Eigen::MatrixXd year =
        build_companion(spec, 2, 1.0).a * build_companion(spec, 1, 1.0).a;
    const double oracle = std::log(spectral_radius(year));
    CHECK(std::abs(est.gamma_hat - oracle) < 1e-3);
    CHECK(est.decision == StationarityDecision::StrictlyNegative);
}

TEST_CASE("scalar identity: P-ARCH(1) gamma against the digamma closed form") {
    const auto spec = PGarchSpec::parch1({1.0, 1.0}, {0.5, 0.8});
    const auto est = lyapunov_mc(spec, InnovationDist::gaussian(), 20000, 5);
    const double oracle = std::log(0.5 * 0.8) + 2.0 * kELogChiSq1; // -3.4570
    CHECK(std::abs(est.gamma_hat - oracle) < 3.0 * est.std_error);
    CHECK(est.decision == StationarityDecision::StrictlyNegative);
}

TEST_CASE("beta-driven spectral behavior when alpha vanishes") {
    const auto spec = PGarchSpec::pgarch11({1.0}, {0.0}, {0.5});
    const auto est = lyapunov_mc(spec, InnovationDist::gaussian(), 10000, 17);
    CHECK(std::abs(est.gamma_hat - std::log(0.5)) < 0.01);
}

TEST_CASE("scalar equality property over random P-ARCH(1) specs") {
    std::mt19937_64 gen(123);
    std::uniform_real_distribution<double> unif(0.1, 1.2);
    for (int rep = 0; rep < 5; ++rep) {
        const int S = 1 + rep % 3;
        std::vector<double> omega(S, 1.0), alpha(S);
        double log_alpha = 0.0;
        for (int v = 0; v < S; ++v) {
            alpha[v] = unif(gen);
            log_alpha += std::log(alpha[v]);
        }
        const auto spec = PGarchSpec::parch1(omega, alpha);
        const auto est = lyapunov_mc(spec, InnovationDist::gaussian(), 20000, 100 + rep);
        const double oracle = log_alpha + S * kELogChiSq1;
        CHECK(std::abs(est.gamma_hat - oracle) < 3.0 * est.std_error);
    }
}

TEST_CASE("stacked-representation exponent never exceeds the per-season one") {
    // gamma(A_bar) <= gamma^S(A): estimate both on independent streams.
    const auto spec = PGarchSpec::pgarch11({0.5, 1.0}, {0.2, 0.3}, {0.3, 0.3});
    const auto per_season = lyapunov_mc(spec, InnovationDist::gaussian(), 20000, 900);

    const int n = 20000;
    InnovationSampler sampler(InnovationDist::gaussian(), 901);
    Eigen::MatrixXd carry = Eigen::MatrixXd::Identity(4, 4);
    std::vector<double> logs;
    logs.reserve(n);
    for (int k = 0; k < n; ++k) {
        std::vector<double> etas = {sampler.draw_sq(), sampler.draw_sq()};
        carry = build_stacked_companion(spec, etas).a * carry;
        const double nrm = norm1(carry);
        logs.push_back(std::log(nrm));
        carry /= nrm;
    }
    const double gamma_bar = stats::mean(logs);
    const double se_bar = stats::standard_deviation(logs) / std::sqrt(double(n));
    CHECK(gamma_bar <= per_season.gamma_hat + 3.0 * (se_bar + per_season.std_error));
}

TEST_CASE("beta radius at or above one rules out a strictly negative decision") {
    int checked = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) {
            const double b1 = 1.0 + 0.25 * i;
            const double b2 = 1.0 + 0.1 * j;
            const auto spec = PGarchSpec::pgarch11({0.5, 1.0}, {0.05 * j, 0.1}, {b1, b2});
            REQUIRE(beta_spectral_radius(spec) >= 1.0);
            const auto est = lyapunov_mc(spec, InnovationDist::gaussian(), 500, 40 + i * 5 + j);
            CHECK(est.decision != StationarityDecision::StrictlyNegative);
            ++checked;
        }
    CHECK(checked == 20);
}

TEST_CASE("renormalized log accumulation equals the dense product norm") {
    const auto spec = PGarchSpec::pgarch11({0.5, 1.0}, {0.2, 0.3}, {0.3, 0.3});
    const int n = 50;
    const std::uint64_t seed = 31;
    // lyapunov_mc requires n >= 100; mirror its accumulation at n = 50 against
    // the dense product on the same draw stream.
    InnovationSampler sampler(InnovationDist::gaussian(), seed);
    Eigen::MatrixXd carry = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Identity(2, 2);
    double acc = 0.0;
    std::vector<Eigen::MatrixXd> year_blocks;
    for (int k = 0; k < n; ++k) {
        for (int v = 1; v <= 2; ++v) {
            const Eigen::MatrixXd a = build_companion(spec, v, sampler.draw_sq()).a;
            carry = a * carry;
            year_blocks.push_back(a);
        }
        const double nrm = norm1(carry);
        acc += std::log(nrm);
        carry /= nrm;
    }
    for (auto it = year_blocks.begin(); it != year_blocks.end(); ++it) dense = *it * dense;
    CHECK(std::abs(acc - std::log(norm1(dense))) < 1e-8);
}

TEST_CASE("beta spectral radius closed forms") {
    CHECK(beta_spectral_radius(PGarchSpec::pgarch11({1.0, 1.0}, {0.1, 0.1}, {0.5, 0.8})) ==
          doctest::Approx(0.40));
    CHECK(beta_spectral_radius(PGarchSpec::pgarch11({1.0}, {0.1}, {0.95})) ==
          doctest::Approx(0.95));

    PGarchSpec p2;
    p2.period = 1;
    p2.order_q = 1;
    p2.order_p = 2;
    p2.omega = {1.0};
    p2.alpha = {{0.1}};
    p2.beta = {{0.5, 0.3}};
    const double expected = 0.5 * (0.5 + std::sqrt(0.25 + 1.2));
    CHECK(beta_spectral_radius(p2) == doctest::Approx(expected));
    CHECK(beta_spectral_radius(p2) == doctest::Approx(0.8521).epsilon(1e-3));

    CHECK_THROWS_AS(beta_spectral_radius(PGarchSpec::parch1({1.0}, {0.5})),
                    std::invalid_argument);
}

TEST_CASE("fractional moment search on scalar specs") {
    const auto stationary = PGarchSpec::parch1({1.0}, {0.5});
    const auto found = moment_delta_search(stationary, InnovationDist::gaussian(), 20, 20000, 5);
    REQUIRE(found.has_value());
    CHECK(found->delta > 0.0);
    CHECK(found->delta < 1.0);
    CHECK(found->upper_bound < 1.0);

    const auto explosive = PGarchSpec::parch1({1.0}, {5.0});
    CHECK_FALSE(moment_delta_search(explosive, InnovationDist::gaussian(), 5, 5000, 5).has_value());

    const auto tiny = PGarchSpec::parch1({1.0}, {0.1});
    const auto tiny_found = moment_delta_search(tiny, InnovationDist::gaussian(), 20, 20000, 5);
    REQUIRE(tiny_found.has_value());
    CHECK(tiny_found->delta == 0.5);
    CHECK(tiny_found->n0 == 1);
}

TEST_CASE("a certified delta gives a stable running mean of h^delta") {
    const auto spec = PGarchSpec::pgarch11({0.5}, {0.3}, {0.5});
    const auto found = moment_delta_search(spec, InnovationDist::gaussian(), 20, 10000, 9);
    REQUIRE(found.has_value());

    SimConfig cfg;
    cfg.n_years = 1'000'000;
    cfg.seed = 88;
    const Series path = simulate_path(spec, cfg);
    double first = 0.0, second = 0.0;
    const long long half = path.size() / 2;
    for (long long t = 0; t < path.size(); ++t) {
        const double val = std::pow(path.h_true[static_cast<size_t>(t)], found->delta);
        (t < half ? first : second) += val;
    }
    first /= static_cast<double>(half);
    second /= static_cast<double>(path.size() - half);
    CHECK(second / first > 0.9);
    CHECK(second / first < 1.1);
}

TEST_CASE("P-ARCH(1) stationarity bound") {
    const double gaussian = parch1_stationarity_bound(InnovationDist::gaussian(), 0, 0);
    CHECK(gaussian > 3.555);
    CHECK(gaussian < 3.570);
    CHECK(gaussian == doctest::Approx(2.0 * std::exp(kEulerMascheroni)).epsilon(1e-9));

    CHECK(parch1_stationarity_bound(InnovationDist::unit_constant(), 1000, 4) ==
          doctest::Approx(1.0));

    // Student-t(6): quadrature oracle for E log eta^2 over the standardized
    // t density, then the Monte Carlo estimate within 2 standard errors.
    const double dof = 6.0;
    const double c = std::sqrt((dof - 2.0) / dof);
    auto integrand = [&](double u) {
        const double x = std::exp(u); // eta = e^u, even integrand doubled below
        const double z = x / c;
        const double density = std::tgamma(0.5 * (dof + 1.0)) /
                               (std::sqrt(dof * M_PI) * std::tgamma(0.5 * dof)) *
                               std::pow(1.0 + z * z / dof, -0.5 * (dof + 1.0)) / c;
        return 2.0 * u * x * density;
    };
    const double e_log = 2.0 * stats::gauss_legendre(integrand, -45.0, 6.0, 102);
    CHECK(e_log == doctest::Approx(-1.5).epsilon(1e-8)); // digamma identity cross-check
    const double oracle = std::exp(-e_log);

    const long long mc = 400000;
    const double estimate = parch1_stationarity_bound(InnovationDist::student_t(dof), mc, 21);
    // Var(log eta^2) = psi'(1/2) + psi'(3) for t_6; se propagated through exp.
    const double sd_log = std::sqrt(4.9348022005446793 + 0.3949340668482264);
    const double se = oracle * sd_log / std::sqrt(static_cast<double>(mc));
    CHECK(std::abs(estimate - oracle) < 2.0 * se);
}

TEST_CASE("unconditional variance of the first-order model") {
    const auto s1 = PGarchSpec::pgarch11({1.0}, {0.2}, {0.3});
    CHECK(unconditional_variance_p11(s1, 1).value() == doctest::Approx(2.0));

    const auto s2 = PGarchSpec::pgarch11({0.5, 1.0}, {0.2, 0.3}, {0.3, 0.3});
    CHECK(unconditional_variance_p11(s2, 1).value() == doctest::Approx(1.0 / 0.7));
    CHECK(unconditional_variance_p11(s2, 2).value() == doctest::Approx(1.3 / 0.7));

    const auto razor = PGarchSpec::pgarch11({1.0}, {0.5}, {0.5});
    CHECK_FALSE(unconditional_variance_p11(razor, 1).has_value());

    CHECK_THROWS_AS(unconditional_variance_p11(PGarchSpec::parch1({1.0}, {0.5}), 1),
                    std::invalid_argument);
}

TEST_CASE("decision bands are consistent with the reported uncertainty") {
    const auto spec = PGarchSpec::pgarch11({0.5, 1.0}, {0.2, 0.3}, {0.3, 0.3});
    const auto est = lyapunov_mc(spec, InnovationDist::gaussian(), 5000, 77);
    if (est.decision == StationarityDecision::StrictlyNegative)
        CHECK(est.gamma_hat + est.z * est.std_error < 0.0);
    CHECK_THROWS_AS(lyapunov_mc(spec, InnovationDist::gaussian(), 50, 1),
                    std::invalid_argument);
}
