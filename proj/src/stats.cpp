#include "pgarch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pgarch::stats {

double mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    if (x.size() < 2) throw std::invalid_argument("variance: need at least 2 values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double standard_deviation(const std::vector<double>& x) { return std::sqrt(variance(x)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; symmetric).
constexpr double kGlNodes[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeights[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

} // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n_panels) {
    if (n_panels < 1) throw std::invalid_argument("gauss_legendre: n_panels must be >= 1");
    const double w = (b - a) / n_panels;
    double total = 0.0;
    for (int k = 0; k < n_panels; ++k) {
        const double mid = a + (k + 0.5) * w;
        const double half = 0.5 * w;
        double s = 0.0;
        for (int i = 0; i < 8; ++i)
            s += kGlWeights[i] * (f(mid + half * kGlNodes[i]) + f(mid - half * kGlNodes[i]));
        total += half * s;
    }
    return total;
}

double ks_distance_gaussian(std::vector<double> x, double sigma) {
    if (x.empty()) throw std::invalid_argument("ks_distance_gaussian: empty input");
    if (!(sigma > 0.0)) throw std::invalid_argument("ks_distance_gaussian: sigma must be > 0");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double cdf = normal_cdf(x[i] / sigma);
        const double lo = cdf - static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n - cdf;
        d = std::max(d, std::max(lo, hi));
    }
    return d;
}

double ks_pvalue(double d, std::size_t n) {
    if (n == 0) throw std::invalid_argument("ks_pvalue: n must be > 0");
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 1e-8) return 1.0;
    // Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
    double q = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * q, 0.0, 1.0);
}

double ks_critical_1pct(std::size_t n) {
    // c(0.01) = sqrt(-ln(0.005)/2)
    const double c = std::sqrt(-std::log(0.005) / 2.0);
    return c / std::sqrt(static_cast<double>(n));
}

} // namespace pgarch::stats
