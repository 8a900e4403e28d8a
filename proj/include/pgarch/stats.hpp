#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pgarch::stats {

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x); // denominator n-1
double standard_deviation(const std::vector<double>& x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Composite 16-point Gauss-Legendre quadrature of f over [a, b] split into
/// n_panels equal panels.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n_panels);

/// One-sample Kolmogorov-Smirnov distance of x against the CDF of N(0, sigma^2).
double ks_distance_gaussian(std::vector<double> x, double sigma);

/// Asymptotic two-sided KS p-value for distance d at sample size n.
double ks_pvalue(double d, std::size_t n);

/// Asymptotic 1% critical KS distance at sample size n (c(0.01)/sqrt(n)).
double ks_critical_1pct(std::size_t n);

} // namespace pgarch::stats
