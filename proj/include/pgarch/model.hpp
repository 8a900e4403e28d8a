#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgarch {

/// Raised when an input file or data set is malformed (CLI exit code 3).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a computation fails numerically (CLI exit code 4).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Season of observation t (1-based): t = 1 is season 1, t = S+1 is season 1 again.
int season_of(long long t, int period);

/// Season extension to presample indices t <= 0 (internal convention).
int season_of_any(long long t, int period);

enum class DistKind { Gaussian, StudentT, UnitConstant };

/**
 * Innovation distribution: i.i.d., mean 0, variance 1.
 *
 * StudentT is the standardized Student-t (a t draw scaled by sqrt((dof-2)/dof)),
 * valid for dof > 2. UnitConstant has eta^2 == 1 (sign-symmetric) and is a
 * test-only member: it is degenerate in eta^2 and rejected by operations that
 * need a non-degenerate squared innovation.
 */
struct InnovationDist {
    DistKind kind = DistKind::Gaussian;
    double dof = 0.0;

    static InnovationDist gaussian() { return {DistKind::Gaussian, 0.0}; }
    static InnovationDist student_t(double dof);
    static InnovationDist unit_constant() { return {DistKind::UnitConstant, 0.0}; }

    /// False for UnitConstant (eta^2 is a point mass).
    bool non_degenerate_squared() const { return kind != DistKind::UnitConstant; }

    /// E(eta^4): 3 for Gaussian, 3(dof-2)/(dof-4) for StudentT (infinite when
    /// dof <= 4), 1 for UnitConstant.
    double fourth_moment() const;

    std::string name() const;
};

/**
 * Periodic GARCH specification: period S, orders q (squared-lag terms) and
 * p (variance-lag terms), seasonal intercepts omega_v > 0 and nonnegative
 * coefficient rows alpha[v], beta[v].
 *
 * Seasons are 1-based in every public interface; storage is 0-based.
 */
struct PGarchSpec {
    int period = 1;
    int order_q = 0;
    int order_p = 0;
    std::vector<double> omega;              // length S
    std::vector<std::vector<double>> alpha; // S rows of length q
    std::vector<std::vector<double>> beta;  // S rows of length p

    /// Number of free parameters, S * (1 + q + p).
    int dim() const { return period * (1 + order_q + order_p); }

    /// Periodically extended accessors; t may be any integer (presample included).
    double omega_at(long long t) const { return omega[season_of_any(t, period) - 1]; }
    double alpha_at(long long t, int i) const { return alpha[season_of_any(t, period) - 1][i - 1]; }
    double beta_at(long long t, int j) const { return beta[season_of_any(t, period) - 1][j - 1]; }

    /// Season-major flattening: (omega_1, alpha_{1,1..q}, beta_{1,1..p}, omega_2, ...).
    std::vector<double> flatten() const;
    static PGarchSpec from_flat(int period, int order_q, int order_p,
                                const std::vector<double>& theta);

    /// Names of the flattened coordinates: "omega[v]", "alpha[v][i]", "beta[v][j]".
    std::vector<std::string> coordinate_names() const;

    /// Convenience constructor for the common P-GARCH(1,1) case.
    static PGarchSpec pgarch11(std::vector<double> omega, std::vector<double> alpha1,
                               std::vector<double> beta1);
    /// P-ARCH(1): q = 1, p = 0.
    static PGarchSpec parch1(std::vector<double> omega, std::vector<double> alpha1);
};

/// Empty result means the spec is valid; otherwise one message per violation,
/// each naming the offending coordinate (1-based).
std::vector<std::string> validate_spec(const PGarchSpec& spec);

/// Throws std::invalid_argument listing all violations.
void require_valid(const PGarchSpec& spec);

/**
 * Box constraints over the flattened parameter vector, with lower(omega_v)
 * bounded away from zero by epsilon.
 */
struct ParameterSpace {
    std::vector<double> lower;
    std::vector<double> upper;
    double epsilon = 1e-6;

    /// Default box: omega_v in [epsilon, 1e6 * scale], alpha and beta in [0, 10].
    static ParameterSpace default_box(int period, int order_q, int order_p, double scale,
                                      double epsilon = 1e-6);

    bool empty() const { return lower.empty(); }
    void validate(int dim) const;
    bool contains(const std::vector<double>& theta) const;
};

/**
 * An observed or simulated path. values[0] is y_1 and has season 1;
 * h_true, when present, is the simulator's conditional variance track.
 */
struct Series {
    std::vector<double> values;
    int period = 1;
    std::vector<double> h_true; // empty, or same length as values

    long long size() const { return static_cast<long long>(values.size()); }
    int season(long long t) const { return season_of(t, period); } // t is 1-based
    double y(long long t) const { return values[static_cast<size_t>(t - 1)]; }
};

} // namespace pgarch
