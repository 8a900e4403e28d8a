#include "pgarch/model.hpp"

#include <cmath>
#include <sstream>

namespace pgarch {

int season_of(long long t, int period) {
    if (t < 1) throw std::invalid_argument("season_of: t must be >= 1");
    if (period < 1) throw std::invalid_argument("season_of: period must be >= 1");
    return static_cast<int>((t - 1) % period) + 1;
}

int season_of_any(long long t, int period) {
    long long m = (t - 1) % period;
    if (m < 0) m += period;
    return static_cast<int>(m) + 1;
}

InnovationDist InnovationDist::student_t(double dof) {
    if (!(dof > 2.0))
        throw std::invalid_argument("student_t: dof must be > 2 for unit variance");
    return {DistKind::StudentT, dof};
}

double InnovationDist::fourth_moment() const {
    switch (kind) {
        case DistKind::Gaussian: return 3.0;
        case DistKind::StudentT:
            if (dof <= 4.0) return std::numeric_limits<double>::infinity();
            return 3.0 * (dof - 2.0) / (dof - 4.0);
        case DistKind::UnitConstant: return 1.0;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string InnovationDist::name() const {
    switch (kind) {
        case DistKind::Gaussian: return "gaussian";
        case DistKind::StudentT: {
            std::ostringstream os;
            os << "student-t(" << dof << ")";
            return os.str();
        }
        case DistKind::UnitConstant: return "unit-constant";
    }
    return "?";
}

std::vector<double> PGarchSpec::flatten() const {
    std::vector<double> theta;
    theta.reserve(static_cast<size_t>(dim()));
    for (int v = 0; v < period; ++v) {
        theta.push_back(omega[v]);
        for (int i = 0; i < order_q; ++i) theta.push_back(alpha[v][i]);
        for (int j = 0; j < order_p; ++j) theta.push_back(beta[v][j]);
    }
    return theta;
}

PGarchSpec PGarchSpec::from_flat(int period, int order_q, int order_p,
                                 const std::vector<double>& theta) {
    const int blk = 1 + order_q + order_p;
    if (period < 1 || order_q < 0 || order_p < 0)
        throw std::invalid_argument("from_flat: invalid (period, q, p)");
    if (static_cast<int>(theta.size()) != period * blk)
        throw std::invalid_argument("from_flat: theta length does not match S*(1+q+p)");
    PGarchSpec spec;
    spec.period = period;
    spec.order_q = order_q;
    spec.order_p = order_p;
    spec.omega.resize(period);
    spec.alpha.assign(period, std::vector<double>(order_q));
    spec.beta.assign(period, std::vector<double>(order_p));
    for (int v = 0; v < period; ++v) {
        const double* th = theta.data() + static_cast<size_t>(v) * blk;
        spec.omega[v] = th[0];
        for (int i = 0; i < order_q; ++i) spec.alpha[v][i] = th[1 + i];
        for (int j = 0; j < order_p; ++j) spec.beta[v][j] = th[1 + order_q + j];
    }
    return spec;
}

std::vector<std::string> PGarchSpec::coordinate_names() const {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(dim()));
    for (int v = 1; v <= period; ++v) {
        names.push_back("omega[" + std::to_string(v) + "]");
        for (int i = 1; i <= order_q; ++i)
            names.push_back("alpha[" + std::to_string(v) + "][" + std::to_string(i) + "]");
        for (int j = 1; j <= order_p; ++j)
            names.push_back("beta[" + std::to_string(v) + "][" + std::to_string(j) + "]");
    }
    return names;
}

PGarchSpec PGarchSpec::pgarch11(std::vector<double> omega, std::vector<double> alpha1,
                                std::vector<double> beta1) {
    const int S = static_cast<int>(omega.size());
    if (alpha1.size() != omega.size() || beta1.size() != omega.size())
        throw std::invalid_argument("pgarch11: omega, alpha, beta must have equal length S");
    PGarchSpec spec;
    spec.period = S;
    spec.order_q = 1;
    spec.order_p = 1;
    spec.omega = std::move(omega);
    spec.alpha.resize(S);
    spec.beta.resize(S);
    for (int v = 0; v < S; ++v) {
        spec.alpha[v] = {alpha1[v]};
        spec.beta[v] = {beta1[v]};
    }
    return spec;
}

PGarchSpec PGarchSpec::parch1(std::vector<double> omega, std::vector<double> alpha1) {
    const int S = static_cast<int>(omega.size());
    if (alpha1.size() != omega.size())
        throw std::invalid_argument("parch1: omega and alpha must have equal length S");
    PGarchSpec spec;
    spec.period = S;
    spec.order_q = 1;
    spec.order_p = 0;
    spec.omega = std::move(omega);
    spec.alpha.resize(S);
    spec.beta.assign(S, {});
    for (int v = 0; v < S; ++v) spec.alpha[v] = {alpha1[v]};
    return spec;
}

std::vector<std::string> validate_spec(const PGarchSpec& spec) {
    std::vector<std::string> violations;
    auto add = [&](const std::string& msg) { violations.push_back(msg); };

    if (spec.period < 1) add("period must be >= 1");
    if (spec.order_q < 0) add("order_q must be >= 0");
    if (spec.order_p < 0) add("order_p must be >= 0");
    if (!violations.empty()) return violations;

    const size_t S = static_cast<size_t>(spec.period);
    if (spec.omega.size() != S)
        add("omega must have exactly " + std::to_string(S) + " entries");
    if (spec.alpha.size() != S)
        add("alpha must have exactly " + std::to_string(S) + " rows");
    if (spec.beta.size() != S)
        add("beta must have exactly " + std::to_string(S) + " rows");
    if (!violations.empty()) return violations;

    for (size_t v = 0; v < S; ++v) {
        if (!(spec.omega[v] > 0.0) || !std::isfinite(spec.omega[v]))
            add("omega[" + std::to_string(v + 1) + "] must be > 0");
        if (spec.alpha[v].size() != static_cast<size_t>(spec.order_q))
            add("alpha[" + std::to_string(v + 1) + "] must have " +
                std::to_string(spec.order_q) + " entries");
        else
            for (size_t i = 0; i < spec.alpha[v].size(); ++i)
                if (!(spec.alpha[v][i] >= 0.0) || !std::isfinite(spec.alpha[v][i]))
                    add("alpha[" + std::to_string(v + 1) + "][" + std::to_string(i + 1) +
                        "] must be >= 0");
        if (spec.beta[v].size() != static_cast<size_t>(spec.order_p))
            add("beta[" + std::to_string(v + 1) + "] must have " +
                std::to_string(spec.order_p) + " entries");
        else
            for (size_t j = 0; j < spec.beta[v].size(); ++j)
                if (!(spec.beta[v][j] >= 0.0) || !std::isfinite(spec.beta[v][j]))
                    add("beta[" + std::to_string(v + 1) + "][" + std::to_string(j + 1) +
                        "] must be >= 0");
    }
    return violations;
}

void require_valid(const PGarchSpec& spec) {
    auto violations = validate_spec(spec);
    if (violations.empty()) return;
    std::string msg = "invalid model specification:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
}

ParameterSpace ParameterSpace::default_box(int period, int order_q, int order_p, double scale,
                                           double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("default_box: epsilon must be > 0");
    if (!(scale > 0.0)) scale = 1.0;
    ParameterSpace space;
    space.epsilon = epsilon;
    const int blk = 1 + order_q + order_p;
    space.lower.assign(static_cast<size_t>(period) * blk, 0.0);
    space.upper.assign(static_cast<size_t>(period) * blk, 10.0);
    for (int v = 0; v < period; ++v) {
        space.lower[static_cast<size_t>(v) * blk] = epsilon;
        space.upper[static_cast<size_t>(v) * blk] = 1e6 * scale;
    }
    return space;
}

void ParameterSpace::validate(int dim) const {
    if (static_cast<int>(lower.size()) != dim || static_cast<int>(upper.size()) != dim)
        throw std::invalid_argument("parameter space bounds do not match dim(theta)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("parameter space epsilon must be > 0");
    for (int k = 0; k < dim; ++k)
        if (!(lower[k] <= upper[k]))
            throw std::invalid_argument("parameter space has lower > upper at coordinate " +
                                        std::to_string(k));
}

bool ParameterSpace::contains(const std::vector<double>& theta) const {
    if (theta.size() != lower.size()) return false;
    for (size_t k = 0; k < theta.size(); ++k)
        if (theta[k] < lower[k] || theta[k] > upper[k]) return false;
    return true;
}

} // namespace pgarch
