#include "pgarch/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pgarch::io {

namespace {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

} // namespace

void write_series_csv(const std::string& path, const Series& series) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    const bool with_h = !series.h_true.empty();
    out << (with_h ? "t,season,y,h\n" : "t,season,y\n");
    for (long long t = 1; t <= series.size(); ++t) {
        out << t << ',' << series.season(t) << ',' << format_double(series.y(t));
        if (with_h) out << ',' << format_double(series.h_true[static_cast<size_t>(t - 1)]);
        out << '\n';
    }
    if (!out) throw DataError("failed while writing " + path);
}

Series read_series_csv(const std::string& path, int period, const std::string& value_column,
                       int offset) {
    if (period < 1) throw std::invalid_argument("read_series_csv: period must be >= 1");
    if (offset < 0 || offset >= period)
        throw std::invalid_argument("read_series_csv: offset must be in [0, period)");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file (header required)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    int col = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == value_column) col = static_cast<int>(i);
    if (col < 0)
        throw DataError(path + ":1: no column named '" + value_column + "' in header");

    Series series;
    series.period = period;
    long long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) <= col)
            throw DataError(path + ":" + std::to_string(line_no) + ": missing column '" +
                            value_column + "'");
        try {
            size_t consumed = 0;
            const double value = std::stod(fields[static_cast<size_t>(col)], &consumed);
            if (consumed != fields[static_cast<size_t>(col)].size())
                throw std::invalid_argument("trailing characters");
            series.values.push_back(value);
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": cannot parse '" +
                            fields[static_cast<size_t>(col)] + "' as a number");
        }
    }
    const long long drop = (period - offset) % period;
    if (static_cast<long long>(series.values.size()) <= drop)
        throw DataError(path + ": no observations left after the season offset");
    series.values.erase(series.values.begin(), series.values.begin() + drop);
    return series;
}

nlohmann::json spec_to_json(const PGarchSpec& spec) {
    return {{"period", spec.period},
            {"order_q", spec.order_q},
            {"order_p", spec.order_p},
            {"omega", spec.omega},
            {"alpha", spec.alpha},
            {"beta", spec.beta}};
}

PGarchSpec spec_from_json(const nlohmann::json& j) {
    PGarchSpec spec;
    spec.period = j.at("period").get<int>();
    spec.order_q = j.at("order_q").get<int>();
    spec.order_p = j.at("order_p").get<int>();
    spec.omega = j.at("omega").get<std::vector<double>>();
    spec.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
    spec.beta = j.at("beta").get<std::vector<std::vector<double>>>();
    return spec;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename T>
nlohmann::json coord_map(const std::vector<std::string>& names, const std::vector<T>& values) {
    nlohmann::json j = nlohmann::json::object();
    for (size_t k = 0; k < names.size(); ++k) j[names[k]] = values[k];
    return j;
}

} // namespace

nlohmann::json fit_result_to_json(const FitResult& result) {
    const auto names = result.theta_hat.coordinate_names();
    std::vector<int> flags(result.boundary_flags.begin(), result.boundary_flags.end());
    return {{"theta_hat", spec_to_json(result.theta_hat)},
            {"coordinates", names},
            {"objective", result.objective},
            {"score_norm", result.score_norm},
            {"kappa_hat", result.kappa_hat},
            {"converged", result.converged},
            {"n_iters", result.n_iters},
            {"std_errors", coord_map(names, result.std_errors)},
            {"boundary_flags", coord_map(names, flags)},
            {"covariance", matrix_to_json(result.covariance)},
            {"j_hat", matrix_to_json(result.j_hat)},
            {"residuals", result.residuals},
            {"warnings", result.warnings}};
}

nlohmann::json lyapunov_to_json(const LyapunovEstimate& estimate) {
    return {{"gamma_hat", estimate.gamma_hat},
            {"std_error", estimate.std_error},
            {"n_blocks", estimate.n_blocks},
            {"decision", to_string(estimate.decision)},
            {"z", estimate.z}};
}

nlohmann::json report_to_json(const MonteCarloReport& report, const std::string& task) {
    nlohmann::json j;
    j["task"] = task;
    j["spec0"] = spec_to_json(report.spec0);
    j["n_grid"] = report.n_grid;
    j["replications"] = report.replications;
    j["seed"] = report.seed;
    j["exclusions"] = report.exclusions;
    j["warnings"] = report.warnings;

    nlohmann::json bias = nlohmann::json::object(), rmse = nlohmann::json::object();
    for (size_t k = 0; k < report.coord_names.size(); ++k) {
        nlohmann::json b = nlohmann::json::array(), r = nlohmann::json::array();
        for (size_t n = 0; n < report.n_grid.size(); ++n) {
            b.push_back(report.bias[n][k]);
            r.push_back(report.rmse[n][k]);
        }
        bias[report.coord_names[k]] = std::move(b);
        rmse[report.coord_names[k]] = std::move(r);
    }
    j["bias"] = std::move(bias);
    j["rmse"] = std::move(rmse);

    if (!report.ci_coverage.empty()) {
        j["ci_coverage"] = coord_map(report.coord_names, report.ci_coverage);
        j["ks_distance"] = coord_map(report.coord_names, report.ks_distance);
        j["ks_pvalue"] = coord_map(report.coord_names, report.ks_pvalue);
        j["sandwich_ratio"] = coord_map(report.coord_names, report.sandwich_ratio);
        j["boundary_replications"] = report.boundary_replications;
        nlohmann::json errs = nlohmann::json::array();
        for (Eigen::Index r = 0; r < report.scaled_errors.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < report.scaled_errors.cols(); ++c)
                row.push_back(report.scaled_errors(r, c));
            errs.push_back(std::move(row));
        }
        j["scaled_errors"] = std::move(errs);
    }
    if (std::isfinite(report.j_cross_block_mass))
        j["j_cross_block_mass"] = report.j_cross_block_mass;
    return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("failed while writing " + path);
}

} // namespace pgarch::io
