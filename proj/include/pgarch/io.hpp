#pragma once

#include <string>

#include <json.hpp>

#include "pgarch/mc_harness.hpp"
#include "pgarch/model.hpp"
#include "pgarch/qmle.hpp"
#include "pgarch/stationarity.hpp"

namespace pgarch::io {

/// Writes columns t, season, y (and h when the series carries the true track)
/// with 17 significant digits, enough to round-trip doubles exactly.
void write_series_csv(const std::string& path, const Series& series);

/**
 * Reads one observation per row from a headed CSV. value_column selects the
 * column holding y. offset says the file starts at season offset+1; the
 * leading (S - offset) mod S rows are dropped so observation 1 of the result
 * is season 1. Errors name the file and line.
 */
Series read_series_csv(const std::string& path, int period,
                       const std::string& value_column = "y", int offset = 0);

nlohmann::json spec_to_json(const PGarchSpec& spec);
PGarchSpec spec_from_json(const nlohmann::json& j);

nlohmann::json fit_result_to_json(const FitResult& result);
nlohmann::json lyapunov_to_json(const LyapunovEstimate& estimate);
nlohmann::json report_to_json(const MonteCarloReport& report, const std::string& task);

/// Serializes with sorted keys and a trailing newline; byte-stable across runs.
void write_json(const std::string& path, const nlohmann::json& j);

} // namespace pgarch::io
