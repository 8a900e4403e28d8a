#pragma once

#include <string>
#include <vector>

namespace pgarch::cli {

/**
 * Runs one subcommand (simulate, fit, lyapunov, stationarity, montecarlo)
 * given the argument list without the program name. Returns the process exit
 * code: 0 success, 2 usage error, 3 data error, 4 numerical failure.
 */
int dispatch(std::vector<std::string> args);

} // namespace pgarch::cli
