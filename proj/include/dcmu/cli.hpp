#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "dcmu/simulator.hpp"

namespace dcmu {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;      // usage, I/O or numerical abort
inline constexpr int kExitMetricFail = 2; // connectivity lost or gradient check failed

/// Entry point of the `dcmu` tool: subcommands run, montecarlo, gradcheck.
int cli_main(int argc, const char* const* argv);

/// Fixed 9-significant-digit scientific notation used in every CSV.
std::string format_number(double v);

/// steps.csv contents for a run recorded with keep_records.
std::string steps_csv(const RunMetrics& run, std::size_t n_robots);

/// Thread cap from DCMU_THREADS; 0 when unset. Throws std::invalid_argument
/// on a value that is not a positive integer.
int threads_from_env();

}  // namespace dcmu
