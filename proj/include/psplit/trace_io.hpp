#pragma once

#include <string>

#include "psplit/engine.hpp"
#include "psplit/problems.hpp"

namespace psplit {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// iter, phi, pi, alpha, residual maxima, then per-block backtracks and
/// stepsizes; two trailing comment lines carry the status and iteration
/// count. The file depends only on the run, never on the clock.
std::string trace_csv(const RunTrace& trace, std::size_t num_blocks);

/// Final point, residuals, status and timing as JSON.
std::string summary_json(const RunTrace& trace, const ProblemInstance& instance);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace psplit
