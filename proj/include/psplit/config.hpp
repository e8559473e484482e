#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psplit/engine.hpp"
#include "psplit/problems.hpp"
#include "psplit/scheduler.hpp"

namespace psplit {

/// Parse failure; the message names the offending key and its bound.
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ProblemConfig {
    std::string kind = "lasso";
    std::optional<std::uint64_t> seed;  // defaults to the run seed

    // lasso: either explicit data or a random instance
    std::optional<std::vector<std::vector<double>>> a;
    std::optional<std::vector<double>> b;
    std::optional<double> lambda;  // also used by skew_composed
    std::size_t rows = 20;
    std::size_t cols = 50;
    std::size_t nonzeros = 5;
    double noise = 0.01;
    double lambda_ratio = 0.1;

    // box_cubic and signed_sqrt; empty means the built-in default
    std::vector<double> c;
    std::vector<double> lower;
    std::vector<double> upper;

    // skew_composed
    std::size_t dim = 6;
    std::size_t m1 = 5;
    std::size_t m2 = 4;
    double skew_scale = 1.0;
    double shift_scale = 1.0;
    bool identity_maps = false;

    /// Overrides the natural forward/backward assignment of the blocks.
    std::vector<BlockKind> partition;
    /// Start from the reference KKT point instead of the origin.
    bool start_at_reference = false;
    /// Initial primal point (duals start at zero); empty means the origin.
    std::vector<double> z0;

    std::size_t num_blocks() const { return kind == "skew_composed" ? 3 : 2; }
    friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

struct RunConfig {
    std::uint64_t seed = 1;
    ProblemConfig problem;
    EngineConfig engine;
    /// Seeds inside `errors` and `schedule` are ignored; the optional seeds
    /// below override the values derived from `seed`.
    ErrorPolicy errors;
    SchedulePolicy schedule;
    std::optional<std::uint64_t> error_seed;
    std::optional<std::uint64_t> schedule_seed;
    std::optional<std::uint64_t> delay_seed;
    std::string trace_path = "trace.csv";
    std::string summary_path = "summary.json";

    std::uint64_t problem_seed() const { return problem.seed.value_or(seed); }
    SchedulePolicy schedule_policy() const;
    ErrorPolicy error_policy() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates a JSON run configuration. Omitted fields take
/// their defaults.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& config);

/// Throws ParseError if any engine, schedule or error bound is violated.
void validate_config(const RunConfig& config);

/// Builds the configured problem, applying partition and start overrides.
ProblemInstance build_problem(const RunConfig& config);

}  // namespace psplit
