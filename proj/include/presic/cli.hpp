#pragma once

#include "presic/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace presic::cli {

/// Stable process exit codes.
enum ExitCode : int { kSuccess = 0, kFailed = 1, kUsage = 2 };

struct Options {
    std::optional<std::uint64_t> seed;
    std::size_t samples = 20000;
    std::string format = "json";
    bool grid = false;
    std::size_t grid_points = 20;
    std::size_t threads = 1;
    bool picard = false;
    bool strict_domain = false;
    bool timestamp = true;
};

struct CommandResult {
    int exit_code = kSuccess;
    std::string output;
};

/// --seed, else PRESIC_LAB_SEED, else `fallback`.
std::uint64_t resolve_seed(const Options& options, std::optional<std::uint64_t> fallback = std::nullopt);

SamplingPlan sampling_plan(const Options& options);

CommandResult cmd_verify(const io::ProblemFile& problem, const Options& options);
CommandResult cmd_solve(const io::ProblemFile& problem, const Options& options);
CommandResult cmd_bounds(const io::ProblemFile& problem, const Options& options, std::optional<double> eta,
                         std::optional<double> a);
CommandResult cmd_estimate_b(const io::ProblemFile& problem, const Options& options);
CommandResult cmd_demo(const std::string& name, const Options& options);

/// Full command line without the program name. Writes results to `out` (or the
/// --out file) and diagnostics to `err`; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace presic::cli
