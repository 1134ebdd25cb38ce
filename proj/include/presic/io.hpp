#pragma once

#include "presic/bmetric.hpp"
#include "presic/contraction.hpp"
#include "presic/operator.hpp"
#include "presic/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace presic::io {

using Json = nlohmann::json;
/// Output documents keep key insertion order.
using OrderedJson = nlohmann::ordered_json;

struct SolveSpec {
    /// Empty when the problem asks for random starts.
    std::vector<Point> start;
    bool random_start = false;
    StopRule stop;
    std::optional<std::uint64_t> seed;
};

struct ProblemFile {
    BMetricSpace space;
    std::optional<PresicOperator> op;
    std::optional<ConditionSpec> condition;
    std::optional<SolveSpec> solve;
};

// Readers throw UsageError with a path-like hint on malformed input.
BMetricSpace parse_space(const Json& j);
PresicOperator parse_operator(const Json& j, std::size_t dimension);
PhiFunction parse_phi(const Json& j);
ConditionSpec parse_condition(const Json& j);
SolveSpec parse_solve(const Json& j, std::size_t dimension);
ProblemFile parse_problem(const Json& j);
ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem(const std::filesystem::path& path);

OrderedJson to_json(const Point& p);
OrderedJson to_json(const BMetricSpace& space);
OrderedJson to_json(const ConditionSpec& cond);
OrderedJson to_json(const ContractionCertificate& cert);
OrderedJson to_json(const AxiomReport& report, std::size_t max_listed);

/// Trace rows n, x, alpha_n (and bound_n when `bounds` is given) plus the run summary.
OrderedJson trace_to_json(const IterationTrace& trace, const BoundReport* bounds = nullptr);

/// CSV with header n,x,alpha_n[,bound_n]; x is the coordinates joined by ';'.
std::string trace_to_csv(const IterationTrace& trace, const BoundReport* bounds = nullptr);

/// Envelope, per-step comparison and tail bounds for p = 1 and p = `tail_window`.
OrderedJson bounds_to_json(const BoundReport& report, double eta, const IterationTrace& trace,
                           const BMetricSpace& space, std::size_t tail_window);

} // namespace presic::io
