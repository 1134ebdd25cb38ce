#include "presic/cli.hpp"

#include "presic/demos.hpp"
#include "presic/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace presic::cli {

namespace {

// Kannan comparisons are quadratic in the trace length.
constexpr std::size_t kKannanPointCap = 2000;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

io::OrderedJson document(const char* command, const Options& options) {
    io::OrderedJson doc;
    doc["command"] = command;
    if (options.timestamp) doc["generated_at"] = utc_timestamp();
    return doc;
}

std::string dump(const io::OrderedJson& doc) { return doc.dump(2) + "\n"; }

void check_format(const Options& options) {
    if (options.format != "json" && options.format != "csv") {
        throw UsageError("--format must be json or csv, got \"" + options.format + "\"");
    }
}

const PresicOperator& require_operator(const io::ProblemFile& problem) {
    if (!problem.op) throw UsageError("problem file has no \"operator\" block");
    return *problem.op;
}

PresicOperator effective_operator(const io::ProblemFile& problem, const Options& options) {
    const auto& op = require_operator(problem);
    return op.with_codomain_check(op.codomain_check() || options.strict_domain);
}

std::string csv_number(const std::optional<double>& v) {
    if (!v) return "";
    return dsl::format_number(*v);
}

struct Run {
    IterationTrace trace;
    std::vector<Point> start;
    std::optional<std::uint64_t> seed;
};

Run run_solver(const io::ProblemFile& problem, const Options& options, const PresicOperator& op) {
    const io::SolveSpec solve = problem.solve.value_or(io::SolveSpec{{}, true, {}, std::nullopt});
    const std::size_t needed = options.picard ? 1 : op.arity();
    Run run;
    if (solve.random_start || solve.start.empty()) {
        run.seed = options.seed ? *options.seed : solve.seed ? *solve.seed : resolve_seed(options);
        run.start = sample_points(problem.space.domain(), needed, *run.seed);
    } else {
        run.start.assign(solve.start.begin(), solve.start.begin() + static_cast<std::ptrdiff_t>(needed));
    }
    run.trace = options.picard ? picard(op, problem.space, run.start.front(), solve.stop)
                               : iterate(op, problem.space, run.start, solve.stop);
    return run;
}

io::OrderedJson points_json(const std::vector<Point>& points) {
    io::OrderedJson out = io::OrderedJson::array();
    for (const auto& p : points) out.push_back(io::to_json(p));
    return out;
}

} // namespace

std::uint64_t resolve_seed(const Options& options, std::optional<std::uint64_t> fallback) {
    if (options.seed) return *options.seed;
    if (const char* env = std::getenv("PRESIC_LAB_SEED"); env != nullptr && *env != '\0') {
        std::uint64_t value = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec != std::errc{} || ptr != end) {
            throw UsageError(std::string("PRESIC_LAB_SEED is not an unsigned integer: \"") + env + "\"");
        }
        return value;
    }
    return fallback.value_or(0);
}

SamplingPlan sampling_plan(const Options& options) {
    SamplingPlan plan = options.grid ? SamplingPlan::grid(options.grid_points)
                                     : SamplingPlan::random(options.samples, resolve_seed(options));
    plan.seed = resolve_seed(options);
    plan.threads = options.threads;
    return plan;
}

CommandResult cmd_verify(const io::ProblemFile& problem, const Options& options) {
    check_format(options);
    const PresicOperator op = effective_operator(problem, options);
    if (!problem.condition) throw UsageError("problem file has no \"condition\" block");
    const SamplingPlan plan = sampling_plan(options);
    const auto cert = verify(op, problem.space, *problem.condition, plan);

    CommandResult result;
    result.exit_code = cert.verdict == Verdict::passed_on_samples ? kSuccess : kFailed;
    if (options.format == "csv") {
        std::ostringstream s;
        s << "condition,verdict,samples,seed,slack_min,estimated_constant,witness_lhs,witness_rhs\n";
        s << condition_name(cert.condition) << ',' << verdict_name(cert.verdict) << ',' << cert.samples << ','
          << cert.seed << ',' << dsl::format_number(cert.slack_min) << ',' << csv_number(cert.estimated_constant)
          << ',' << (cert.witness ? dsl::format_number(cert.witness->lhs) : "") << ','
          << (cert.witness ? dsl::format_number(cert.witness->rhs) : "") << '\n';
        result.output = s.str();
        return result;
    }
    auto doc = document("verify", options);
    doc["space"] = io::to_json(problem.space);
    doc["operator"] = op.kind_name();
    doc["arity"] = op.arity();
    doc["certificate"] = io::to_json(cert);
    result.output = dump(doc);
    return result;
}

CommandResult cmd_solve(const io::ProblemFile& problem, const Options& options) {
    check_format(options);
    const PresicOperator op = effective_operator(problem, options);
    if (!problem.solve) throw UsageError("problem file has no \"solve\" block");
    const Run run = run_solver(problem, options, op);

    CommandResult result;
    result.exit_code = run.trace.stop_reason == StopReason::converged ? kSuccess : kFailed;
    if (options.format == "csv") {
        result.output = io::trace_to_csv(run.trace);
        return result;
    }
    auto doc = document("solve", options);
    doc["scheme"] = options.picard ? "picard" : "presic";
    doc["seed"] = run.seed ? io::OrderedJson(*run.seed) : io::OrderedJson(nullptr);
    doc["start"] = points_json(run.start);
    doc["trace"] = io::trace_to_json(run.trace);
    result.output = dump(doc);
    return result;
}

CommandResult cmd_bounds(const io::ProblemFile& problem, const Options& options, std::optional<double> eta,
                         std::optional<double> a) {
    check_format(options);
    if (eta.has_value() == a.has_value()) throw UsageError("bounds needs exactly one of --eta or --a");
    const PresicOperator op = effective_operator(problem, options);
    const BMetricSpace& space = problem.space;
    const double b = space.b();
    CommandResult result;

    if (eta) {
        if (!(*eta > 0.0 && *eta < 1.0)) throw UsageError("--eta must lie in (0, 1)");
        const Run run = run_solver(problem, options, op);
        const std::size_t k = options.picard ? 1 : op.arity();
        if (run.trace.alphas.size() < k) throw UsageError("trace too short for bounds");
        const auto report = presic_bounds(run.trace, *eta, b, k);
        const std::size_t window = problem.solve ? problem.solve->stop.cauchy_window : StopRule{}.cauchy_window;
        auto body = io::bounds_to_json(report, *eta, run.trace, space, window);
        bool tails_within = true;
        for (const auto& row : body["tail"]) {
            if (exceeds(row["observed"].get<double>(), row["bound"].get<double>())) tails_within = false;
        }
        result.exit_code = report.all_steps_within && tails_within ? kSuccess : kFailed;
        if (options.format == "csv") {
            result.output = io::trace_to_csv(run.trace, &report);
            return result;
        }
        auto doc = document("bounds", options);
        doc["seed"] = run.seed ? io::OrderedJson(*run.seed) : io::OrderedJson(nullptr);
        doc["start"] = points_json(run.start);
        doc["stop_reason"] = stop_reason_name(run.trace.stop_reason);
        for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
        doc["tails_within"] = tails_within;
        result.output = dump(doc);
        return result;
    }

    const std::size_t k = op.arity();
    const double lambda = *a * static_cast<double>(k) * std::pow(b, static_cast<double>(k));
    if (!(*a >= 0.0) || !(b * lambda < 1.0)) throw UsageError("--a must satisfy 0 <= a k b^(k+1) < 1");
    Options picard_options = options;
    picard_options.picard = true;
    const Run run = run_solver(problem, picard_options, op);
    const auto& pts = run.trace.points;
    const std::size_t n_points = std::min(pts.size(), kKannanPointCap);
    const double d01 = pts.size() > 1 ? space.distance(pts[0], pts[1]) : 0.0;

    io::OrderedJson rows = io::OrderedJson::array();
    std::ostringstream csv;
    csv << "n,bound_n,observed_n\n";
    bool within = true;
    for (std::size_t n = 0; n + 1 < n_points; ++n) {
        double observed = 0.0;
        for (std::size_t m = n + 1; m < n_points; ++m) observed = std::max(observed, space.distance(pts[n], pts[m]));
        const double bound = kannan_bounds(*a, k, b, d01, n);
        if (exceeds(observed, bound)) within = false;
        rows.push_back({{"n", n}, {"bound_n", bound}, {"observed_n", observed}});
        csv << n << ',' << dsl::format_number(bound) << ',' << dsl::format_number(observed) << '\n';
    }
    result.exit_code = within ? kSuccess : kFailed;
    if (options.format == "csv") {
        result.output = csv.str();
        return result;
    }
    auto doc = document("bounds", options);
    doc["scheme"] = "kannan";
    doc["a"] = *a;
    doc["lambda"] = lambda;
    doc["b"] = b;
    doc["k"] = k;
    doc["d01"] = d01;
    doc["seed"] = run.seed ? io::OrderedJson(*run.seed) : io::OrderedJson(nullptr);
    doc["start"] = points_json(run.start);
    doc["stop_reason"] = stop_reason_name(run.trace.stop_reason);
    doc["points_compared"] = n_points;
    doc["all_steps_within"] = within;
    doc["per_step"] = std::move(rows);
    result.output = dump(doc);
    return result;
}

CommandResult cmd_estimate_b(const io::ProblemFile& problem, const Options& options) {
    check_format(options);
    const SamplingPlan plan = sampling_plan(options);
    const auto estimate = estimate_b(problem.space, plan);
    const auto axioms = check_axioms(problem.space, plan);
    const bool sharp_ok = !exceeds(estimate.b_hat, problem.space.b());

    CommandResult result;
    result.exit_code = sharp_ok && axioms.ok() ? kSuccess : kFailed;
    if (options.format == "csv") {
        std::ostringstream s;
        s << "declared_b,b_hat,skipped,violations\n"
          << dsl::format_number(problem.space.b()) << ',' << dsl::format_number(estimate.b_hat) << ','
          << estimate.skipped << ',' << axioms.violations.size() << '\n';
        result.output = s.str();
        return result;
    }
    auto doc = document("estimate-b", options);
    doc["space"] = io::to_json(problem.space);
    doc["sampling"] = plan.mode == SamplingMode::grid ? "grid" : "random";
    doc["seed"] = plan.seed;
    doc["declared_b"] = problem.space.b();
    doc["b_hat"] = estimate.b_hat;
    doc["witness"] = points_json(estimate.witness);
    doc["skipped_triples"] = estimate.skipped;
    doc["within_declared_b"] = sharp_ok;
    doc["axioms"] = io::to_json(axioms, 20);
    result.output = dump(doc);
    return result;
}

CommandResult cmd_demo(const std::string& name, const Options& options) {
    check_format(options);
    const auto report = demos::run_demo(name, resolve_seed(options));
    CommandResult result;
    result.exit_code = report.all_pass() ? kSuccess : kFailed;
    if (options.format == "csv") {
        std::ostringstream s;
        s << "check,pass,detail\n";
        for (const auto& row : report.rows) {
            s << '"' << row.check << "\"," << (row.pass ? "true" : "false") << ",\"" << row.detail << "\"\n";
        }
        result.output = s.str();
        return result;
    }
    result.output = report.table();
    return result;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical laboratory for Presic-type fixed point iterations on b-metric spaces", "presic-lab"};
    app.require_subcommand(1);
    app.fallthrough();

    Options options;
    std::uint64_t seed = 0;
    std::string out_path;
    bool no_timestamp = false;
    auto* seed_opt = app.add_option("--seed", seed, "Sampling seed (default: $PRESIC_LAB_SEED, else 0)");
    app.add_option("--samples", options.samples, "Random samples per check")->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "Write the result to this file instead of stdout");
    app.add_option("--format", options.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--grid", options.grid, "Sample on a deterministic per-axis grid");
    app.add_option("--grid-points", options.grid_points, "Grid nodes per axis")->check(CLI::Range(2, 100000));
    app.add_option("--threads", options.threads, "Worker threads for sampling")->check(CLI::Range(1, 256));
    app.add_flag("--picard", options.picard, "Iterate the diagonal map x_{n+1} = F(x_n)");
    app.add_flag("--strict-domain", options.strict_domain, "Fail when an iterate leaves the box");
    app.add_flag("--no-timestamp", no_timestamp, "Omit generated_at from JSON output");

    std::string problem_path;
    auto* verify_cmd = app.add_subcommand("verify", "Check the problem's contraction condition on samples");
    verify_cmd->add_option("problem", problem_path, "Problem file")->required();
    auto* solve_cmd = app.add_subcommand("solve", "Run the iteration and write its trace");
    solve_cmd->add_option("problem", problem_path, "Problem file")->required();
    auto* bounds_cmd = app.add_subcommand("bounds", "Compare a trace with the a priori error bounds");
    bounds_cmd->add_option("problem", problem_path, "Problem file")->required();
    double eta = 0.0;
    double a = 0.0;
    auto* eta_opt = bounds_cmd->add_option("--eta", eta, "Max-condition constant");
    auto* a_opt = bounds_cmd->add_option("--a", a, "Kannan constant");
    eta_opt->excludes(a_opt);
    auto* estimate_cmd = app.add_subcommand("estimate-b", "Estimate the relaxation constant and check the axioms");
    estimate_cmd->add_option("problem", problem_path, "Problem file")->required();
    std::string demo_name;
    auto* demo_cmd = app.add_subcommand("demo", "Run a bundled reproduction");
    demo_cmd->add_option("name", demo_name, "One of: paper-example-2-1-2, paper-bmetric-examples, paper-phi-anomaly")
        ->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    if (seed_opt->count() > 0) options.seed = seed;
    options.timestamp = !no_timestamp;

    try {
        CommandResult result;
        if (demo_cmd->parsed()) {
            result = cmd_demo(demo_name, options);
        } else {
            const auto problem = io::load_problem(problem_path);
            if (verify_cmd->parsed()) {
                result = cmd_verify(problem, options);
            } else if (solve_cmd->parsed()) {
                result = cmd_solve(problem, options);
            } else if (bounds_cmd->parsed()) {
                result = cmd_bounds(problem, options, eta_opt->count() ? std::optional(eta) : std::nullopt,
                                    a_opt->count() ? std::optional(a) : std::nullopt);
            } else {
                result = cmd_estimate_b(problem, options);
            }
        }
        if (out_path.empty()) {
            out << result.output;
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) throw UsageError("cannot write " + out_path);
            file << result.output;
        }
        return result.exit_code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DegenerateDomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        err << "domain violation: " << e.what() << "\n";
        return kFailed;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kFailed;
    }
}

} // namespace presic::cli
