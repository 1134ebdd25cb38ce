#include "presic/io.hpp"

#include "presic/errors.hpp"

#include <fstream>
#include <sstream>

namespace presic::io {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

const Json& require(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw UsageError(where + ": missing \"" + key + "\"");
    return j.at(key);
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw UsageError(where + ": expected a number");
    return j.get<double>();
}

std::size_t count(const Json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw UsageError(where + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

std::string text(const Json& j, const std::string& where) {
    if (!j.is_string()) throw UsageError(where + ": expected a string");
    return j.get<std::string>();
}

/// A number broadcast to `dimension` entries, or an array of exactly that many.
std::vector<double> vector_of(const Json& j, std::size_t dimension, const std::string& where) {
    if (j.is_number()) return std::vector<double>(dimension, j.get<double>());
    if (!j.is_array() || j.size() != dimension) {
        throw UsageError(where + ": expected a number or an array of " + std::to_string(dimension) + " numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Point point_of(const Json& j, std::size_t dimension, const std::string& where) {
    return Point(vector_of(j, dimension, where));
}

BaseMetric base_metric(const std::string& name) {
    if (name == "euclidean") return BaseMetric::euclidean;
    if (name == "manhattan") return BaseMetric::manhattan;
    if (name == "chebyshev") return BaseMetric::chebyshev;
    throw UsageError("space.base: unknown base metric \"" + name + "\"");
}

const char* base_metric_name(BaseMetric b) {
    switch (b) {
    case BaseMetric::euclidean: return "euclidean";
    case BaseMetric::manhattan: return "manhattan";
    case BaseMetric::chebyshev: return "chebyshev";
    }
    return "?";
}

std::size_t infer_dimension(const Json& j) {
    if (j.contains("dim")) return count(j.at("dim"), "space.dim");
    if (j.contains("box")) {
        const Json& box = j.at("box");
        if (box.is_object() && box.contains("lo") && box.at("lo").is_array()) return box.at("lo").size();
    }
    return 1;
}

OrderedJson phi_to_json(const PhiFunction& phi) {
    return std::visit(overloaded{
                          [](const phi::Linear& l) { return OrderedJson{{"kind", "linear"}, {"c", l.c}}; },
                          [](const phi::PaperPiecewise&) { return OrderedJson{{"kind", "paper_piecewise"}}; },
                          [](const phi::Dsl& d) { return OrderedJson{{"kind", "dsl"}, {"expr", d.expr.source()}}; },
                      },
                      phi.kind());
}

OrderedJson optional_number(const std::optional<double>& v) { return v ? OrderedJson(*v) : OrderedJson(nullptr); }

} // namespace

BMetricSpace parse_space(const Json& j) {
    if (!j.is_object()) throw UsageError("space: expected an object");
    const std::string kind = text(require(j, "kind", "space"), "space.kind");
    const std::size_t m = infer_dimension(j);
    if (m == 0) throw UsageError("space.dim must be at least 1");

    std::vector<double> lo(m, 0.0);
    std::vector<double> hi(m, 1.0);
    if (j.contains("box")) {
        const Json& box = j.at("box");
        lo = vector_of(require(box, "lo", "space.box"), m, "space.box.lo");
        hi = vector_of(require(box, "hi", "space.box"), m, "space.box.hi");
    }
    Box domain(lo, hi);

    auto space = [&]() {
        if (kind == "euclidean") return BMetricSpace::euclidean(domain);
        if (kind == "squared_euclidean") return BMetricSpace::squared_euclidean(domain);
        if (kind == "power") {
            const BaseMetric base = j.contains("base") ? base_metric(text(j.at("base"), "space.base"))
                                                       : BaseMetric::euclidean;
            return BMetricSpace::power(domain, number(require(j, "p", "space"), "space.p"), base);
        }
        if (kind == "lp_truncated") return BMetricSpace::lp_truncated(domain, number(require(j, "p", "space"), "space.p"));
        if (kind == "custom" || kind == "custom_dsl") {
            return BMetricSpace::custom(domain, text(require(j, "expr", "space"), "space.expr"),
                                        number(require(j, "b", "space"), "space.b"));
        }
        throw UsageError("space.kind: unknown kind \"" + kind + "\"");
    }();
    if (j.contains("b")) space = space.with_declared_b(number(j.at("b"), "space.b"));
    return space;
}

PresicOperator parse_operator(const Json& j, std::size_t m) {
    if (!j.is_object()) throw UsageError("operator: expected an object");
    const std::string kind = text(require(j, "kind", "operator"), "operator.kind");
    std::optional<std::size_t> k;
    if (j.contains("k")) k = count(j.at("k"), "operator.k");

    PresicOperator op = [&]() {
        if (kind == "averaging") {
            if (!k) throw UsageError("operator: averaging needs \"k\"");
            return PresicOperator::averaging(*k, m);
        }
        if (kind == "affine") {
            const Json& w = require(j, "weights", "operator");
            if (!w.is_array() || w.empty()) throw UsageError("operator.weights: expected a non-empty array");
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < w.size(); ++i) {
                rows.push_back(vector_of(w[i], m, "operator.weights[" + std::to_string(i) + "]"));
            }
            const std::vector<double> offset =
                j.contains("offset") ? vector_of(j.at("offset"), m, "operator.offset") : std::vector<double>(m, 0.0);
            auto out = PresicOperator::affine(std::move(rows), offset);
            if (k && *k != out.arity()) throw UsageError("operator: \"k\" disagrees with the number of weights");
            return out;
        }
        if (kind == "constant") {
            const Json& c = j.contains("value") ? j.at("value") : require(j, "offset", "operator");
            return PresicOperator::constant(k.value_or(1), point_of(c, m, "operator.offset"));
        }
        if (kind == "dsl") {
            if (!k) throw UsageError("operator: dsl needs \"k\"");
            const Json& e = j.contains("expr") ? j.at("expr") : require(j, "exprs", "operator");
            std::vector<std::string> exprs;
            if (e.is_string()) {
                exprs.push_back(e.get<std::string>());
            } else if (e.is_array()) {
                for (std::size_t i = 0; i < e.size(); ++i) {
                    exprs.push_back(text(e[i], "operator.exprs[" + std::to_string(i) + "]"));
                }
            } else {
                throw UsageError("operator.exprs: expected a string or an array of strings");
            }
            return PresicOperator::dsl(*k, m, exprs);
        }
        throw UsageError("operator.kind: unknown kind \"" + kind + "\"");
    }();

    if (j.contains("codomain_check")) {
        if (!j.at("codomain_check").is_boolean()) throw UsageError("operator.codomain_check: expected a boolean");
        op = op.with_codomain_check(j.at("codomain_check").get<bool>());
    }
    return op;
}

PhiFunction parse_phi(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "paper_piecewise") return PhiFunction::paper_piecewise();
        throw UsageError("phi: unknown shorthand \"" + j.get<std::string>() + "\"");
    }
    const std::string kind = text(require(j, "kind", "phi"), "phi.kind");
    if (kind == "linear") return PhiFunction::linear(number(require(j, "c", "phi"), "phi.c"));
    if (kind == "paper_piecewise") return PhiFunction::paper_piecewise();
    if (kind == "dsl") return PhiFunction::dsl(text(require(j, "expr", "phi"), "phi.expr"));
    throw UsageError("phi.kind: unknown kind \"" + kind + "\"");
}

ConditionSpec parse_condition(const Json& j) {
    const std::string kind = text(require(j, "kind", "condition"), "condition.kind");
    auto param = [&](const char* key) { return number(require(j, key, "condition"), std::string("condition.") + key); };

    if (kind == "presic_sum") {
        const Json& r = require(j, "r", "condition");
        if (!r.is_array()) throw UsageError("condition.r: expected an array");
        cond::PresicSum c;
        for (std::size_t i = 0; i < r.size(); ++i) c.r.push_back(number(r[i], "condition.r"));
        return c;
    }
    if (kind == "ciric_max") return cond::CiricMax{param("kappa")};
    if (kind == "lambda_max") return cond::LambdaMax{param("lambda")};
    if (kind == "weak_phi") return cond::WeakPhi{parse_phi(require(j, "phi", "condition"))};
    if (kind == "kannan") return cond::Kannan{param("a")};
    if (kind == "diagonal_strict") return cond::DiagonalStrict{};
    if (kind == "diagonal_phi") return cond::DiagonalPhi{parse_phi(require(j, "phi", "condition"))};
    if (kind == "banach") return cond::Banach{param("eta")};
    throw UsageError("condition.kind: unknown kind \"" + kind + "\"");
}

SolveSpec parse_solve(const Json& j, std::size_t m) {
    if (!j.is_object()) throw UsageError("solve: expected an object");
    SolveSpec spec;
    if (j.contains("start")) {
        const Json& s = j.at("start");
        if (s.is_string()) {
            if (s.get<std::string>() != "random") throw UsageError("solve.start: expected \"random\" or a list of points");
            spec.random_start = true;
        } else if (s.is_array()) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                spec.start.push_back(point_of(s[i], m, "solve.start[" + std::to_string(i) + "]"));
            }
        } else {
            throw UsageError("solve.start: expected \"random\" or a list of points");
        }
    } else {
        spec.random_start = true;
    }
    if (j.contains("stop")) {
        const Json& s = j.at("stop");
        if (!s.is_object()) throw UsageError("solve.stop: expected an object");
        if (s.contains("residual_tol")) spec.stop.residual_tol = number(s.at("residual_tol"), "solve.stop.residual_tol");
        if (s.contains("step_tol")) spec.stop.step_tol = number(s.at("step_tol"), "solve.stop.step_tol");
        if (s.contains("max_iterations")) spec.stop.max_iterations = count(s.at("max_iterations"), "solve.stop.max_iterations");
        if (s.contains("cauchy_window")) spec.stop.cauchy_window = count(s.at("cauchy_window"), "solve.stop.cauchy_window");
    }
    if (j.contains("seed")) spec.seed = count(j.at("seed"), "solve.seed");
    return spec;
}

ProblemFile parse_problem(const Json& j) {
    try {
        if (!j.is_object()) throw UsageError("problem file: expected a JSON object");
        ProblemFile problem{parse_space(require(j, "space", "problem")), std::nullopt, std::nullopt, std::nullopt};
        const std::size_t m = problem.space.dimension();
        if (j.contains("operator")) problem.op = parse_operator(j.at("operator"), m);
        if (j.contains("condition")) problem.condition = parse_condition(j.at("condition"));
        if (j.contains("solve")) problem.solve = parse_solve(j.at("solve"), m);
        if (problem.op && problem.solve && !problem.solve->start.empty() &&
            problem.solve->start.size() != problem.op->arity()) {
            throw UsageError("solve.start must list k = " + std::to_string(problem.op->arity()) + " points");
        }
        return problem;
    } catch (const Json::exception& e) {
        throw UsageError(std::string("problem file: ") + e.what());
    }
}

ProblemFile parse_problem_text(const std::string& source) {
    Json j;
    try {
        j = Json::parse(source);
    } catch (const Json::exception& e) {
        throw UsageError(std::string("problem file is not valid JSON: ") + e.what());
    }
    return parse_problem(j);
}

ProblemFile load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open problem file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

OrderedJson to_json(const Point& p) {
    OrderedJson out = OrderedJson::array();
    for (double c : p.coords()) out.push_back(c);
    return out;
}

OrderedJson to_json(const BMetricSpace& space) {
    OrderedJson out{{"kind", space.kind_name()}, {"dim", space.dimension()}};
    std::visit(overloaded{
                   [&](const metric::Power& k) {
                       out["p"] = k.p;
                       out["base"] = base_metric_name(k.base);
                   },
                   [&](const metric::LpTruncated& k) { out["p"] = k.p; },
                   [&](const metric::Custom& k) { out["expr"] = k.expr.source(); },
                   [](const auto&) {},
               },
               space.kind());
    out["box"] = {{"lo", space.domain().lo()}, {"hi", space.domain().hi()}};
    out["b"] = space.b();
    return out;
}

OrderedJson to_json(const ConditionSpec& condition) {
    OrderedJson out{{"kind", condition_name(condition)}};
    std::visit(overloaded{
                   [&](const cond::PresicSum& c) { out["r"] = c.r; },
                   [&](const cond::CiricMax& c) { out["kappa"] = c.kappa; },
                   [&](const cond::LambdaMax& c) { out["lambda"] = c.lambda; },
                   [&](const cond::WeakPhi& c) { out["phi"] = phi_to_json(c.phi); },
                   [&](const cond::Kannan& c) { out["a"] = c.a; },
                   [](const cond::DiagonalStrict&) {},
                   [&](const cond::DiagonalPhi& c) { out["phi"] = phi_to_json(c.phi); },
                   [&](const cond::Banach& c) { out["eta"] = c.eta; },
               },
               condition);
    return out;
}

OrderedJson to_json(const ContractionCertificate& cert) {
    OrderedJson out;
    out["condition"] = to_json(cert.condition);
    out["verdict"] = verdict_name(cert.verdict);
    out["samples"] = cert.samples;
    out["seed"] = cert.seed;
    out["sampling"] = cert.mode == SamplingMode::grid ? "grid" : "random";
    out["slack_min"] = cert.slack_min;
    out["estimated_constant"] = optional_number(cert.estimated_constant);
    if (cert.witness) {
        OrderedJson window = OrderedJson::array();
        for (const auto& p : cert.witness->window) window.push_back(to_json(p));
        out["witness"] = {{"window", window},
                          {"lhs", cert.witness->lhs},
                          {"rhs", cert.witness->rhs},
                          {"tie", cert.witness->tie},
                          {"sample_index", cert.witness->sample_index}};
    } else {
        out["witness"] = nullptr;
    }
    out["skipped_pairs"] = cert.skipped;
    out["out_of_domain"] = cert.out_of_domain;
    return out;
}

OrderedJson to_json(const AxiomReport& report, std::size_t max_listed) {
    OrderedJson list = OrderedJson::array();
    for (std::size_t i = 0; i < report.violations.size() && i < max_listed; ++i) {
        const auto& v = report.violations[i];
        OrderedJson witness = OrderedJson::array();
        for (const auto& p : v.witness) witness.push_back(to_json(p));
        list.push_back({{"axiom", axiom_name(v.axiom)}, {"witness", witness}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    }
    return {{"checked_pairs", report.checked_pairs},
            {"checked_triples", report.checked_triples},
            {"violation_count", report.violations.size()},
            {"violations", list}};
}

OrderedJson trace_to_json(const IterationTrace& trace, const BoundReport* bounds) {
    OrderedJson rows = OrderedJson::array();
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        OrderedJson row{{"n", i + 1}, {"x", to_json(trace.points[i])}};
        row["alpha_n"] = i < trace.alphas.size() ? OrderedJson(trace.alphas[i]) : OrderedJson(nullptr);
        if (bounds) {
            row["bound_n"] = i < bounds->per_step_bounds.size() ? OrderedJson(bounds->per_step_bounds[i])
                                                                : OrderedJson(nullptr);
        }
        rows.push_back(std::move(row));
    }
    OrderedJson out;
    out["stop_reason"] = stop_reason_name(trace.stop_reason);
    out["iterations"] = trace.points.size();
    out["fitted_rate"] = optional_number(trace.fitted_rate);
    out["limit"] = trace.limit ? to_json(*trace.limit) : OrderedJson(nullptr);
    out["final_residual"] = optional_number(trace.final_residual);
    out["out_of_domain"] = trace.out_of_domain;
    out["rows"] = std::move(rows);
    return out;
}

std::string trace_to_csv(const IterationTrace& trace, const BoundReport* bounds) {
    std::string out = bounds ? "n,x,alpha_n,bound_n\n" : "n,x,alpha_n\n";
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        const auto coords = trace.points[i].coords();
        for (std::size_t c = 0; c < coords.size(); ++c) {
            if (c > 0) out += ';';
            out += dsl::format_number(coords[c]);
        }
        out += ',';
        if (i < trace.alphas.size()) out += dsl::format_number(trace.alphas[i]);
        if (bounds) {
            out += ',';
            if (i < bounds->per_step_bounds.size()) out += dsl::format_number(bounds->per_step_bounds[i]);
        }
        out += '\n';
    }
    return out;
}

OrderedJson bounds_to_json(const BoundReport& report, double eta, const IterationTrace& trace,
                           const BMetricSpace& space, std::size_t tail_window) {
    OrderedJson steps = OrderedJson::array();
    for (std::size_t n = 1; n <= report.per_step_bounds.size(); ++n) {
        steps.push_back({{"n", n}, {"alpha_n", trace.alphas[n - 1]}, {"bound_n", report.per_step_bounds[n - 1]}});
    }
    OrderedJson tail = OrderedJson::array();
    const auto& pts = trace.points;
    for (std::size_t n = 1; n <= pts.size(); ++n) {
        for (std::size_t p : {std::size_t{1}, tail_window}) {
            if (n - 1 + p >= pts.size()) continue;
            tail.push_back({{"n", n},
                            {"p", p},
                            {"bound", report.tail_bound(n, p)},
                            {"observed", space.distance(pts[n - 1], pts[n - 1 + p])}});
            if (tail_window == 1) break;
        }
    }
    OrderedJson out;
    out["scheme"] = "presic";
    out["eta"] = eta;
    out["theta"] = report.theta;
    out["K"] = report.K;
    out["b"] = report.b;
    out["k"] = report.k;
    out["all_steps_within"] = report.all_steps_within;
    out["per_step"] = std::move(steps);
    out["tail"] = std::move(tail);
    return out;
}

} // namespace presic::io
