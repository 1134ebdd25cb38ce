#include "presic/demos.hpp"

#include "presic/bmetric.hpp"
#include "presic/contraction.hpp"
#include "presic/errors.hpp"
#include "presic/operator.hpp"
#include "presic/sampling.hpp"
#include "presic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace presic::demos {

namespace {

std::string fmt(double v, int precision = 6) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

std::string fmt_point(const Point& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.dimension(); ++i) {
        if (i > 0) out += ", ";
        out += fmt(p[i], 10);
    }
    return out + ")";
}

std::string fmt_window(const std::vector<Point>& window) {
    std::string out = "[";
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt_point(window[i]);
    }
    return out + "]";
}

} // namespace

bool DemoReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const DemoRow& r) { return r.pass; });
}

std::string DemoReport::table() const {
    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.check.size());
    std::ostringstream s;
    s << "demo " << name << "\n";
    s << std::left << std::setw(static_cast<int>(width)) << "check" << "  result  detail\n";
    s << std::string(width, '-') << "  ------  ------\n";
    for (const auto& r : rows) {
        s << std::left << std::setw(static_cast<int>(width)) << r.check << "  " << (r.pass ? "PASS  " : "FAIL  ")
          << "  " << r.detail << "\n";
    }
    s << (all_pass() ? "all checks passed\n" : "some checks FAILED\n");
    return s.str();
}

const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names{"paper-example-2-1-2", "paper-bmetric-examples", "paper-phi-anomaly"};
    return names;
}

DemoReport averaging_example(std::uint64_t seed) {
    DemoReport report{"paper-example-2-1-2", {}};
    const auto space = BMetricSpace::squared_euclidean(Box::cube(1, 0.0, 2.0));
    const Point origin{0.0};

    for (std::size_t k : {1, 2, 3, 5}) {
        const auto op = PresicOperator::averaging(k);
        const auto seeds = sample_points(space.domain(), 20 * k, seed + k);
        std::size_t converged = 0;
        double worst_limit = 0.0;
        double worst_residual = 0.0;
        for (std::size_t s = 0; s < 20; ++s) {
            const auto trace = iterate(op, space, std::span<const Point>(seeds).subspan(s * k, k));
            if (trace.stop_reason == StopReason::converged) ++converged;
            worst_limit = std::max(worst_limit, space.distance(trace.points.back(), origin));
            worst_residual = std::max(worst_residual, trace.final_residual.value_or(INFINITY));
        }
        report.rows.push_back({"k=" + std::to_string(k) + " converges to 0",
                               std::to_string(converged) + "/20 converged, max d(limit,0)=" + fmt(worst_limit) +
                                   ", max residual=" + fmt(worst_residual),
                               converged == 20 && worst_limit < 1e-8 && worst_residual < 1e-10});

        const auto cert = verify(op, space, cond::CiricMax{0.25}, SamplingPlan::random(20000, seed));
        report.rows.push_back({"k=" + std::to_string(k) + " ciric_max(1/4)",
                               std::string(verdict_name(cert.verdict)) + ", estimated constant " +
                                   fmt(cert.estimated_constant.value_or(0.0)),
                               cert.verdict == Verdict::passed_on_samples});

        const auto diag = verify(op, space, cond::DiagonalPhi{PhiFunction::linear(0.2)},
                                 SamplingPlan::random(20000, seed));
        report.rows.push_back({"k=" + std::to_string(k) + " diagonal_phi(t/5)", verdict_name(diag.verdict),
                               diag.verdict == Verdict::passed_on_samples});
    }
    return report;
}

DemoReport bmetric_examples(std::uint64_t seed) {
    DemoReport report{"paper-bmetric-examples", {}};
    const Box line = Box::cube(1, 0.0, 2.0);

    for (double p : {2.0, 3.0}) {
        const auto space = BMetricSpace::power(line, p);
        const auto est = estimate_b(space, SamplingPlan::grid(100));
        const double target = std::exp2(p - 1.0);
        report.rows.push_back({"power p=" + fmt(p) + " b_hat vs 2^(p-1)",
                               "b_hat=" + fmt(est.b_hat, 12) + ", declared " + fmt(target) + ", witness " +
                                   fmt_window(est.witness),
                               est.b_hat >= target - 0.05 && est.b_hat <= target + 1e-9});
    }

    const auto squared = BMetricSpace::squared_euclidean(line);
    const auto sq = estimate_b(squared, SamplingPlan::grid(101));
    report.rows.push_back({"squared_euclidean b_hat vs 2", "b_hat=" + fmt(sq.b_hat, 12),
                           sq.b_hat >= 2.0 - 0.05 && sq.b_hat <= 2.0 + 1e-9});

    const auto as_metric = check_axioms(squared.with_declared_b(1.0), SamplingPlan::grid(3));
    report.rows.push_back({"squared_euclidean is not a metric (b=1)",
                           std::to_string(as_metric.violations.size()) + " triangle violations on {0,1,2}",
                           !as_metric.ok()});

    const auto lp = BMetricSpace::lp_truncated(Box::cube(4, -1.0, 1.0), 0.5);
    auto plan = SamplingPlan::random(200000, seed);
    const auto lp_est = estimate_b(lp, plan);
    report.rows.push_back({"l_p p=1/2 dim 4 b_hat <= 2^(1/p)",
                           "b_hat=" + fmt(lp_est.b_hat, 12) + ", declared " + fmt(lp.b()),
                           lp_est.b_hat <= lp.b() + 1e-9});

    const auto lp_axioms = check_axioms(lp, SamplingPlan::random(20000, seed));
    report.rows.push_back({"l_p p=1/2 axioms", std::to_string(lp_axioms.violations.size()) + " violations",
                           lp_axioms.ok()});
    return report;
}

DemoReport phi_anomaly(std::uint64_t seed) {
    DemoReport report{"paper-phi-anomaly", {}};
    const auto op = PresicOperator::averaging(1);
    const auto phi = PhiFunction::paper_piecewise();
    const ConditionSpec weak = cond::WeakPhi{phi};

    const auto full = BMetricSpace::squared_euclidean(Box::cube(1, 0.0, 2.0));
    const std::vector<Point> window{Point{0.0}, Point{2.0}};
    const auto direct = evaluate_window(op, full, weak, window);
    report.rows.push_back({"window (0, 2)",
                           "lhs=" + fmt(direct.lhs) + ", M=4, phi(4)=" + fmt(phi(4.0), 10) +
                               ", rhs=M-phi(M)=" + fmt(direct.rhs, 10),
                           direct.rhs < 0.0 && direct.lhs > 0.0});

    const auto cert = verify(op, full, weak, SamplingPlan::random(20000, seed));
    std::string detail = verdict_name(cert.verdict);
    bool in_band = false;
    if (cert.witness) {
        const double m = full.distance(cert.witness->window[0], cert.witness->window[1]);
        in_band = m >= 2.5 && m <= 4.0;
        detail += ", witness " + fmt_window(cert.witness->window) + " with M=" + fmt(m) +
                  ", lhs=" + fmt(cert.witness->lhs) + ", rhs=" + fmt(cert.witness->rhs);
    }
    report.rows.push_back({"weak_phi on [0,2]", detail, cert.verdict == Verdict::falsified && in_band});

    const auto sub = BMetricSpace::squared_euclidean(Box::cube(1, 0.0, 1.5));
    const auto sub_cert = verify(op, sub, weak, SamplingPlan::random(20000, seed));
    report.rows.push_back({"weak_phi on [0,1.5] (M < 5/2)",
                           std::string(verdict_name(sub_cert.verdict)) + ", slack_min=" + fmt(sub_cert.slack_min),
                           sub_cert.verdict == Verdict::passed_on_samples});
    return report;
}

DemoReport run_demo(const std::string& name, std::uint64_t seed) {
    if (name == "paper-example-2-1-2") return averaging_example(seed);
    if (name == "paper-bmetric-examples") return bmetric_examples(seed);
    if (name == "paper-phi-anomaly") return phi_anomaly(seed);
    throw UsageError("unknown demo \"" + name + "\"");
}

} // namespace presic::demos
