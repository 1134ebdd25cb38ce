#include "presic/contraction.hpp"

#include "presic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace presic {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

double piecewise_phi(double t) {
    if (t < 2.5) return t / 5.0;
    for (int n = 1;; ++n) {
        // upper end of branch n: (2^(2(n+1)) + 1) / 2^(n+1) = 2^(n+1) + 2^-(n+1)
        const double hi = std::ldexp(1.0, n + 1) + std::ldexp(1.0, -(n + 1));
        if (t <= hi) {
            // 2^(2n) / (2^(2n+1) - 1) rewritten as 1 / (2 - 2^-2n) to stay finite for large n
            return (std::ldexp(t, n + 1) - 3.0) / (2.0 - std::ldexp(1.0, -2 * n));
        }
    }
}

} // namespace

PhiFunction PhiFunction::linear(double c) {
    if (!(c > 0.0 && c < 1.0)) throw UsageError("linear phi needs 0 < c < 1");
    return PhiFunction(phi::Linear{c});
}

PhiFunction PhiFunction::paper_piecewise() { return PhiFunction(phi::PaperPiecewise{}); }

PhiFunction PhiFunction::dsl(std::string_view expr) {
    return PhiFunction(phi::Dsl{dsl::parse(expr, dsl::PhiContext{})});
}

double PhiFunction::operator()(double t) const {
    if (std::isnan(t)) throw NumericError("phi evaluated at NaN");
    if (t < 0.0 || !std::isfinite(t)) throw UsageError("phi is defined on finite t >= 0");
    return std::visit(overloaded{
                          [t](const phi::Linear& l) { return l.c * t; },
                          [t](const phi::PaperPiecewise&) { return piecewise_phi(t); },
                          [t](const phi::Dsl& d) {
                              const double env[1] = {t};
                              return d.expr.eval(env);
                          },
                      },
                      kind_);
}

std::string PhiFunction::kind_name() const {
    return std::visit(overloaded{
                          [](const phi::Linear&) { return std::string("linear"); },
                          [](const phi::PaperPiecewise&) { return std::string("paper_piecewise"); },
                          [](const phi::Dsl&) { return std::string("dsl"); },
                      },
                      kind_);
}

void validate_phi(const PhiFunction& phi, double t_max) {
    if (phi(0.0) != 0.0) throw UsageError("phi(0) must be 0");
    if (!(t_max > 0.0)) t_max = 1.0;
    constexpr int kNodes = 256;
    for (int i = -6; i <= kNodes; ++i) {
        const double t = i <= 0 ? t_max * std::pow(10.0, i - 3) : t_max * i / kNodes;
        const double v = phi(t);
        if (!(v > 0.0)) {
            throw UsageError("phi must be positive for t > 0; phi(" + dsl::format_number(t) +
                             ") = " + dsl::format_number(v));
        }
    }
}

std::string condition_name(const ConditionSpec& cond) {
    return std::visit(overloaded{
                          [](const cond::PresicSum&) { return std::string("presic_sum"); },
                          [](const cond::CiricMax&) { return std::string("ciric_max"); },
                          [](const cond::LambdaMax&) { return std::string("lambda_max"); },
                          [](const cond::WeakPhi&) { return std::string("weak_phi"); },
                          [](const cond::Kannan&) { return std::string("kannan"); },
                          [](const cond::DiagonalStrict&) { return std::string("diagonal_strict"); },
                          [](const cond::DiagonalPhi&) { return std::string("diagonal_phi"); },
                          [](const cond::Banach&) { return std::string("banach"); },
                      },
                      cond);
}

bool is_diagonal(const ConditionSpec& cond) {
    return std::holds_alternative<cond::DiagonalStrict>(cond) || std::holds_alternative<cond::DiagonalPhi>(cond) ||
           std::holds_alternative<cond::Banach>(cond);
}

void validate_condition(const ConditionSpec& condition, std::size_t arity, double b) {
    std::visit(overloaded{
                   [&](const cond::PresicSum& c) {
                       if (c.r.size() != arity) {
                           throw UsageError("presic_sum needs exactly k = " + std::to_string(arity) + " weights");
                       }
                       double sum = 0.0;
                       for (double r : c.r) {
                           if (!(r >= 0.0) || !std::isfinite(r)) throw UsageError("presic_sum weights must be >= 0");
                           sum += r;
                       }
                       if (!(sum < 1.0)) throw UsageError("presic_sum weights must sum to less than 1");
                   },
                   [](const cond::CiricMax& c) {
                       if (!(c.kappa > 0.0 && c.kappa < 1.0)) throw UsageError("ciric_max needs 0 < kappa < 1");
                   },
                   [](const cond::LambdaMax& c) {
                       if (!(c.lambda >= 0.0 && c.lambda < 1.0)) throw UsageError("lambda_max needs 0 <= lambda < 1");
                   },
                   [](const cond::WeakPhi&) {},
                   [&](const cond::Kannan& c) {
                       const double scaled = c.a * static_cast<double>(arity) * std::pow(b, static_cast<double>(arity + 1));
                       if (!(c.a >= 0.0) || !(scaled < 1.0)) throw UsageError("kannan needs 0 <= a k b^(k+1) < 1");
                   },
                   [](const cond::DiagonalStrict&) {},
                   [](const cond::DiagonalPhi&) {},
                   [](const cond::Banach& c) {
                       if (!(c.eta >= 0.0 && c.eta < 1.0)) throw UsageError("banach needs 0 <= eta < 1");
                   },
               },
               condition);
}

const char* verdict_name(Verdict v) noexcept {
    return v == Verdict::falsified ? "falsified" : "passed_on_samples";
}

namespace {

WindowEvaluation evaluate(const PresicOperator& op, const BMetricSpace& space, const ConditionSpec& condition,
                          std::span<const Point> window, DomainTally& tally) {
    const std::size_t k = op.arity();
    WindowEvaluation e;

    if (is_diagonal(condition)) {
        if (window.size() != 2) throw UsageError("diagonal conditions are evaluated on pairs");
        const Point fx = diagonal_apply_in(op, space, window[0], tally);
        const Point fy = diagonal_apply_in(op, space, window[1], tally);
        e.lhs = space.distance(fx, fy);
        const double d = space.distance(window[0], window[1]);
        std::visit(overloaded{
                       [&](const cond::DiagonalStrict&) {
                           e.rhs = d;
                           e.base = d;
                       },
                       [&](const cond::DiagonalPhi& c) { e.rhs = d - c.phi(d); },
                       [&](const cond::Banach& c) {
                           e.rhs = c.eta * d;
                           e.base = d;
                       },
                       [](const auto&) {},
                   },
                   condition);
        return e;
    }

    if (window.size() != k + 1) {
        throw UsageError("condition windows must hold k + 1 = " + std::to_string(k + 1) + " points");
    }
    const Point left = apply_in(op, space, window.first(k), tally);
    const Point right = apply_in(op, space, window.subspan(1, k), tally);
    e.lhs = space.distance(left, right);

    std::vector<double> steps(k);
    for (std::size_t j = 0; j < k; ++j) steps[j] = space.distance(window[j], window[j + 1]);
    const double max_step = *std::max_element(steps.begin(), steps.end());

    std::visit(overloaded{
                   [&](const cond::PresicSum& c) {
                       e.rhs = std::inner_product(c.r.begin(), c.r.end(), steps.begin(), 0.0);
                   },
                   [&](const cond::CiricMax& c) {
                       e.rhs = c.kappa * max_step;
                       e.base = max_step;
                   },
                   [&](const cond::LambdaMax& c) {
                       e.rhs = c.lambda * max_step;
                       e.base = max_step;
                   },
                   [&](const cond::WeakPhi& c) { e.rhs = max_step - c.phi(max_step); },
                   [&](const cond::Kannan& c) {
                       double worst = 0.0;
                       for (const auto& x : window) {
                           worst = std::max(worst, space.distance(x, diagonal_apply_in(op, space, x, tally)));
                       }
                       e.rhs = c.a * worst;
                       e.base = worst;
                   },
                   [](const auto&) {},
               },
               condition);
    return e;
}

struct VerifyAcc {
    std::optional<Witness> witness;
    double slack_min = std::numeric_limits<double>::infinity();
    double ratio = -1.0;
    std::size_t skipped = 0;
    std::size_t outside = 0;
};

ContractionCertificate run_verification(const PresicOperator& op, const BMetricSpace& space,
                                        const ConditionSpec& condition, const SamplingPlan& plan,
                                        std::size_t tuple_size) {
    if (op.dimension() != space.dimension()) throw UsageError("operator and space dimensions differ");
    validate_condition(condition, op.arity(), space.b());
    const double t_max = space.distance(Point(space.domain().lo()), Point(space.domain().hi()));
    if (const auto* c = std::get_if<cond::WeakPhi>(&condition)) validate_phi(c->phi, t_max);
    if (const auto* c = std::get_if<cond::DiagonalPhi>(&condition)) validate_phi(c->phi, t_max);

    const bool pairs = tuple_size == 2 && is_diagonal(condition);
    const auto acc = for_each_tuple<VerifyAcc>(
        plan, space.domain(), tuple_size,
        [&](VerifyAcc& a, std::size_t index, std::span<const Point> window) {
            if (pairs && window[0] == window[1]) {
                ++a.skipped;
                return;
            }
            DomainTally tally;
            const WindowEvaluation e = evaluate(op, space, condition, window, tally);
            a.outside += tally.outside;
            a.slack_min = std::min(a.slack_min, e.rhs - e.lhs);
            if (e.base && *e.base > 0.0) a.ratio = std::max(a.ratio, e.lhs / *e.base);
            if (!a.witness && violates(condition, e)) {
                a.witness = Witness{{window.begin(), window.end()}, e.lhs, e.rhs, !exceeds(e.lhs, e.rhs), index};
            }
        },
        [](VerifyAcc& into, VerifyAcc&& from) {
            if (!into.witness && from.witness) into.witness = std::move(from.witness);
            into.slack_min = std::min(into.slack_min, from.slack_min);
            into.ratio = std::max(into.ratio, from.ratio);
            into.skipped += from.skipped;
            into.outside += from.outside;
        });

    ContractionCertificate cert{condition,   0,           0,           SamplingMode::random, Verdict::passed_on_samples,
                                std::nullopt, std::nullopt};
    cert.samples = tuple_count(plan, space.domain(), tuple_size);
    cert.seed = plan.seed;
    cert.mode = plan.mode;
    cert.verdict = acc.witness ? Verdict::falsified : Verdict::passed_on_samples;
    cert.witness = acc.witness;
    if (acc.ratio >= 0.0) cert.estimated_constant = acc.ratio;
    cert.slack_min = std::isfinite(acc.slack_min) ? acc.slack_min : 0.0;
    cert.skipped = acc.skipped;
    cert.out_of_domain = acc.outside;
    return cert;
}

} // namespace

WindowEvaluation evaluate_window(const PresicOperator& op, const BMetricSpace& space, const ConditionSpec& cond,
                                 std::span<const Point> window) {
    DomainTally tally;
    return evaluate(op, space, cond, window, tally);
}

bool violates(const ConditionSpec& cond, const WindowEvaluation& e) noexcept {
    if (std::holds_alternative<cond::DiagonalStrict>(cond)) return e.lhs >= e.rhs;
    return exceeds(e.lhs, e.rhs);
}

ContractionCertificate verify(const PresicOperator& op, const BMetricSpace& space, const ConditionSpec& cond,
                              const SamplingPlan& plan) {
    if (is_diagonal(cond)) return verify_diagonal(op, space, cond, plan);
    return run_verification(op, space, cond, plan, op.arity() + 1);
}

ContractionCertificate verify_diagonal(const PresicOperator& op, const BMetricSpace& space,
                                       const ConditionSpec& cond, const SamplingPlan& plan) {
    if (!is_diagonal(cond)) {
        throw UsageError(condition_name(cond) + " is not a condition on the diagonal map");
    }
    return run_verification(op, space, cond, plan, 2);
}

ConstantEstimate estimate_constant(const PresicOperator& op, const BMetricSpace& space, ConstantKind kind,
                                   const SamplingPlan& plan) {
    if (op.dimension() != space.dimension()) throw UsageError("operator and space dimensions differ");
    ConditionSpec probe = cond::CiricMax{0.5};
    std::size_t tuple_size = op.arity() + 1;
    if (kind == ConstantKind::banach) {
        probe = cond::Banach{0.5};
        tuple_size = 2;
    } else if (kind == ConstantKind::kannan) {
        probe = cond::Kannan{0.0};
    }

    struct Acc {
        double best = -1.0;
        std::vector<Point> witness;
        std::size_t skipped = 0;
    };
    const auto acc = for_each_tuple<Acc>(
        plan, space.domain(), tuple_size,
        [&](Acc& a, std::size_t, std::span<const Point> window) {
            DomainTally tally;
            const WindowEvaluation e = evaluate(op, space, probe, window, tally);
            if (!e.base || *e.base == 0.0) {
                ++a.skipped;
                return;
            }
            const double ratio = e.lhs / *e.base;
            if (ratio > a.best) {
                a.best = ratio;
                a.witness.assign(window.begin(), window.end());
            }
        },
        [](Acc& into, Acc&& from) {
            into.skipped += from.skipped;
            if (from.best > into.best) {
                into.best = from.best;
                into.witness = std::move(from.witness);
            }
        });
    if (acc.witness.empty()) throw DegenerateDomainError("every sampled window has a zero comparator");
    return {acc.best, acc.witness, acc.skipped};
}

} // namespace presic
