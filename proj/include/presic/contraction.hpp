#pragma once

#include "presic/bmetric.hpp"
#include "presic/dsl.hpp"
#include "presic/operator.hpp"
#include "presic/sampling.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace presic {

namespace phi {
/// phi(t) = c t with 0 < c < 1.
struct Linear {
    double c = 0.2;
};
/// The piecewise comparison function of the averaging example: t/5 below 5/2,
/// then 2^(2n) (2^(n+1) t - 3) / (2^(2n+1) - 1) on
/// [(2^(2n)+1)/2^n, (2^(2(n+1))+1)/2^(n+1)] for n >= 1. At a shared endpoint
/// the lower n applies.
struct PaperPiecewise {};
/// Expression in t.
struct Dsl {
    dsl::Expr expr;
};
} // namespace phi

class PhiFunction {
public:
    using Kind = std::variant<phi::Linear, phi::PaperPiecewise, phi::Dsl>;

    static PhiFunction linear(double c);
    static PhiFunction paper_piecewise();
    static PhiFunction dsl(std::string_view expr);

    double operator()(double t) const;

    const Kind& kind() const noexcept { return kind_; }
    std::string kind_name() const;

private:
    explicit PhiFunction(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

/// Requires phi(0) = 0 and phi(t) > 0 on a grid of t in (0, t_max]; UsageError
/// otherwise. Lower semicontinuity is not checked.
void validate_phi(const PhiFunction& phi, double t_max);

namespace cond {
/// sum_j r_j d(x_j, x_{j+1}), r_j >= 0, sum r_j < 1.
struct PresicSum {
    std::vector<double> r;
};
/// kappa * max_j d(x_j, x_{j+1}), 0 < kappa < 1.
struct CiricMax {
    double kappa;
};
/// lambda * max_j d(x_j, x_{j+1}), 0 <= lambda < 1.
struct LambdaMax {
    double lambda;
};
/// M - phi(M) with M = max_j d(x_j, x_{j+1}).
struct WeakPhi {
    PhiFunction phi;
};
/// a * max_i d(x_i, F(x_i)) over i = 1..k+1, 0 <= a k b^(k+1) < 1.
struct Kannan {
    double a;
};
/// d(F x, F y) < d(x, y) for x != y.
struct DiagonalStrict {};
/// d(F x, F y) <= d(x, y) - phi(d(x, y)).
struct DiagonalPhi {
    PhiFunction phi;
};
/// d(F x, F y) <= eta d(x, y), 0 <= eta < 1.
struct Banach {
    double eta;
};
} // namespace cond

using ConditionSpec = std::variant<cond::PresicSum, cond::CiricMax, cond::LambdaMax, cond::WeakPhi, cond::Kannan,
                                   cond::DiagonalStrict, cond::DiagonalPhi, cond::Banach>;

std::string condition_name(const ConditionSpec& cond);

/// True for conditions on the diagonal map F (checked on pairs).
bool is_diagonal(const ConditionSpec& cond);

/// Parameter ranges for arity k on a space with relaxation constant b.
void validate_condition(const ConditionSpec& cond, std::size_t arity, double b);

enum class Verdict { passed_on_samples, falsified };

const char* verdict_name(Verdict v) noexcept;

struct Witness {
    std::vector<Point> window;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Strict condition failed by equality (within tolerance) rather than by excess.
    bool tie = false;
    std::size_t sample_index = 0;
};

struct ContractionCertificate {
    ConditionSpec condition;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    SamplingMode mode = SamplingMode::random;
    Verdict verdict = Verdict::passed_on_samples;
    std::optional<Witness> witness;
    std::optional<double> estimated_constant;
    double slack_min = 0.0;
    /// Pairs with x == y skipped by diagonal checks.
    std::size_t skipped = 0;
    std::size_t out_of_domain = 0;
};

/// Both sides of a condition on one window: k+1 points, or 2 for diagonal kinds.
struct WindowEvaluation {
    double lhs = 0.0;
    double rhs = 0.0;
    /// rhs without its constant, for ratio estimation; nullopt when not defined.
    std::optional<double> base;
};

WindowEvaluation evaluate_window(const PresicOperator& op, const BMetricSpace& space, const ConditionSpec& cond,
                                 std::span<const Point> window);

/// True when the evaluation violates the condition (ties count for strict kinds).
bool violates(const ConditionSpec& cond, const WindowEvaluation& e) noexcept;

/// Samples windows (x_1..x_{k+1}) from the box and checks the condition on each.
/// Diagonal kinds are forwarded to verify_diagonal.
ContractionCertificate verify(const PresicOperator& op, const BMetricSpace& space, const ConditionSpec& cond,
                              const SamplingPlan& plan);

/// Samples pairs x != y and checks a condition on F(x) = f(x, ..., x).
ContractionCertificate verify_diagonal(const PresicOperator& op, const BMetricSpace& space,
                                       const ConditionSpec& cond, const SamplingPlan& plan);

enum class ConstantKind { ciric_max, banach, kannan };

struct ConstantEstimate {
    double constant_hat = 0.0;
    std::vector<Point> witness;
    std::size_t skipped = 0;
};

/// Supremum over sampled windows of lhs / comparator, skipping zero comparators;
/// DegenerateDomainError if all comparators vanish.
ConstantEstimate estimate_constant(const PresicOperator& op, const BMetricSpace& space, ConstantKind kind,
                                   const SamplingPlan& plan);

} // namespace presic
