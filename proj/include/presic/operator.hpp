#pragma once

#include "presic/bmetric.hpp"
#include "presic/dsl.hpp"
#include "presic/geometry.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace presic {

namespace op {
/// f(x_1..x_k) = (x_1 + ... + x_k) / (2k), coordinatewise.
struct Averaging {};
/// f(x_1..x_k)_c = sum_j weights[j][c] * x_j[c] + offset[c].
struct Affine {
    std::vector<std::vector<double>> weights;
    std::vector<double> offset;
};
struct Constant {
    Point value;
};
/// One expression per output coordinate (a single expression is broadcast).
struct Dsl {
    std::vector<dsl::Expr> exprs;
};
} // namespace op

using OperatorKind = std::variant<op::Averaging, op::Affine, op::Constant, op::Dsl>;

/// A map f: X^k -> X on R^m.
class PresicOperator {
public:
    static PresicOperator averaging(std::size_t arity, std::size_t dimension = 1);
    /// weights is k rows of m per-coordinate coefficients.
    static PresicOperator affine(std::vector<std::vector<double>> weights, std::vector<double> offset);
    /// Same coefficient a_j on every coordinate.
    static PresicOperator affine_uniform(const std::vector<double>& weights, std::vector<double> offset);
    static PresicOperator constant(std::size_t arity, Point value);
    static PresicOperator dsl(std::size_t arity, std::size_t dimension, const std::vector<std::string>& exprs);

    /// When set, evaluations through apply_in() reject outputs outside the box.
    PresicOperator with_codomain_check(bool strict) const;

    std::size_t arity() const noexcept { return arity_; }
    std::size_t dimension() const noexcept { return dimension_; }
    bool codomain_check() const noexcept { return codomain_check_; }
    const OperatorKind& kind() const noexcept { return kind_; }
    std::string kind_name() const;

    /// f(window[0], ..., window[k-1]).
    Point apply(std::span<const Point> window) const;

    /// F(x) = f(x, ..., x); identical to apply() on the k-fold repetition.
    Point diagonal_apply(const Point& x) const;

private:
    PresicOperator(std::size_t arity, std::size_t dimension, OperatorKind kind);

    std::size_t arity_;
    std::size_t dimension_;
    OperatorKind kind_;
    bool codomain_check_ = false;
};

/// The diagonal companion F of a Prešić operator.
class DiagonalOperator {
public:
    explicit DiagonalOperator(PresicOperator source) : source_(std::move(source)) {}

    Point operator()(const Point& x) const { return source_.diagonal_apply(x); }
    const PresicOperator& source() const noexcept { return source_; }

private:
    PresicOperator source_;
};

/// d(u, f(u, ..., u)).
double residual(const PresicOperator& op, const BMetricSpace& space, const Point& u);

/// Counts outputs that left the box when domain checking is lenient.
struct DomainTally {
    std::size_t outside = 0;
};

/// apply() plus the box policy: DomainError for an out-of-box output when the
/// operator has codomain_check set, otherwise the tally is incremented.
Point apply_in(const PresicOperator& op, const BMetricSpace& space, std::span<const Point> window,
               DomainTally& tally);
Point diagonal_apply_in(const PresicOperator& op, const BMetricSpace& space, const Point& x, DomainTally& tally);

} // namespace presic
