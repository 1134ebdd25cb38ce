#include "presic/operator.hpp"

#include "presic/errors.hpp"

#include <cmath>
#include <utility>

namespace presic {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw UsageError(std::string(what) + " must be finite");
    }
}

} // namespace

PresicOperator::PresicOperator(std::size_t arity, std::size_t dimension, OperatorKind kind)
    : arity_(arity), dimension_(dimension), kind_(std::move(kind)) {
    if (arity_ == 0) throw UsageError("operator arity k must be at least 1");
    if (dimension_ == 0) throw UsageError("operator dimension must be at least 1");
}

PresicOperator PresicOperator::averaging(std::size_t arity, std::size_t dimension) {
    return {arity, dimension, op::Averaging{}};
}

PresicOperator PresicOperator::affine(std::vector<std::vector<double>> weights, std::vector<double> offset) {
    if (weights.empty()) throw UsageError("affine operator needs at least one weight row");
    const std::size_t m = offset.size();
    if (m == 0) throw UsageError("affine offset must be non-empty");
    for (const auto& row : weights) {
        if (row.size() != m) throw UsageError("affine weight rows must have one entry per coordinate");
        require_finite(row, "affine weights");
    }
    require_finite(offset, "affine offset");
    const std::size_t k = weights.size();
    return {k, m, op::Affine{std::move(weights), std::move(offset)}};
}

PresicOperator PresicOperator::affine_uniform(const std::vector<double>& weights, std::vector<double> offset) {
    std::vector<std::vector<double>> rows;
    rows.reserve(weights.size());
    for (double w : weights) rows.emplace_back(offset.size(), w);
    return affine(std::move(rows), std::move(offset));
}

PresicOperator PresicOperator::constant(std::size_t arity, Point value) {
    const std::size_t m = value.dimension();
    return {arity, m, op::Constant{std::move(value)}};
}

PresicOperator PresicOperator::dsl(std::size_t arity, std::size_t dimension, const std::vector<std::string>& exprs) {
    if (exprs.size() != 1 && exprs.size() != dimension) {
        throw UsageError("dsl operator needs one expression or one per coordinate (" + std::to_string(dimension) +
                         ")");
    }
    op::Dsl kind;
    for (const auto& src : exprs) kind.exprs.push_back(dsl::parse(src, dsl::OperatorContext{arity, dimension}));
    return {arity, dimension, std::move(kind)};
}

PresicOperator PresicOperator::with_codomain_check(bool strict) const {
    PresicOperator copy = *this;
    copy.codomain_check_ = strict;
    return copy;
}

std::string PresicOperator::kind_name() const {
    return std::visit(overloaded{
                          [](const op::Averaging&) { return std::string("averaging"); },
                          [](const op::Affine&) { return std::string("affine"); },
                          [](const op::Constant&) { return std::string("constant"); },
                          [](const op::Dsl&) { return std::string("dsl"); },
                      },
                      kind_);
}

Point PresicOperator::apply(std::span<const Point> window) const {
    if (window.size() != arity_) {
        throw UsageError("operator expects a window of " + std::to_string(arity_) + " points, got " +
                         std::to_string(window.size()));
    }
    for (const auto& p : window) {
        if (p.dimension() != dimension_) {
            throw UsageError("window point has dimension " + std::to_string(p.dimension()) + ", expected " +
                             std::to_string(dimension_));
        }
    }

    std::vector<double> out(dimension_, 0.0);
    std::visit(overloaded{
                   [&](const op::Averaging&) {
                       const double scale = 2.0 * static_cast<double>(arity_);
                       for (std::size_t c = 0; c < dimension_; ++c) {
                           double sum = 0.0;
                           for (const auto& p : window) sum += p[c];
                           out[c] = sum / scale;
                       }
                   },
                   [&](const op::Affine& a) {
                       for (std::size_t c = 0; c < dimension_; ++c) {
                           double sum = 0.0;
                           for (std::size_t j = 0; j < arity_; ++j) sum += a.weights[j][c] * window[j][c];
                           out[c] = sum + a.offset[c];
                       }
                   },
                   [&](const op::Constant& k) {
                       for (std::size_t c = 0; c < dimension_; ++c) out[c] = k.value[c];
                   },
                   [&](const op::Dsl& d) {
                       std::vector<double> env;
                       env.reserve(arity_ * dimension_);
                       for (const auto& p : window) env.insert(env.end(), p.coords().begin(), p.coords().end());
                       for (std::size_t c = 0; c < dimension_; ++c) {
                           const auto& e = d.exprs.size() == 1 ? d.exprs[0] : d.exprs[c];
                           try {
                               out[c] = e.eval(env, c);
                           } catch (const NumericError& err) {
                               throw NumericError("operator output coordinate " + std::to_string(c + 1) + ": " +
                                                  err.what());
                           }
                       }
                   },
               },
               kind_);

    for (std::size_t c = 0; c < dimension_; ++c) {
        if (!std::isfinite(out[c])) {
            throw NumericError("operator output coordinate " + std::to_string(c + 1) + " is not finite");
        }
    }
    return Point(std::move(out));
}

Point PresicOperator::diagonal_apply(const Point& x) const {
    const std::vector<Point> window(arity_, x);
    return apply(window);
}

double residual(const PresicOperator& op, const BMetricSpace& space, const Point& u) {
    return space.distance(u, op.diagonal_apply(u));
}

namespace {

Point police(const PresicOperator& op, const BMetricSpace& space, Point out, DomainTally& tally) {
    if (!space.domain().contains(out)) {
        if (op.codomain_check()) throw DomainError("operator output left the domain box");
        ++tally.outside;
    }
    return out;
}

} // namespace

Point apply_in(const PresicOperator& op, const BMetricSpace& space, std::span<const Point> window,
               DomainTally& tally) {
    return police(op, space, op.apply(window), tally);
}

Point diagonal_apply_in(const PresicOperator& op, const BMetricSpace& space, const Point& x, DomainTally& tally) {
    return police(op, space, op.diagonal_apply(x), tally);
}

} // namespace presic
