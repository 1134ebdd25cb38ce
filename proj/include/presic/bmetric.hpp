#pragma once

#include "presic/dsl.hpp"
#include "presic/geometry.hpp"
#include "presic/sampling.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace presic {

/// Ordinary metric that a power construction raises to the p-th power.
enum class BaseMetric { euclidean, manhattan, chebyshev };

namespace metric {
struct Euclidean {};
/// rho(x, y) = base(x, y)^p with p >= 1; a b-metric with b = 2^(p-1).
struct Power {
    BaseMetric base = BaseMetric::euclidean;
    double p = 2.0;
};
/// (sum |x_i - y_i|^p)^(1/p) over the m coordinates; b = 2^(1/p) when p < 1.
struct LpTruncated {
    double p = 0.5;
};
/// sum (x_i - y_i)^2; b = 2.
struct SquaredEuclidean {};
/// User distance over u1..um, v1..vm; b must be declared.
struct Custom {
    dsl::Expr expr;
};
} // namespace metric

using MetricKind =
    std::variant<metric::Euclidean, metric::Power, metric::LpTruncated, metric::SquaredEuclidean, metric::Custom>;

/// A distance on a box of R^m together with its declared relaxation constant b.
class BMetricSpace {
public:
    static BMetricSpace euclidean(Box domain);
    static BMetricSpace power(Box domain, double p, BaseMetric base = BaseMetric::euclidean);
    static BMetricSpace lp_truncated(Box domain, double p);
    static BMetricSpace squared_euclidean(Box domain);
    static BMetricSpace custom(Box domain, std::string_view expr, double b);

    /// Same distance with a different declared b (must be >= 1).
    BMetricSpace with_declared_b(double b) const;

    std::size_t dimension() const noexcept { return domain_.dimension(); }
    double b() const noexcept { return b_; }
    const Box& domain() const noexcept { return domain_; }
    const MetricKind& kind() const noexcept { return kind_; }

    /// Short identifier such as "squared_euclidean" or "power".
    std::string kind_name() const;

    /// d(x, y). Throws UsageError on dimension mismatch; built-in kinds are
    /// exactly symmetric and return exactly 0 for x == y.
    double distance(const Point& x, const Point& y) const;

private:
    BMetricSpace(Box domain, MetricKind kind, double b);

    Box domain_;
    MetricKind kind_;
    double b_;
};

inline double distance(const BMetricSpace& space, const Point& x, const Point& y) {
    return space.distance(x, y);
}

enum class Axiom { b1, b2, b3 };

const char* axiom_name(Axiom axiom) noexcept;

struct AxiomViolation {
    Axiom axiom;
    /// b1: {x}; b2: {x, y}; b3: {x, y, z} with z the intermediate point.
    std::vector<Point> witness;
    double lhs;
    double rhs;
};

struct AxiomReport {
    std::size_t checked_pairs = 0;
    std::size_t checked_triples = 0;
    std::vector<AxiomViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Checks identity on x, symmetry on (x, y) and d(x,y) <= b (d(x,z) + d(z,y))
/// on every sampled triple (x, y, z), against the declared b.
AxiomReport check_axioms(const BMetricSpace& space, const SamplingPlan& plan);
AxiomReport check_axioms(const BMetricSpace& space, std::size_t sample_count, std::uint64_t seed);

struct BEstimate {
    double b_hat = 0.0;
    /// {x, y, z}: the ratio d(x,y) / (d(x,z) + d(z,y)) attains b_hat here.
    std::vector<Point> witness;
    std::size_t skipped = 0;
};

/// Largest relaxed-triangle ratio over the sampled triples. Triples with a
/// zero denominator are skipped; DegenerateDomainError if all of them are.
BEstimate estimate_b(const BMetricSpace& space, const SamplingPlan& plan);
BEstimate estimate_b(const BMetricSpace& space, std::size_t sample_count, std::uint64_t seed);

struct ChainBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

/// Compares d(u_0, u_n) with
///   b d(u_0,u_1) + ... + b^(n-1) d(u_(n-2),u_(n-1)) + b^(n-1) d(u_(n-1),u_n).
ChainBound chain_bound(const BMetricSpace& space, std::span<const Point> points);

} // namespace presic
