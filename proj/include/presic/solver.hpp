#pragma once

#include "presic/bmetric.hpp"
#include "presic/operator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace presic {

struct StopRule {
    double residual_tol = 1e-10;
    double step_tol = 1e-10;
    std::size_t max_iterations = 1'000'000;
    /// Default look-ahead P for cauchy_profile().
    std::size_t cauchy_window = 16;

    void validate(std::size_t arity) const;
};

enum class StopReason { converged, max_iterations, diverged };

const char* stop_reason_name(StopReason reason) noexcept;

/// Points x_1, x_2, ... of one run together with alphas[i] = d(points[i], points[i+1]).
struct IterationTrace {
    std::vector<Point> points;
    std::vector<double> alphas;
    StopReason stop_reason = StopReason::max_iterations;
    std::optional<Point> limit;
    std::optional<double> final_residual;
    std::optional<double> fitted_rate;
    std::size_t out_of_domain = 0;
};

/// x_{n+k} = f(x_n, ..., x_{n+k-1}) from k seeds. Converged when the last k
/// steps are all <= step_tol and d(x, f(x,...,x)) <= residual_tol at the newest
/// point; diverged when a step exceeds 1e12 (1 + alpha_1).
IterationTrace iterate(const PresicOperator& op, const BMetricSpace& space, std::span<const Point> initial,
                       const StopRule& stop = {});

/// x_{n+1} = F(x_n) with F the diagonal map; same stopping semantics.
IterationTrace picard(const PresicOperator& op, const BMetricSpace& space, const Point& x0,
                      const StopRule& stop = {});

/// Geometric envelope alpha_n <= b^k K theta^n with theta = eta^(1/k) and
/// K = max_{j<=k} alpha_j / theta^j.
struct BoundReport {
    double theta = 0.0;
    double K = 0.0;
    double b = 1.0;
    std::size_t k = 1;
    /// per_step_bounds[n-1] bounds alpha_n.
    std::vector<double> per_step_bounds;
    bool all_steps_within = true;

    /// b^p K theta^n / (1 - theta), an upper bound for d(x_n, x_{n+p}).
    double tail_bound(std::size_t n, std::size_t p) const;
};

BoundReport presic_bounds(const IterationTrace& trace, double eta, double b, std::size_t k);

/// (b lambda)^n / (1 - b lambda) d01 with lambda = a k b^k; bounds d(x_n, x_m),
/// m > n, along the Picard sequence of F. UsageError unless 0 <= b lambda < 1.
double kannan_bounds(double a, std::size_t k, double b, double d01, std::size_t n);

/// exp of the least-squares slope of log alpha_n over the trailing half of the
/// nonzero alphas; nullopt with fewer than 8 nonzero alphas.
std::optional<double> estimate_rate(const IterationTrace& trace);

/// s_n = max_{1<=p<=P} d(x_n, x_{n+p}) for every n with x_{n+P} in the trace.
std::vector<double> cauchy_profile(const IterationTrace& trace, const BMetricSpace& space, std::size_t window);

/// max{alpha_{n+1..n+k}} <= max{alpha_{n..n+k-1}} (within tolerance) for every n.
bool window_max_nonincreasing(const IterationTrace& trace, std::size_t k);

struct UniquenessProbe {
    std::vector<Point> limits;
    bool all_converged = true;
    /// Largest d between two limits; 0 with fewer than two limits.
    double max_pairwise = 0.0;
};

/// Runs iterate() from `starts` seeded random seed windows in the space's box.
UniquenessProbe uniqueness_probe(const PresicOperator& op, const BMetricSpace& space, std::size_t starts,
                                 std::uint64_t seed, const StopRule& stop = {});

} // namespace presic
