#include "presic/solver.hpp"

#include "presic/errors.hpp"
#include "presic/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace presic {

namespace {

constexpr double kDivergenceFactor = 1e12;

double step_distance(const BMetricSpace& space, const Point& a, const Point& b) {
    const double d = space.distance(a, b);
    if (!std::isfinite(d)) throw NumericError("distance between consecutive iterates is not finite");
    return d;
}

bool recent_steps_small(const std::vector<double>& alphas, std::size_t count, double tol) {
    const std::size_t from = alphas.size() > count ? alphas.size() - count : 0;
    return std::all_of(alphas.begin() + static_cast<std::ptrdiff_t>(from), alphas.end(),
                       [tol](double a) { return a <= tol; });
}

void finish(IterationTrace& trace, const PresicOperator& op, const BMetricSpace& space) {
    if (trace.stop_reason == StopReason::converged) {
        trace.limit = trace.points.back();
    }
    if (trace.stop_reason != StopReason::diverged) {
        const double r = residual(op, space, trace.points.back());
        if (std::isfinite(r)) trace.final_residual = r;
    }
    trace.fitted_rate = estimate_rate(trace);
}

template <class Step>
IterationTrace run(const PresicOperator& op, const BMetricSpace& space, std::vector<Point> seeds,
                   const StopRule& stop, std::size_t step_window, Step&& step) {
    IterationTrace trace;
    trace.points = std::move(seeds);
    for (std::size_t i = 0; i + 1 < trace.points.size(); ++i) {
        trace.alphas.push_back(step_distance(space, trace.points[i], trace.points[i + 1]));
    }

    DomainTally tally;
    for (std::size_t it = 0; it < stop.max_iterations; ++it) {
        Point next = step(trace.points, tally);
        const double alpha = step_distance(space, trace.points.back(), next);
        trace.alphas.push_back(alpha);
        trace.points.push_back(std::move(next));

        if (alpha > kDivergenceFactor * (1.0 + trace.alphas.front())) {
            trace.stop_reason = StopReason::diverged;
            break;
        }
        if (recent_steps_small(trace.alphas, step_window, stop.step_tol) &&
            residual(op, space, trace.points.back()) <= stop.residual_tol) {
            trace.stop_reason = StopReason::converged;
            break;
        }
    }
    trace.out_of_domain = tally.outside;
    finish(trace, op, space);
    return trace;
}

void check_start(const BMetricSpace& space, const Point& p) {
    if (p.dimension() != space.dimension()) throw UsageError("starting point has the wrong dimension");
}

} // namespace

void StopRule::validate(std::size_t arity) const {
    if (!(residual_tol > 0.0) || !(step_tol > 0.0)) throw UsageError("stop tolerances must be positive");
    if (max_iterations < arity + 1) throw UsageError("max_iterations must be at least k + 1");
    if (cauchy_window == 0) throw UsageError("cauchy_window must be at least 1");
}

const char* stop_reason_name(StopReason reason) noexcept {
    switch (reason) {
    case StopReason::converged: return "converged";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::diverged: return "diverged";
    }
    return "?";
}

IterationTrace iterate(const PresicOperator& op, const BMetricSpace& space, std::span<const Point> initial,
                       const StopRule& stop) {
    const std::size_t k = op.arity();
    stop.validate(k);
    if (initial.size() != k) throw UsageError("iterate needs exactly k = " + std::to_string(k) + " starting points");
    if (op.dimension() != space.dimension()) throw UsageError("operator and space dimensions differ");
    for (const auto& p : initial) check_start(space, p);

    return run(op, space, {initial.begin(), initial.end()}, stop, k,
               [&](const std::vector<Point>& pts, DomainTally& tally) {
                   return apply_in(op, space, std::span<const Point>(pts).last(k), tally);
               });
}

IterationTrace picard(const PresicOperator& op, const BMetricSpace& space, const Point& x0, const StopRule& stop) {
    stop.validate(1);
    if (op.dimension() != space.dimension()) throw UsageError("operator and space dimensions differ");
    check_start(space, x0);

    return run(op, space, {x0}, stop, 1, [&](const std::vector<Point>& pts, DomainTally& tally) {
        return diagonal_apply_in(op, space, pts.back(), tally);
    });
}

double BoundReport::tail_bound(std::size_t n, std::size_t p) const {
    return std::pow(b, static_cast<double>(p)) * K * std::pow(theta, static_cast<double>(n)) / (1.0 - theta);
}

BoundReport presic_bounds(const IterationTrace& trace, double eta, double b, std::size_t k) {
    if (!(eta > 0.0 && eta < 1.0)) throw UsageError("eta must lie in (0, 1)");
    if (!(b >= 1.0)) throw UsageError("b must be >= 1");
    if (k == 0) throw UsageError("k must be at least 1");
    if (trace.alphas.size() < k) throw UsageError("trace needs at least k + 1 points");

    BoundReport report;
    report.theta = std::pow(eta, 1.0 / static_cast<double>(k));
    report.b = b;
    report.k = k;
    for (std::size_t j = 1; j <= k; ++j) {
        report.K = std::max(report.K, trace.alphas[j - 1] / std::pow(report.theta, static_cast<double>(j)));
    }
    const double scale = std::pow(b, static_cast<double>(k)) * report.K;
    report.per_step_bounds.reserve(trace.alphas.size());
    for (std::size_t n = 1; n <= trace.alphas.size(); ++n) {
        const double bound = scale * std::pow(report.theta, static_cast<double>(n));
        report.per_step_bounds.push_back(bound);
        if (exceeds(trace.alphas[n - 1], bound)) report.all_steps_within = false;
    }
    return report;
}

double kannan_bounds(double a, std::size_t k, double b, double d01, std::size_t n) {
    if (!(a >= 0.0)) throw UsageError("kannan constant a must be >= 0");
    if (!(b >= 1.0)) throw UsageError("b must be >= 1");
    if (k == 0) throw UsageError("k must be at least 1");
    if (!(d01 >= 0.0)) throw UsageError("d(x0, x1) must be >= 0");
    const double lambda = a * static_cast<double>(k) * std::pow(b, static_cast<double>(k));
    const double q = b * lambda;
    if (!(q < 1.0)) throw UsageError("kannan bound needs a k b^(k+1) < 1");
    return std::pow(q, static_cast<double>(n)) / (1.0 - q) * d01;
}

std::optional<double> estimate_rate(const IterationTrace& trace) {
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < trace.alphas.size(); ++i) {
        if (trace.alphas[i] > 0.0) samples.emplace_back(static_cast<double>(i + 1), std::log(trace.alphas[i]));
    }
    if (samples.size() < 8) return std::nullopt;
    const std::size_t from = samples.size() / 2;
    const double count = static_cast<double>(samples.size() - from);

    double mean_n = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = from; i < samples.size(); ++i) {
        mean_n += samples[i].first;
        mean_y += samples[i].second;
    }
    mean_n /= count;
    mean_y /= count;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = from; i < samples.size(); ++i) {
        sxy += (samples[i].first - mean_n) * (samples[i].second - mean_y);
        sxx += (samples[i].first - mean_n) * (samples[i].first - mean_n);
    }
    return std::exp(sxy / sxx);
}

std::vector<double> cauchy_profile(const IterationTrace& trace, const BMetricSpace& space, std::size_t window) {
    if (window == 0) throw UsageError("Cauchy window P must be at least 1");
    std::vector<double> out;
    const auto& pts = trace.points;
    for (std::size_t n = 0; n + window < pts.size(); ++n) {
        double s = 0.0;
        for (std::size_t p = 1; p <= window; ++p) s = std::max(s, space.distance(pts[n], pts[n + p]));
        out.push_back(s);
    }
    return out;
}

bool window_max_nonincreasing(const IterationTrace& trace, std::size_t k) {
    const auto& a = trace.alphas;
    if (k == 0) throw UsageError("k must be at least 1");
    for (std::size_t n = 0; n + k < a.size(); ++n) {
        const double before = *std::max_element(a.begin() + static_cast<std::ptrdiff_t>(n),
                                                a.begin() + static_cast<std::ptrdiff_t>(n + k));
        const double after = *std::max_element(a.begin() + static_cast<std::ptrdiff_t>(n + 1),
                                               a.begin() + static_cast<std::ptrdiff_t>(n + k + 1));
        if (exceeds(after, before)) return false;
    }
    return true;
}

UniquenessProbe uniqueness_probe(const PresicOperator& op, const BMetricSpace& space, std::size_t starts,
                                 std::uint64_t seed, const StopRule& stop) {
    const std::size_t k = op.arity();
    const auto seeds = sample_points(space.domain(), starts * k, seed);
    UniquenessProbe probe;
    for (std::size_t s = 0; s < starts; ++s) {
        const auto trace = iterate(op, space, std::span<const Point>(seeds).subspan(s * k, k), stop);
        if (trace.stop_reason != StopReason::converged) probe.all_converged = false;
        probe.limits.push_back(trace.points.back());
    }
    for (std::size_t i = 0; i < probe.limits.size(); ++i) {
        for (std::size_t j = i + 1; j < probe.limits.size(); ++j) {
            probe.max_pairwise = std::max({probe.max_pairwise, space.distance(probe.limits[i], probe.limits[j]),
                                           space.distance(probe.limits[j], probe.limits[i])});
        }
    }
    return probe;
}

} // namespace presic
