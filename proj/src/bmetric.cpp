#include "presic/bmetric.hpp"

#include "presic/errors.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace presic {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void require_b(double b) {
    if (!(b >= 1.0) || !std::isfinite(b)) throw UsageError("declared b must be a finite real >= 1");
}

double base_distance(BaseMetric base, std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    switch (base) {
    case BaseMetric::euclidean:
        if (x.size() == 1) return std::abs(x[0] - y[0]);
        for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(acc);
    case BaseMetric::manhattan:
        for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
        return acc;
    case BaseMetric::chebyshev:
        for (std::size_t i = 0; i < x.size(); ++i) acc = std::max(acc, std::abs(x[i] - y[i]));
        return acc;
    }
    return acc;
}

} // namespace

BMetricSpace::BMetricSpace(Box domain, MetricKind kind, double b)
    : domain_(std::move(domain)), kind_(std::move(kind)), b_(b) {
    require_b(b_);
}

BMetricSpace BMetricSpace::euclidean(Box domain) { return {std::move(domain), metric::Euclidean{}, 1.0}; }

BMetricSpace BMetricSpace::power(Box domain, double p, BaseMetric base) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("power construction needs a finite p >= 1");
    return {std::move(domain), metric::Power{base, p}, std::exp2(p - 1.0)};
}

BMetricSpace BMetricSpace::lp_truncated(Box domain, double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw UsageError("l_p construction needs a finite p > 0");
    const double b = p < 1.0 ? std::exp2(1.0 / p) : 1.0;
    return {std::move(domain), metric::LpTruncated{p}, b};
}

BMetricSpace BMetricSpace::squared_euclidean(Box domain) {
    return {std::move(domain), metric::SquaredEuclidean{}, 2.0};
}

BMetricSpace BMetricSpace::custom(Box domain, std::string_view expr, double b) {
    const std::size_t m = domain.dimension();
    return {std::move(domain), metric::Custom{dsl::parse(expr, dsl::MetricContext{m})}, b};
}

BMetricSpace BMetricSpace::with_declared_b(double b) const {
    BMetricSpace copy = *this;
    require_b(b);
    copy.b_ = b;
    return copy;
}

std::string BMetricSpace::kind_name() const {
    return std::visit(overloaded{
                          [](const metric::Euclidean&) { return std::string("euclidean"); },
                          [](const metric::Power&) { return std::string("power"); },
                          [](const metric::LpTruncated&) { return std::string("lp_truncated"); },
                          [](const metric::SquaredEuclidean&) { return std::string("squared_euclidean"); },
                          [](const metric::Custom&) { return std::string("custom"); },
                      },
                      kind_);
}

double BMetricSpace::distance(const Point& x, const Point& y) const {
    const std::size_t m = dimension();
    if (x.dimension() != m || y.dimension() != m) {
        throw UsageError("distance: points must have dimension " + std::to_string(m));
    }
    const auto xs = x.coords();
    const auto ys = y.coords();

    return std::visit(
        overloaded{
            [&](const metric::Euclidean&) { return base_distance(BaseMetric::euclidean, xs, ys); },
            [&](const metric::Power& k) { return std::pow(base_distance(k.base, xs, ys), k.p); },
            [&](const metric::LpTruncated& k) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += std::pow(std::abs(xs[i] - ys[i]), k.p);
                return std::pow(acc, 1.0 / k.p);
            },
            [&](const metric::SquaredEuclidean&) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += (xs[i] - ys[i]) * (xs[i] - ys[i]);
                return acc;
            },
            [&](const metric::Custom& k) {
                std::vector<double> env(2 * m);
                std::copy(xs.begin(), xs.end(), env.begin());
                std::copy(ys.begin(), ys.end(), env.begin() + static_cast<std::ptrdiff_t>(m));
                const double d = k.expr.eval(env);
                if (d < 0.0) throw NumericError("custom distance returned a negative value");
                return d;
            },
        },
        kind_);
}

const char* axiom_name(Axiom axiom) noexcept {
    switch (axiom) {
    case Axiom::b1: return "b1";
    case Axiom::b2: return "b2";
    case Axiom::b3: return "b3";
    }
    return "?";
}

AxiomReport check_axioms(const BMetricSpace& space, const SamplingPlan& plan) {
    const double b = space.b();
    return for_each_tuple<AxiomReport>(
        plan, space.domain(), 3,
        [&](AxiomReport& acc, std::size_t, std::span<const Point> t) {
            const Point& x = t[0];
            const Point& y = t[1];
            const Point& z = t[2];

            const double dxx = space.distance(x, x);
            if (exceeds(dxx, 0.0)) acc.violations.push_back({Axiom::b1, {x}, dxx, 0.0});

            const double dxy = space.distance(x, y);
            const double dyx = space.distance(y, x);
            ++acc.checked_pairs;
            if (exceeds(std::max(dxy, dyx), std::min(dxy, dyx))) {
                acc.violations.push_back({Axiom::b2, {x, y}, std::max(dxy, dyx), std::min(dxy, dyx)});
            }

            const double rhs = b * (space.distance(x, z) + space.distance(z, y));
            ++acc.checked_triples;
            if (exceeds(dxy, rhs)) acc.violations.push_back({Axiom::b3, {x, y, z}, dxy, rhs});
        },
        [](AxiomReport& into, AxiomReport&& from) {
            into.checked_pairs += from.checked_pairs;
            into.checked_triples += from.checked_triples;
            for (auto& v : from.violations) into.violations.push_back(std::move(v));
        });
}

AxiomReport check_axioms(const BMetricSpace& space, std::size_t sample_count, std::uint64_t seed) {
    return check_axioms(space, SamplingPlan::random(sample_count, seed));
}

namespace {

struct RatioAcc {
    double best = -1.0;
    std::vector<Point> witness;
    std::size_t skipped = 0;
};

} // namespace

BEstimate estimate_b(const BMetricSpace& space, const SamplingPlan& plan) {
    const auto acc = for_each_tuple<RatioAcc>(
        plan, space.domain(), 3,
        [&](RatioAcc& a, std::size_t, std::span<const Point> t) {
            const double denom = space.distance(t[0], t[2]) + space.distance(t[2], t[1]);
            if (denom == 0.0) {
                ++a.skipped;
                return;
            }
            const double ratio = space.distance(t[0], t[1]) / denom;
            if (ratio > a.best) {
                a.best = ratio;
                a.witness.assign(t.begin(), t.end());
            }
        },
        [](RatioAcc& into, RatioAcc&& from) {
            into.skipped += from.skipped;
            if (from.best > into.best) {
                into.best = from.best;
                into.witness = std::move(from.witness);
            }
        });
    if (acc.witness.empty()) {
        throw DegenerateDomainError("every sampled triple has d(x,z) + d(z,y) = 0");
    }
    return {acc.best, acc.witness, acc.skipped};
}

BEstimate estimate_b(const BMetricSpace& space, std::size_t sample_count, std::uint64_t seed) {
    return estimate_b(space, SamplingPlan::random(sample_count, seed));
}

ChainBound chain_bound(const BMetricSpace& space, std::span<const Point> points) {
    if (points.size() < 2) throw UsageError("chain bound needs at least two points");
    const std::size_t n = points.size() - 1;
    const double b = space.b();

    ChainBound out;
    out.lhs = space.distance(points.front(), points.back());
    double weight = 1.0;
    for (std::size_t j = 1; j < n; ++j) {
        weight *= b;
        out.rhs += weight * space.distance(points[j - 1], points[j]);
    }
    // b^(n-1) on the final link as well
    out.rhs += std::pow(b, static_cast<double>(n - 1)) * space.distance(points[n - 1], points[n]);
    out.holds = !exceeds(out.lhs, out.rhs);
    return out;
}

} // namespace presic
