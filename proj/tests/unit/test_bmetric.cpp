#include "presic/bmetric.hpp"
#include "presic/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace presic;

namespace {

const Box kLine = Box::cube(1, 0.0, 2.0);

std::vector<BMetricSpace> builtin_spaces(std::size_t m) {
    const auto box = Box::cube(m, -1.0, 2.0);
    return {BMetricSpace::euclidean(box),
            BMetricSpace::power(box, 2.0),
            BMetricSpace::power(box, 3.0, BaseMetric::manhattan),
            BMetricSpace::power(box, 1.5, BaseMetric::chebyshev),
            BMetricSpace::lp_truncated(box, 0.5),
            BMetricSpace::lp_truncated(box, 2.0),
            BMetricSpace::squared_euclidean(box)};
}

// Brute-force sup of d(x,y) / (d(x,z) + d(z,y)) over all ordered grid triples.
double grid_ratio_oracle(const BMetricSpace& space, int nodes) {
    double best = 0.0;
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j)
            for (int l = 0; l < nodes; ++l) {
                const double x = 2.0 * i / (nodes - 1), y = 2.0 * j / (nodes - 1), z = 2.0 * l / (nodes - 1);
                const double den = space.distance(Point{x}, Point{z}) + space.distance(Point{z}, Point{y});
                if (den > 0.0) best = std::max(best, space.distance(Point{x}, Point{y}) / den);
            }
    return best;
}

} // namespace

TEST(BMetric, DeclaredConstants) {
    EXPECT_DOUBLE_EQ(BMetricSpace::euclidean(kLine).b(), 1.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::power(kLine, 3.0).b(), 4.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::power(kLine, 1.0).b(), 1.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::lp_truncated(kLine, 0.5).b(), 4.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::lp_truncated(kLine, 2.0).b(), 1.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::squared_euclidean(kLine).b(), 2.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::custom(kLine, "abs(u1 - v1)^2", 2.0).b(), 2.0);
}

TEST(BMetric, InvalidParameters) {
    EXPECT_THROW(BMetricSpace::power(kLine, 0.5), UsageError);
    EXPECT_THROW(BMetricSpace::lp_truncated(kLine, 0.0), UsageError);
    EXPECT_THROW(BMetricSpace::custom(kLine, "abs(u1 - v1)", 0.5), UsageError);
    EXPECT_THROW(BMetricSpace::custom(kLine, "abs(u2 - v1)", 1.0), DslError);
    EXPECT_THROW(BMetricSpace::euclidean(kLine).with_declared_b(0.9), UsageError);
}

TEST(BMetric, DistanceExamples) {
    EXPECT_DOUBLE_EQ(BMetricSpace::squared_euclidean(kLine).distance(Point{0.0}, Point{2.0}), 4.0);
    const auto lp = BMetricSpace::lp_truncated(Box::cube(2, -1.0, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(lp.distance(Point{1.0, 0.0}, Point{0.0, 0.0}), 1.0);
    EXPECT_DOUBLE_EQ(lp.distance(Point{1.0, 1.0}, Point{0.0, 0.0}), 4.0);
    const auto plane = Box::cube(2, -5.0, 5.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::euclidean(plane).distance(Point{0.0, 0.0}, Point{3.0, 4.0}), 5.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::power(plane, 2.0, BaseMetric::manhattan).distance(Point{0, 0}, Point{3, 4}), 49.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::power(plane, 3.0, BaseMetric::chebyshev).distance(Point{0, 0}, Point{3, -4}), 64.0);
    EXPECT_DOUBLE_EQ(BMetricSpace::custom(plane, "abs(u1 - v1) + abs(u2 - v2)", 1.0).distance(Point{0, 0}, Point{1, 2}),
                     3.0);
}

TEST(BMetric, DistanceErrors) {
    const auto space = BMetricSpace::euclidean(kLine);
    EXPECT_THROW(space.distance(Point{0.0}, Point{0.0, 1.0}), UsageError);
    const auto bad = BMetricSpace::custom(kLine, "u1 - v1", 1.0);
    EXPECT_THROW(bad.distance(Point{0.0}, Point{1.0}), NumericError);
}

TEST(BMetric, IdentityAndSymmetryAreExact) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (const auto& space : builtin_spaces(3)) {
        for (int i = 0; i < 200; ++i) {
            const Point x{u(rng), u(rng), u(rng)}, y{u(rng), u(rng), u(rng)};
            ASSERT_EQ(space.distance(x, x), 0.0);
            ASSERT_EQ(space.distance(x, y), space.distance(y, x));
            ASSERT_GE(space.distance(x, y), 0.0);
        }
    }
}

TEST(BMetric, CheckAxiomsExamples) {
    EXPECT_TRUE(check_axioms(BMetricSpace::squared_euclidean(kLine), SamplingPlan::grid(21)).ok());
    EXPECT_TRUE(check_axioms(BMetricSpace::euclidean(kLine), SamplingPlan::grid(21)).ok());

    const auto report = check_axioms(BMetricSpace::squared_euclidean(kLine).with_declared_b(1.0), SamplingPlan::grid(3));
    ASSERT_FALSE(report.ok());
    bool found = false;
    for (const auto& v : report.violations) {
        if (v.axiom == Axiom::b3 && v.witness == std::vector<Point>{Point{0.0}, Point{2.0}, Point{1.0}}) {
            found = true;
            EXPECT_DOUBLE_EQ(v.lhs, 4.0);
            EXPECT_DOUBLE_EQ(v.rhs, 2.0);
        }
    }
    EXPECT_TRUE(found);
    EXPECT_EQ(report.checked_triples, 27u);
}

TEST(BMetric, CheckAxiomsRandomOnBuiltins) {
    for (const auto& space : builtin_spaces(2)) {
        EXPECT_TRUE(check_axioms(space, 5000, 17).ok()) << space.kind_name();
    }
}

TEST(BMetric, CheckAxiomsFlagsAsymmetricCustomDistance) {
    const auto space = BMetricSpace::custom(kLine, "max(u1 - v1, 0) + 2 * max(v1 - u1, 0)", 3.0);
    const auto report = check_axioms(space, 200, 1);
    ASSERT_FALSE(report.ok());
    EXPECT_EQ(report.violations.front().axiom, Axiom::b2);
}

TEST(BMetric, EstimateBMatchesGridOracle) {
    for (double p : {2.0, 3.0}) {
        const auto space = BMetricSpace::power(kLine, p);
        const auto est = estimate_b(space, SamplingPlan::grid(41));
        EXPECT_NEAR(est.b_hat, grid_ratio_oracle(space, 41), 1e-12);
        EXPECT_LE(est.b_hat, std::exp2(p - 1.0) + 1e-9);
        EXPECT_GE(est.b_hat, std::exp2(p - 1.0) - 0.05);
    }
    const auto sq = estimate_b(BMetricSpace::squared_euclidean(kLine), SamplingPlan::grid(3));
    EXPECT_DOUBLE_EQ(sq.b_hat, 2.0);
    ASSERT_EQ(sq.witness.size(), 3u);
    EXPECT_DOUBLE_EQ(sq.witness[2][0], 1.0);
    EXPECT_DOUBLE_EQ(std::abs(sq.witness[0][0] - sq.witness[1][0]), 2.0);
}

TEST(BMetric, EstimateBOnMetricIsAtMostOne) {
    EXPECT_LE(estimate_b(BMetricSpace::euclidean(Box::cube(3, 0.0, 1.0)), 20000, 4).b_hat, 1.0 + 1e-9);
}

TEST(BMetric, EstimateBDegenerateDomain) {
    const auto point_box = BMetricSpace::euclidean(Box({1.0}, {1.0}));
    EXPECT_THROW(estimate_b(point_box, 100, 1), DegenerateDomainError);
}

TEST(BMetric, ChainBoundExamples) {
    const auto sq = BMetricSpace::squared_euclidean(kLine);
    const std::vector<Point> pts{Point{0.0}, Point{1.0}, Point{2.0}};
    const auto c = chain_bound(sq, pts);
    EXPECT_DOUBLE_EQ(c.lhs, 4.0);
    EXPECT_DOUBLE_EQ(c.rhs, 4.0);
    EXPECT_TRUE(c.holds);

    const std::vector<Point> same(5, Point{1.0});
    const auto z = chain_bound(sq, same);
    EXPECT_EQ(z.lhs, 0.0);
    EXPECT_EQ(z.rhs, 0.0);
    EXPECT_TRUE(z.holds);

    EXPECT_THROW(chain_bound(sq, std::vector<Point>{Point{0.0}}), UsageError);
}

TEST(BMetric, ChainBoundAgreesWithDirectSum) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (const auto& space : builtin_spaces(2)) {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 20)(rng);
            std::vector<Point> pts;
            for (std::size_t i = 0; i < n; ++i) pts.push_back(Point{u(rng), u(rng)});
            const double b = space.b();
            double rhs = 0.0;
            const std::size_t links = n - 1;
            for (std::size_t i = 0; i < links; ++i) {
                const double exponent = i + 1 == links ? static_cast<double>(links - 1) : static_cast<double>(i + 1);
                rhs += std::pow(b, exponent) * space.distance(pts[i], pts[i + 1]);
            }
            const auto c = chain_bound(space, pts);
            ASSERT_NEAR(c.lhs, space.distance(pts.front(), pts.back()), 0.0);
            ASSERT_NEAR(c.rhs, rhs, 1e-9 * (1.0 + rhs)) << space.kind_name();
            ASSERT_TRUE(c.holds) << space.kind_name();
        }
    }
}
