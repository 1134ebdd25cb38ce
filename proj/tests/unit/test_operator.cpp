#include "presic/errors.hpp"
#include "presic/operator.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace presic;

namespace {

const BMetricSpace kSquared = BMetricSpace::squared_euclidean(Box::cube(1, 0.0, 2.0));

std::vector<Point> line(std::initializer_list<double> xs) {
    std::vector<Point> out;
    for (double x : xs) out.push_back(Point{x});
    return out;
}

} // namespace

TEST(Operator, AveragingExamples) {
    EXPECT_EQ(PresicOperator::averaging(2).apply(line({1.0, 3.0})), Point{1.0});
    EXPECT_EQ(PresicOperator::averaging(1).apply(line({2.0})), Point{1.0});
    EXPECT_EQ(PresicOperator::averaging(3).diagonal_apply(Point{2.0}), Point{1.0});
    const auto plane = PresicOperator::averaging(2, 2);
    EXPECT_EQ(plane.apply(std::vector<Point>{Point{1.0, 4.0}, Point{3.0, 0.0}}), (Point{1.0, 1.0}));
}

TEST(Operator, AffineAndConstant) {
    const auto affine = PresicOperator::affine_uniform({0.25, 0.25}, {1.0});
    EXPECT_EQ(affine.apply(line({0.0, 0.0})), Point{1.0});
    EXPECT_EQ(affine.diagonal_apply(Point{2.0}), Point{2.0});
    const auto per_coord = PresicOperator::affine({{0.5, 0.0}, {0.0, 0.5}}, {1.0, -1.0});
    EXPECT_EQ(per_coord.apply(std::vector<Point>{Point{2.0, 2.0}, Point{4.0, 4.0}}), (Point{2.0, 1.0}));
    const auto c = PresicOperator::constant(3, Point{0.7});
    EXPECT_EQ(c.apply(line({0.0, 1.0, 2.0})), Point{0.7});
}

TEST(Operator, DslMatchesBuiltins) {
    const auto dsl = PresicOperator::dsl(2, 1, {"(x1 + x2) / 4"});
    const auto avg = PresicOperator::averaging(2);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const auto w = line({u(rng), u(rng)});
        EXPECT_DOUBLE_EQ(dsl.apply(w)[0], avg.apply(w)[0]);
    }
    const auto broadcast = PresicOperator::dsl(1, 2, {"x1 / 2"});
    EXPECT_EQ(broadcast.apply(std::vector<Point>{Point{2.0, 6.0}}), (Point{1.0, 3.0}));
    const auto swap = PresicOperator::dsl(1, 2, {"x1_2", "x1_1"});
    EXPECT_EQ(swap.apply(std::vector<Point>{Point{2.0, 6.0}}), (Point{6.0, 2.0}));
}

TEST(Operator, DiagonalMatchesRepeatedWindow) {
    const std::vector<PresicOperator> ops{PresicOperator::averaging(3), PresicOperator::affine_uniform({0.1, 0.2, 0.3}, {0.5}),
                                          PresicOperator::dsl(3, 1, {"x1 * x2 - x3 / 3"})};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& op : ops) {
        const DiagonalOperator F(op);
        for (int i = 0; i < 50; ++i) {
            const Point x{u(rng)};
            EXPECT_EQ(F(x), op.apply(std::vector<Point>(3, x)));
        }
    }
}

TEST(Operator, ShapeErrors) {
    const auto op = PresicOperator::averaging(2);
    EXPECT_THROW(op.apply(line({1.0})), UsageError);
    EXPECT_THROW(op.apply(std::vector<Point>{Point{1.0}, Point{1.0, 2.0}}), UsageError);
    EXPECT_THROW(PresicOperator::averaging(0), UsageError);
    EXPECT_THROW(PresicOperator::affine({{0.5}, {0.5, 0.1}}, {0.0}), UsageError);
    EXPECT_THROW(PresicOperator::dsl(1, 3, {"x1", "x1"}), UsageError);
    EXPECT_THROW(PresicOperator::dsl(1, 1, {"x2"}), DslError);
}

TEST(Operator, NonFiniteOutputNamesCoordinate) {
    const auto op = PresicOperator::dsl(1, 2, {"x1", "exp(x1_2 * 1000)"});
    try {
        op.apply(std::vector<Point>{Point{1.0, 1.0}});
        FAIL();
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("coordinate 2"), std::string::npos);
    }
}

TEST(Operator, ResidualExamples) {
    EXPECT_DOUBLE_EQ(residual(PresicOperator::averaging(2), kSquared, Point{0.0}), 0.0);
    EXPECT_DOUBLE_EQ(residual(PresicOperator::averaging(1), kSquared, Point{2.0}), 1.0);
    EXPECT_DOUBLE_EQ(residual(PresicOperator::constant(2, Point{1.5}), kSquared, Point{1.5}), 0.0);
}

TEST(Operator, DomainPolicy) {
    const auto grow = PresicOperator::dsl(1, 1, {"x1 + 1"});
    DomainTally tally;
    EXPECT_EQ(apply_in(grow, kSquared, line({1.5}), tally), Point{2.5});
    EXPECT_EQ(tally.outside, 1u);
    EXPECT_EQ(diagonal_apply_in(grow, kSquared, Point{0.5}, tally), Point{1.5});
    EXPECT_EQ(tally.outside, 1u);
    const auto strict = grow.with_codomain_check(true);
    EXPECT_THROW(apply_in(strict, kSquared, line({1.5}), tally), DomainError);
    EXPECT_THROW(diagonal_apply_in(strict, kSquared, Point{1.5}, tally), DomainError);
}
