#include "presic/errors.hpp"
#include "presic/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace presic;

TEST(Point, RejectsNonFiniteCoordinates) {
    EXPECT_THROW(Point({1.0, std::nan("")}), NumericError);
    EXPECT_THROW(Point({std::numeric_limits<double>::infinity()}), NumericError);
    EXPECT_NO_THROW(Point({0.0, -1e300}));
}

TEST(Point, FilledAndEquality) {
    const auto p = Point::filled(3, 0.5);
    EXPECT_EQ(p.dimension(), 3u);
    EXPECT_EQ(p, (Point{0.5, 0.5, 0.5}));
    EXPECT_NE(p, (Point{0.5, 0.5}));
}

TEST(Box, ValidatesBounds) {
    EXPECT_THROW(Box({0.0}, {0.0, 1.0}), UsageError);
    EXPECT_THROW(Box({1.0}, {0.0}), UsageError);
    EXPECT_THROW(Box({}, {}), UsageError);
    EXPECT_THROW(Box::cube(1, 0.0, INFINITY), UsageError);
    EXPECT_NO_THROW(Box({0.0}, {0.0}));
}

TEST(Box, Contains) {
    const auto box = Box::cube(2, 0.0, 2.0);
    EXPECT_TRUE(box.contains(Point{0.0, 2.0}));
    EXPECT_FALSE(box.contains(Point{0.0, 2.0000001}));
    EXPECT_FALSE(box.contains(Point{1.0}));
}

TEST(Slack, ScalesWithRightHandSide) {
    EXPECT_FALSE(exceeds(1.0, 1.0));
    EXPECT_FALSE(exceeds(1.0 + 1e-9, 1.0));
    EXPECT_TRUE(exceeds(1.0 + 3e-9, 1.0));
    EXPECT_FALSE(exceeds(1e6 + 1e-4, 1e6));
    EXPECT_TRUE(exceeds(2e-9, 0.0));
    EXPECT_DOUBLE_EQ(slack_for(-2.0), 3e-9);
}
