#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace presic {

/// An element of the ambient space R^m. Coordinates are always finite.
class Point {
public:
    Point() = default;
    explicit Point(std::vector<double> coords);
    Point(std::initializer_list<double> coords);

    /// m copies of `value`.
    static Point filled(std::size_t dimension, double value);

    std::size_t dimension() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    std::span<const double> coords() const noexcept { return coords_; }

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::vector<double> coords_;
};

/// Axis-aligned sampling domain [lo, hi] in R^m.
class Box {
public:
    Box(std::vector<double> lo, std::vector<double> hi);

    /// The interval [lo, hi] repeated in every one of `dimension` axes.
    static Box cube(std::size_t dimension, double lo, double hi);

    std::size_t dimension() const noexcept { return lo_.size(); }
    double lo(std::size_t i) const { return lo_[i]; }
    double hi(std::size_t i) const { return hi_[i]; }
    const std::vector<double>& lo() const noexcept { return lo_; }
    const std::vector<double>& hi() const noexcept { return hi_; }

    bool contains(const Point& p) const;

    friend bool operator==(const Box&, const Box&) = default;

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
};

/// Slack used for every inequality check L <= R in the library:
/// the check fails only when L > R + 1e-9 * (1 + |R|).
inline constexpr double kRelativeSlack = 1e-9;

double slack_for(double rhs) noexcept;

/// True when `lhs <= rhs` is violated beyond the scale-aware slack.
bool exceeds(double lhs, double rhs) noexcept;

} // namespace presic
