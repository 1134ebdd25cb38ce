#include "presic/geometry.hpp"

#include "presic/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace presic {

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (!std::isfinite(coords_[i])) {
            throw NumericError("point coordinate " + std::to_string(i + 1) + " is not finite");
        }
    }
}

Point::Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

Point Point::filled(std::size_t dimension, double value) {
    return Point(std::vector<double>(dimension, value));
}

Box::Box(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size()) {
        throw UsageError("box bounds must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i])) {
            throw UsageError("box bounds must be finite");
        }
        if (lo_[i] > hi_[i]) {
            throw UsageError("box axis " + std::to_string(i + 1) + " has lo > hi");
        }
    }
}

Box Box::cube(std::size_t dimension, double lo, double hi) {
    return Box(std::vector<double>(dimension, lo), std::vector<double>(dimension, hi));
}

bool Box::contains(const Point& p) const {
    if (p.dimension() != dimension()) return false;
    for (std::size_t i = 0; i < dimension(); ++i) {
        if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
    }
    return true;
}

double slack_for(double rhs) noexcept { return kRelativeSlack * (1.0 + std::abs(rhs)); }

bool exceeds(double lhs, double rhs) noexcept { return lhs > rhs + slack_for(rhs); }

} // namespace presic
