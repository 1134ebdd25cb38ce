#include "presic/sampling.hpp"

#include "presic/errors.hpp"

#include <limits>
#include <string>

namespace presic {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

std::mt19937_64 batch_rng(std::uint64_t seed, std::size_t batch) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(batch) + 1)));
}

double grid_node(const Box& box, std::size_t axis, std::size_t node, std::size_t nodes) {
    if (nodes == 1) return box.lo(axis);
    if (node + 1 == nodes) return box.hi(axis);
    const double t = static_cast<double>(node) / static_cast<double>(nodes - 1);
    return box.lo(axis) + (box.hi(axis) - box.lo(axis)) * t;
}

} // namespace

std::size_t tuple_count(const SamplingPlan& plan, const Box& box, std::size_t tuple_size) {
    if (plan.mode == SamplingMode::random) return plan.samples;
    const std::size_t digits = tuple_size * box.dimension();
    std::size_t total = 1;
    for (std::size_t i = 0; i < digits; ++i) {
        if (total > plan.grid_budget / plan.grid_points) {
            throw UsageError("grid of " + std::to_string(plan.grid_points) + "^" +
                             std::to_string(digits) + " tuples exceeds the budget of " +
                             std::to_string(plan.grid_budget));
        }
        total *= plan.grid_points;
    }
    if (total > plan.grid_budget) {
        throw UsageError("grid exceeds the budget of " + std::to_string(plan.grid_budget));
    }
    return total;
}

std::vector<Point> sample_points(const Box& box, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed));
    std::vector<Point> out;
    out.reserve(count);
    std::vector<double> coords(box.dimension());
    for (std::size_t n = 0; n < count; ++n) {
        for (std::size_t a = 0; a < box.dimension(); ++a) {
            coords[a] = box.lo(a) + (box.hi(a) - box.lo(a)) * unit_uniform(rng);
        }
        out.emplace_back(coords);
    }
    return out;
}

namespace detail {

void validate_plan(const SamplingPlan& plan) {
    if (plan.mode == SamplingMode::random && plan.samples == 0) {
        throw UsageError("sample count must be at least 1");
    }
    if (plan.mode == SamplingMode::grid && plan.grid_points == 0) {
        throw UsageError("grid must have at least one node per axis");
    }
}

void generate_batch(const SamplingPlan& plan, const Box& box, std::size_t tuple_size,
                    std::size_t begin, std::size_t end, std::vector<std::vector<Point>>& out) {
    const std::size_t m = box.dimension();
    out.clear();
    out.reserve(end - begin);
    std::vector<double> coords(m);

    if (plan.mode == SamplingMode::random) {
        auto rng = batch_rng(plan.seed, begin / kSampleBatch);
        for (std::size_t i = begin; i < end; ++i) {
            std::vector<Point> tuple;
            tuple.reserve(tuple_size);
            for (std::size_t j = 0; j < tuple_size; ++j) {
                for (std::size_t a = 0; a < m; ++a) {
                    coords[a] = box.lo(a) + (box.hi(a) - box.lo(a)) * unit_uniform(rng);
                }
                tuple.emplace_back(coords);
            }
            out.push_back(std::move(tuple));
        }
        return;
    }

    const std::size_t g = plan.grid_points;
    for (std::size_t i = begin; i < end; ++i) {
        std::size_t rest = i;
        std::vector<Point> tuple;
        tuple.reserve(tuple_size);
        // Most significant digit is the first coordinate of the first point.
        std::vector<std::size_t> digit(tuple_size * m);
        for (std::size_t d = digit.size(); d-- > 0;) {
            digit[d] = rest % g;
            rest /= g;
        }
        for (std::size_t j = 0; j < tuple_size; ++j) {
            for (std::size_t a = 0; a < m; ++a) coords[a] = grid_node(box, a, digit[j * m + a], g);
            tuple.emplace_back(coords);
        }
        out.push_back(std::move(tuple));
    }
}

} // namespace detail

} // namespace presic
