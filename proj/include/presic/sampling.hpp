#pragma once

#include "presic/geometry.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace presic {

enum class SamplingMode { random, grid };

/// How tuples of points are drawn from a Box.
///
/// Random mode splits the sample index range into fixed-size batches, each with
/// its own generator seeded from (seed, batch index). Grid mode enumerates every
/// tuple of per-axis grid nodes in mixed-radix order. Either way the tuple at a
/// given index does not depend on `threads`, and a longer run with the same seed
/// visits the shorter run's tuples first.
struct SamplingPlan {
    SamplingMode mode = SamplingMode::random;
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
    std::size_t grid_points = 20;
    std::size_t grid_budget = 20'000'000;
    std::size_t threads = 1;

    static SamplingPlan random(std::size_t samples, std::uint64_t seed) {
        SamplingPlan plan;
        plan.samples = samples;
        plan.seed = seed;
        return plan;
    }
    static SamplingPlan grid(std::size_t points_per_axis) {
        SamplingPlan plan;
        plan.mode = SamplingMode::grid;
        plan.grid_points = points_per_axis;
        return plan;
    }
};

inline constexpr std::size_t kSampleBatch = 512;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
double unit_uniform(std::mt19937_64& rng) noexcept;

/// Number of tuples the plan visits; throws UsageError when a grid would
/// exceed the plan's budget.
std::size_t tuple_count(const SamplingPlan& plan, const Box& box, std::size_t tuple_size);

/// `count` seeded uniform points from the box, independent of any plan.
std::vector<Point> sample_points(const Box& box, std::size_t count, std::uint64_t seed);

namespace detail {

void validate_plan(const SamplingPlan& plan);

/// Fills `out` with the tuples of one batch, in index order.
void generate_batch(const SamplingPlan& plan, const Box& box, std::size_t tuple_size,
                    std::size_t begin, std::size_t end, std::vector<std::vector<Point>>& out);

} // namespace detail

/// Visits every tuple of the plan. `visit(acc, index, tuple)` runs once per tuple
/// on a per-batch accumulator; accumulators are folded with `merge(into, from)`
/// in batch order, so the result is identical for any thread count. The first
/// exception (by batch order) is rethrown.
template <class Acc, class Visit, class Merge>
Acc for_each_tuple(const SamplingPlan& plan, const Box& box, std::size_t tuple_size,
                   Visit&& visit, Merge&& merge) {
    detail::validate_plan(plan);
    const std::size_t count = tuple_count(plan, box, tuple_size);
    const std::size_t batches = (count + kSampleBatch - 1) / kSampleBatch;

    std::vector<Acc> partial(batches);
    std::vector<std::exception_ptr> failures(batches);

    auto work = [&](std::size_t first, std::size_t stride) {
        std::vector<std::vector<Point>> tuples;
        for (std::size_t b = first; b < batches; b += stride) {
            try {
                const std::size_t begin = b * kSampleBatch;
                const std::size_t end = std::min(count, begin + kSampleBatch);
                detail::generate_batch(plan, box, tuple_size, begin, end, tuples);
                for (std::size_t i = begin; i < end; ++i) {
                    visit(partial[b], i, std::span<const Point>(tuples[i - begin]));
                }
            } catch (...) {
                failures[b] = std::current_exception();
            }
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(plan.threads, batches));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }

    Acc result{};
    for (std::size_t b = 0; b < batches; ++b) {
        if (failures[b]) std::rethrow_exception(failures[b]);
        merge(result, std::move(partial[b]));
    }
    return result;
}

} // namespace presic
