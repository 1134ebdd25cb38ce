#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace presic::demos {

struct DemoRow {
    std::string check;
    std::string detail;
    bool pass = false;
};

struct DemoReport {
    std::string name;
    std::vector<DemoRow> rows;

    bool all_pass() const;
    std::string table() const;
};

/// Names accepted by run_demo().
const std::vector<std::string>& demo_names();

/// Averaging operator on ([0,2], (x-y)^2): convergence to 0 for k in {1,2,3,5}.
DemoReport averaging_example(std::uint64_t seed);

/// Sharpness of b for the power and truncated l_p constructions.
DemoReport bmetric_examples(std::uint64_t seed);

/// The piecewise phi of the averaging example fails the weak phi-condition
/// for windows with max step in [5/2, 4].
DemoReport phi_anomaly(std::uint64_t seed);

/// Throws UsageError for unknown names.
DemoReport run_demo(const std::string& name, std::uint64_t seed);

} // namespace presic::demos
