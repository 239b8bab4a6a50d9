#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ddestab {

struct PropertyResult {
    std::string name;
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t excluded = 0;  // instances inside a tolerance band
    std::string detail;

    bool passed() const noexcept { return failures == 0; }
};

/// Randomized property suites over the whole pipeline, seeded for
/// reproducibility. Backs the `verify` command.
std::vector<PropertyResult> run_property_suite(std::uint64_t seed);

}  // namespace ddestab
