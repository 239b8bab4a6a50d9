#include <doctest.h>

#include "ddestab/properties.hpp"

TEST_CASE("property suites pass across seeds") {
    for (std::uint64_t seed : {1u, 2u, 3u, 42u, 1234u}) {
        for (const auto& r : ddestab::run_property_suite(seed)) {
            INFO("seed ", seed, ": ", r.name, " ", r.detail);
            CHECK(r.passed());
            CHECK(r.trials > 0);
        }
    }
}

TEST_CASE("property suites are deterministic") {
    const auto a = ddestab::run_property_suite(99);
    const auto b = ddestab::run_property_suite(99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].failures == b[i].failures);
        CHECK(a[i].excluded == b[i].excluded);
        CHECK(a[i].detail == b[i].detail);
    }
}
