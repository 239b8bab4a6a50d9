#include <doctest.h>

#include <cmath>

#include "ddestab/error.hpp"
#include "ddestab/stencil.hpp"

using namespace ddestab;

TEST_CASE("known backward-difference weights") {
    CHECK(make_stencil(2).w == std::vector<double>{1.0, -1.0});
    CHECK(make_stencil(3).w == std::vector<double>{1.5, -2.0, 0.5});
    CHECK(historical_stencil(3).w == std::vector<double>{2.5, -4.0, 1.5});
    CHECK(historical_stencil(3).positions == std::vector<int>{1, 2, 3});
    CHECK(make_stencil(4).w[0] == doctest::Approx(11.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("stencil size limits") {
    CHECK_THROWS_AS(make_stencil(1), Error);
    try {
        make_stencil(1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooFewPoints);
    }
    CHECK_THROWS_AS(make_stencil(kMaxStencilPoints + 1), Error);
    CHECK_NOTHROW(make_stencil(kMaxStencilPoints));
}

TEST_CASE("exact on low-degree polynomials") {
    for (std::size_t m = 2; m <= 5; ++m) {
        const Stencil st = make_stencil(m);
        for (std::size_t deg = 0; deg < m; ++deg) {
            const double p = static_cast<double>(deg);
            auto f = [p](double t) { return std::pow(t, p); };
            const double t0 = 1.3;
            const double exact = deg == 0 ? 0.0 : p * std::pow(t0, p - 1);
            CHECK(std::abs(apply_stencil(st, f, t0, 0.1) - exact) <= 1e-12 * std::max(1.0, std::abs(exact)) * 10);
        }
    }
}

TEST_CASE("empirical convergence orders") {
    auto f = [](double t) { return std::exp(t); };
    const OrderEstimate o2 = empirical_order(make_stencil(2), f, 1.0, 0.0);
    CHECK(o2.slope >= 0.8);
    CHECK(o2.slope <= 1.2);
    const OrderEstimate o3 = empirical_order(make_stencil(3), f, 1.0, 0.0);
    CHECK(o3.slope == doctest::Approx(2.0).epsilon(0.1));
    const OrderEstimate oh = empirical_order(historical_stencil(3), f, 1.0, 0.0);
    CHECK(oh.slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("high-order stencil saturates at the rounding floor") {
    auto f = [](double t) { return std::exp(t); };
    const OrderEstimate o = empirical_order(make_stencil(8), f, 1.0, 0.0);
    CHECK(o.saturated);
}
