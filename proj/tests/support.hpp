#pragma once

#include <vector>

#include "ddestab/disc.hpp"
#include "ddestab/model.hpp"

namespace ddestab::testing {

// x'(t) = a x(t) + b x(t - tau), parameters (a, b).
inline DdeSystem scalar_system(Rational tau) {
    const Matrix zero = Matrix::Zero(1, 1);
    const Matrix one = Matrix::Ones(1, 1);
    AffineMatrix a0(zero, {one, zero});
    AffineMatrix a1(zero, {zero, one});
    return DdeSystem(std::move(a0), {{tau, std::move(a1)}}, {"a", "b"});
}

// Two-sample window, one-sample delay, m = 2.
inline Discretization scalar_fixture() {
    const DdeSystem sys = scalar_system(Rational(1, 10));
    const Stencil st = make_stencil(2);
    return discretize(sys, st, step_from_dt(sys, Rational(1, 10), st, 2));
}

inline Discretization scalar_discretization(Rational tau, std::size_t samples, std::size_t m = 2) {
    const DdeSystem sys = scalar_system(tau);
    const Stencil st = make_stencil(m);
    return discretize(sys, st, choose_step(sys, samples, st));
}

}  // namespace ddestab::testing
