#include <doctest.h>

#include "ddestab/disc.hpp"
#include "ddestab/error.hpp"
#include "support.hpp"

using namespace ddestab;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("two-sample scalar fixture") {
    const Discretization d = testing::scalar_fixture();
    CHECK(d.window == 2);
    CHECK(d.r == std::vector<std::size_t>{1});
    CHECK(d.D == m2(1, -1, 0, 1));
    CHECK(d.Dr == m2(0, 0, -1, 0));
    CHECK(d.B.base().isZero(0.0));
    CHECK(d.B.coeff(0) == m2(1, 0, 0, 1));
    CHECK(d.B.coeff(1) == m2(0, 1, 0, 0));
    CHECK(d.A.base().isZero(0.0));
    CHECK(d.A.coeff(0).isZero(0.0));
    CHECK(d.A.coeff(1) == m2(0, 0, 1, 0));
}

TEST_CASE("banded D and Dr for m = 3") {
    const std::vector<double> w{1.5, -2.0, 0.5};
    const Matrix D = build_D(w, 4);
    const Matrix Dr = build_Dr(w, 4);
    Matrix eD(4, 4);
    eD << 1.5, -2, 0.5, 0, 0, 1.5, -2, 0.5, 0, 0, 1.5, -2, 0, 0, 0, 1.5;
    Matrix eDr = Matrix::Zero(4, 4);
    eDr(2, 0) = 0.5;
    eDr(3, 0) = -2.0;
    eDr(3, 1) = 0.5;
    CHECK(D == eD);
    CHECK(Dr == eDr);
}

TEST_CASE("step selection") {
    const Matrix z = Matrix::Zero(1, 1);
    const AffineMatrix one(Matrix::Ones(1, 1), {});
    const DdeSystem sys(AffineMatrix(z, {}), {{Rational(1, 10), one}, {Rational(1, 4), one}});
    const StepChoice s = choose_step(sys, 1, make_stencil(2));
    CHECK(s.dt == Rational(1, 20));
    CHECK(s.r == std::vector<std::size_t>{2, 5});
    CHECK(s.window == 5);

    const StepChoice fine = choose_step(sys, 4, make_stencil(2));
    CHECK(fine.dt == Rational(1, 40));
    CHECK(fine.window == 10);

    try {
        step_from_dt(sys, Rational(1, 30), make_stencil(2));
        FAIL("expected StepResolution");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StepResolution);
    }
    try {
        step_from_dt(sys, Rational(1, 20), make_stencil(2), 3);
        FAIL("expected WindowTooShort");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WindowTooShort);
    }
}

TEST_CASE("block layout for two components") {
    // x1' = x2(t - dt), x2' = -x1: check placement on the stacked vector.
    Matrix a0 = Matrix::Zero(2, 2);
    a0(1, 0) = -1.0;
    Matrix a1 = Matrix::Zero(2, 2);
    a1(0, 1) = 1.0;
    const DdeSystem sys(AffineMatrix(a0, {}), {{Rational(1, 10), AffineMatrix(a1, {})}});
    const Stencil st = make_stencil(2);
    const Discretization d = discretize(sys, st, step_from_dt(sys, Rational(1, 10), st, 2));
    REQUIRE(d.dim() == 4);
    const Matrix B = d.B.base();
    const Matrix A = d.A.base();
    CHECK(B(2, 0) == -1.0);  // x2 row 1 <- x1(t)
    CHECK(B(3, 1) == -1.0);  // x2 row 2 <- x1(t - dt)
    CHECK(B(0, 3) == 1.0);   // x1 row 1 <- x2(t - dt)
    CHECK(A(1, 2) == 1.0);   // x1 row 2 <- x2(t - 2dt), first sample of the lagged block
    CHECK(B.cwiseAbs().sum() == 3.0);
    CHECK(A.cwiseAbs().sum() == 1.0);
    CHECK(d.D.block(2, 2, 2, 2) == m2(1, -1, 0, 1));
}

TEST_CASE("transition matrix") {
    const Discretization d = testing::scalar_fixture();
    // Hand-inverted (D - hB)^{-1}(-Dr + hA) at a = 0, b = -1, h = 0.1.
    CHECK(transition_matrix(d, std::vector<double>{0.0, -1.0}).isApprox(m2(0.81, 0, 0.9, 0), 1e-14));
    // Zero system keeps the constant mode.
    CHECK(transition_matrix(d, std::vector<double>{0.0, 0.0}) == m2(1, 0, 1, 0));
    try {
        transition_matrix(d, std::vector<double>{10.0, 0.0});
        FAIL("expected SingularError");
    } catch (const SingularError& e) {
        CHECK(e.kind() == ErrorKind::SingularSystem);
        CHECK(e.smallest_singular_value() < 1e-12);
    }
}

TEST_CASE("historical stencils are not discretized") {
    const DdeSystem sys = testing::scalar_system(Rational(1, 10));
    const Stencil st = historical_stencil(2);
    CHECK_THROWS_AS(discretize(sys, st, choose_step(sys, 1, make_stencil(2))), Error);
}
