#include <doctest.h>

#include <cmath>
#include <complex>

#include "ddestab/error.hpp"
#include "ddestab/oracle.hpp"
#include "support.hpp"

using namespace ddestab;

TEST_CASE("spectral radius of known matrices") {
    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    CHECK(spectral_radius(rot) == doctest::Approx(1.0).epsilon(1e-14));
    Matrix diag = Matrix::Zero(3, 3);
    diag.diagonal() << 0.5, -0.3, 0.1;
    CHECK(spectral_radius(diag) == doctest::Approx(0.5).epsilon(1e-14));
    // Companion of z^2 - z + 0.25: double root 0.5.
    Matrix comp(2, 2);
    comp << 1, -0.25, 1, 0;
    CHECK(spectral_radius(comp) == doctest::Approx(0.5).epsilon(1e-6));
    Matrix fixture(2, 2);
    fixture << 0.81, 0, 0.9, 0;
    CHECK(spectral_radius(fixture) == doctest::Approx(0.81).epsilon(1e-14));
}

TEST_CASE("simulation decay") {
    const DdeSystem sys = testing::scalar_system(Rational(1));
    const History ones = [](double) { return Vector::Ones(1).eval(); };
    const SimulationResult s = simulate(sys, std::vector<double>{0.0, -1.0}, ones, Rational(1, 50), 30.0);
    CHECK(s.decays);
    CHECK(s.decay_ratio < 1.0);
    CHECK(s.t.size() == s.x.size());
    const SimulationResult g = simulate(sys, std::vector<double>{0.2, 0.0}, ones, Rational(1, 50), 30.0);
    CHECK(!g.decays);
    // Unit-delay growth rate: backward Euler with h = 1/50 over t in [0, 30].
    CHECK(g.x.back()(0) == doctest::Approx(std::pow(1.0 / (1.0 - 0.2 / 50.0), 1500)).epsilon(1e-9));

    CHECK_THROWS_AS(simulate(sys, std::vector<double>{0.0, -1.0}, ones, Rational(1, 50), 5.0), Error);
    CHECK_THROWS_AS(simulate(sys, std::vector<double>{0.0, -1.0}, ones, Rational(1, 3) * Rational(2, 7), 30.0),
                    Error);
}

TEST_CASE("characteristic function") {
    const DdeSystem sys = testing::scalar_system(Rational(1));
    const std::vector<double> theta{0.0, -1.0};
    // lambda + exp(-lambda) = 0 at the principal Lambert-W branch.
    const std::complex<double> root(-0.31813150520476413, 1.3372357014306895);
    CHECK(std::abs(char_eval(sys, theta, root)) < 1e-12);
    CHECK(std::abs(char_eval(sys, theta, {0.0, 0.0}) - std::complex<double>(-1.0, 0.0)) < 1e-15);
}

TEST_CASE("rightmost root scan") {
    const DdeSystem sys = testing::scalar_system(Rational(1));
    const std::vector<double> theta{0.0, -1.0};
    const RootScan scan = rightmost_root_scan(sys, theta, {-5.0, 2.0}, default_im_range(sys), {60, 120});
    CHECK(scan.refined);
    CHECK(scan.rightmost_real == doctest::Approx(-0.31813150520476413).epsilon(1e-8));

    const std::vector<double> growing{0.5, 0.0};
    CHECK(rightmost_root_scan(sys, growing, {-5.0, 2.0}, default_im_range(sys), {60, 120}).rightmost_real ==
          doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(rightmost_root_scan(sys, theta, {-5.0, 2.0}, {0.0, 10.0}, {10, 10}), Error);
}

TEST_CASE("oracle report agreement") {
    const Discretization d = testing::scalar_discretization(Rational(1, 5), 20);
    const OracleReport stable = oracle_report(d, std::vector<double>{-1.0, 0.5}, true);
    CHECK(stable.rho.value() < 1.0);
    CHECK(stable.sim_decay.value());
    CHECK(stable.rightmost_real.value() < 0.0);
    CHECK(stable.all_agree());
    const OracleReport unstable = oracle_report(d, std::vector<double>{1.0, 0.5}, false);
    CHECK(unstable.rho.value() > 1.0);
    CHECK(unstable.all_agree());
    OracleOptions only_rho;
    only_rho.simulate = false;
    only_rho.scan = false;
    const OracleReport partial = oracle_report(d, std::vector<double>{1.0, 0.5}, true, only_rho);
    CHECK(!partial.sim_agrees.has_value());
    CHECK(!partial.all_agree());
}
