#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ddestab/error.hpp"
#include "ddestab/sdp.hpp"
#include "support.hpp"

using namespace ddestab;

namespace {

ParamBox box2(double lo, double hi) {
    Vector l(2), h(2);
    l << lo, lo;
    h << hi, hi;
    return ParamBox(l, h);
}

}  // namespace

TEST_CASE("box validation and projection") {
    Vector lo(1), hi(1);
    lo << -1.0;
    hi << std::numeric_limits<double>::infinity();
    try {
        ParamBox b(lo, hi);
        FAIL("expected UnboundedProgram");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnboundedProgram);
    }
    const ParamBox b = box2(-1, 1);
    Vector t(2);
    t << 3.0, -0.5;
    CHECK(b.project(t)(0) == 1.0);
    CHECK(b.project(t)(1) == -0.5);
    CHECK(b.contains(b.center()));
}

TEST_CASE("criterion requires a null space") {
    const LmiSystem transposed = expand_lmi(testing::scalar_fixture(), GapForm::Transposed);
    try {
        ProjectedCriterion g(transposed);
        FAIL("expected WrongCase");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WrongCase);
    }
}

TEST_CASE("projected value and supergradient on the fixture") {
    const LmiSystem lmi = expand_lmi(testing::scalar_fixture(), GapForm::Paper);
    const ProjectedCriterion g(lmi);
    Vector grad;
    const std::vector<double> theta{0.25, -1.5};
    CHECK(g.value_and_supergradient(theta, grad) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(grad(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(grad(1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(g.coordinate_lipschitz(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("general window: projected value scales with 1/L") {
    for (std::size_t samples : {1u, 3u, 10u}) {
        const Discretization d = testing::scalar_discretization(Rational(1, 5), samples);
        const LmiSystem lmi = expand_lmi(d, GapForm::Paper);
        const std::vector<double> theta{0.4, -1.3};
        CHECK(projected_value(lmi, theta) ==
              doctest::Approx(-2.0 * (0.4 - 1.3) / static_cast<double>(d.window)).epsilon(1e-10));
    }
}

TEST_CASE("synthesis reaches the best corner") {
    const LmiSystem lmi = expand_lmi(testing::scalar_fixture(), GapForm::Paper);
    const SynthesisResult r = synthesize_theta(lmi, box2(-1, 1));
    CHECK(r.tstar == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.theta_star(0) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(r.theta_star(1) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(r.certified);
    CHECK(r.upper_bound >= r.tstar - 1e-12);

    const SynthesisResult neg = synthesize_theta(lmi, box2(1, 2));
    CHECK(neg.tstar == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("single-parameter synthesis") {
    // x' = a x(t) - x(t - tau): g(a) = -(a - 1) for the fixture layout.
    const Matrix zero = Matrix::Zero(1, 1);
    const DdeSystem sys(AffineMatrix(zero, {Matrix::Ones(1, 1)}),
                        {{Rational(1, 10), AffineMatrix(-Matrix::Ones(1, 1), {zero})}});
    const Stencil st = make_stencil(2);
    const Discretization d = discretize(sys, st, step_from_dt(sys, Rational(1, 10), st, 2));
    Vector lo(1), hi(1);
    lo << -3.0;
    hi << 0.5;
    const SynthesisResult r = synthesize_theta(expand_lmi(d, GapForm::Paper), ParamBox(lo, hi));
    CHECK(r.tstar == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(r.theta_star(0) == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("synthesis on a matrix-valued criterion is near the sampled optimum") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    auto rnd = [&] {
        Matrix m(2, 2);
        for (int i = 0; i < 4; ++i) m.data()[i] = n01(rng);
        return m;
    };
    const DdeSystem sys(AffineMatrix(rnd(), {rnd(), rnd()}), {{Rational(1, 10), AffineMatrix(rnd(), {rnd(), rnd()})}});
    const Stencil st = make_stencil(2);
    const LmiSystem lmi = expand_lmi(discretize(sys, st, choose_step(sys, 2, st)), GapForm::Paper);
    const ProjectedCriterion g(lmi);
    const ParamBox box = box2(-1, 1);
    const SynthesisResult r = synthesize_theta(lmi, box);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= 100; ++j) {
            const std::vector<double> t{-1.0 + 0.02 * i, -1.0 + 0.02 * j};
            best = std::max(best, g.value(t));
        }
    }
    CHECK(r.tstar >= best - 1e-6);
    CHECK(r.upper_bound >= best - 1e-9);
    CHECK(box.contains(r.theta_star, 1e-12));
}

TEST_CASE("analyze verdicts") {
    const DdeSystem sys = testing::scalar_system(Rational(1, 10));
    AnalyzeOptions opt;
    opt.dt = Rational(1, 10);
    opt.window = 2;
    const StabilityVerdict good = analyze(sys, box2(-1, 1), opt);
    CHECK(good.stability_case == StabilityCase::Projected);
    CHECK(good.theorem_class == Definiteness::PsdSingular);
    CHECK(good.stabilizable(1e-6));
    CHECK(good.tstar == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(good.finite_dt_check);

    const StabilityVerdict bad = analyze(sys, box2(1, 2), opt);
    CHECK(!bad.stabilizable(1e-6));

    opt.form = GapForm::Transposed;
    const StabilityVerdict t = analyze(sys, box2(-1, 1), opt);
    CHECK(t.stability_case == StabilityCase::AllThetaUnstable);
    CHECK(!t.theorem_class);
}

TEST_CASE("asymptotic probe") {
    const LmiSystem lmi = expand_lmi(testing::scalar_discretization(Rational(1, 5), 2), GapForm::Paper);
    const AsymptoticProbe good = asymptotic_probe(lmi, std::vector<double>{-1.0, 0.5}, 0.1);
    CHECK(good.first_pd_step.has_value());
    const AsymptoticProbe bad = asymptotic_probe(lmi, std::vector<double>{1.0, 0.5}, 0.1);
    CHECK(!bad.first_pd_step.has_value());
    CHECK(bad.steps.size() == 21);
}
