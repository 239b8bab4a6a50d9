#include <doctest.h>

#include <cmath>
#include <random>

#include "ddestab/error.hpp"
#include "ddestab/lmi.hpp"
#include "support.hpp"

using namespace ddestab;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix gap_direct(const std::vector<double>& w, std::size_t L) {
    const Matrix D = build_D(w, L);
    const Matrix Dr = build_Dr(w, L);
    return D * D.transpose() - Dr.transpose() * Dr;
}

}  // namespace

TEST_CASE("scalar fixture gap and first-order term") {
    const Discretization d = testing::scalar_fixture();
    const LmiSystem lmi = expand_lmi(d, GapForm::Paper);
    CHECK(lmi.gap.Q.isApprox(m2(1, -1, -1, 1), 1e-15));
    CHECK(lmi.gap.cls == Definiteness::PsdSingular);
    REQUIRE(lmi.gap.V.cols() == 1);
    CHECK(std::abs(std::abs(lmi.gap.V(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-14);

    const double a = 0.3;
    const double b = -0.7;
    const std::vector<double> theta{a, b};
    CHECK(lmi.E.eval(theta).isApprox(m2(-2 * a, a - b, a - b, -2 * a), 1e-14));
    const Matrix v = lmi.gap.V;
    CHECK((v.transpose() * lmi.E.eval(theta) * v)(0, 0) == doctest::Approx(-(a + b)).epsilon(1e-12));
}

TEST_CASE("transposed form of the fixture is indefinite") {
    const GramGap g = gram_gap(testing::scalar_fixture(), GapForm::Transposed);
    CHECK(g.Q.isApprox(m2(2, -1, -1, 0), 1e-15));
    CHECK(g.cls == Definiteness::Indefinite);
    CHECK(g.V.size() == 0);
}

TEST_CASE("expansion matches direct evaluation") {
    const Discretization d = testing::scalar_discretization(Rational(1, 5), 4, 3);
    for (GapForm form : {GapForm::Paper, GapForm::Transposed}) {
        const LmiSystem lmi = expand_lmi(d, form);
        const std::vector<double> theta{-0.4, 1.1};
        const Matrix direct = lmi.direct(theta, 0.05);
        CHECK((lmi.full(theta, 0.05) - direct).cwiseAbs().maxCoeff() <= 1e-12 * direct.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("reduced matrices and classification") {
    const ReducedMatrices r2 = reduced_matrices(std::vector<double>{1.0, -1.0});
    CHECK(r2.Gt.isZero(0.0));
    CHECK(classify_by_theorem(std::vector<double>{1.0, -1.0}) == Definiteness::PsdSingular);

    const ReducedMatrices r3 = reduced_matrices(std::vector<double>{1.5, -2.0, 0.5});
    CHECK(r3.Gt.isApprox(m2(2, -2, -2, 2), 1e-15));
    CHECK(classify_by_theorem(std::vector<double>{1.5, -2.0, 0.5}) == Definiteness::PsdSingular);

    CHECK(classify_by_theorem(std::vector<double>{2.0, -1.0}) == Definiteness::PositiveDefinite);
    CHECK(classify_by_theorem(std::vector<double>{1.0, -2.0}) == Definiteness::Indefinite);
    for (std::size_t L = 1; L <= 6; ++L) {
        CHECK(classify(gap_direct({2.0, -1.0}, L), 1e-10) == Definiteness::PositiveDefinite);
    }
    for (std::size_t L = 1; L <= 4; ++L) {
        CHECK(classify(gap_direct({1.0, -2.0}, L), 1e-10) == Definiteness::Indefinite);
    }
    for (std::size_t L = 2; L <= 12; L += 2) {
        CHECK(classify(gap_direct({1.5, -2.0, 0.5}, L), 1e-10) == Definiteness::PsdSingular);
    }
}

TEST_CASE("U matrix for m = 3 follows the product pattern") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 5; ++trial) {
        const double w1 = 1.0 + std::abs(n01(rng));
        const double w2 = n01(rng);
        const double w3 = n01(rng);
        Matrix expected(4, 4);
        expected << w1 * w1, w1 * w2, w1 * w3, 0,                      //
            w1 * w2, w1 * w1 + w2 * w2, w1 * w2 + w2 * w3, w1 * w3,    //
            w1 * w3, w1 * w2 + w2 * w3, w2 * w2 + w3 * w3, w2 * w3,    //
            0, w1 * w3, w2 * w3, w3 * w3;
        const Matrix u = assemble_U(std::vector<double>{w1, w2, w3});
        CHECK((u - expected).cwiseAbs().maxCoeff() <= 1e-14 * expected.cwiseAbs().maxCoeff());
        CHECK(inertia(u, 1e-10) == Inertia{2, 0, 2});
    }
}

TEST_CASE("leading-block Schur complement") {
    const std::vector<double> w{1.5, -2.0, 0.5};
    const LemmaB1Report rep = lemma_b1(w, 4);
    CHECK(rep.a_min_eig > 0.0);
    CHECK(rep.residual <= 1e-12 * rep.z_norm);
    CHECK_THROWS_AS(lemma_b1(w, 3), Error);
    try {
        require_leading_weight(std::vector<double>{0.0, 1.0, -1.0});
        FAIL("expected HypothesisViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HypothesisViolation);
    }
}

TEST_CASE("inertia") {
    Matrix s = Matrix::Zero(3, 3);
    s.diagonal() << 2.0, -1.0, 0.0;
    CHECK(inertia(s, 1e-10) == Inertia{1, 1, 1});
    Matrix ns = s;
    ns(0, 1) = 1.0;
    CHECK_THROWS_AS(inertia(ns, 1e-10), Error);
}

TEST_CASE("Schur chain at the fixture") {
    const Discretization d = testing::scalar_fixture();
    const std::vector<double> stable{0.0, -1.0};
    const SchurChain t = schur_chain(d, stable, d.step(), GapForm::Transposed);
    CHECK(t.sigma_max == doctest::Approx(std::sqrt(0.81 * 0.81 + 0.9 * 0.9)).epsilon(1e-12));
    CHECK(!t.opnorm_lt_1);  // rho = 0.81 but the norm exceeds one
    CHECK(t.block_pd == t.opnorm_lt_1);
    CHECK(t.gap_pd == t.opnorm_lt_1);

    const std::vector<double> zero{0.0, 0.0};
    const SchurChain z = schur_chain(d, zero, d.step(), GapForm::Paper);
    CHECK(z.sigma_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(!z.opnorm_lt_1);
    CHECK(!z.block_pd);
    CHECK(!z.gap_pd);
}
