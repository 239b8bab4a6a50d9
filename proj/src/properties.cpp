#include "ddestab/properties.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ddestab/disc.hpp"
#include "ddestab/error.hpp"
#include "ddestab/lmi.hpp"
#include "ddestab/model.hpp"
#include "ddestab/oracle.hpp"
#include "ddestab/sdp.hpp"
#include "ddestab/stencil.hpp"

namespace ddestab {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
double normal(Rng& rng, double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng); }
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double sd) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng, sd);
    return m;
}

AffineMatrix random_affine(Rng& rng, Eigen::Index n, std::size_t params, double sd) {
    std::vector<Matrix> coeffs;
    for (std::size_t p = 0; p < params; ++p) coeffs.push_back(random_matrix(rng, n, n, sd));
    return AffineMatrix(random_matrix(rng, n, n, sd), std::move(coeffs));
}

std::vector<double> random_weights(Rng& rng, std::size_t m) {
    std::vector<double> w(m);
    w[0] = (rng() & 1 ? 1.0 : -1.0) * uniform(rng, 0.5, 2.0);
    for (std::size_t i = 1; i < m; ++i) w[i] = normal(rng);
    return w;
}

bool has_band_eigenvalue(const Matrix& s, double tol) {
    const Vector ev = sym_eigen(s).values;
    const double cut = tol * ev.cwiseAbs().maxCoeff();
    return (ev.array().abs() <= cut).any();
}

Matrix per_component_gap(std::span<const double> w, std::size_t window) {
    const Matrix d = build_D(w, window);
    const Matrix dr = build_Dr(w, window);
    return d * d.transpose() - dr.transpose() * dr;
}

// Small random system with stable-ish drift so both verdicts occur.
Discretization random_discretization(Rng& rng, std::size_t params) {
    const auto n = static_cast<Eigen::Index>(pick(rng, 1, 3));
    const std::size_t m = pick(rng, 2, 3);
    const std::size_t window = pick(rng, std::max<std::size_t>(m - 1, 1), 8);
    const std::int64_t steps_per_unit = 20;
    AffineMatrix a0 = random_affine(rng, n, params, 0.3);
    std::vector<Matrix> c = a0.coeffs();
    Matrix base = a0.base() - uniform(rng, 0.0, 30.0) * Matrix::Identity(n, n);
    a0 = AffineMatrix(std::move(base), std::move(c));
    std::vector<DelayTerm> delayed;
    const std::size_t k = pick(rng, 1, 2);
    for (std::size_t i = 0; i < k; ++i) {
        const auto r = static_cast<std::int64_t>(pick(rng, 1, window));
        delayed.push_back({Rational(r, steps_per_unit), random_affine(rng, n, params, 0.5)});
    }
    DdeSystem sys(std::move(a0), std::move(delayed));
    const Stencil st = make_stencil(m);
    return discretize(sys, st, step_from_dt(sys, Rational(1, steps_per_unit), st, window));
}

std::vector<double> random_theta(Rng& rng, std::size_t params) {
    std::vector<double> t(params);
    for (auto& v : t) v = uniform(rng, -1.0, 1.0);
    return t;
}

PropertyResult check_affinity(Rng& rng) {
    PropertyResult r{"affine map is affine", 100, 0, 0, ""};
    for (std::size_t i = 0; i < r.trials; ++i) {
        const std::size_t params = pick(rng, 0, 4);
        const auto rows = static_cast<Eigen::Index>(pick(rng, 1, 4));
        const AffineMatrix a = random_affine(rng, rows, params, 1.0);
        const auto t1 = random_theta(rng, params);
        const auto t2 = random_theta(rng, params);
        const double alpha = uniform(rng, 0.0, 1.0);
        std::vector<double> mix(params);
        for (std::size_t p = 0; p < params; ++p) mix[p] = alpha * t1[p] + (1 - alpha) * t2[p];
        const Matrix lhs = a.eval(mix);
        const Matrix rhs = alpha * a.eval(t1) + (1 - alpha) * a.eval(t2);
        const std::vector<double> zero(params, 0.0);
        if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-12 || a.eval(zero) != a.base()) ++r.failures;
    }
    return r;
}

PropertyResult check_stencils() {
    PropertyResult r{"stencil moment conditions", 0, 0, 0, ""};
    double worst = 0.0;
    for (std::size_t m = 2; m <= kMaxStencilPoints; ++m) {
        for (const Stencil& st : {make_stencil(m), historical_stencil(m)}) {
            ++r.trials;
            // Residual relative to the largest moment term sum_i |w_i| s_i^(m-1).
            double scale = 0.0;
            for (std::size_t i = 0; i < st.size(); ++i) {
                scale += std::abs(st.w[i]) * std::pow(static_cast<double>(st.positions[i]), static_cast<double>(m - 1));
            }
            const double res = moment_residual(st) / std::max(1.0, scale);
            worst = std::max(worst, res);
            if (res > 1e-13 || st.w[0] == 0.0) ++r.failures;
        }
    }
    std::ostringstream os;
    os << "max rel residual " << worst;
    r.detail = os.str();
    return r;
}

PropertyResult check_theorem(Rng& rng) {
    PropertyResult r{"reduced gap class equals full gap class", 0, 0, 0, ""};
    for (int i = 0; i < 200; ++i) {
        const std::size_t m = pick(rng, 2, 4);
        const auto w = random_weights(rng, m);
        const Definiteness reduced = classify_by_theorem(w);
        const Matrix gt = reduced_matrices(w).Gt;
        for (std::size_t window = m - 1; window <= 12; window += m - 1) {
            ++r.trials;
            const Matrix q = per_component_gap(w, window);
            if (classify(q, 1e-10) == reduced) continue;
            if (has_band_eigenvalue(q, 1e-10) || has_band_eigenvalue(gt, 1e-10)) {
                ++r.excluded;
            } else {
                ++r.failures;
            }
        }
    }
    return r;
}

PropertyResult check_congruence(Rng& rng) {
    PropertyResult r{"gap inertia = reduced inertia + (L-m+1, 0, 0)", 0, 0, 0, ""};
    for (int i = 0; i < 100; ++i) {
        const std::size_t m = pick(rng, 2, 4);
        const auto w = random_weights(rng, m);
        const Matrix gt = reduced_matrices(w).Gt;
        for (std::size_t window = m - 1; window <= 12; window += m - 1) {
            ++r.trials;
            const Matrix q = per_component_gap(w, window);
            const Inertia expected = inertia(gt, 1e-10) + Inertia{window - m + 1, 0, 0};
            if (inertia(q, 1e-10) == expected) continue;
            if (has_band_eigenvalue(q, 1e-10) || has_band_eigenvalue(gt, 1e-10)) {
                ++r.excluded;
            } else {
                ++r.failures;
            }
        }
    }
    return r;
}

PropertyResult check_lemma(Rng& rng) {
    PropertyResult r{"leading block PD and Schur complement equals Z", 100, 0, 0, ""};
    double worst = 0.0;
    double swapped = 0.0;
    for (std::size_t i = 0; i < r.trials; ++i) {
        const std::size_t m = pick(rng, 2, 4);
        const auto w = random_weights(rng, m);
        try {
            const LemmaB1Report rep = lemma_b1(w, 4 * (m - 1));
            const double rel = rep.residual / rep.z_norm;
            worst = std::max(worst, rel);
            swapped = std::max(swapped, rep.swapped_residual / rep.z_norm);
            if (rel > 1e-8) ++r.failures;
        } catch (const Error&) {
            ++r.failures;
        }
    }
    std::ostringstream os;
    os << "max rel residual " << worst << "; swapped orientation " << swapped;
    r.detail = os.str();
    return r;
}

PropertyResult check_schur_chain(Rng& rng) {
    PropertyResult r{"exact Schur chain (transposed form)", 50, 0, 0, ""};
    std::size_t paper_disagree = 0;
    std::size_t stable = 0;
    for (std::size_t i = 0; i < r.trials; ++i) {
        const Discretization d = random_discretization(rng, 1);
        const auto theta = random_theta(rng, 1);
        const double h = d.step();
        const SchurChain c = schur_chain(d, theta, h, GapForm::Transposed);
        if (std::abs(c.sigma_max - 1.0) <= 1e-8) {
            ++r.excluded;
            continue;
        }
        stable += c.opnorm_lt_1;
        if (c.opnorm_lt_1 != c.block_pd || c.block_pd != c.gap_pd) ++r.failures;
        const SchurChain p = schur_chain(d, theta, h, GapForm::Paper);
        if (p.gap_pd != c.opnorm_lt_1) ++paper_disagree;
    }
    r.detail = std::to_string(stable) + " contractive; paper-form disagreements " + std::to_string(paper_disagree);
    return r;
}

PropertyResult check_expansion(Rng& rng) {
    PropertyResult r{"LMI expansion identity", 0, 0, 0, ""};
    for (GapForm form : {GapForm::Paper, GapForm::Transposed}) {
        for (int i = 0; i < 20; ++i) {
            ++r.trials;
            const Discretization d = random_discretization(rng, 2);
            const LmiSystem lmi = expand_lmi(d, form);
            const auto theta = random_theta(rng, 2);
            const double h = uniform(rng, 0.0, 0.1);
            const Matrix direct = lmi.direct(theta, h);
            const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
            if ((lmi.full(theta, h) - direct).cwiseAbs().maxCoeff() > 1e-9 * scale) ++r.failures;
        }
    }
    return r;
}

PropertyResult check_concavity(Rng& rng) {
    PropertyResult r{"projected criterion is concave", 100, 0, 0, ""};
    const auto n = static_cast<Eigen::Index>(2);
    DdeSystem sys(random_affine(rng, n, 2, 1.0), {{Rational(1, 10), random_affine(rng, n, 2, 1.0)}});
    const Stencil st = make_stencil(2);
    const Discretization d = discretize(sys, st, choose_step(sys, 4, st));
    const LmiSystem lmi = expand_lmi(d, GapForm::Paper);
    const ProjectedCriterion g(lmi);
    for (std::size_t i = 0; i < r.trials; ++i) {
        const auto t1 = random_theta(rng, 2);
        const auto t2 = random_theta(rng, 2);
        const double alpha = uniform(rng, 0.0, 1.0);
        const std::vector<double> mix{alpha * t1[0] + (1 - alpha) * t2[0], alpha * t1[1] + (1 - alpha) * t2[1]};
        if (g.value(mix) < alpha * g.value(t1) + (1 - alpha) * g.value(t2) - 1e-10) ++r.failures;
    }
    return r;
}

PropertyResult check_norm_radius(Rng& rng) {
    PropertyResult r{"operator norm dominates spectral radius", 50, 0, 0, ""};
    for (std::size_t i = 0; i < r.trials; ++i) {
        const Discretization d = random_discretization(rng, 1);
        const Matrix m = transition_matrix(d, random_theta(rng, 1));
        if (spectral_norm(m) < spectral_radius(m) - 1e-10) ++r.failures;
    }
    return r;
}

PropertyResult check_reduction(Rng& rng) {
    PropertyResult r{"higher-order reduction preserves residual", 30, 0, 0, ""};
    for (std::size_t trial = 0; trial < r.trials; ++trial) {
        const std::size_t n = pick(rng, 1, 2);
        const std::size_t p = pick(rng, 1, 3);
        const auto nn = static_cast<Eigen::Index>(n);
        HigherOrderSystem h;
        h.n = n;
        h.param_count = 1;
        for (std::size_t j = 0; j < p; ++j) h.lead.push_back(random_matrix(rng, nn, nn, 1.0));
        h.lead.back() += 3.0 * Matrix::Identity(nn, nn);
        h.delays = {Rational(1, 2), Rational(1)};
        for (std::size_t i = 0; i <= 2; ++i) {
            for (std::size_t j = 0; j < p; ++j) h.rhs.emplace(std::pair{i, j}, random_affine(rng, nn, 1, 1.0));
        }
        const DdeSystem sys = reduce_higher_order(h);
        const std::vector<double> theta{uniform(rng, -1, 1)};

        // Polynomial trajectory x(t) = sum_k c_k t^k of degree p + 2.
        const std::size_t deg = p + 2;
        std::vector<Vector> c;
        for (std::size_t k = 0; k <= deg; ++k) c.push_back(random_matrix(rng, nn, 1, 1.0));
        auto deriv = [&](std::size_t order, double t) {
            Vector out = Vector::Zero(nn);
            for (std::size_t k = order; k <= deg; ++k) {
                double coef = 1.0;
                for (std::size_t q = 0; q < order; ++q) coef *= static_cast<double>(k - q);
                out += coef * std::pow(t, static_cast<double>(k - order)) * c[k];
            }
            return out;
        };
        const double t = uniform(rng, 0.5, 2.0);
        const std::vector<double> taus{0.0, 0.5, 1.0};

        Vector r1 = Vector::Zero(nn);
        for (std::size_t j = 1; j <= p; ++j) r1 += h.lead[j - 1] * deriv(j, t);
        for (std::size_t i = 0; i <= 2; ++i) {
            for (std::size_t j = 0; j < p; ++j) r1 -= h.rhs.at({i, j}).eval(theta) * deriv(j, t - taus[i]);
        }

        auto stacked = [&](std::size_t shift, double tt) {
            Vector y(static_cast<Eigen::Index>(p * n));
            for (std::size_t j = 0; j < p; ++j) y.segment(static_cast<Eigen::Index>(j * n), nn) = deriv(j + shift, tt);
            return y;
        };
        Vector r2 = stacked(1, t) - sys.a0().eval(theta) * stacked(0, t);
        for (const auto& term : sys.delayed()) r2 -= term.matrix.eval(theta) * stacked(0, t - term.tau.to_double());

        const Vector top = r2.head(static_cast<Eigen::Index>((p - 1) * n));
        const Vector bottom = h.lead.back() * r2.tail(nn);
        const double scale = std::max(1.0, r1.norm());
        if ((top.size() && top.cwiseAbs().maxCoeff() > 1e-8 * scale) || (bottom - r1).norm() > 1e-8 * scale) {
            ++r.failures;
        }
    }
    return r;
}

}  // namespace

std::vector<PropertyResult> run_property_suite(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PropertyResult> out;
    out.push_back(check_affinity(rng));
    out.push_back(check_stencils());
    out.push_back(check_reduction(rng));
    out.push_back(check_theorem(rng));
    out.push_back(check_congruence(rng));
    out.push_back(check_lemma(rng));
    out.push_back(check_schur_chain(rng));
    out.push_back(check_expansion(rng));
    out.push_back(check_concavity(rng));
    out.push_back(check_norm_radius(rng));
    return out;
}

}  // namespace ddestab
