#include "ddestab/lmi.hpp"

#include <algorithm>
#include <cmath>

#include "ddestab/error.hpp"

namespace ddestab {

namespace {

double inf_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

Matrix remainder_gram(const Matrix& r, GapForm form) {
    return form == GapForm::Paper ? Matrix(r.transpose() * r) : Matrix(r * r.transpose());
}

}  // namespace

const char* to_string(GapForm form) noexcept { return form == GapForm::Paper ? "paper" : "transposed"; }

GramGap gram_gap(const Matrix& D, const Matrix& Dr, GapForm form) {
    GramGap gap;
    gap.form = form;
    gap.Q = D * D.transpose() - remainder_gram(Dr, form);
    const SymEigen eig = sym_eigen(gap.Q);
    gap.eigenvalues = eig.values;
    const double scale = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
    gap.tolerance = kNullTolerance * scale;
    gap.cls = classify_spectrum(eig.values, gap.tolerance);
    if (gap.cls == Definiteness::PsdSingular) {
        std::vector<Eigen::Index> null_idx;
        for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
            if (std::abs(eig.values(i)) <= gap.tolerance) null_idx.push_back(i);
        }
        gap.V.resize(gap.Q.rows(), static_cast<Eigen::Index>(null_idx.size()));
        for (std::size_t c = 0; c < null_idx.size(); ++c) {
            gap.V.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(null_idx[c]);
        }
    } else {
        gap.V.resize(gap.Q.rows(), 0);
    }
    return gap;
}

GramGap gram_gap(const Discretization& d, GapForm form) { return gram_gap(d.D, d.Dr, form); }

Matrix LmiSystem::F(std::span<const double> theta) const {
    const Matrix b = B.eval(theta);
    const Matrix a = A.eval(theta);
    return b * b.transpose() - remainder_gram(a, form());
}

Matrix LmiSystem::full(std::span<const double> theta, double h) const {
    return gap.Q + h * E.eval(theta) + h * h * F(theta);
}

Matrix LmiSystem::direct(std::span<const double> theta, double h) const {
    const Matrix g = D - h * B.eval(theta);
    const Matrix r = -Dr + h * A.eval(theta);
    return g * g.transpose() - remainder_gram(r, form());
}

LmiSystem expand_lmi(const Discretization& d, GapForm form) {
    const Matrix& D = d.D;
    const Matrix& Dr = d.Dr;
    AffineMatrix e = AffineMatrix::combine(d.B, d.A, [&](const Matrix& b, const Matrix& a) -> Matrix {
        Matrix out = -(D * b.transpose() + b * D.transpose());
        if (form == GapForm::Paper) {
            out += Dr.transpose() * a + a.transpose() * Dr;
        } else {
            out += Dr * a.transpose() + a * Dr.transpose();
        }
        return out;
    });
    return LmiSystem{gram_gap(d, form), std::move(e), d.B, d.A, d.D, d.Dr};
}

SchurChain schur_chain(const Discretization& d, std::span<const double> theta, double h, GapForm form) {
    constexpr double tol = 1e-10;
    const Matrix g = d.D - h * d.B.eval(theta);
    const Matrix r = -d.Dr + h * d.A.eval(theta);
    const Matrix m = transition_matrix(d, theta, h);

    SchurChain out;
    out.sigma_max = spectral_norm(m);
    out.opnorm_lt_1 = out.sigma_max < 1.0 - tol;

    const auto k = g.rows();
    Matrix block(2 * k, 2 * k);
    block << g * g.transpose(), r, r.transpose(), Matrix::Identity(k, k);
    const Vector be = sym_eigen(block).values;
    const double bscale = be.cwiseAbs().maxCoeff();
    out.block_min_eig = be(0) / bscale;
    out.block_pd = be(0) > tol * bscale;

    const Matrix gap = g * g.transpose() - remainder_gram(r, form);
    const Vector ge = sym_eigen(gap).values;
    const double gscale = std::max(ge.cwiseAbs().maxCoeff(), 1e-300);
    out.gap_min_eig = ge(0) / gscale;
    out.gap_pd = ge(0) > tol * gscale;
    return out;
}

void require_leading_weight(std::span<const double> w) {
    if (w.size() < 2) throw Error(ErrorKind::TooFewPoints, "need at least two weights");
    double scale = 0.0;
    for (double v : w) scale = std::max(scale, std::abs(v));
    if (!(std::abs(w[0]) > 1e-14 * scale)) {
        throw Error(ErrorKind::HypothesisViolation, "w_1 must be non-zero");
    }
}

ReducedMatrices reduced_matrices(std::span<const double> w) {
    require_leading_weight(w);
    const std::size_t m = w.size();
    const auto s = static_cast<Eigen::Index>(m - 1);
    ReducedMatrices out{Matrix::Zero(s, s), Matrix::Zero(s, s), Matrix()};
    for (std::size_t j = 1; j <= m - 1; ++j) {
        for (std::size_t k = 1; k <= m - 1; ++k) {
            const auto r = static_cast<Eigen::Index>(j - 1);
            const auto c = static_cast<Eigen::Index>(k - 1);
            if (k >= j) out.Dt(r, c) = w[k - j];              // w_{1+(k-j)}
            if (k <= j) out.Drt(r, c) = w[m - (j - k) - 1];   // w_{m-(j-k)}
        }
    }
    out.Gt = out.Dt * out.Dt.transpose() - out.Drt.transpose() * out.Drt;
    return out;
}

Definiteness classify_by_theorem(std::span<const double> w) {
    const ReducedMatrices red = reduced_matrices(w);
    const Vector ev = sym_eigen(red.Gt).values;
    const double scale = ev.cwiseAbs().maxCoeff();
    const double tol = scale == 0.0 ? 1e-12 : 1e-10 * scale;
    return classify_spectrum(ev, tol);
}

Matrix build_U0(std::span<const double> w) {
    const std::size_t m = w.size();
    if (m < 2) throw Error(ErrorKind::TooFewPoints, "need at least two weights");
    const std::size_t size = 2 * (m - 1);
    // 1-based indexing helpers over the weight vector and the matrix.
    auto wt = [&](std::size_t i) { return w[i - 1]; };
    Matrix u = Matrix::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    auto at = [&](std::size_t i, std::size_t j) -> double& {
        return u(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
    };
    for (std::size_t j = 1; j <= m; ++j) at(1, j) = wt(1) * wt(j);
    for (std::size_t i = 2; i <= m - 1; ++i) {
        for (std::size_t j = i; j <= size; ++j) {
            if (j <= m) {
                at(i, j) = at(i - 1, j - 1) + wt(i) * wt(j);
            } else {
                at(i, j) = at(i - 1, j - 1);
            }
        }
    }
    // Rows m..2(m-1) by symmetry; their mutual block stays zero.
    for (std::size_t i = 1; i <= size; ++i) {
        for (std::size_t j = 1; j < i; ++j) {
            if (j <= m - 1) at(i, j) = at(j, i);
        }
    }
    return u;
}

Matrix build_Z(std::span<const double> w) {
    const std::size_t m = w.size();
    if (m < 2) throw Error(ErrorKind::TooFewPoints, "need at least two weights");
    const std::size_t s = m - 1;
    auto wt = [&](std::size_t i) { return w[i - 1]; };
    Matrix z = Matrix::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    auto at = [&](std::size_t i, std::size_t j) -> double& {
        return z(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
    };
    for (std::size_t j = 1; j <= s; ++j) {
        at(s, j) = wt(m) * wt(j + 1);
        at(j, s) = at(s, j);
    }
    for (std::size_t i = s - 1; i >= 1; --i) {
        for (std::size_t j = s - 1; j >= 1; --j) {
            at(i, j) = at(i + 1, j + 1) + wt(i + 1) * wt(j + 1);
        }
    }
    return z;
}

Matrix assemble_U(std::span<const double> w) {
    Matrix u = build_U0(w);
    const auto s = static_cast<Eigen::Index>(w.size() - 1);
    u.bottomRightCorner(s, s) += build_Z(w);
    return u;
}

Inertia inertia(const Matrix& s, double tol) {
    if (symmetry_defect(s) > 1e-10) {
        throw Error(ErrorKind::Symmetry, "inertia of a non-symmetric matrix");
    }
    const Vector ev = sym_eigen(s).values;
    const double cut = tol * (ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0);
    Inertia out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > cut) {
            ++out.positive;
        } else if (ev(i) < -cut) {
            ++out.negative;
        } else {
            ++out.zero;
        }
    }
    return out;
}

LemmaB1Report lemma_b1(std::span<const double> w, std::size_t window) {
    require_leading_weight(w);
    const std::size_t m = w.size();
    if (window < 2 * (m - 1)) {
        throw Error(ErrorKind::WindowTooShort, "lemma needs L >= 2(m-1)");
    }
    const Matrix d = build_D(w, window);
    const Matrix dr = build_Dr(w, window);
    const Matrix gram = d * d.transpose();
    const Matrix h = gram - dr.transpose() * dr;
    const auto s = static_cast<Eigen::Index>(m - 1);

    const Matrix a = h.topLeftCorner(s, s);
    const Matrix b = gram.block(0, s, s, s);
    const Matrix z = build_Z(w);

    LemmaB1Report out;
    const Vector ae = sym_eigen(a).values;
    out.a_min_eig = ae(0);
    if (!(ae(0) > 1e-14 * ae.cwiseAbs().maxCoeff())) {
        throw Error(ErrorKind::LemmaViolation, "leading block is not positive definite");
    }
    const Eigen::LLT<Matrix> llt(a);
    out.residual = inf_norm(b.transpose() * llt.solve(b) - z);
    out.swapped_residual = inf_norm(b * llt.solve(Matrix(b.transpose())) - z);
    out.z_norm = inf_norm(z);
    return out;
}

double lemma_b1_residual(std::span<const double> w, std::size_t window) { return lemma_b1(w, window).residual; }

}  // namespace ddestab
