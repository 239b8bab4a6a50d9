#include "ddestab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ddestab {

const char* to_string(Definiteness d) noexcept {
    switch (d) {
        case Definiteness::PositiveDefinite: return "PositiveDefinite";
        case Definiteness::PsdSingular: return "PsdSingular";
        case Definiteness::Indefinite: return "Indefinite";
    }
    return "?";
}

SymEigen sym_eigen(const Matrix& s) {
    const Matrix sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double smallest_singular_value(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1);
}

double sym_norm(const Matrix& s) {
    if (s.size() == 0) return 0.0;
    return sym_eigen(s).values.cwiseAbs().maxCoeff();
}

Definiteness classify_spectrum(const Vector& eigenvalues, double abs_tol) {
    bool has_zero = false;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double l = eigenvalues(i);
        if (l < -abs_tol) return Definiteness::Indefinite;
        if (l <= abs_tol) has_zero = true;
    }
    return has_zero ? Definiteness::PsdSingular : Definiteness::PositiveDefinite;
}

Definiteness classify(const Matrix& s, double rel_tol) {
    const Vector ev = sym_eigen(s).values;
    const double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    return classify_spectrum(ev, rel_tol * scale);
}

bool is_positive_definite(const Matrix& s, double rel_tol) {
    if (s.size() == 0) return true;
    const Vector ev = sym_eigen(s).values;
    const double scale = ev.cwiseAbs().maxCoeff();
    return ev(0) > rel_tol * scale;
}

double min_eigenvalue(const Matrix& s) {
    return sym_eigen(s).values(0);
}

double symmetry_defect(const Matrix& s) {
    if (s.size() == 0) return 0.0;
    const double scale = std::max(1.0, s.cwiseAbs().rowwise().sum().maxCoeff());
    return (s - s.transpose()).cwiseAbs().rowwise().sum().maxCoeff() / scale;
}

}  // namespace ddestab
