#pragma once

#include <Eigen/Dense>

namespace ddestab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Definiteness { PositiveDefinite, PsdSingular, Indefinite };

const char* to_string(Definiteness d) noexcept;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
struct SymEigen {
    Vector values;
    Matrix vectors;
};

/// Decomposes the symmetric part (S + S^T)/2.
SymEigen sym_eigen(const Matrix& s);

/// Largest singular value.
double spectral_norm(const Matrix& m);
double smallest_singular_value(const Matrix& m);

/// max |lambda| of a symmetric matrix (equals its spectral norm).
double sym_norm(const Matrix& s);

/// Eigenvalues with |lambda| <= abs_tol count as zero; any lambda < -abs_tol
/// makes the spectrum indefinite regardless of zeros.
Definiteness classify_spectrum(const Vector& eigenvalues, double abs_tol);

/// Classification with tolerance rel_tol * ||S||_2.
Definiteness classify(const Matrix& s, double rel_tol);

/// lambda_min > rel_tol * ||S||_2
bool is_positive_definite(const Matrix& s, double rel_tol);

double min_eigenvalue(const Matrix& s);

/// ||S - S^T||_inf / max(1, ||S||_inf)
double symmetry_defect(const Matrix& s);

}  // namespace ddestab
