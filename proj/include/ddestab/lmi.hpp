#pragma once

#include <cstddef>
#include <span>

#include "ddestab/disc.hpp"
#include "ddestab/linalg.hpp"
#include "ddestab/model.hpp"

namespace ddestab {

/// Orientation of the remainder Gram term in the constant LMI matrix.
///   Paper:      D D^T - Dr^T Dr
///   Transposed: D D^T - Dr Dr^T   (what the Schur complement of the
///               2x2 block LMI actually produces)
enum class GapForm { Paper, Transposed };

const char* to_string(GapForm form) noexcept;

/// Relative tolerance for the numerical null space of Q.
inline constexpr double kNullTolerance = 1e-9;

struct GramGap {
    GapForm form = GapForm::Paper;
    Matrix Q;
    Definiteness cls = Definiteness::PositiveDefinite;
    Matrix V;            // orthonormal null-space basis, nL x d; empty unless PsdSingular
    Vector eigenvalues;  // ascending
    double tolerance = 0.0;
};

GramGap gram_gap(const Matrix& D, const Matrix& Dr, GapForm form);
GramGap gram_gap(const Discretization& d, GapForm form);

/// Q + h E(theta) + h^2 F(theta), the expansion of
/// (D - hB)(D - hB)^T - R^T R with R = -Dr + hA (R R^T for the transposed form).
struct LmiSystem {
    GramGap gap;
    AffineMatrix E;
    AffineMatrix B;
    AffineMatrix A;
    Matrix D;
    Matrix Dr;

    GapForm form() const noexcept { return gap.form; }
    Matrix F(std::span<const double> theta) const;
    Matrix full(std::span<const double> theta, double h) const;
    /// Direct, unexpanded evaluation; used to check the expansion identity.
    Matrix direct(std::span<const double> theta, double h) const;
};

LmiSystem expand_lmi(const Discretization& d, GapForm form);

struct SchurChain {
    bool opnorm_lt_1 = false;
    bool block_pd = false;
    bool gap_pd = false;
    double sigma_max = 0.0;      // largest singular value of M
    double block_min_eig = 0.0;  // relative to the block's norm
    double gap_min_eig = 0.0;    // relative to the gap matrix's norm
};

/// The three equivalent-by-Schur stability tests at step h. Only the
/// transposed form makes all three provably equal.
SchurChain schur_chain(const Discretization& d, std::span<const double> theta, double h, GapForm form);

/// (m-1) x (m-1) reduced blocks:
///   Dt(j,k)  = w_{1+(k-j)},  k >= j
///   Drt(j,k) = w_{m-(j-k)},  k <= j
///   Gt       = Dt Dt^T - Drt^T Drt
struct ReducedMatrices {
    Matrix Dt;
    Matrix Drt;
    Matrix Gt;
};

ReducedMatrices reduced_matrices(std::span<const double> w);

/// Definiteness of Gt, which equals that of the paper-form Q for every
/// window that is a multiple of m-1.
Definiteness classify_by_theorem(std::span<const double> w);

/// Upper-left 2(m-1) block [[A, B], [B^T, 0]] built from the element recurrences.
Matrix build_U0(std::span<const double> w);
/// Z = Drt^T Drt built from its element recurrences.
Matrix build_Z(std::span<const double> w);
/// U = U0 with Z added to its lower-right (m-1) block.
Matrix assemble_U(std::span<const double> w);

struct Inertia {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t zero = 0;

    friend bool operator==(const Inertia&, const Inertia&) = default;
    friend Inertia operator+(Inertia a, const Inertia& b) {
        return {a.positive + b.positive, a.negative + b.negative, a.zero + b.zero};
    }
};

/// Counts eigenvalues above tol*||S||_2, below -tol*||S||_2 and in between.
Inertia inertia(const Matrix& s, double tol);

/// Leading-block quantities of H_L = D D^T - Dr^T Dr (per component):
///   Ablk = H(1:m-1, 1:m-1), Bblk = (D D^T)(1:m-1, m:2m-2), Z = Drt^T Drt.
struct LemmaB1Report {
    double residual = 0.0;          // ||Bblk^T Ablk^{-1} Bblk - Z||_inf
    double swapped_residual = 0.0;  // ||Bblk Ablk^{-1} Bblk^T - Z||_inf
    double a_min_eig = 0.0;
    double z_norm = 0.0;            // ||Z||_inf
};

/// Requires w_1 != 0 and L >= 2(m-1); throws LemmaViolation if Ablk is not PD.
LemmaB1Report lemma_b1(std::span<const double> w, std::size_t window);
double lemma_b1_residual(std::span<const double> w, std::size_t window);

/// Throws HypothesisViolation when w_1 is zero relative to max |w_i|.
void require_leading_weight(std::span<const double> w);

}  // namespace ddestab
