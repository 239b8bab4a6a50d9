#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddestab/linalg.hpp"
#include "ddestab/rational.hpp"

namespace ddestab {

/// Matrix-valued affine map theta -> base + sum_p theta_p * coeffs[p].
///
/// Used for the system matrices A_i(theta) and for every derived quantity
/// that stays affine in theta (the block matrices B, A and the first-order
/// LMI term E).
class AffineMatrix {
public:
    AffineMatrix() = default;
    AffineMatrix(Matrix base, std::vector<Matrix> coeffs);

    static AffineMatrix zero(Eigen::Index rows, Eigen::Index cols, std::size_t params);
    static AffineMatrix constant(Matrix base, std::size_t params);

    Eigen::Index rows() const noexcept { return base_.rows(); }
    Eigen::Index cols() const noexcept { return base_.cols(); }
    std::size_t param_count() const noexcept { return coeffs_.size(); }

    const Matrix& base() const noexcept { return base_; }
    const std::vector<Matrix>& coeffs() const noexcept { return coeffs_; }
    const Matrix& coeff(std::size_t p) const { return coeffs_.at(p); }

    /// Sum is accumulated in index order starting from base.
    Matrix eval(std::span<const double> theta) const;
    Matrix eval(const Vector& theta) const;

    /// Applies a linear matrix map termwise. Only valid for maps without a
    /// constant term, otherwise the constant would be replicated per parameter.
    template <class F>
    AffineMatrix map(F&& f) const {
        std::vector<Matrix> c;
        c.reserve(coeffs_.size());
        for (const auto& m : coeffs_) c.push_back(f(m));
        return AffineMatrix(f(base_), std::move(c));
    }

    /// Bilinear-free combination of two affine maps sharing P: f must be
    /// jointly linear in its two arguments.
    template <class F>
    static AffineMatrix combine(const AffineMatrix& x, const AffineMatrix& y, F&& f) {
        std::vector<Matrix> c;
        c.reserve(x.coeffs_.size());
        for (std::size_t p = 0; p < x.coeffs_.size(); ++p) c.push_back(f(x.coeffs_[p], y.coeffs_.at(p)));
        return AffineMatrix(f(x.base_, y.base_), std::move(c));
    }

    AffineMatrix& operator+=(const AffineMatrix& other);
    friend AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b) { return a += b; }

private:
    Matrix base_;
    std::vector<Matrix> coeffs_;
};

struct DelayTerm {
    Rational tau;
    AffineMatrix matrix;
};

/// x'(t) = A_0(theta) x(t) + sum_i A_i(theta) x(t - tau_i), rational tau_i > 0.
///
/// Terms sharing a delay are merged (their affine matrices summed) at
/// construction, keeping first-appearance order.
class DdeSystem {
public:
    DdeSystem(AffineMatrix a0, std::vector<DelayTerm> delayed, std::vector<std::string> param_names = {});

    std::size_t n() const noexcept { return static_cast<std::size_t>(a0_.rows()); }
    std::size_t param_count() const noexcept { return a0_.param_count(); }
    std::size_t delay_count() const noexcept { return delayed_.size(); }

    const AffineMatrix& a0() const noexcept { return a0_; }
    const std::vector<DelayTerm>& delayed() const noexcept { return delayed_; }
    const std::vector<std::string>& param_names() const noexcept { return names_; }

    Rational min_delay() const;
    Rational max_delay() const;

private:
    AffineMatrix a0_;
    std::vector<DelayTerm> delayed_;
    std::vector<std::string> names_;
};

/// sum_{j=1..p} C_j x^{(j)}(t) = sum_{i=0..K} sum_{j=0..p-1} A_{i,j}(theta) x^{(j)}(t - tau_i)
/// with tau_0 = 0. Missing rhs entries are zero.
struct HigherOrderSystem {
    std::size_t n = 0;
    std::size_t param_count = 0;
    std::vector<Matrix> lead;       // C_1..C_p
    std::vector<Rational> delays;   // tau_1..tau_K
    std::map<std::pair<std::size_t, std::size_t>, AffineMatrix> rhs;  // (i, j) -> A_{i,j}

    std::size_t order() const noexcept { return lead.size(); }
};

/// First-order form over y = [x; x'; ...; x^{(p-1)}]. The undelayed A_{0,j}
/// terms and the lower-order lead terms land in the bottom block row of a0.
DdeSystem reduce_higher_order(const HigherOrderSystem& h);

}  // namespace ddestab
