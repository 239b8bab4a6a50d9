#include "ddestab/model.hpp"

#include <algorithm>

#include "ddestab/error.hpp"

namespace ddestab {

AffineMatrix::AffineMatrix(Matrix base, std::vector<Matrix> coeffs)
    : base_(std::move(base)), coeffs_(std::move(coeffs)) {
    for (std::size_t p = 0; p < coeffs_.size(); ++p) {
        if (coeffs_[p].rows() != base_.rows() || coeffs_[p].cols() != base_.cols()) {
            throw Error(ErrorKind::Dimension, "coefficient " + std::to_string(p) + " is " +
                                                  std::to_string(coeffs_[p].rows()) + "x" +
                                                  std::to_string(coeffs_[p].cols()) + ", base is " +
                                                  std::to_string(base_.rows()) + "x" + std::to_string(base_.cols()));
        }
    }
}

AffineMatrix AffineMatrix::zero(Eigen::Index rows, Eigen::Index cols, std::size_t params) {
    return AffineMatrix(Matrix::Zero(rows, cols), std::vector<Matrix>(params, Matrix::Zero(rows, cols)));
}

AffineMatrix AffineMatrix::constant(Matrix base, std::size_t params) {
    std::vector<Matrix> c(params, Matrix::Zero(base.rows(), base.cols()));
    return AffineMatrix(std::move(base), std::move(c));
}

Matrix AffineMatrix::eval(std::span<const double> theta) const {
    if (theta.size() != coeffs_.size()) {
        throw Error(ErrorKind::Dimension, "theta has length " + std::to_string(theta.size()) + ", expected " +
                                              std::to_string(coeffs_.size()));
    }
    Matrix out = base_;
    for (std::size_t p = 0; p < coeffs_.size(); ++p) {
        out += theta[p] * coeffs_[p];
    }
    return out;
}

Matrix AffineMatrix::eval(const Vector& theta) const {
    return eval(std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())));
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& other) {
    if (other.rows() != rows() || other.cols() != cols() || other.param_count() != param_count()) {
        throw Error(ErrorKind::Dimension, "adding affine matrices of different shape or parameter count");
    }
    base_ += other.base_;
    for (std::size_t p = 0; p < coeffs_.size(); ++p) coeffs_[p] += other.coeffs_[p];
    return *this;
}

DdeSystem::DdeSystem(AffineMatrix a0, std::vector<DelayTerm> delayed, std::vector<std::string> param_names)
    : a0_(std::move(a0)), names_(std::move(param_names)) {
    if (a0_.rows() != a0_.cols() || a0_.rows() == 0) {
        throw Error(ErrorKind::Dimension, "A_0 must be a non-empty square matrix");
    }
    if (delayed.empty()) {
        throw Error(ErrorKind::InvalidArgument, "a delay system needs at least one delayed term");
    }
    const auto n = a0_.rows();
    for (auto& term : delayed) {
        if (term.tau <= Rational(0)) {
            throw Error(ErrorKind::InvalidArgument, "delay " + term.tau.str() + " is not positive");
        }
        if (term.matrix.rows() != n || term.matrix.cols() != n) {
            throw Error(ErrorKind::Dimension, "delayed matrix at tau=" + term.tau.str() + " is not " +
                                                  std::to_string(n) + "x" + std::to_string(n));
        }
        if (term.matrix.param_count() != a0_.param_count()) {
            throw Error(ErrorKind::Dimension, "delayed matrix at tau=" + term.tau.str() +
                                                  " has a different parameter count than A_0");
        }
        auto same = std::find_if(delayed_.begin(), delayed_.end(),
                                 [&](const DelayTerm& t) { return t.tau == term.tau; });
        if (same != delayed_.end()) {
            same->matrix += term.matrix;
        } else {
            delayed_.push_back(std::move(term));
        }
    }
    if (names_.empty()) {
        for (std::size_t p = 0; p < a0_.param_count(); ++p) names_.push_back("theta" + std::to_string(p));
    } else if (names_.size() != a0_.param_count()) {
        throw Error(ErrorKind::Dimension, "parameter name count does not match parameter count");
    }
}

Rational DdeSystem::min_delay() const {
    return std::min_element(delayed_.begin(), delayed_.end(),
                            [](const DelayTerm& a, const DelayTerm& b) { return a.tau < b.tau; })
        ->tau;
}

Rational DdeSystem::max_delay() const {
    return std::max_element(delayed_.begin(), delayed_.end(),
                            [](const DelayTerm& a, const DelayTerm& b) { return a.tau < b.tau; })
        ->tau;
}

DdeSystem reduce_higher_order(const HigherOrderSystem& h) {
    const std::size_t p = h.order();
    const auto n = static_cast<Eigen::Index>(h.n);
    if (p == 0 || n == 0) {
        throw Error(ErrorKind::Dimension, "higher-order system needs p >= 1 and n >= 1");
    }
    for (const auto& c : h.lead) {
        if (c.rows() != n || c.cols() != n) throw Error(ErrorKind::Dimension, "lead matrix is not n x n");
    }
    for (const auto& [key, m] : h.rhs) {
        if (key.first > h.delays.size() || key.second >= p) {
            throw Error(ErrorKind::Dimension, "rhs index (" + std::to_string(key.first) + ", " +
                                                  std::to_string(key.second) + ") out of range");
        }
        if (m.rows() != n || m.cols() != n || m.param_count() != h.param_count) {
            throw Error(ErrorKind::Dimension, "rhs matrix has wrong shape or parameter count");
        }
    }

    const Matrix& cp = h.lead.back();
    Eigen::JacobiSVD<Matrix> svd(cp);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0) || sv(0) == 0.0) {
        throw Error(ErrorKind::SingularLead, "C_p is singular (condition number not finite)");
    }
    const Matrix cp_inv = cp.fullPivLu().inverse();

    const Eigen::Index big = static_cast<Eigen::Index>(p) * n;
    auto rhs_at = [&](std::size_t i, std::size_t j) -> const AffineMatrix* {
        auto it = h.rhs.find({i, j});
        return it == h.rhs.end() ? nullptr : &it->second;
    };

    // Bottom block row of a delayed (or undelayed, i = 0) term.
    auto bottom_row = [&](std::size_t i) {
        AffineMatrix out = AffineMatrix::zero(big, big, h.param_count);
        std::vector<Matrix> coeffs = out.coeffs();
        Matrix base = out.base();
        const Eigen::Index row0 = static_cast<Eigen::Index>(p - 1) * n;
        for (std::size_t j = 0; j < p; ++j) {
            const Eigen::Index col0 = static_cast<Eigen::Index>(j) * n;
            if (const AffineMatrix* a = rhs_at(i, j)) {
                base.block(row0, col0, n, n) += cp_inv * a->base();
                for (std::size_t q = 0; q < h.param_count; ++q) {
                    coeffs[q].block(row0, col0, n, n) += cp_inv * a->coeff(q);
                }
            }
            if (i == 0 && j >= 1) {
                base.block(row0, col0, n, n) -= cp_inv * h.lead[j - 1];
            }
        }
        if (i == 0) {
            for (std::size_t k = 0; k + 1 < p; ++k) {
                base.block(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(k + 1) * n, n, n) =
                    Matrix::Identity(n, n);
            }
        }
        return AffineMatrix(std::move(base), std::move(coeffs));
    };

    std::vector<DelayTerm> delayed;
    for (std::size_t i = 1; i <= h.delays.size(); ++i) {
        delayed.push_back({h.delays[i - 1], bottom_row(i)});
    }
    return DdeSystem(bottom_row(0), std::move(delayed));
}

}  // namespace ddestab
