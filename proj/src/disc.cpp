#include "ddestab/disc.hpp"

#include <algorithm>
#include <numeric>

#include "ddestab/error.hpp"

namespace ddestab {

namespace {

std::vector<std::size_t> delay_multiples(const DdeSystem& sys, const Rational& dt) {
    std::vector<std::size_t> r;
    for (const auto& term : sys.delayed()) {
        const Rational q = term.tau / dt;
        if (!q.is_integer() || q.num() <= 0) {
            throw Error(ErrorKind::StepResolution,
                        "dt = " + dt.str() + " does not divide delay " + term.tau.str());
        }
        r.push_back(static_cast<std::size_t>(q.num()));
    }
    return r;
}

void check_window(std::size_t m, std::size_t window) {
    if (m < 2) throw Error(ErrorKind::TooFewPoints, "stencil needs at least 2 points");
    if (window < m - 1) {
        throw Error(ErrorKind::WindowTooShort, "window " + std::to_string(window) + " is shorter than m-1 = " +
                                                   std::to_string(m - 1));
    }
}

Matrix block_diag(const Matrix& block, std::size_t copies) {
    const auto l = block.rows();
    Matrix out = Matrix::Zero(l * static_cast<Eigen::Index>(copies), l * static_cast<Eigen::Index>(copies));
    for (std::size_t c = 0; c < copies; ++c) {
        const auto o = static_cast<Eigen::Index>(c) * l;
        out.block(o, o, l, l) = block;
    }
    return out;
}

}  // namespace

StepChoice choose_step(const DdeSystem& sys, std::size_t samples_per_smallest_delay, const Stencil& st) {
    if (samples_per_smallest_delay == 0) {
        throw Error(ErrorKind::InvalidArgument, "samples_per_smallest_delay must be >= 1");
    }
    const Rational target = sys.min_delay() / Rational(static_cast<std::int64_t>(samples_per_smallest_delay));

    // Express every delay and the target step over one common denominator;
    // the gcd of the resulting integers is the largest admissible step.
    std::int64_t common = target.den();
    for (const auto& term : sys.delayed()) common = checked_lcm(common, term.tau.den());
    std::int64_t g = (target * Rational(common)).num();
    for (const auto& term : sys.delayed()) g = std::gcd(g, (term.tau * Rational(common)).num());

    return step_from_dt(sys, Rational(g, common), st);
}

StepChoice step_from_dt(const DdeSystem& sys, Rational dt, const Stencil& st, std::optional<std::size_t> window) {
    if (dt <= Rational(0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    StepChoice out;
    out.dt = dt;
    out.r = delay_multiples(sys, dt);
    const std::size_t needed = std::max(*std::max_element(out.r.begin(), out.r.end()), st.size() - 1);
    if (window) {
        if (*window < needed) {
            throw Error(ErrorKind::WindowTooShort, "window " + std::to_string(*window) + " below required " +
                                                       std::to_string(needed));
        }
        out.window = *window;
    } else {
        out.window = needed;
    }
    return out;
}

Matrix build_D(std::span<const double> w, std::size_t window) {
    const std::size_t m = w.size();
    check_window(m, window);
    const auto l = static_cast<Eigen::Index>(window);
    Matrix d = Matrix::Zero(l, l);
    for (Eigen::Index j = 0; j < l; ++j) {
        for (std::size_t i = 0; i < m && j + static_cast<Eigen::Index>(i) < l; ++i) {
            d(j, j + static_cast<Eigen::Index>(i)) = w[i];
        }
    }
    return d;
}

Matrix build_D(const Stencil& st, std::size_t window) { return build_D(st.weights(), window); }

Matrix build_Dr(std::span<const double> w, std::size_t window) {
    const std::size_t m = w.size();
    check_window(m, window);
    const auto l = static_cast<Eigen::Index>(window);
    Matrix dr = Matrix::Zero(l, l);
    // 1-based: row L-m+1+j, column k, weight w_{m-(j-k)}.
    for (std::size_t j = 1; j <= m - 1; ++j) {
        const auto row = static_cast<Eigen::Index>(window - m + j);  // 0-based
        for (std::size_t k = 1; k <= j; ++k) {
            dr(row, static_cast<Eigen::Index>(k - 1)) = w[m - (j - k) - 1];
        }
    }
    return dr;
}

Matrix build_Dr(const Stencil& st, std::size_t window) { return build_Dr(st.weights(), window); }

BlockMatrices build_BA(const DdeSystem& sys, std::size_t stencil_points, std::size_t window,
                       std::span<const std::size_t> r) {
    check_window(stencil_points, window);
    if (r.size() != sys.delay_count()) {
        throw Error(ErrorKind::Dimension, "one delay multiple per delayed term is required");
    }
    for (std::size_t rv : r) {
        if (rv == 0 || rv > window) {
            throw Error(ErrorKind::WindowTooShort, "delay multiple " + std::to_string(rv) +
                                                       " does not fit window " + std::to_string(window));
        }
    }

    const std::size_t n = sys.n();
    const std::size_t params = sys.param_count();
    const auto big = static_cast<Eigen::Index>(n * window);
    Matrix b_base = Matrix::Zero(big, big);
    Matrix a_base = Matrix::Zero(big, big);
    std::vector<Matrix> b_coeffs(params, Matrix::Zero(big, big));
    std::vector<Matrix> a_coeffs(params, Matrix::Zero(big, big));

    auto place = [&](const AffineMatrix& src, std::size_t offset) {
        for (std::size_t row_c = 0; row_c < n; ++row_c) {
            for (std::size_t col_c = 0; col_c < n; ++col_c) {
                for (std::size_t j = 0; j < window; ++j) {  // 0-based equation row
                    const std::size_t q = j + offset;       // 0-based sample offset
                    const bool current = q < window;
                    const auto row = static_cast<Eigen::Index>(row_c * window + j);
                    const auto col = static_cast<Eigen::Index>(col_c * window + (current ? q : q - window));
                    const auto sr = static_cast<Eigen::Index>(row_c);
                    const auto sc = static_cast<Eigen::Index>(col_c);
                    Matrix& base = current ? b_base : a_base;
                    auto& coeffs = current ? b_coeffs : a_coeffs;
                    base(row, col) += src.base()(sr, sc);
                    for (std::size_t p = 0; p < params; ++p) coeffs[p](row, col) += src.coeff(p)(sr, sc);
                }
            }
        }
    };

    place(sys.a0(), 0);
    for (std::size_t i = 0; i < sys.delay_count(); ++i) place(sys.delayed()[i].matrix, r[i]);

    return {AffineMatrix(std::move(b_base), std::move(b_coeffs)), AffineMatrix(std::move(a_base), std::move(a_coeffs))};
}

Discretization discretize(const DdeSystem& sys, const Stencil& st, const StepChoice& step) {
    if (st.kind != StencilKind::CurrentPoint) {
        throw Error(ErrorKind::InvalidArgument, "block discretization needs a current-point stencil");
    }
    auto [b, a] = build_BA(sys, st.size(), step.window, step.r);
    return Discretization{
        .sys = sys,
        .st = st,
        .dt = step.dt,
        .window = step.window,
        .r = step.r,
        .D = block_diag(build_D(st, step.window), sys.n()),
        .Dr = block_diag(build_Dr(st, step.window), sys.n()),
        .B = std::move(b),
        .A = std::move(a),
    };
}

Matrix transition_matrix(const Discretization& d, std::span<const double> theta) {
    return transition_matrix(d, theta, d.step());
}

Matrix transition_matrix(const Discretization& d, std::span<const double> theta, double h) {
    const Matrix lhs = d.D - h * d.B.eval(theta);
    const Matrix rhs = -d.Dr + h * d.A.eval(theta);
    Eigen::JacobiSVD<Matrix> svd(lhs);
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    if (!(smallest > 1e-13 * sv(0))) {
        throw SingularError(ErrorKind::SingularSystem, "D - dt*B(theta) is singular", smallest);
    }
    return lhs.partialPivLu().solve(rhs);
}

}  // namespace ddestab
