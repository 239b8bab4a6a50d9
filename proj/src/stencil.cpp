#include "ddestab/stencil.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "ddestab/error.hpp"
#include "ddestab/rational.hpp"

namespace ddestab {

namespace {

// Solves sum_i w_i (-s_i)^j = [j == 1], j = 0..m-1, by exact Gauss-Jordan
// elimination over the rationals.
std::vector<double> solve_moments(const std::vector<int>& positions) {
    const std::size_t m = positions.size();
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) {
        Rational power(1);
        const Rational node(-positions[i]);
        for (std::size_t j = 0; j < m; ++j) {
            a[j][i] = power;
            power *= node;
        }
    }
    a[1][m] = Rational(1);

    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        while (pivot < m && a[pivot][col].is_zero()) ++pivot;
        if (pivot == m) {
            throw Error(ErrorKind::TooFewPoints, "moment system is singular");
        }
        std::swap(a[col], a[pivot]);
        const Rational inv = Rational(1) / a[col][col];
        for (std::size_t k = col; k <= m; ++k) a[col][k] *= inv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || a[r][col].is_zero()) continue;
            const Rational factor = a[r][col];
            for (std::size_t k = col; k <= m; ++k) a[r][k] -= factor * a[col][k];
        }
    }

    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = a[i][m].to_double();
    return w;
}

Stencil build(std::size_t m, StencilKind kind, int first_position) {
    if (m < 2) {
        throw Error(ErrorKind::TooFewPoints,
                    "a derivative stencil needs at least 2 points, got " + std::to_string(m));
    }
    if (m > kMaxStencilPoints) {
        throw Error(ErrorKind::InvalidArgument,
                    "stencils wider than " + std::to_string(kMaxStencilPoints) + " points are not supported");
    }
    Stencil st;
    st.kind = kind;
    st.positions.resize(m);
    std::iota(st.positions.begin(), st.positions.end(), first_position);
    st.w = solve_moments(st.positions);
    return st;
}

}  // namespace

Stencil make_stencil(std::size_t m) { return build(m, StencilKind::CurrentPoint, 0); }

Stencil historical_stencil(std::size_t k) { return build(k, StencilKind::Historical, 1); }

double moment_residual(const Stencil& st) {
    double worst = 0.0;
    for (std::size_t j = 0; j < st.size(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < st.size(); ++i) {
            sum += st.w[i] * std::pow(-static_cast<double>(st.positions[i]), static_cast<double>(j));
        }
        worst = std::max(worst, std::abs(sum - (j == 1 ? 1.0 : 0.0)));
    }
    return worst;
}

double apply_stencil(const Stencil& st, const std::function<double(double)>& f, double t0, double dt) {
    double sum = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i) {
        sum += st.w[i] * f(t0 - st.positions[i] * dt);
    }
    return sum / dt;
}

OrderEstimate empirical_order(const Stencil& st, const std::function<double(double)>& f, double fprime_t0,
                              double t0) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    OrderEstimate out;
    std::vector<double> xs;
    std::vector<double> ys;
    for (int e = 4; e <= 10; ++e) {
        const double dt = std::ldexp(1.0, -e);
        const double err = std::abs(apply_stencil(st, f, t0, dt) - fprime_t0);
        double mass = 0.0;
        for (std::size_t i = 0; i < st.size(); ++i) {
            mass += std::abs(st.w[i] * f(t0 - st.positions[i] * dt));
        }
        const double floor = 100.0 * eps * mass / dt;
        out.steps.push_back(dt);
        out.errors.push_back(err);
        out.max_error = std::max(out.max_error, err);
        if (err <= floor) {
            out.saturated = true;
            continue;
        }
        xs.push_back(std::log(dt));
        ys.push_back(std::log(err));
    }
    if (xs.size() < 2) {
        out.slope = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    out.slope = sxy / sxx;
    return out;
}

}  // namespace ddestab
