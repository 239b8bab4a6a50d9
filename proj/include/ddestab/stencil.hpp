#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ddestab {

enum class StencilKind {
    CurrentPoint,  // samples at t0, t0 - dt, ..., t0 - (m-1) dt
    Historical,    // samples at t0 - dt, ..., t0 - m dt
};

/// Backward-difference weights for d/dt:
///   f'(t0) ~ (1/dt) * sum_i w_i f(t0 - s_i dt)
/// normalized so the first moment sum_i w_i (-s_i) is exactly 1.
struct Stencil {
    StencilKind kind = StencilKind::CurrentPoint;
    std::vector<double> w;
    std::vector<int> positions;  // s_i

    std::size_t size() const noexcept { return w.size(); }
    std::span<const double> weights() const noexcept { return w; }
};

inline constexpr std::size_t kMaxStencilPoints = 8;

/// Current-point stencil on positions 0..m-1. Requires 2 <= m <= 8.
Stencil make_stencil(std::size_t m);

/// Historical stencil on positions 1..k. Requires 2 <= k <= 8.
Stencil historical_stencil(std::size_t k);

/// ||V w - e_1||_inf with V(j, i) = (-s_i)^j, j = 0..m-1.
double moment_residual(const Stencil& st);

/// Derivative estimate (1/dt) sum_i w_i f(t0 - s_i dt).
double apply_stencil(const Stencil& st, const std::function<double(double)>& f, double t0, double dt);

struct OrderEstimate {
    double slope = 0.0;        // least-squares slope of log(err) vs log(dt)
    bool saturated = false;    // some error hit the rounding floor
    double max_error = 0.0;
    std::vector<double> steps;
    std::vector<double> errors;
};

/// Fits the convergence order over dt in {2^-4, ..., 2^-10}. When any error
/// drops to the rounding floor the estimate is flagged saturated and the
/// slope is fitted over the remaining points (NaN if fewer than two remain).
OrderEstimate empirical_order(const Stencil& st, const std::function<double(double)>& f, double fprime_t0,
                              double t0);

}  // namespace ddestab
