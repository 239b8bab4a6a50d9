#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ddestab/linalg.hpp"
#include "ddestab/model.hpp"
#include "ddestab/rational.hpp"
#include "ddestab/stencil.hpp"

namespace ddestab {

/// Step dt, window L (samples per component per block) and the delay
/// multiples r_i with tau_i = r_i * dt exactly.
struct StepChoice {
    Rational dt;
    std::size_t window = 0;
    std::vector<std::size_t> r;
};

/// Largest dt <= min_delay / samples that divides every delay exactly;
/// window = max(max r_i, m - 1).
StepChoice choose_step(const DdeSystem& sys, std::size_t samples_per_smallest_delay, const Stencil& st);

/// Explicit dt (must divide every delay) and optional explicit window, which
/// may not be shorter than max(max r_i, m - 1).
StepChoice step_from_dt(const DdeSystem& sys, Rational dt, const Stencil& st,
                        std::optional<std::size_t> window = std::nullopt);

/// L x L differentiate matrix: D(j,k) = w_{k-j+1} for 1 <= k-j+1 <= m.
Matrix build_D(std::span<const double> w, std::size_t window);
Matrix build_D(const Stencil& st, std::size_t window);

/// L x L remaining matrix: Dr(L-m+1+j, k) = w_{m-(j-k)} for 1 <= k <= j <= m-1.
Matrix build_Dr(std::span<const double> w, std::size_t window);
Matrix build_Dr(const Stencil& st, std::size_t window);

struct BlockMatrices {
    AffineMatrix B;  // multiplies the current block u(t)
    AffineMatrix A;  // multiplies the lagged block u(t - L dt)
};

/// Places A_0 and the delayed terms on the stacked sample vector.
///
/// Sample layout per component c: (x_c(t - j dt))_{j=0..L-1}. Equation row j
/// (1-based) is taken at time t - (j-1) dt; a sample at offset q lands in the
/// current block at column q+1 when q <= L-1, else in the lagged block at
/// column q+1-L.
BlockMatrices build_BA(const DdeSystem& sys, std::size_t stencil_points, std::size_t window,
                       std::span<const std::size_t> r);

/// Block discretization (1/dt)(D u(t) + Dr u(t - L dt)) = B u(t) + A u(t - L dt).
struct Discretization {
    DdeSystem sys;
    Stencil st;
    Rational dt;
    std::size_t window = 0;
    std::vector<std::size_t> r;
    Matrix D;   // nL x nL, n identical diagonal blocks
    Matrix Dr;  // nL x nL
    AffineMatrix B;
    AffineMatrix A;

    double step() const noexcept { return dt.to_double(); }
    std::size_t dim() const noexcept { return sys.n() * window; }
};

Discretization discretize(const DdeSystem& sys, const Stencil& st, const StepChoice& step);

/// M = (D - h B)^{-1} (-Dr + h A); throws SingularError when D - h B is
/// numerically singular. The first overload uses the discretization's dt.
Matrix transition_matrix(const Discretization& d, std::span<const double> theta);
Matrix transition_matrix(const Discretization& d, std::span<const double> theta, double h);

}  // namespace ddestab
