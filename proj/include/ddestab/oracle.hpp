#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ddestab/disc.hpp"
#include "ddestab/linalg.hpp"
#include "ddestab/model.hpp"

namespace ddestab {

struct RadiusReport {
    double rho = 0.0;
    bool qr_converged = true;
    double error_bound = 0.0;  // only meaningful for the power-iteration fallback
};

/// max |eigenvalue| via Hessenberg reduction and shifted QR; falls back to
/// power iteration (with a residual-based error bound) if QR does not converge.
RadiusReport spectral_radius_report(const Matrix& m);
double spectral_radius(const Matrix& m);

using History = std::function<Vector(double)>;

struct SimulationResult {
    std::vector<double> t;
    std::vector<Vector> x;
    double decay_ratio = 0.0;  // max|x| over last max-delay window / over first
    bool decays = false;
};

/// Backward (implicit) method of steps:
///   (I - h A_0) x_k = x_{k-1} + h sum_i A_i x_{k - r_i}
/// History supplies x(t) for t <= 0. Requires h | every delay and
/// horizon >= 10 * max delay.
SimulationResult simulate(const DdeSystem& sys, std::span<const double> theta, const History& history, Rational h,
                          double horizon);

/// det(-lambda I + A_0 + sum_i A_i exp(-tau_i lambda)).
std::complex<double> char_eval(const DdeSystem& sys, std::span<const double> theta, std::complex<double> lambda);

struct RootScan {
    double rightmost_real = 0.0;
    bool refined = false;  // false: value is the best unrefined grid candidate
    std::vector<std::complex<double>> roots;
};

/// Heuristic lower bound on the rightmost real part: local minima of
/// |char_eval| on the grid, polished by complex Newton.
RootScan rightmost_root_scan(const DdeSystem& sys, std::span<const double> theta, std::pair<double, double> re_range,
                             std::pair<double, double> im_range, std::pair<std::size_t, std::size_t> grid);

/// Default scan box: Re in [-5, 2], Im in [0, 4 pi / min tau].
std::pair<double, double> default_im_range(const DdeSystem& sys);

struct OracleOptions {
    bool spectral = true;
    bool simulate = true;
    bool scan = true;
    std::optional<double> sim_horizon;  // default max(10 tau_max, 20)
    std::pair<double, double> scan_re{-5.0, 2.0};
    std::optional<std::pair<double, double>> scan_im;
    std::pair<std::size_t, std::size_t> scan_grid{60, 120};
};

struct OracleReport {
    std::optional<double> rho;
    std::optional<bool> sim_decay;
    std::optional<double> decay_ratio;
    std::optional<double> rightmost_real;
    bool scan_refined = false;
    // Each oracle against the pipeline verdict; unset when the oracle was off.
    std::optional<bool> rho_agrees;
    std::optional<bool> sim_agrees;
    std::optional<bool> scan_agrees;

    bool all_agree() const;
};

OracleReport oracle_report(const Discretization& d, std::span<const double> theta, bool verdict_stable,
                           const OracleOptions& opt = {});

}  // namespace ddestab
