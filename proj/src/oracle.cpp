#include "ddestab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddestab/error.hpp"

namespace ddestab {

namespace {

// Gelfand estimate ||M^(2^j)||^(1/2^j) with rescaling at every squaring.
RadiusReport gelfand_radius(const Matrix& m) {
    RadiusReport out;
    out.qr_converged = false;
    Matrix p = m;
    double log_scale = 0.0;
    double prev = spectral_norm(m);
    double exponent = 1.0;
    for (int j = 0; j < 40; ++j) {
        const double norm = p.norm();
        if (norm == 0.0) {
            out.rho = 0.0;
            out.error_bound = 0.0;
            return out;
        }
        p /= norm;
        log_scale += std::log(norm) / exponent;
        p = p * p;
        exponent *= 2.0;
        const double est = std::exp(log_scale + std::log(spectral_norm(p)) / exponent);
        out.rho = est;
        out.error_bound = std::abs(est - prev);
        if (out.error_bound <= 1e-10 * std::max(est, 1e-300)) break;
        prev = est;
    }
    return out;
}

}  // namespace

RadiusReport spectral_radius_report(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::Dimension, "spectral radius of a non-square matrix");
    if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, "spectral radius of a non-finite matrix");
    if (m.size() == 0) return {};
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        return gelfand_radius(m);
    }
    RadiusReport out;
    out.rho = solver.eigenvalues().cwiseAbs().maxCoeff();
    return out;
}

double spectral_radius(const Matrix& m) { return spectral_radius_report(m).rho; }

SimulationResult simulate(const DdeSystem& sys, std::span<const double> theta, const History& history, Rational h,
                          double horizon) {
    const double tau_max = sys.max_delay().to_double();
    if (horizon < 10.0 * tau_max) {
        throw Error(ErrorKind::InvalidArgument, "simulation horizon must be at least 10 x max delay");
    }
    std::vector<std::size_t> r;
    for (const auto& term : sys.delayed()) {
        const Rational q = term.tau / h;
        if (!q.is_integer()) {
            throw Error(ErrorKind::StepResolution, "simulation step " + h.str() + " does not divide delay " +
                                                       term.tau.str());
        }
        r.push_back(static_cast<std::size_t>(q.num()));
    }
    const double dt = h.to_double();
    const auto n = static_cast<Eigen::Index>(sys.n());
    const Matrix a0 = sys.a0().eval(theta);
    std::vector<Matrix> ai;
    for (const auto& term : sys.delayed()) ai.push_back(term.matrix.eval(theta));

    const Matrix step = Matrix::Identity(n, n) - dt * a0;
    const double smallest = smallest_singular_value(step);
    if (!(smallest > 1e-13 * spectral_norm(step))) {
        throw SingularError(ErrorKind::StepSingular, "I - h A_0 is singular", smallest);
    }
    const auto lu = step.partialPivLu();

    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    SimulationResult out;
    out.t.reserve(steps + 1);
    out.x.reserve(steps + 1);
    out.t.push_back(0.0);
    out.x.push_back(history(0.0));
    if (out.x[0].size() != n) throw Error(ErrorKind::Dimension, "history returns a vector of the wrong size");

    auto sample = [&](std::ptrdiff_t k) -> Vector {
        if (k <= 0) return history(static_cast<double>(k) * dt);
        return out.x[static_cast<std::size_t>(k)];
    };

    for (std::size_t k = 1; k <= steps; ++k) {
        Vector rhs = out.x[k - 1];
        for (std::size_t i = 0; i < ai.size(); ++i) {
            rhs += dt * (ai[i] * sample(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(r[i])));
        }
        out.t.push_back(static_cast<double>(k) * dt);
        out.x.push_back(lu.solve(rhs));
    }

    const std::size_t window = std::min(*std::max_element(r.begin(), r.end()), steps);
    double first = 0.0;
    double last = 0.0;
    for (std::size_t k = 0; k <= window; ++k) first = std::max(first, out.x[k].norm());
    for (std::size_t k = steps - window; k <= steps; ++k) last = std::max(last, out.x[k].norm());
    if (first == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "zero initial history gives no decay information");
    }
    out.decay_ratio = last / first;
    out.decays = out.decay_ratio < 1.0;
    return out;
}

std::complex<double> char_eval(const DdeSystem& sys, std::span<const double> theta, std::complex<double> lambda) {
    using CMatrix = Eigen::MatrixXcd;
    const auto n = static_cast<Eigen::Index>(sys.n());
    CMatrix m = sys.a0().eval(theta).cast<std::complex<double>>();
    m.diagonal().array() -= lambda;
    for (const auto& term : sys.delayed()) {
        m += term.matrix.eval(theta).cast<std::complex<double>>() * std::exp(-term.tau.to_double() * lambda);
    }
    if (n == 1) return m(0, 0);
    return m.partialPivLu().determinant();
}

std::pair<double, double> default_im_range(const DdeSystem& sys) {
    return {0.0, 4.0 * std::numbers::pi / sys.min_delay().to_double()};
}

RootScan rightmost_root_scan(const DdeSystem& sys, std::span<const double> theta, std::pair<double, double> re_range,
                             std::pair<double, double> im_range, std::pair<std::size_t, std::size_t> grid) {
    using C = std::complex<double>;
    const auto [nre, nim] = grid;
    if (nre < 20 || nim < 20) throw Error(ErrorKind::InvalidArgument, "root scan grid must be at least 20x20");

    auto node = [&](std::size_t i, std::size_t j) {
        const double re = re_range.first + (re_range.second - re_range.first) * static_cast<double>(i) /
                                               static_cast<double>(nre - 1);
        const double im = im_range.first + (im_range.second - im_range.first) * static_cast<double>(j) /
                                               static_cast<double>(nim - 1);
        return C(re, im);
    };
    std::vector<double> mod(nre * nim);
    for (std::size_t i = 0; i < nre; ++i) {
        for (std::size_t j = 0; j < nim; ++j) mod[i * nim + j] = std::abs(char_eval(sys, theta, node(i, j)));
    }

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < nre; ++i) {
        for (std::size_t j = 0; j < nim; ++j) {
            const double v = mod[i * nim + j];
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                    const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(nre) ||
                        jj >= static_cast<std::ptrdiff_t>(nim)) {
                        continue;
                    }
                    if (mod[static_cast<std::size_t>(ii) * nim + static_cast<std::size_t>(jj)] < v) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min) candidates.push_back(i * nim + j);
        }
    }

    RootScan out;
    for (std::size_t idx : candidates) {
        C z = node(idx / nim, idx % nim);
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
            const double hstep = 1e-6 * std::max(1.0, std::abs(z));
            const C f = char_eval(sys, theta, z);
            const C df = (char_eval(sys, theta, z + hstep) - char_eval(sys, theta, z - hstep)) / (2.0 * hstep);
            if (df == C(0.0)) break;
            const C dz = f / df;
            z -= dz;
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
            if (std::abs(dz) <= 1e-11 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) continue;
        if (std::abs(char_eval(sys, theta, z)) > 1e-8 * std::max(1.0, std::pow(std::abs(z), sys.n()))) continue;
        const bool dup = std::any_of(out.roots.begin(), out.roots.end(), [&](const C& r) {
            return std::abs(r - z) <= 1e-6 * std::max(1.0, std::abs(z)) ||
                   std::abs(std::conj(r) - z) <= 1e-6 * std::max(1.0, std::abs(z));
        });
        if (!dup) out.roots.push_back(z);
    }

    if (!out.roots.empty()) {
        out.refined = true;
        out.rightmost_real =
            std::max_element(out.roots.begin(), out.roots.end(), [](const C& a, const C& b) {
                return a.real() < b.real();
            })->real();
        return out;
    }
    const auto best = static_cast<std::size_t>(std::min_element(mod.begin(), mod.end()) - mod.begin());
    out.refined = false;
    out.rightmost_real = node(best / nim, best % nim).real();
    return out;
}

bool OracleReport::all_agree() const {
    return rho_agrees.value_or(true) && sim_agrees.value_or(true) && scan_agrees.value_or(true);
}

OracleReport oracle_report(const Discretization& d, std::span<const double> theta, bool verdict_stable,
                           const OracleOptions& opt) {
    OracleReport out;
    if (opt.spectral) {
        out.rho = spectral_radius(transition_matrix(d, theta));
        out.rho_agrees = (*out.rho < 1.0) == verdict_stable;
    }
    if (opt.simulate) {
        const double tau_max = d.sys.max_delay().to_double();
        const double horizon = opt.sim_horizon.value_or(std::max(10.0 * tau_max, 20.0));
        const auto n = static_cast<Eigen::Index>(d.sys.n());
        const auto sim = simulate(d.sys, theta, [n](double) { return Vector::Ones(n); }, d.dt, horizon);
        out.sim_decay = sim.decays;
        out.decay_ratio = sim.decay_ratio;
        out.sim_agrees = sim.decays == verdict_stable;
    }
    if (opt.scan) {
        const auto scan = rightmost_root_scan(d.sys, theta, opt.scan_re, opt.scan_im.value_or(default_im_range(d.sys)),
                                              opt.scan_grid);
        out.rightmost_real = scan.rightmost_real;
        out.scan_refined = scan.refined;
        out.scan_agrees = (scan.rightmost_real < 0.0) == verdict_stable;
    }
    return out;
}

}  // namespace ddestab
