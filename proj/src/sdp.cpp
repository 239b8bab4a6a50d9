#include "ddestab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddestab/error.hpp"

namespace ddestab {

ParamBox::ParamBox(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw Error(ErrorKind::Dimension, "box bounds differ in length");
    if (!lower.allFinite() || !upper.allFinite()) {
        throw Error(ErrorKind::UnboundedProgram, "parameter box must have finite bounds");
    }
    for (Eigen::Index p = 0; p < lower.size(); ++p) {
        if (lower(p) > upper(p)) {
            throw Error(ErrorKind::InvalidArgument, "box lower bound exceeds upper bound at index " + std::to_string(p));
        }
    }
}

Vector ParamBox::project(const Vector& theta) const { return theta.cwiseMax(lower).cwiseMin(upper); }

bool ParamBox::contains(const Vector& theta, double slack) const {
    return ((theta.array() >= lower.array() - slack) && (theta.array() <= upper.array() + slack)).all();
}

ProjectedCriterion::ProjectedCriterion(const LmiSystem& lmi) {
    const Matrix& v = lmi.gap.V;
    if (v.cols() == 0) {
        throw Error(ErrorKind::WrongCase, "projected criterion needs a non-empty null space (PsdSingular gap)");
    }
    base_ = v.transpose() * lmi.E.base() * v;
    base_ = 0.5 * (base_ + base_.transpose());
    for (const auto& c : lmi.E.coeffs()) {
        Matrix pc = v.transpose() * c * v;
        coeffs_.push_back(0.5 * (pc + pc.transpose()));
    }
}

Matrix ProjectedCriterion::projected(std::span<const double> theta) const {
    if (theta.size() != coeffs_.size()) throw Error(ErrorKind::Dimension, "theta length mismatch");
    Matrix m = base_;
    for (std::size_t p = 0; p < coeffs_.size(); ++p) m += theta[p] * coeffs_[p];
    return m;
}

double ProjectedCriterion::value(std::span<const double> theta) const {
    const Matrix m = projected(theta);
    if (m.rows() == 1) return m(0, 0);
    return sym_eigen(m).values(0);
}

double ProjectedCriterion::value_and_supergradient(std::span<const double> theta, Vector& grad) const {
    const Matrix m = projected(theta);
    grad.resize(static_cast<Eigen::Index>(coeffs_.size()));
    if (m.rows() == 1) {
        for (std::size_t p = 0; p < coeffs_.size(); ++p) grad(static_cast<Eigen::Index>(p)) = coeffs_[p](0, 0);
        return m(0, 0);
    }
    const SymEigen eig = sym_eigen(m);
    const Vector u = eig.vectors.col(0);
    for (std::size_t p = 0; p < coeffs_.size(); ++p) {
        grad(static_cast<Eigen::Index>(p)) = u.dot(coeffs_[p] * u);
    }
    return eig.values(0);
}

double ProjectedCriterion::coordinate_lipschitz(std::size_t p) const { return sym_norm(coeffs_.at(p)); }

double projected_value(const LmiSystem& lmi, std::span<const double> theta) {
    return ProjectedCriterion(lmi).value(theta);
}

namespace {

std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

// Upper bound of the affine function c + a.theta over the box.
double box_max(double c, const Vector& a, const ParamBox& box) {
    double out = c;
    for (Eigen::Index p = 0; p < a.size(); ++p) out += std::max(a(p) * box.lower(p), a(p) * box.upper(p));
    return out;
}

SynthesisResult golden_section(const ProjectedCriterion& g, const ParamBox& box, const SynthesisOptions& opt) {
    const double lip = g.coordinate_lipschitz(0);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = box.lower(0);
    double b = box.upper(0);
    auto eval = [&](double x) { return g.value(std::span<const double>(&x, 1)); };

    SynthesisResult out;
    double best_x = 0.5 * (a + b);
    double best = eval(best_x);
    for (double x : {a, b}) {
        const double v = eval(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    std::size_t it = 0;
    while (lip * (b - a) > opt.tol && it < opt.max_iter) {
        ++it;
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = eval(x1);
        }
        for (auto [x, v] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
            if (v > best) {
                best = v;
                best_x = x;
            }
        }
    }
    out.theta_star = Vector::Constant(1, best_x);
    out.tstar = best;
    out.upper_bound = best + lip * (b - a);
    out.certified = lip * (b - a) <= opt.tol;
    out.iterations = it;
    return out;
}

SynthesisResult supergradient_ascent(const ProjectedCriterion& g, const ParamBox& box, const SynthesisOptions& opt) {
    const double diam = (box.upper - box.lower).norm();
    Vector theta = box.center();
    Vector grad;

    SynthesisResult out;
    out.theta_star = theta;
    out.tstar = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    // Aggregate cut g(theta) <= agg_c + agg_a.theta, a convex combination of
    // all supergradient cuts seen so far.
    bool have_agg = false;
    double agg_c = 0.0;
    Vector agg_a;

    std::size_t k = 0;
    for (; k < opt.max_iter; ++k) {
        const double gk = g.value_and_supergradient(as_span(theta), grad);
        if (gk > out.tstar) {
            out.tstar = gk;
            out.theta_star = theta;
        }
        const double cut_c = gk - grad.dot(theta);
        if (!have_agg) {
            agg_c = cut_c;
            agg_a = grad;
            have_agg = true;
        } else {
            // box_max of the mixed cut is convex in the mixing weight.
            auto mixed = [&](double mu) {
                return box_max((1.0 - mu) * agg_c + mu * cut_c, (1.0 - mu) * agg_a + mu * grad, box);
            };
            double lo = 0.0;
            double hi = 1.0;
            for (int t = 0; t < 80; ++t) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (mixed(m1) <= mixed(m2)) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            double mu = 0.5 * (lo + hi);
            if (mixed(1.0) <= mixed(mu)) mu = 1.0;
            if (mixed(0.0) <= mixed(mu)) mu = 0.0;
            agg_c = (1.0 - mu) * agg_c + mu * cut_c;
            agg_a = (1.0 - mu) * agg_a + mu * grad;
        }
        upper = std::min({upper, box_max(cut_c, grad, box), box_max(agg_c, agg_a, box)});
        if (upper - out.tstar <= opt.tol) {
            out.certified = true;
            ++k;
            break;
        }
        const double gn2 = grad.squaredNorm();
        if (gn2 == 0.0) break;
        const double polyak = (upper - gk) / gn2;
        const double diminishing = diam / (std::sqrt(gn2) * std::sqrt(static_cast<double>(k + 1)));
        theta = box.project(theta + std::min(polyak, diminishing) * grad);
    }
    out.upper_bound = upper;
    out.iterations = k;
    return out;
}

}  // namespace

SynthesisResult synthesize_theta(const LmiSystem& lmi, const ParamBox& box, const SynthesisOptions& opt) {
    if (!(opt.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver tolerance must be positive");
    const ProjectedCriterion g(lmi);
    if (box.size() != g.param_count()) {
        throw Error(ErrorKind::Dimension, "box has " + std::to_string(box.size()) + " components, system has " +
                                              std::to_string(g.param_count()) + " parameters");
    }
    if (g.param_count() == 0) {
        SynthesisResult out;
        out.theta_star = Vector(0);
        out.tstar = g.value({});
        out.upper_bound = out.tstar;
        out.certified = true;
        return out;
    }
    if (g.param_count() == 1) return golden_section(g, box, opt);
    return supergradient_ascent(g, box, opt);
}

const char* to_string(StabilityCase c) noexcept {
    switch (c) {
        case StabilityCase::AllThetaStable: return "AllThetaStable";
        case StabilityCase::AllThetaUnstable: return "AllThetaUnstable";
        case StabilityCase::Projected: return "Projected";
    }
    return "?";
}

bool StabilityVerdict::stabilizable(double tol) const {
    switch (stability_case) {
        case StabilityCase::AllThetaStable: return true;
        case StabilityCase::AllThetaUnstable: return false;
        case StabilityCase::Projected: return tstar > tol;
    }
    return false;
}

StabilityVerdict analyze(const DdeSystem& sys, const ParamBox& box, const AnalyzeOptions& opt) {
    if (box.size() != sys.param_count()) {
        throw Error(ErrorKind::Dimension, "box dimension does not match the parameter count");
    }
    const Stencil st = make_stencil(opt.stencil_points);
    StepChoice step;
    if (opt.dt) {
        step = step_from_dt(sys, *opt.dt, st, opt.window);
    } else {
        step = choose_step(sys, opt.samples_per_smallest_delay, st);
        if (opt.window) step = step_from_dt(sys, step.dt, st, opt.window);
    }
    const Discretization d = discretize(sys, st, step);
    const LmiSystem lmi = expand_lmi(d, opt.form);

    StabilityVerdict v;
    v.dt = d.step();
    v.window = d.window;
    v.gap_class = lmi.gap.cls;
    Definiteness cls = lmi.gap.cls;
    if (opt.form == GapForm::Paper && d.window % (st.size() - 1) == 0) {
        v.theorem_class = classify_by_theorem(st.weights());
        v.theorem_agrees = *v.theorem_class == lmi.gap.cls;
        // The reduced test drives the verdict unless the full spectrum
        // contradicts it; then the full decomposition wins.
        if (v.theorem_agrees) cls = *v.theorem_class;
    }

    v.theta_star = box.center();
    switch (cls) {
        case Definiteness::PositiveDefinite: v.stability_case = StabilityCase::AllThetaStable; break;
        case Definiteness::Indefinite: v.stability_case = StabilityCase::AllThetaUnstable; break;
        case Definiteness::PsdSingular: {
            v.stability_case = StabilityCase::Projected;
            const SynthesisResult res = synthesize_theta(lmi, box, opt.solver);
            v.theta_star = res.theta_star;
            v.tstar = res.tstar;
            v.certified = res.certified;
            break;
        }
    }

    const Matrix full = lmi.full(as_span(v.theta_star), d.step());
    const Vector ev = sym_eigen(full).values;
    v.finite_dt_min_eig = ev(0);
    v.finite_dt_check = ev(0) > 1e-10 * ev.cwiseAbs().maxCoeff();

    if (opt.run_oracle) {
        v.oracle_report = oracle_report(d, as_span(v.theta_star), v.stabilizable(opt.solver.tol), opt.oracle);
    }
    return v;
}

AsymptoticProbe asymptotic_probe(const LmiSystem& lmi, std::span<const double> theta, double dt0,
                                 std::size_t halvings) {
    AsymptoticProbe out;
    double h = dt0;
    for (std::size_t i = 0; i <= halvings; ++i, h *= 0.5) {
        const Vector ev = sym_eigen(lmi.full(theta, h)).values;
        out.steps.push_back(h);
        out.min_eigs.push_back(ev(0));
        if (!out.first_pd_step && ev(0) > 1e-12 * ev.cwiseAbs().maxCoeff()) out.first_pd_step = h;
    }
    return out;
}

}  // namespace ddestab
