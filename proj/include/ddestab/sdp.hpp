#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ddestab/disc.hpp"
#include "ddestab/lmi.hpp"
#include "ddestab/oracle.hpp"

namespace ddestab {

/// Finite box lower <= theta <= upper.
struct ParamBox {
    Vector lower;
    Vector upper;

    ParamBox() = default;
    ParamBox(Vector lo, Vector hi);

    std::size_t size() const noexcept { return static_cast<std::size_t>(lower.size()); }
    Vector center() const { return 0.5 * (lower + upper); }
    Vector project(const Vector& theta) const;
    bool contains(const Vector& theta, double slack = 0.0) const;
};

/// g(theta) = lambda_min(V^T E(theta) V), with V^T E V pre-projected.
class ProjectedCriterion {
public:
    explicit ProjectedCriterion(const LmiSystem& lmi);

    std::size_t param_count() const noexcept { return coeffs_.size(); }
    std::size_t null_dim() const noexcept { return static_cast<std::size_t>(base_.rows()); }

    double value(std::span<const double> theta) const;
    /// Value and a supergradient from the first eigenvector of the minimal
    /// eigenvalue in ascending order.
    double value_and_supergradient(std::span<const double> theta, Vector& grad) const;
    Matrix projected(std::span<const double> theta) const;
    /// Lipschitz bound of g along coordinate p: ||V^T E_p V||_2.
    double coordinate_lipschitz(std::size_t p) const;

private:
    Matrix base_;
    std::vector<Matrix> coeffs_;
};

double projected_value(const LmiSystem& lmi, std::span<const double> theta);

struct SynthesisOptions {
    double tol = 1e-6;
    std::size_t max_iter = 2000;
};

struct SynthesisResult {
    Vector theta_star;
    double tstar = 0.0;
    double upper_bound = 0.0;  // certified bound on max_box g
    bool certified = false;
    std::size_t iterations = 0;
};

/// Maximizes the concave g over the box starting from its center.
/// Projected supergradient ascent with Polyak steps against the best
/// single-cut upper bound; golden-section search when P == 1.
SynthesisResult synthesize_theta(const LmiSystem& lmi, const ParamBox& box,
                                 const SynthesisOptions& opt = {});

enum class StabilityCase { AllThetaStable, AllThetaUnstable, Projected };

const char* to_string(StabilityCase c) noexcept;

struct AnalyzeOptions {
    std::size_t stencil_points = 2;
    std::size_t samples_per_smallest_delay = 1;
    std::optional<Rational> dt;
    std::optional<std::size_t> window;
    GapForm form = GapForm::Paper;
    SynthesisOptions solver;
    bool run_oracle = false;
    OracleOptions oracle;
};

struct StabilityVerdict {
    StabilityCase stability_case = StabilityCase::Projected;
    Definiteness gap_class = Definiteness::PsdSingular;
    std::optional<Definiteness> theorem_class;  // set when L is a multiple of m-1
    bool theorem_agrees = true;
    double tstar = 0.0;
    Vector theta_star;
    bool certified = false;
    bool finite_dt_check = false;
    double finite_dt_min_eig = 0.0;
    double dt = 0.0;
    std::size_t window = 0;
    std::optional<OracleReport> oracle_report;

    /// Case i, or case iii with tstar > tol.
    bool stabilizable(double tol) const;
};

StabilityVerdict analyze(const DdeSystem& sys, const ParamBox& box, const AnalyzeOptions& opt);

struct AsymptoticProbe {
    std::vector<double> steps;
    std::vector<double> min_eigs;           // lambda_min of the full matrix at each step
    std::optional<double> first_pd_step;    // first step at which it is PD
};

/// Halves h from dt0 (at most `halvings` times) evaluating
/// Q + h E(theta) + h^2 F(theta).
AsymptoticProbe asymptotic_probe(const LmiSystem& lmi, std::span<const double> theta, double dt0,
                                 std::size_t halvings = 20);

}  // namespace ddestab
