#include "ddestab/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddestab/properties.hpp"

namespace ddestab::cli {

namespace {

using Json = nlohmann::ordered_json;

std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Discretization make_discretization(const RunConfig& cfg) {
    const Stencil st = make_stencil(cfg.stencil_points);
    StepChoice step;
    if (cfg.dt) {
        step = step_from_dt(cfg.system, *cfg.dt, st, cfg.window);
    } else {
        step = choose_step(cfg.system, cfg.samples_per_smallest_delay, st);
        if (cfg.window) step = step_from_dt(cfg.system, step.dt, st, cfg.window);
    }
    return discretize(cfg.system, st, step);
}

void print_matrix(std::ostream& os, const std::string& label, const Matrix& m) {
    os << label << " (" << m.rows() << "x" << m.cols() << ")\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << "  [";
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << format_double(m(i, j));
        os << "]\n";
    }
}

void print_affine(std::ostream& os, const std::string& label, const AffineMatrix& a,
                  const std::vector<std::string>& names) {
    print_matrix(os, label + " base", a.base());
    for (std::size_t p = 0; p < a.param_count(); ++p) {
        if (a.coeff(p).isZero(0.0)) continue;
        print_matrix(os, label + " coeff " + names[p], a.coeff(p));
    }
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

std::ofstream open_output(const CommandContext& ctx, const std::string& name) {
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream f(ctx.out_dir / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + (ctx.out_dir / name).string());
    return f;
}

std::ostream& out_of(const CommandContext& ctx) { return ctx.out ? *ctx.out : std::cout; }

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Dimension:
        case ErrorKind::TooFewPoints:
        case ErrorKind::StepResolution:
        case ErrorKind::WindowTooShort:
        case ErrorKind::UnboundedProgram:
        case ErrorKind::InvalidArgument:
            return kExitUsage;
        default:
            return kExitNumerical;
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

SweepResult run_sweep(const RunConfig& cfg, unsigned threads) {
    if (!cfg.sweep) throw Error(ErrorKind::Config, "sweep: missing");
    SweepResult r;
    r.spec = *cfg.sweep;
    const auto& names = cfg.system.param_names();
    r.x_name = names.at(r.spec.x.param);
    r.y_name = names.at(r.spec.y.param);
    for (std::size_t i = 0; i < r.spec.x.count; ++i) r.xs.push_back(r.spec.x.value(i));
    for (std::size_t j = 0; j < r.spec.y.count; ++j) r.ys.push_back(r.spec.y.value(j));

    const Discretization d = make_discretization(cfg);
    const LmiSystem lmi = expand_lmi(d, cfg.form);
    std::optional<ProjectedCriterion> crit;
    if (lmi.gap.cls == Definiteness::PsdSingular) crit.emplace(lmi);
    const Vector center = cfg.box.center();

    const std::size_t total = r.xs.size() * r.ys.size();
    r.cells.resize(total);
    auto eval_cell = [&](std::size_t idx) {
        SweepCell& c = r.cells[idx];
        c.p1 = r.xs[idx / r.ys.size()];
        c.p2 = r.ys[idx % r.ys.size()];
        Vector theta = center;
        theta(static_cast<Eigen::Index>(r.spec.x.param)) = c.p1;
        theta(static_cast<Eigen::Index>(r.spec.y.param)) = c.p2;
        c.projected_value = std::numeric_limits<double>::quiet_NaN();
        switch (lmi.gap.cls) {
            case Definiteness::PositiveDefinite: c.verdict = "stable"; break;
            case Definiteness::Indefinite: c.verdict = "unstable"; break;
            case Definiteness::PsdSingular:
                c.projected_value = crit->value(as_span(theta));
                c.verdict = std::abs(c.projected_value) <= cfg.tol ? "boundary"
                            : c.projected_value > 0           ? "stable"
                                                              : "unstable";
                break;
        }
        try {
            c.rho = spectral_radius(transition_matrix(d, as_span(theta)));
        } catch (const SingularError&) {
            c.rho = std::numeric_limits<double>::quiet_NaN();
        }
        c.agree = c.verdict == "boundary" || std::isnan(c.rho) || ((c.rho < 1.0) == (c.verdict == "stable"));
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t idx; (idx = next.fetch_add(1)) < total;) {
            try {
                eval_cell(idx);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return r;
}

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream os;
    os << "p1,p2,projected_value,verdict,rho,agree\n";
    for (const SweepCell& c : r.cells) {
        os << format_double(c.p1) << ',' << format_double(c.p2) << ',' << format_double(c.projected_value) << ','
           << c.verdict << ',' << format_double(c.rho) << ',' << (c.agree ? "true" : "false") << '\n';
    }
    return os.str();
}

int cmd_weights(const RunConfig& cfg, const CommandContext& ctx) {
    std::ostream& os = out_of(ctx);
    const Stencil st = make_stencil(cfg.stencil_points);
    os << "stencil m=" << st.size() << " (current point)\n";
    for (std::size_t i = 0; i < st.size(); ++i) {
        os << "  w" << i + 1 << " at t-" << st.positions[i] << "dt: " << format_double(st.w[i]) << '\n';
    }
    os << "moment residual: " << format_double(moment_residual(st)) << '\n';
    return kExitOk;
}

int cmd_discretize(const RunConfig& cfg, const CommandContext& ctx) {
    std::ostream& os = out_of(ctx);
    const Discretization d = make_discretization(cfg);
    os << "dt: " << d.dt << "\nwindow: " << d.window << "\ndelay multiples:";
    for (auto r : d.r) os << ' ' << r;
    os << '\n';
    const std::size_t L = d.window;
    print_matrix(os, "D", d.D.topLeftCorner(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L)));
    print_matrix(os, "Dr", d.Dr.topLeftCorner(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L)));
    print_affine(os, "B", d.B, cfg.system.param_names());
    print_affine(os, "A", d.A, cfg.system.param_names());
    return kExitOk;
}

int cmd_classify(const RunConfig& cfg, const CommandContext& ctx) {
    std::ostream& os = out_of(ctx);
    const Discretization d = make_discretization(cfg);
    const GramGap gap = gram_gap(d, cfg.form);
    os << "form: " << to_string(cfg.form) << "\nwindow: " << d.window << "\nclass: " << to_string(gap.cls)
       << "\neigenvalues:";
    for (Eigen::Index i = 0; i < gap.eigenvalues.size(); ++i) os << ' ' << format_double(gap.eigenvalues(i));
    os << "\nnull dimension: " << gap.V.cols() << '\n';
    const auto w = d.st.weights();
    const ReducedMatrices red = reduced_matrices(w);
    print_matrix(os, "Gt", red.Gt);
    os << "reduced class: " << to_string(classify_by_theorem(w)) << '\n';
    if (d.window % (d.st.size() - 1) != 0) os << "note: window is not a multiple of m-1\n";
    return kExitOk;
}

int cmd_analyze(const RunConfig& cfg, const CommandContext& ctx) {
    std::ostream& os = out_of(ctx);
    const StabilityVerdict v = analyze(cfg.system, cfg.box, cfg.analyze_options());
    const bool ok = v.stabilizable(cfg.tol);
    os << "case: " << to_string(v.stability_case) << "\ngap class: " << to_string(v.gap_class);
    if (v.theorem_class) os << " (reduced: " << to_string(*v.theorem_class) << ")";
    os << "\ndt: " << format_double(v.dt) << "\nwindow: " << v.window << "\ntheta*:";
    for (Eigen::Index i = 0; i < v.theta_star.size(); ++i) os << ' ' << format_double(v.theta_star(i));
    os << "\ntstar: " << format_double(v.tstar) << (v.certified ? " (certified)" : "")
       << "\nfinite-step check: " << (v.finite_dt_check ? "PD" : "not PD") << " (min eigenvalue "
       << format_double(v.finite_dt_min_eig) << ")\n";

    Json j;
    j["case"] = to_string(v.stability_case);
    j["gap_class"] = to_string(v.gap_class);
    if (v.theorem_class) j["theorem_class"] = to_string(*v.theorem_class);
    j["dt"] = v.dt;
    j["window"] = v.window;
    j["theta_star"] = to_json(v.theta_star);
    j["tstar"] = v.tstar;
    j["certified"] = v.certified;
    j["finite_dt_check"] = v.finite_dt_check;
    j["finite_dt_min_eig"] = v.finite_dt_min_eig;
    j["stabilizable"] = ok;
    if (v.oracle_report) {
        const OracleReport& r = *v.oracle_report;
        Json o;
        if (r.rho) o["rho"] = *r.rho;
        if (r.sim_decay) o["sim_decay"] = *r.sim_decay;
        if (r.decay_ratio) o["decay_ratio"] = *r.decay_ratio;
        if (r.rightmost_real) o["rightmost_real"] = *r.rightmost_real;
        o["scan_refined"] = r.scan_refined;
        o["all_agree"] = r.all_agree();
        j["oracle"] = o;
        os << "oracles agree: " << (r.all_agree() ? "yes" : "no") << '\n';
    }
    open_output(ctx, "analyze.json") << j.dump(2) << '\n';
    os << "verdict: " << (ok ? "stabilizable" : "not stabilizable") << '\n';
    return ok ? kExitOk : kExitNegative;
}

int cmd_sweep(const RunConfig& cfg, const CommandContext& ctx) {
    const SweepResult r = run_sweep(cfg);
    open_output(ctx, "sweep.csv") << sweep_csv(r);
    open_output(ctx, "sweep.svg") << sweep_svg(r);
    const auto disagree = std::count_if(r.cells.begin(), r.cells.end(), [](const SweepCell& c) { return !c.agree; });
    out_of(ctx) << "cells: " << r.cells.size() << "\ndisagreements: " << disagree << "\nwrote "
                << (ctx.out_dir / "sweep.csv").string() << " and " << (ctx.out_dir / "sweep.svg").string() << '\n';
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const CommandContext& ctx) {
    const Discretization d = make_discretization(cfg);
    const Vector theta = cfg.evaluation_point();
    const double horizon = cfg.oracle.sim_horizon.value_or(std::max(10.0 * cfg.system.max_delay().to_double(), 20.0));
    const auto n = static_cast<Eigen::Index>(cfg.system.n());
    const SimulationResult res = simulate(
        cfg.system, as_span(theta), [n](double) { return Vector::Ones(n).eval(); }, d.dt, horizon);

    std::ofstream f = open_output(ctx, "simulate.csv");
    f << 't';
    for (Eigen::Index i = 0; i < n; ++i) f << ",x" << i + 1;
    f << '\n';
    for (std::size_t k = 0; k < res.t.size(); ++k) {
        f << format_double(res.t[k]);
        for (Eigen::Index i = 0; i < n; ++i) f << ',' << format_double(res.x[k](i));
        f << '\n';
    }
    out_of(ctx) << "steps: " << res.t.size() << "\ndecay ratio: " << format_double(res.decay_ratio)
                << "\nverdict: " << (res.decays ? "decays" : "does not decay") << '\n';
    return res.decays ? kExitOk : kExitNegative;
}

int cmd_verify(const RunConfig&, const CommandContext& ctx) {
    const auto results = run_property_suite(ctx.seed);
    std::ostringstream table;
    table << "seed " << ctx.seed << '\n'
          << std::left << std::setw(48) << "property" << std::setw(8) << "trials" << std::setw(10) << "failures"
          << std::setw(10) << "excluded" << "result\n";
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed();
        table << std::left << std::setw(48) << r.name << std::setw(8) << r.trials << std::setw(10) << r.failures
              << std::setw(10) << r.excluded << (r.passed() ? "PASS" : "FAIL");
        if (!r.detail.empty()) table << "  " << r.detail;
        table << '\n';
    }
    out_of(ctx) << table.str();
    open_output(ctx, "verify_report.txt") << table.str();
    return all ? kExitOk : kExitNegative;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability analysis and parameter synthesis for linear delay differential equations", "dde-stab"};
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string form;
    app.add_option("command", command, "weights | discretize | classify | analyze | sweep | simulate | verify")
        ->required()
        ->check(CLI::IsMember({"weights", "discretize", "classify", "analyze", "sweep", "simulate", "verify"}));
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--form", form, "gap orientation")->check(CLI::IsMember({"paper", "transposed"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        RunConfig cfg = load_config_file(config_path);
        if (!form.empty()) cfg.form = form == "paper" ? GapForm::Paper : GapForm::Transposed;
        const CommandContext ctx{out_dir, seed, &out};
        if (command == "weights") return cmd_weights(cfg, ctx);
        if (command == "discretize") return cmd_discretize(cfg, ctx);
        if (command == "classify") return cmd_classify(cfg, ctx);
        if (command == "analyze") return cmd_analyze(cfg, ctx);
        if (command == "sweep") return cmd_sweep(cfg, ctx);
        if (command == "simulate") return cmd_simulate(cfg, ctx);
        return cmd_verify(cfg, ctx);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace ddestab::cli
