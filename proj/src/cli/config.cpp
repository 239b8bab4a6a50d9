#include "ddestab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ddestab/error.hpp"

namespace ddestab::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::Config, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) fail(join(path, key), "unknown field");
    }
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "missing");
    return *it;
}

const Json* optional_field(const Json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double as_double(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

std::size_t as_count(const Json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

Rational as_rational(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        fail(path, "expected [numerator, denominator] integers");
    }
    const auto den = j[1].get<std::int64_t>();
    if (den == 0) fail(path, "zero denominator");
    return Rational(j[0].get<std::int64_t>(), den);
}

std::pair<double, double> as_range(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [low, high]");
    const double lo = as_double(j[0], path + "[0]");
    const double hi = as_double(j[1], path + "[1]");
    if (lo > hi) fail(path, "low exceeds high");
    return {lo, hi};
}

Vector as_vector(const Json& j, const std::string& path, std::size_t expected) {
    if (!j.is_array()) fail(path, "expected an array");
    if (j.size() != expected) {
        fail(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
    }
    Vector v(static_cast<Eigen::Index>(expected));
    for (std::size_t i = 0; i < expected; ++i) {
        v(static_cast<Eigen::Index>(i)) = as_double(j[i], path + "[" + std::to_string(i) + "]");
    }
    return v;
}

Matrix as_matrix(const Json& j, const std::string& path, std::size_t n) {
    if (!j.is_array() || j.size() != n) fail(path, "expected " + std::to_string(n) + " rows");
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != n) fail(rp, "expected " + std::to_string(n) + " columns");
        for (std::size_t c = 0; c < n; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                as_double(j[r][c], rp + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

AffineMatrix as_affine(const Json& j, const std::string& path, std::size_t n, const std::vector<std::string>& names,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown(j, path, allowed);
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix base = Matrix::Zero(nn, nn);
    if (const Json* b = optional_field(j, "base")) base = as_matrix(*b, join(path, "base"), n);
    std::vector<Matrix> coeffs(names.size(), Matrix::Zero(nn, nn));
    if (const Json* c = optional_field(j, "coeffs")) {
        const std::string cp = join(path, "coeffs");
        if (!c->is_object()) fail(cp, "expected an object keyed by parameter name");
        for (const auto& [key, value] : c->items()) {
            auto it = std::find(names.begin(), names.end(), key);
            if (it == names.end()) fail(join(cp, key), "unknown parameter");
            coeffs[static_cast<std::size_t>(it - names.begin())] = as_matrix(value, join(cp, key), n);
        }
    }
    return AffineMatrix(std::move(base), std::move(coeffs));
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json affine_json(const AffineMatrix& a, const std::vector<std::string>& names) {
    Json out = Json::object();
    out["base"] = matrix_json(a.base());
    Json coeffs = Json::object();
    for (std::size_t p = 0; p < a.param_count(); ++p) {
        if (!a.coeff(p).isZero(0.0)) coeffs[names[p]] = matrix_json(a.coeff(p));
    }
    out["coeffs"] = std::move(coeffs);
    return out;
}

Json vector_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json rational_json(const Rational& r) { return Json::array({r.num(), r.den()}); }

DdeSystem parse_system(const Json& root) {
    const Json& sys = require(root, "", "system");
    if (!sys.is_object()) fail("system", "expected an object");
    reject_unknown(sys, "system", {"n", "parameters", "a0", "delayed"});
    const std::size_t n = as_count(require(sys, "system", "n"), "system.n");
    if (n == 0) fail("system.n", "must be at least 1");

    std::vector<std::string> names;
    if (const Json* p = optional_field(sys, "parameters")) {
        if (!p->is_array()) fail("system.parameters", "expected an array of names");
        for (std::size_t i = 0; i < p->size(); ++i) {
            if (!(*p)[i].is_string()) fail("system.parameters[" + std::to_string(i) + "]", "expected a string");
            const auto name = (*p)[i].get<std::string>();
            if (std::find(names.begin(), names.end(), name) != names.end()) {
                fail("system.parameters[" + std::to_string(i) + "]", "duplicate parameter name");
            }
            names.push_back(name);
        }
    }

    AffineMatrix a0 = AffineMatrix::zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), names.size());
    if (const Json* a = optional_field(sys, "a0")) a0 = as_affine(*a, "system.a0", n, names, {"base", "coeffs"});

    const Json& delayed = require(sys, "system", "delayed");
    if (!delayed.is_array() || delayed.empty()) fail("system.delayed", "expected a non-empty array");
    std::vector<DelayTerm> terms;
    for (std::size_t i = 0; i < delayed.size(); ++i) {
        const std::string path = "system.delayed[" + std::to_string(i) + "]";
        const Rational tau = as_rational(require(delayed[i], path, "delay"), path + ".delay");
        if (tau <= Rational(0)) fail(path + ".delay", "delay must be positive");
        terms.push_back({tau, as_affine(delayed[i], path, n, names, {"delay", "base", "coeffs"})});
    }
    try {
        return DdeSystem(std::move(a0), std::move(terms), std::move(names));
    } catch (const Error& e) {
        fail("system", e.what());
    }
}

}  // namespace

AnalyzeOptions RunConfig::analyze_options() const {
    AnalyzeOptions opt;
    opt.stencil_points = stencil_points;
    opt.samples_per_smallest_delay = samples_per_smallest_delay;
    opt.dt = dt;
    opt.window = window;
    opt.form = form;
    opt.solver.tol = tol;
    opt.solver.max_iter = max_iter;
    opt.run_oracle = oracle_enabled;
    opt.oracle = oracle;
    return opt;
}

Vector RunConfig::evaluation_point() const {
    if (theta) return Eigen::Map<const Vector>(theta->data(), static_cast<Eigen::Index>(theta->size()));
    return box.center();
}

RunConfig load_config(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorKind::Config, "parse error at line " + std::to_string(line) + ", column " +
                                           std::to_string(col) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("unreadable value: ") + e.what());
    }
    if (!root.is_object()) fail("<root>", "expected an object");
    reject_unknown(root, "", {"system", "discretization", "solver", "oracle", "sweep"});

    DdeSystem system = parse_system(root);
    const std::size_t params = system.param_count();

    std::size_t m = 2;
    std::size_t samples = 1;
    std::optional<Rational> dt;
    std::optional<std::size_t> window;
    if (const Json* d = optional_field(root, "discretization")) {
        if (!d->is_object()) fail("discretization", "expected an object");
        reject_unknown(*d, "discretization", {"m", "samples_per_smallest_delay", "dt", "window"});
        if (const Json* v = optional_field(*d, "m")) m = as_count(*v, "discretization.m");
        if (m < 2 || m > kMaxStencilPoints) fail("discretization.m", "must be in [2, 8]");
        if (const Json* v = optional_field(*d, "samples_per_smallest_delay")) {
            samples = as_count(*v, "discretization.samples_per_smallest_delay");
            if (samples == 0) fail("discretization.samples_per_smallest_delay", "must be at least 1");
        }
        if (const Json* v = optional_field(*d, "dt")) {
            dt = as_rational(*v, "discretization.dt");
            if (*dt <= Rational(0)) fail("discretization.dt", "must be positive");
        }
        if (const Json* v = optional_field(*d, "window")) window = as_count(*v, "discretization.window");
    }

    const Json& solver = require(root, "", "solver");
    if (!solver.is_object()) fail("solver", "expected an object");
    reject_unknown(solver, "solver", {"box", "tol", "max_iter", "form"});
    const Json& box_json = require(solver, "solver", "box");
    if (!box_json.is_object()) fail("solver.box", "expected an object");
    reject_unknown(box_json, "solver.box", {"lower", "upper"});
    Vector lower = as_vector(require(box_json, "solver.box", "lower"), "solver.box.lower", params);
    Vector upper = as_vector(require(box_json, "solver.box", "upper"), "solver.box.upper", params);
    for (std::size_t p = 0; p < params; ++p) {
        if (lower(static_cast<Eigen::Index>(p)) > upper(static_cast<Eigen::Index>(p))) {
            fail("solver.box", "lower exceeds upper at index " + std::to_string(p));
        }
    }
    double tol = 1e-6;
    std::size_t max_iter = 2000;
    GapForm form = GapForm::Paper;
    if (const Json* v = optional_field(solver, "tol")) {
        tol = as_double(*v, "solver.tol");
        if (!(tol > 0.0)) fail("solver.tol", "must be positive");
    }
    if (const Json* v = optional_field(solver, "max_iter")) max_iter = as_count(*v, "solver.max_iter");
    if (const Json* v = optional_field(solver, "form")) {
        if (!v->is_string()) fail("solver.form", "expected \"paper\" or \"transposed\"");
        const auto s = v->get<std::string>();
        if (s == "paper") {
            form = GapForm::Paper;
        } else if (s == "transposed") {
            form = GapForm::Transposed;
        } else {
            fail("solver.form", "expected \"paper\" or \"transposed\"");
        }
    }

    bool oracle_enabled = false;
    OracleOptions oracle;
    std::optional<std::vector<double>> theta;
    if (const Json* o = optional_field(root, "oracle")) {
        if (!o->is_object()) fail("oracle", "expected an object");
        reject_unknown(*o, "oracle",
                       {"enabled", "spectral", "simulate", "scan", "sim_horizon", "scan_re", "scan_im", "scan_grid",
                        "theta"});
        auto flag = [&](const char* key, bool& out) {
            if (const Json* v = optional_field(*o, key)) {
                if (!v->is_boolean()) fail(join("oracle", key), "expected a boolean");
                out = v->get<bool>();
            }
        };
        flag("enabled", oracle_enabled);
        flag("spectral", oracle.spectral);
        flag("simulate", oracle.simulate);
        flag("scan", oracle.scan);
        if (const Json* v = optional_field(*o, "sim_horizon")) {
            oracle.sim_horizon = as_double(*v, "oracle.sim_horizon");
            if (*oracle.sim_horizon < 10.0 * system.max_delay().to_double()) {
                fail("oracle.sim_horizon", "must be at least 10 x the largest delay");
            }
        }
        if (const Json* v = optional_field(*o, "scan_re")) oracle.scan_re = as_range(*v, "oracle.scan_re");
        if (const Json* v = optional_field(*o, "scan_im")) oracle.scan_im = as_range(*v, "oracle.scan_im");
        if (const Json* v = optional_field(*o, "scan_grid")) {
            if (!v->is_array() || v->size() != 2) fail("oracle.scan_grid", "expected [re_points, im_points]");
            oracle.scan_grid = {as_count((*v)[0], "oracle.scan_grid[0]"), as_count((*v)[1], "oracle.scan_grid[1]")};
            if (oracle.scan_grid.first < 20 || oracle.scan_grid.second < 20) {
                fail("oracle.scan_grid", "must be at least 20 x 20");
            }
        }
        if (const Json* v = optional_field(*o, "theta")) {
            const Vector t = as_vector(*v, "oracle.theta", params);
            theta = std::vector<double>(t.data(), t.data() + t.size());
        }
    }

    std::optional<SweepSpec> sweep;
    if (const Json* s = optional_field(root, "sweep")) {
        if (!s->is_object()) fail("sweep", "expected an object");
        reject_unknown(*s, "sweep", {"x", "y"});
        auto axis = [&](const char* key) {
            const std::string path = join("sweep", key);
            const Json& a = require(*s, "sweep", key);
            if (!a.is_object()) fail(path, "expected an object");
            reject_unknown(a, path, {"param", "range", "count"});
            SweepAxis out;
            out.param = as_count(require(a, path, "param"), path + ".param");
            if (out.param >= params) fail(path + ".param", "parameter index out of range");
            std::tie(out.lo, out.hi) = as_range(require(a, path, "range"), path + ".range");
            out.count = as_count(require(a, path, "count"), path + ".count");
            if (out.count == 0) fail(path + ".count", "must be at least 1");
            return out;
        };
        SweepSpec spec{axis("x"), axis("y")};
        if (spec.x.param == spec.y.param) fail("sweep", "x and y must sweep different parameters");
        sweep = spec;
    }

    ParamBox box;
    try {
        box = ParamBox(std::move(lower), std::move(upper));
    } catch (const Error& e) {
        fail("solver.box", e.what());
    }

    return RunConfig{
        .system = std::move(system),
        .stencil_points = m,
        .samples_per_smallest_delay = samples,
        .dt = dt,
        .window = window,
        .box = std::move(box),
        .tol = tol,
        .max_iter = max_iter,
        .form = form,
        .oracle_enabled = oracle_enabled,
        .oracle = oracle,
        .theta = theta,
        .sweep = sweep,
    };
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

std::string emit_config(const RunConfig& cfg) {
    const auto& names = cfg.system.param_names();
    Json root = Json::object();

    Json sys = Json::object();
    sys["n"] = cfg.system.n();
    sys["parameters"] = names;
    sys["a0"] = affine_json(cfg.system.a0(), names);
    Json delayed = Json::array();
    for (const auto& term : cfg.system.delayed()) {
        Json t = Json::object();
        t["delay"] = rational_json(term.tau);
        Json a = affine_json(term.matrix, names);
        t["base"] = a["base"];
        t["coeffs"] = a["coeffs"];
        delayed.push_back(std::move(t));
    }
    sys["delayed"] = std::move(delayed);
    root["system"] = std::move(sys);

    Json disc = Json::object();
    disc["m"] = cfg.stencil_points;
    disc["samples_per_smallest_delay"] = cfg.samples_per_smallest_delay;
    if (cfg.dt) disc["dt"] = rational_json(*cfg.dt);
    if (cfg.window) disc["window"] = *cfg.window;
    root["discretization"] = std::move(disc);

    Json solver = Json::object();
    solver["box"] = Json{{"lower", vector_json(cfg.box.lower)}, {"upper", vector_json(cfg.box.upper)}};
    solver["tol"] = cfg.tol;
    solver["max_iter"] = cfg.max_iter;
    solver["form"] = to_string(cfg.form);
    root["solver"] = std::move(solver);

    Json oracle = Json::object();
    oracle["enabled"] = cfg.oracle_enabled;
    oracle["spectral"] = cfg.oracle.spectral;
    oracle["simulate"] = cfg.oracle.simulate;
    oracle["scan"] = cfg.oracle.scan;
    if (cfg.oracle.sim_horizon) oracle["sim_horizon"] = *cfg.oracle.sim_horizon;
    oracle["scan_re"] = Json::array({cfg.oracle.scan_re.first, cfg.oracle.scan_re.second});
    if (cfg.oracle.scan_im) oracle["scan_im"] = Json::array({cfg.oracle.scan_im->first, cfg.oracle.scan_im->second});
    oracle["scan_grid"] = Json::array({cfg.oracle.scan_grid.first, cfg.oracle.scan_grid.second});
    if (cfg.theta) oracle["theta"] = *cfg.theta;
    root["oracle"] = std::move(oracle);

    if (cfg.sweep) {
        auto axis = [](const SweepAxis& a) {
            Json j = Json::object();
            j["param"] = a.param;
            j["range"] = Json::array({a.lo, a.hi});
            j["count"] = a.count;
            return j;
        };
        root["sweep"] = Json{{"x", axis(cfg.sweep->x)}, {"y", axis(cfg.sweep->y)}};
    }
    return root.dump(2) + "\n";
}

}  // namespace ddestab::cli
