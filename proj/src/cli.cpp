#include "natrans/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "natrans/selfcheck.hpp"

namespace natrans::cli {

namespace {

using nlohmann::json;

struct NameMap {
    const char *name;
    int value;
};

constexpr NameMap kCommands[] = {{"spin-flip", int(Command::SpinFlip)},
                                 {"reflect", int(Command::Reflect)},
                                 {"oscillator", int(Command::Oscillator)},
                                 {"sweep", int(Command::Sweep)},
                                 {"validate", int(Command::Validate)}};
constexpr NameMap kEstimators[] = {{"exact", int(Estimator::Exact)},
                                   {"oracle", int(Estimator::Oracle)},
                                   {"adiabatic", int(Estimator::Adiabatic)},
                                   {"transformed", int(Estimator::Transformed)},
                                   {"born", int(Estimator::Born)},
                                   {"maitra-heller", int(Estimator::MaitraHeller)},
                                   {"fourier", int(Estimator::Fourier)}};
constexpr NameMap kModels[] = {{"rosen-zener", int(Model::RosenZener)},
                               {"inversion", int(Model::Inversion)},
                               {"logistic", int(Model::Logistic)},
                               {"tabulated", int(Model::Tabulated)}};

template <std::size_t N>
const char *name_of(const NameMap (&table)[N], int v)
{
    for (const auto &e : table)
        if (e.value == v)
            return e.name;
    return "?";
}

template <std::size_t N>
int value_of(const NameMap (&table)[N], const std::string &s, const char *what)
{
    for (const auto &e : table)
        if (s == e.name)
            return e.value;
    std::string known;
    for (const auto &e : table)
        known += std::string(known.empty() ? "" : ", ") + e.name;
    throw ConfigError("unknown " + std::string(what) + " '" + s + "' (expected one of: " + known +
                      ")");
}

struct ParamDef {
    const char *name;
    double fallback;
    bool (*admissible)(double);
    const char *requirement;
};

bool positive(double v) { return v > 0.0; }
bool non_negative(double v) { return v >= 0.0; }
bool unit_open(double v) { return v > 0.0 && v < 1.0; }
bool nonzero(double v) { return v != 0.0; }

const std::vector<ParamDef> &param_defs(Model m, Problem p)
{
    static const std::vector<ParamDef> rz = {{"beta0", 1.0, positive, "> 0"},
                                             {"beta1", 0.5, non_negative, ">= 0"},
                                             {"T", 1.0, positive, "> 0"}};
    static const std::vector<ParamDef> inv = {{"beta0", 1.0, positive, "> 0"},
                                              {"T", 1.0, positive, "> 0"}};
    static const std::vector<ParamDef> logi = {{"alpha", 2.0, positive, "> 0"},
                                               {"beta", 0.5, unit_open, "in (0, 1)"},
                                               {"k", 1.0, positive, "> 0"}};
    static const std::vector<ParamDef> tab_spin = {{"b0", 1.0, nonzero, "!= 0"}};
    static const std::vector<ParamDef> tab_barrier = {{"k", 1.0, positive, "> 0"}};
    static const std::vector<ParamDef> none;
    switch (m) {
    case Model::RosenZener:
        return rz;
    case Model::Inversion:
        return inv;
    case Model::Logistic:
        return logi;
    case Model::Tabulated:
        return p == Problem::Spin ? tab_spin : p == Problem::Barrier ? tab_barrier : none;
    }
    return none;
}

// Axis name of a tabulated CSV ("t" or "x"), read from its header.
std::string peek_axis_name(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("\xEF\xBB\xBF", 0) == 0)
        line.erase(0, 3);
    if (line.rfind("x,", 0) == 0)
        return "x";
    if (line.rfind("t,", 0) == 0)
        return "t";
    throw InputError(path.string() + ": header must be 't,value' or 'x,value'");
}

bool estimator_available(Problem p, Model m, Estimator e)
{
    switch (e) {
    case Estimator::Oracle:
    case Estimator::Adiabatic:
        return true;
    case Estimator::Exact:
        if (p == Problem::Spin)
            return m == Model::RosenZener || m == Model::Inversion;
        return m == Model::Logistic;
    case Estimator::Transformed:
        return (p == Problem::Spin && m == Model::RosenZener) ||
               (p == Problem::Barrier && m == Model::Logistic);
    case Estimator::Born:
    case Estimator::MaitraHeller:
        return p == Problem::Barrier;
    case Estimator::Fourier:
        return p == Problem::Spin;
    }
    return false;
}

std::vector<Estimator> default_estimators(Problem p, Model m)
{
    std::vector<Estimator> out;
    for (Estimator e : {Estimator::Exact, Estimator::Oracle, Estimator::Adiabatic,
                        Estimator::Transformed})
        if (estimator_available(p, m, e))
            out.push_back(e);
    return out;
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string column_tag(Estimator e)
{
    std::string s = to_string(e);
    for (char &c : s)
        if (c == '-')
            c = '_';
    return s;
}

double parse_real(const std::string &s, const std::string &context)
{
    const char *begin = s.c_str();
    char *end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ')
        ++end;
    if (end == begin || *end != '\0')
        throw ConfigError("invalid number '" + s + "' in " + context);
    return v;
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        out.push_back(item);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<Estimator> parse_estimator_list(const std::string &s)
{
    std::vector<Estimator> out;
    for (const auto &item : split(s, ',')) {
        const std::string t = trim(item);
        if (t.empty())
            throw ConfigError("empty entry in estimator list '" + s + "'");
        const Estimator e = parse_estimator(t);
        if (std::find(out.begin(), out.end(), e) == out.end())
            out.push_back(e);
    }
    return out;
}

std::string grid_from_json(const json &v, const std::string &name)
{
    if (v.is_number())
        return format_number(v.get<double>());
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto &x : v) {
            if (!x.is_number())
                throw ConfigError("params." + name + ": array entries must be numbers");
            out += (out.empty() ? "" : ",") + format_number(x.get<double>());
        }
        return out;
    }
    throw ConfigError("params." + name + ": expected a number, array or grid string");
}

void merge_spec(QuadratureSpec &q, const json &j, const std::string &where)
{
    if (!j.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto &[key, v] : j.items()) {
        if (key == "rel_tol")
            q.rel_tol = v.get<double>();
        else if (key == "abs_tol")
            q.abs_tol = v.get<double>();
        else if (key == "max_subdivisions")
            q.max_subdivisions = v.get<int>();
        else if (key == "truncation_threshold")
            q.truncation_threshold = v.get<double>();
        else if (key == "initial_intervals")
            q.initial_intervals = v.get<int>();
        else
            throw ConfigError("unknown key " + where + "." + key);
    }
}

json spec_json(const QuadratureSpec &q)
{
    return {{"rel_tol", q.rel_tol},
            {"abs_tol", q.abs_tol},
            {"max_subdivisions", q.max_subdivisions},
            {"truncation_threshold", q.truncation_threshold},
            {"initial_intervals", q.initial_intervals}};
}

StepperScheme parse_scheme(const std::string &s)
{
    if (s == to_string(StepperScheme::ExponentialMidpoint))
        return StepperScheme::ExponentialMidpoint;
    if (s == to_string(StepperScheme::Magnus4))
        return StepperScheme::Magnus4;
    throw ConfigError("unknown stepper '" + s + "' (expected exponential-midpoint or magnus4)");
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError("write to " + path.string() + " failed");
}

Cell failed_cell(const std::string &status)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, false, status};
}

Cell from_result(const TransitionResult &r)
{
    Cell c;
    c.probability = r.probability;
    c.amplitude = std::abs(r.amplitude);
    c.error = r.error_estimate;
    c.valid = r.valid;
    c.status = r.valid ? "ok" : "out-of-regime";
    return c;
}

Cell exact_cell(double probability, double amplitude)
{
    Cell c;
    c.probability = probability;
    c.amplitude = amplitude;
    return c;
}

Cell oracle_cell(const OracleTransition &o)
{
    Cell c = from_result(o.result);
    c.error = o.s.error_estimate + o.s.residual;
    return c;
}

// Evaluates every configured estimator at one grid point. Shared between
// workers; everything it holds is read-only after construction.
class Evaluator {
public:
    explicit Evaluator(const RunConfig &config) : config_(config), problem_(config.problem())
    {
        opts_.validity_threshold = config.validity_threshold;
        if (config.model == Model::Tabulated)
            table_.emplace(load_tabulated(*config.input, config.sidecar));
    }

    std::vector<Cell> evaluate(const std::vector<std::pair<std::string, double>> &point) const
    {
        std::map<std::string, double> p(point.begin(), point.end());
        std::vector<Cell> cells;
        cells.reserve(config_.estimators.size());
        for (Estimator e : config_.estimators) {
            try {
                cells.push_back(evaluate_one(e, p));
            } catch (const ConvergenceError &) {
                cells.push_back(failed_cell("nonconverged"));
            } catch (const std::exception &) {
                cells.push_back(failed_cell("failed"));
            }
        }
        return cells;
    }

    OscillatorSpec oscillator_spec(const std::map<std::string, double> &p) const
    {
        if (config_.model == Model::Logistic)
            return logistic_oscillator({p.at("alpha"), p.at("beta")}, p.at("k"));
        const TabulatedProfile &tab = *table_;
        OscillatorSpec s;
        s.omega = [tab](double t) { return tab(t); };
        s.omega_derivative = [tab](double t) { return tab.derivative(t); };
        s.omega_minus = tab.asymptotes().minus;
        s.omega_plus = tab.asymptotes().plus;
        s.center = 0.5 * (tab.lower() + tab.upper());
        s.horizon = 0.5 * (tab.upper() - tab.lower());
        s.scale = (tab.upper() - tab.lower()) / 50.0;
        s.tolerance = std::max(tab.asymptotes().tolerance, 1e-300);
        return s;
    }

private:
    SpinFieldProfile spin_profile(const std::map<std::string, double> &p) const
    {
        switch (config_.model) {
        case Model::RosenZener:
            return rosen_zener_profile({p.at("beta0"), p.at("beta1"), p.at("T")});
        case Model::Inversion:
            return inversion_profile({p.at("beta0"), p.at("T")});
        default:
            return as_spin_profile(*table_, p.at("b0"));
        }
    }

    BarrierProfile barrier_profile(const std::map<std::string, double> &p) const
    {
        if (config_.model == Model::Logistic)
            return logistic_profile({p.at("alpha"), p.at("beta")}, p.at("k"));
        return as_barrier_profile(*table_, p.at("k"));
    }

    Cell evaluate_one(Estimator e, const std::map<std::string, double> &p) const
    {
        switch (problem_) {
        case Problem::Spin:
            return spin(e, p);
        case Problem::Barrier:
            return barrier(e, p);
        case Problem::Oscillator:
            return oscillator(e, p);
        }
        throw std::logic_error("unreachable");
    }

    Cell spin(Estimator e, const std::map<std::string, double> &p) const
    {
        const QuadratureSpec &q = config_.quadrature;
        switch (e) {
        case Estimator::Exact: {
            const double w = config_.model == Model::RosenZener
                                 ? rosen_zener_exact({p.at("beta0"), p.at("beta1"), p.at("T")})
                                 : inversion_exact({p.at("beta0"), p.at("T")});
            return exact_cell(w, std::sqrt(w));
        }
        case Estimator::Oracle:
            return oracle_cell(
                oracle_transition(to_driving_profile(spin_profile(p)), config_.stepper, config_.scheme));
        case Estimator::Adiabatic:
            return from_result(spin_flip_amplitude(spin_profile(p), q, opts_));
        case Estimator::Transformed:
            return from_result(
                rosen_zener_adiabatic_transformed({p.at("beta0"), p.at("beta1"), p.at("T")}, q));
        case Estimator::Fourier: {
            const SpinFieldProfile sp = spin_profile(p);
            PathOnSphere path{[sp](double t) { return Vector3(sp.field(t).normalized()); },
                              1e-3 * sp.scale};
            TruncationOptions window;
            window.center = sp.center;
            window.scale = sp.scale;
            const double w =
                first_order_fourier_spinflip(path, sp.field_plus.norm(), q, window);
            Cell c = exact_cell(w, std::sqrt(w));
            const double ratio = adiabaticity_ratio(to_driving_profile(sp), opts_);
            c.valid = ratio <= opts_.validity_threshold;
            c.status = c.valid ? "ok" : "out-of-regime";
            return c;
        }
        default:
            throw ConfigError("estimator not available for spin problems");
        }
    }

    Cell barrier(Estimator e, const std::map<std::string, double> &p) const
    {
        const QuadratureSpec &q = config_.quadrature;
        switch (e) {
        case Estimator::Exact: {
            const double a = logistic_exact({p.at("alpha"), p.at("beta")});
            return exact_cell(a * a, a);
        }
        case Estimator::Oracle:
            return oracle_cell(oracle_transition(to_driving_profile(barrier_profile(p)),
                                                 config_.stepper, config_.scheme));
        case Estimator::Adiabatic:
            return from_result(reflection_amplitude(barrier_profile(p), q, opts_));
        case Estimator::Transformed:
            return from_result(logistic_adiabatic_transformed({p.at("alpha"), p.at("beta")}, q));
        case Estimator::Born:
            return from_result(born_amplitude(barrier_profile(p), q, opts_));
        case Estimator::MaitraHeller:
            return from_result(maitra_heller_amplitude(barrier_profile(p), q, opts_));
        default:
            throw ConfigError("estimator not available for barrier problems");
        }
    }

    // Cells report theta (the mapped reflection probability).
    Cell oscillator(Estimator e, const std::map<std::string, double> &p) const
    {
        const QuadratureSpec &q = config_.quadrature;
        switch (e) {
        case Estimator::Exact: {
            const double a = logistic_exact({p.at("alpha"), p.at("beta")});
            return exact_cell(a * a, a);
        }
        case Estimator::Oracle: {
            const BarrierProfile bp = oscillator_barrier(reduce_mass(oscillator_spec(p), q));
            return oracle_cell(
                oracle_transition(to_driving_profile(bp), config_.stepper, config_.scheme));
        }
        case Estimator::Adiabatic:
            return from_result(theta_coefficient(oscillator_spec(p), q, opts_));
        default:
            throw ConfigError("estimator not available for oscillator problems");
        }
    }

    const RunConfig &config_;
    Problem problem_;
    AdiabaticOptions opts_;
    std::optional<TabulatedProfile> table_;
};

} // namespace

const char *to_string(Command c) { return name_of(kCommands, int(c)); }
const char *to_string(Estimator e) { return name_of(kEstimators, int(e)); }
const char *to_string(Model m) { return name_of(kModels, int(m)); }
Command parse_command(const std::string &s) { return Command(value_of(kCommands, s, "command")); }
Estimator parse_estimator(const std::string &s)
{
    return Estimator(value_of(kEstimators, s, "estimator"));
}
Model parse_model(const std::string &s) { return Model(value_of(kModels, s, "model")); }

std::vector<double> parse_grid(const std::string &spec)
{
    const std::string s = trim(spec);
    if (s.empty())
        throw ConfigError("empty grid specification");
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3)
            throw ConfigError("range '" + s + "' must be start:stop:step");
        const double a = parse_real(trim(parts[0]), "range '" + s + "'");
        const double b = parse_real(trim(parts[1]), "range '" + s + "'");
        const double h = parse_real(trim(parts[2]), "range '" + s + "'");
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(h) || h == 0.0 ||
            (b - a) * h < 0.0)
            throw ConfigError("range '" + s + "' is empty or has a zero or misdirected step");
        const double n = std::floor((b - a) / h + 1e-9);
        if (n > 1e6)
            throw ConfigError("range '" + s + "' has more than 1e6 points");
        for (int i = 0; i <= static_cast<int>(n); ++i)
            out.push_back(a + i * h);
        return out;
    }
    for (const auto &item : split(s, ',')) {
        const std::string t = trim(item);
        if (t.empty())
            throw ConfigError("empty entry in grid '" + s + "'");
        out.push_back(parse_real(t, "grid '" + s + "'"));
    }
    return out;
}

Problem RunConfig::problem() const
{
    switch (command) {
    case Command::SpinFlip:
        return Problem::Spin;
    case Command::Reflect:
        return Problem::Barrier;
    case Command::Oscillator:
        return Problem::Oscillator;
    case Command::Sweep:
    case Command::Validate:
        break;
    }
    switch (model) {
    case Model::RosenZener:
    case Model::Inversion:
        return Problem::Spin;
    case Model::Logistic:
        return Problem::Barrier;
    case Model::Tabulated:
        if (!input)
            throw ConfigError("model tabulated requires --input");
        return peek_axis_name(*input) == "x" ? Problem::Barrier : Problem::Spin;
    }
    return Problem::Spin;
}

std::vector<std::string> RunConfig::parameter_names() const
{
    std::vector<std::string> out;
    for (const auto &d : param_defs(model, problem()))
        out.emplace_back(d.name);
    return out;
}

std::vector<std::pair<std::string, std::vector<double>>> RunConfig::axes() const
{
    std::vector<std::pair<std::string, std::vector<double>>> out;
    for (const auto &d : param_defs(model, problem())) {
        const auto it = params.find(d.name);
        out.emplace_back(d.name, it == params.end() ? std::vector<double>{d.fallback}
                                                    : parse_grid(it->second));
    }
    return out;
}

void RunConfig::validate() const
{
    if (command == Command::Validate)
        return;
    const Problem p = problem();
    if (model == Model::Tabulated && !input)
        throw ConfigError("model tabulated requires --input");
    if (model != Model::Tabulated && (input || sidecar))
        throw ConfigError("--input and --sidecar apply only to model tabulated");
    if (p == Problem::Spin && model == Model::Logistic)
        throw ConfigError("model logistic poses a barrier problem, not a spin problem");
    if (p != Problem::Spin && (model == Model::RosenZener || model == Model::Inversion))
        throw ConfigError(std::string("model ") + to_string(model) + " poses a spin problem");
    if (model == Model::Tabulated && p == Problem::Oscillator && peek_axis_name(*input) != "t")
        throw ConfigError("oscillator tables must use the header 't,value'");

    const auto &defs = param_defs(model, p);
    for (const auto &[name, grid] : params) {
        const auto it = std::find_if(defs.begin(), defs.end(),
                                     [&](const ParamDef &d) { return name == d.name; });
        if (it == defs.end())
            throw ConfigError("parameter '" + name + "' does not apply to model " +
                              to_string(model));
        const auto values = parse_grid(grid);
        for (double v : values)
            if (!std::isfinite(v) || !it->admissible(v))
                throw ConfigError("parameter " + name + " = " + format_number(v) + " must be " +
                                  it->requirement);
    }
    if (estimators.empty())
        throw ConfigError("estimator list is empty");
    for (Estimator e : estimators)
        if (!estimator_available(p, model, e))
            throw ConfigError(std::string("estimator ") + to_string(e) +
                              " is not available for model " + to_string(model) +
                              (p == Problem::Oscillator ? " (oscillator)" : ""));
    try {
        quadrature.validate();
        stepper.validate();
    } catch (const std::invalid_argument &ex) {
        throw ConfigError(ex.what());
    }
    if (!(validity_threshold > 0.0) || !std::isfinite(validity_threshold))
        throw ConfigError("validity threshold must be positive");
    if (n_max < 0 || n_max > kDefaultMaxLevel)
        throw ConfigError("n-max must lie in [0, " + std::to_string(kDefaultMaxLevel) + "]");
    if (threads < 0)
        throw ConfigError("threads must be non-negative");
    if (matrix_output) {
        if (p != Problem::Oscillator)
            throw ConfigError("--matrix-output applies only to oscillator problems");
        for (const auto &axis : axes())
            if (axis.second.size() != 1)
                throw ConfigError("--matrix-output requires a single grid point");
    }
}

nlohmann::json RunConfig::to_json() const
{
    json j;
    j["command"] = to_string(command);
    j["model"] = to_string(model);
    json ps = json::object();
    if (command != Command::Validate) {
        for (const auto &d : param_defs(model, problem())) {
            const auto it = params.find(d.name);
            ps[d.name] = it == params.end() ? format_number(d.fallback) : it->second;
        }
    }
    j["params"] = ps;
    json es = json::array();
    for (Estimator e : estimators)
        es.push_back(to_string(e));
    j["estimators"] = es;
    j["quadrature"] = spec_json(quadrature);
    j["stepper"] = spec_json(stepper);
    j["scheme"] = to_string(scheme);
    j["validity_threshold"] = validity_threshold;
    auto path_or_null = [](const std::optional<std::filesystem::path> &p) {
        return p ? json(p->string()) : json(nullptr);
    };
    j["input"] = path_or_null(input);
    j["sidecar"] = path_or_null(sidecar);
    j["output"] = path_or_null(output);
    j["manifest"] = path_or_null(manifest);
    j["matrix_output"] = path_or_null(matrix_output);
    j["n_max"] = n_max;
    j["threads"] = threads;
    return j;
}

RunConfig merge_json(RunConfig base, const nlohmann::json &j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    auto path_of = [](const json &v) -> std::optional<std::filesystem::path> {
        if (v.is_null())
            return std::nullopt;
        return std::filesystem::path(v.get<std::string>());
    };
    try {
        for (const auto &[key, v] : j.items()) {
            if (key == "command") {
                if (parse_command(v.get<std::string>()) != base.command)
                    throw ConfigError("config command '" + v.get<std::string>() +
                                      "' differs from the subcommand");
            } else if (key == "model") {
                base.model = parse_model(v.get<std::string>());
            } else if (key == "params") {
                if (!v.is_object())
                    throw ConfigError("params must be an object");
                for (const auto &[name, grid] : v.items())
                    base.params[name] = grid_from_json(grid, name);
            } else if (key == "estimators") {
                if (v.is_string()) {
                    base.estimators = parse_estimator_list(v.get<std::string>());
                } else {
                    base.estimators.clear();
                    for (const auto &e : v)
                        base.estimators.push_back(parse_estimator(e.get<std::string>()));
                }
            } else if (key == "quadrature") {
                merge_spec(base.quadrature, v, "quadrature");
            } else if (key == "stepper") {
                merge_spec(base.stepper, v, "stepper");
            } else if (key == "scheme") {
                base.scheme = parse_scheme(v.get<std::string>());
            } else if (key == "validity_threshold") {
                base.validity_threshold = v.get<double>();
            } else if (key == "input") {
                base.input = path_of(v);
            } else if (key == "sidecar") {
                base.sidecar = path_of(v);
            } else if (key == "output") {
                base.output = path_of(v);
            } else if (key == "manifest") {
                base.manifest = path_of(v);
            } else if (key == "matrix_output") {
                base.matrix_output = path_of(v);
            } else if (key == "n_max") {
                base.n_max = v.get<int>();
            } else if (key == "threads") {
                base.threads = v.get<int>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception &ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    return base;
}

std::optional<RunConfig> parse_command_line(int argc, const char *const *argv)
{
    CLI::App app{"Non-adiabatic transition probabilities: exact, oracle and adiabatic estimators",
                 "natrans"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, model, estimators, stepper_name, input, sidecar, output, manifest,
        matrix_output;
    std::map<std::string, std::string> grids;
    double rel_tol = 0, abs_tol = 0, oracle_rel = 0, oracle_abs = 0, threshold = 0;
    int max_sub = 0, oracle_max = 0, n_max = 0, threads = 0;

    const std::vector<std::pair<const char *, const char *>> param_flags = {
        {"beta0", "asymptotic precession (rosen-zener, inversion)"},
        {"beta1", "pulse strength (rosen-zener)"},
        {"T", "pulse duration (rosen-zener, inversion)"},
        {"alpha", "k / gamma (logistic)"},
        {"beta", "U0 / k^2 (logistic)"},
        {"k", "asymptotic wavenumber (logistic, tabulated barrier)"},
        {"b0", "longitudinal field (tabulated spin)"}};

    for (const auto &entry : kCommands) {
        auto *sub = app.add_subcommand(entry.name);
        if (entry.value == int(Command::Validate)) {
            sub->description("run the built-in invariant suite");
            continue;
        }
        sub->description(entry.value == int(Command::SpinFlip)     ? "spin-flip probability"
                         : entry.value == int(Command::Reflect)    ? "over-barrier reflection"
                         : entry.value == int(Command::Oscillator) ? "oscillator excitation"
                                                                   : "parameter sweep");
        sub->add_option("--config", config_path, "JSON config; flags override it");
        sub->add_option("--model", model, "rosen-zener | inversion | logistic | tabulated");
        for (const auto &[name, help] : param_flags)
            sub->add_option(std::string("--") + name, grids[name],
                            std::string(help) + "; value, a,b,c or start:stop:step");
        sub->add_option("--estimators", estimators,
                        "comma list of exact, oracle, adiabatic, transformed, born, "
                        "maitra-heller, fourier");
        sub->add_option("--rel-tol", rel_tol, "quadrature relative tolerance");
        sub->add_option("--abs-tol", abs_tol, "quadrature absolute tolerance");
        sub->add_option("--max-subdivisions", max_sub, "quadrature panel budget");
        sub->add_option("--oracle-rel-tol", oracle_rel, "oracle stepper relative tolerance");
        sub->add_option("--oracle-abs-tol", oracle_abs, "oracle stepper absolute tolerance");
        sub->add_option("--oracle-max-steps", oracle_max, "oracle stepper step budget");
        sub->add_option("--stepper", stepper_name, "exponential-midpoint | magnus4");
        sub->add_option("--validity-threshold", threshold, "flag estimates above this ratio");
        sub->add_option("--input", input, "tabulated profile CSV (t,value or x,value)");
        sub->add_option("--sidecar", sidecar, "asymptote JSON for --input");
        sub->add_option("--output", output, "CSV path (stdout when absent)");
        sub->add_option("--manifest", manifest, "manifest path (default <output>.manifest.json)");
        sub->add_option("--matrix-output", matrix_output, "W_mn CSV (oscillator, single point)");
        sub->add_option("--n-max", n_max, "highest oscillator level in the matrix");
        sub->add_option("--threads", threads, "worker count (NATRANS_THREADS overrides)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e);
        return std::nullopt;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e);
        return std::nullopt;
    } catch (const CLI::CallForVersion &e) {
        app.exit(e);
        return std::nullopt;
    } catch (const CLI::ParseError &e) {
        throw ConfigError(e.what());
    }

    CLI::App *sub = app.get_subcommands().front();
    RunConfig cfg;
    cfg.command = parse_command(sub->get_name());
    if (cfg.command == Command::Validate)
        return cfg;
    cfg.model = cfg.command == Command::Reflect || cfg.command == Command::Oscillator
                    ? Model::Logistic
                    : Model::RosenZener;

    if (sub->count("--config")) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in)
            throw IoError("cannot open config " + config_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception &ex) {
            throw ConfigError("config " + config_path + ": " + ex.what());
        }
        cfg = merge_json(cfg, j);
    }

    auto given = [&](const char *flag) { return sub->count(flag) > 0; };
    if (given("--model"))
        cfg.model = parse_model(model);
    for (const auto &[name, help] : param_flags)
        if (given((std::string("--") + name).c_str()))
            cfg.params[name] = grids[name];
    if (given("--estimators"))
        cfg.estimators = parse_estimator_list(estimators);
    if (given("--rel-tol"))
        cfg.quadrature.rel_tol = rel_tol;
    if (given("--abs-tol"))
        cfg.quadrature.abs_tol = abs_tol;
    if (given("--max-subdivisions"))
        cfg.quadrature.max_subdivisions = max_sub;
    if (given("--oracle-rel-tol"))
        cfg.stepper.rel_tol = oracle_rel;
    if (given("--oracle-abs-tol"))
        cfg.stepper.abs_tol = oracle_abs;
    if (given("--oracle-max-steps"))
        cfg.stepper.max_subdivisions = oracle_max;
    if (given("--stepper"))
        cfg.scheme = parse_scheme(stepper_name);
    if (given("--validity-threshold"))
        cfg.validity_threshold = threshold;
    if (given("--input"))
        cfg.input = input;
    if (given("--sidecar"))
        cfg.sidecar = sidecar;
    if (given("--output"))
        cfg.output = output;
    if (given("--manifest"))
        cfg.manifest = manifest;
    if (given("--matrix-output"))
        cfg.matrix_output = matrix_output;
    if (given("--n-max"))
        cfg.n_max = n_max;
    if (given("--threads"))
        cfg.threads = threads;

    if (cfg.estimators.empty())
        cfg.estimators = default_estimators(cfg.problem(), cfg.model);
    return cfg;
}

bool SweepTable::all_converged() const
{
    for (const auto &row : cells)
        for (const auto &c : row)
            if (c.status == "nonconverged" || c.status == "failed")
                return false;
    return true;
}

int resolve_threads(int requested)
{
    if (const char *env = std::getenv("NATRANS_THREADS"); env && *env) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096)
            throw ConfigError(std::string("NATRANS_THREADS='") + env +
                              "' is not a positive integer");
        return static_cast<int>(v);
    }
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepTable run_sweep(const RunConfig &requested)
{
    // Columns follow the estimator declaration order, not the user's order.
    RunConfig config = requested;
    if (config.estimators.empty())
        config.estimators = default_estimators(config.problem(), config.model);
    std::sort(config.estimators.begin(), config.estimators.end());
    config.estimators.erase(std::unique(config.estimators.begin(), config.estimators.end()),
                            config.estimators.end());
    const auto axes = config.axes();
    SweepTable table;
    table.estimators = config.estimators;
    for (const auto &a : axes)
        table.axis_names.push_back(a.first);

    // Cartesian product, first axis slowest.
    std::size_t total = 1;
    for (const auto &a : axes)
        total *= a.second.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<double> point(axes.size());
        std::size_t rest = flat;
        for (std::size_t i = axes.size(); i-- > 0;) {
            point[i] = axes[i].second[rest % axes[i].second.size()];
            rest /= axes[i].second.size();
        }
        table.points.push_back(std::move(point));
    }
    table.cells.resize(table.points.size());

    const Evaluator eval(config);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < table.points.size(); i = next++) {
            std::vector<std::pair<std::string, double>> named;
            for (std::size_t a = 0; a < axes.size(); ++a)
                named.emplace_back(axes[a].first, table.points[i][a]);
            table.cells[i] = eval.evaluate(named);
        }
    };
    const int n = std::min<int>(resolve_threads(config.threads),
                                static_cast<int>(table.points.size()));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }
    return table;
}

std::string format_csv(const SweepTable &table)
{
    std::string out;
    std::vector<std::string> header = table.axis_names;
    for (Estimator e : table.estimators)
        for (const char *field : {"probability", "amplitude", "error", "valid", "status"})
            header.push_back(column_tag(e) + "_" + field);
    for (std::size_t i = 0; i < header.size(); ++i)
        out += (i ? "," : "") + header[i];
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        std::string line;
        for (double v : table.points[r])
            line += (line.empty() ? "" : ",") + format_number(v);
        for (const Cell &c : table.cells[r]) {
            for (double v : {c.probability, c.amplitude, c.error})
                line += (line.empty() ? "" : ",") + format_number(v);
            line += (line.empty() ? "" : ",") + std::string(c.valid ? "1" : "0");
            line += "," + c.status;
        }
        out += line + '\n';
    }
    return out;
}

void emit_figure_data(const SweepTable &table, const std::filesystem::path &path)
{
    write_text(path, format_csv(table));
}

void write_manifest(const RunConfig &config, double wall_seconds,
                    const std::filesystem::path &path)
{
    const json j = {{"version", kVersion}, {"config", config.to_json()}, {"wall_seconds", wall_seconds}};
    write_text(path, j.dump(2) + "\n");
}

void write_matrix(const TransitionMatrixSlice &w, const std::filesystem::path &path)
{
    std::string out = "m,n,probability\n";
    for (int m = 0; m <= w.n_max; ++m)
        for (int n = 0; n <= w.n_max; ++n)
            out += std::to_string(m) + "," + std::to_string(n) + "," +
                   format_number(w.entries(m, n)) + "\n";
    write_text(path, out);
}

int run(const RunConfig &config)
{
    config.validate();
    if (config.command == Command::Validate) {
        bool ok = true;
        for (const auto &r : run_self_checks()) {
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " " << r.detail << "\n";
            ok = ok && r.passed;
        }
        return ok ? Ok : NonConvergence;
    }

    const auto start = std::chrono::steady_clock::now();
    const SweepTable table = run_sweep(config);
    bool complete = table.all_converged();

    if (config.output)
        emit_figure_data(table, *config.output);
    else
        std::cout << format_csv(table);

    if (config.matrix_output) {
        // Adiabatic theta when requested, else the first finite column.
        std::optional<double> theta;
        for (std::size_t i = 0; i < table.estimators.size(); ++i) {
            const Cell &c = table.cells.front()[i];
            if (!std::isfinite(c.probability))
                continue;
            if (table.estimators[i] == Estimator::Adiabatic) {
                theta = c.probability;
                break;
            }
            if (!theta)
                theta = c.probability;
        }
        if (theta && *theta < 1.0) {
            TransitionMatrixSlice w = perelomov_popov_matrix(*theta, config.n_max);
            write_matrix(w, *config.matrix_output);
        } else {
            std::cerr << "natrans: no usable theta for the transition matrix\n";
            complete = false;
        }
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::optional<std::filesystem::path> manifest = config.manifest;
    if (!manifest && config.output)
        manifest = std::filesystem::path(config.output->string() + ".manifest.json");
    if (manifest)
        write_manifest(config, wall, *manifest);

    if (!complete) {
        std::cerr << "natrans: some grid points did not converge (see *_status columns)\n";
        return NonConvergence;
    }
    return Ok;
}

int main_entry(int argc, const char *const *argv)
{
    try {
        const auto config = parse_command_line(argc, argv);
        if (!config)
            return Ok;
        return run(*config);
    } catch (const IoError &e) {
        std::cerr << "natrans: " << e.what() << "\n";
        return IoFailure;
    } catch (const InputError &e) {
        std::cerr << "natrans: " << e.what() << "\n";
        return ConfigInvalid;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "natrans: " << e.what() << "\n";
        return IoFailure;
    } catch (const std::invalid_argument &e) {
        std::cerr << "natrans: " << e.what() << "\n";
        return ConfigInvalid;
    } catch (const std::domain_error &e) {
        std::cerr << "natrans: " << e.what() << "\n";
        return ConfigInvalid;
    } catch (const std::exception &e) {
        std::cerr << "natrans: " << e.what() << "\n";
        return NonConvergence;
    }
}

} // namespace natrans::cli
