#include "natrans/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/interpolators/makima.hpp>
#include <json.hpp>

namespace natrans {

namespace {

constexpr double kPi = 3.14159265358979323846;

// acosh(1e12): beyond this many widths sech(t/T) < 1e-12.
const double kSechHorizon = std::acosh(1e12);
// exp(-28) < 1e-12: logistic tails.
constexpr double kLogisticHorizon = 28.0;

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string &field, std::size_t line)
{
    const std::string f = trim(field);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(f, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (f.empty() || used != f.size() || !std::isfinite(v))
        throw InputError("line " + std::to_string(line) + ": not a finite real: '" + f + "'");
    return v;
}

} // namespace

void RosenZenerParams::validate() const
{
    if (!std::isfinite(beta0) || !std::isfinite(beta1) || !std::isfinite(T))
        throw std::invalid_argument("Rosen-Zener parameters must be finite");
    if (!(beta0 > 0.0))
        throw std::invalid_argument("Rosen-Zener beta0 must be positive");
    if (beta1 < 0.0)
        throw std::invalid_argument("Rosen-Zener beta1 must be non-negative");
    if (!(T > 0.0))
        throw std::invalid_argument("Rosen-Zener T must be positive");
}

SpinFieldProfile rosen_zener_profile(const RosenZenerParams &p)
{
    p.validate();
    const double b0 = p.beta0 / p.T, b1 = p.beta1 / p.T, T = p.T;
    SpinFieldProfile sp;
    sp.field = [b0, b1, T](double t) { return Vector3(b1 / std::cosh(t / T), 0.0, b0); };
    sp.field_derivative = [b1, T](double t) {
        const double c = std::cosh(t / T);
        return Vector3(-b1 * std::tanh(t / T) / (c * T), 0.0, 0.0);
    };
    sp.field_minus = sp.field_plus = Vector3(0.0, 0.0, b0);
    sp.horizon = kSechHorizon * T;
    sp.tolerance = 1e-12 * std::max(b1, 1.0 / T) * (1.0 + 1e-6);
    sp.center = 0.0;
    sp.scale = T;
    return sp;
}

double rosen_zener_exact(const RosenZenerParams &p)
{
    p.validate();
    const double a = std::sin(kPi * p.beta1) / std::cosh(kPi * p.beta0);
    return a * a;
}

TransitionResult rosen_zener_adiabatic_transformed(const RosenZenerParams &p,
                                                   const QuadratureSpec &ctrl)
{
    p.validate();
    TransitionResult r;
    if (p.beta1 == 0.0)
        return r;
    const double k = std::atan2(p.beta1, p.beta0);
    const double sk = std::sin(k), ck = std::cos(k), tk = p.beta1 / p.beta0;
    auto envelope = [ck](double xi) {
        const double sh = std::sinh(xi);
        return std::tanh(xi) / std::sqrt(sh * sh + ck * ck);
    };
    auto phase = [&](double xi) {
        return 2.0 * (p.beta0 * xi + p.beta1 * std::atan(tk * std::tanh(xi)));
    };
    TruncationOptions w;
    w.lower = 0.0;
    const QuadratureResult q = integrate_improper_oscillatory(envelope, phase, ctrl, w);
    if (!q.converged)
        throw ConvergenceError("rosen_zener_adiabatic_transformed: quadrature did not converge");
    r.amplitude = sk * q.value.imag();
    r.probability = std::norm(r.amplitude);
    const double e = sk * q.error_estimate;
    r.error_estimate = e * (2.0 * std::abs(r.amplitude) + e);
    // |dtheta/dt| / (2|B|) is largest at the pulse edge; reuse the engine's
    // frame diagnostic for consistency with the untransformed route.
    r.adiabaticity_ratio = adiabaticity_ratio(to_driving_profile(rosen_zener_profile(p)));
    r.valid = r.adiabaticity_ratio <= AdiabaticOptions{}.validity_threshold;
    return r;
}

void InversionParams::validate() const
{
    if (!std::isfinite(beta0) || !(beta0 > 0.0))
        throw std::invalid_argument("inversion beta0 must be positive");
    if (!std::isfinite(T) || !(T > 0.0))
        throw std::invalid_argument("inversion T must be positive");
}

SpinFieldProfile inversion_profile(const InversionParams &p)
{
    p.validate();
    const double b = p.beta0 / p.T, T = p.T;
    SpinFieldProfile sp;
    sp.field = [b, T](double t) {
        return Vector3(b / std::cosh(t / T), 0.0, -b * std::tanh(t / T));
    };
    sp.field_derivative = [b, T](double t) {
        const double s = 1.0 / std::cosh(t / T);
        return Vector3(-b * s * std::tanh(t / T) / T, 0.0, -b * s * s / T);
    };
    sp.field_minus = Vector3(0.0, 0.0, b);
    sp.field_plus = Vector3(0.0, 0.0, -b);
    sp.horizon = kSechHorizon * T;
    sp.tolerance = 1e-12 * b * (1.0 + 1e-6);
    sp.center = 0.0;
    sp.scale = T;
    return sp;
}

double inversion_exact(const InversionParams &p)
{
    p.validate();
    const double c = std::cosh(kPi * p.beta0);
    return 1.0 / (c * c);
}

void LogisticBarrierParams::validate() const
{
    if (!std::isfinite(alpha) || !(alpha > 0.0))
        throw std::invalid_argument("logistic alpha must be positive");
    if (!std::isfinite(beta) || !(beta > 0.0) || !(beta < 1.0))
        throw std::invalid_argument("logistic beta must lie in (0, 1)");
}

BarrierProfile logistic_profile(const LogisticBarrierParams &p, double k)
{
    p.validate();
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("logistic_profile: k must be positive");
    const double g = k / p.alpha, u0 = p.beta * k * k;
    BarrierProfile bp;
    bp.potential = [g, u0](double x) { return u0 / (1.0 + std::exp(-g * x)); };
    bp.potential_derivative = [g, u0](double x) {
        const double c = std::cosh(0.5 * g * x);
        return u0 * g / (4.0 * c * c);
    };
    bp.potential_second_derivative = [g, u0](double x) {
        const double c = std::cosh(0.5 * g * x);
        return -u0 * g * g * std::tanh(0.5 * g * x) / (4.0 * c * c);
    };
    bp.k = k;
    bp.u_minus = 0.0;
    bp.u_plus = u0;
    bp.horizon = kLogisticHorizon / g;
    bp.tolerance = 1e-12 * u0;
    bp.center = 0.0;
    bp.scale = 1.0 / g;
    return bp;
}

double logistic_exact(const LogisticBarrierParams &p)
{
    p.validate();
    const double s = std::sqrt(1.0 - p.beta);
    const double a = kPi * p.alpha * (1.0 - s);
    const double b = kPi * p.alpha * (1.0 + s);
    // sinh(a)/sinh(b) = exp(a - b) (1 - exp(-2a)) / (1 - exp(-2b))
    return std::exp(a - b) * std::expm1(-2.0 * a) / std::expm1(-2.0 * b);
}

double logistic_perturbative(const LogisticBarrierParams &p)
{
    if (!(p.alpha > 0.0) || !std::isfinite(p.beta))
        throw std::invalid_argument("logistic_perturbative: invalid parameters");
    const double sh = std::sinh(2.0 * kPi * p.alpha);
    return kPi * p.alpha * p.alpha * p.beta * p.beta / (4.0 * sh * sh);
}

double logistic_phase(const LogisticBarrierParams &p, double u)
{
    const double z = std::exp(u);
    const double q = 1.0 - p.beta, sq = std::sqrt(q);
    const double r = std::sqrt((z + 1.0) * (q * z + 1.0));
    return u + sq * std::log(2.0 * sq * r + 2.0 * q * z + 2.0 - p.beta) -
           std::log(2.0 * r + (2.0 - p.beta) * z + 2.0);
}

TransitionResult logistic_adiabatic_transformed(const LogisticBarrierParams &p,
                                                const QuadratureSpec &ctrl)
{
    p.validate();
    const double q = 1.0 - p.beta;
    auto envelope = [q](double u) {
        if (u < 0.0) {
            const double z = std::exp(u);
            return z / ((1.0 + z) * (1.0 + q * z));
        }
        const double w = std::exp(-u);
        return w / ((w + 1.0) * (w + q));
    };
    auto phase = [&](double u) { return 2.0 * p.alpha * logistic_phase(p, u); };
    const QuadratureResult r0 = integrate_improper_oscillatory(envelope, phase, ctrl);
    if (!r0.converged)
        throw ConvergenceError("logistic_adiabatic_transformed: quadrature did not converge");
    TransitionResult r;
    r.amplitude = 0.25 * p.beta * r0.value;
    r.probability = std::norm(r.amplitude);
    const double e = 0.25 * p.beta * r0.error_estimate;
    r.error_estimate = e * (2.0 * std::abs(r.amplitude) + e);
    r.adiabaticity_ratio = p.beta / p.alpha / q;
    r.valid = p.beta / p.alpha <= 0.2 * q;
    return r;
}

struct TabulatedProfile::Spline {
    boost::math::interpolators::makima<std::vector<double>> f;
};

TabulatedProfile::TabulatedProfile(std::vector<double> abscissae, std::vector<double> values,
                                   TabulatedAsymptotes asymptotes, std::string axis_name)
    : t_(std::move(abscissae)), v_(std::move(values)), asym_(asymptotes), axis_(std::move(axis_name))
{
    if (t_.size() != v_.size())
        throw InputError("tabulated profile: column lengths differ");
    if (t_.size() < 2)
        throw InputError("tabulated profile: need at least two samples");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1]))
            throw InputError("tabulated profile: abscissae are not strictly increasing at row " +
                             std::to_string(i + 1));
    if (!(asym_.tolerance >= 0.0) || !std::isfinite(asym_.minus) || !std::isfinite(asym_.plus))
        throw InputError("tabulated profile: invalid asymptote declaration");
    if (std::abs(v_.front() - asym_.minus) > asym_.tolerance ||
        std::abs(v_.back() - asym_.plus) > asym_.tolerance)
        throw InputError("tabulated profile: end samples do not match the declared asymptotes");
    if (t_.size() >= 4) {
        std::vector<double> x = t_, y = v_;
        spline_ = std::make_shared<const Spline>(Spline{
            boost::math::interpolators::makima<std::vector<double>>(std::move(x), std::move(y))});
    }
}

double TabulatedProfile::operator()(double t) const
{
    if (t <= t_.front())
        return asym_.minus;
    if (t >= t_.back())
        return asym_.plus;
    if (spline_)
        return spline_->f(t);
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const double s = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return v_[i] + s * (v_[i + 1] - v_[i]);
}

double TabulatedProfile::derivative(double t) const
{
    if (t <= t_.front() || t >= t_.back())
        return 0.0;
    if (spline_)
        return spline_->f.prime(t);
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    return (v_[i + 1] - v_[i]) / (t_[i + 1] - t_[i]);
}

TabulatedProfile parse_tabulated(std::istream &csv, const TabulatedAsymptotes &asymptotes)
{
    std::string line;
    std::size_t lineno = 0;
    std::string axis;
    while (std::getline(csv, line)) {
        ++lineno;
        if (!trim(line).empty()) {
            axis = trim(line);
            break;
        }
    }
    if (axis.empty())
        throw InputError("tabulated profile: empty input");
    if (axis.size() >= 3 && static_cast<unsigned char>(axis[0]) == 0xEF &&
        static_cast<unsigned char>(axis[1]) == 0xBB && static_cast<unsigned char>(axis[2]) == 0xBF)
        axis = axis.substr(3);
    const auto comma = axis.find(',');
    if (comma == std::string::npos)
        throw InputError("tabulated profile: header must be 't,value' or 'x,value'");
    const std::string first = trim(axis.substr(0, comma)), second = trim(axis.substr(comma + 1));
    if ((first != "t" && first != "x") || second != "value")
        throw InputError("tabulated profile: header must be 't,value' or 'x,value', got '" + axis +
                         "'");

    std::vector<double> t, v;
    while (std::getline(csv, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        const auto c = line.find(',');
        if (c == std::string::npos || line.find(',', c + 1) != std::string::npos)
            throw InputError("line " + std::to_string(lineno) + ": expected two columns");
        t.push_back(parse_real(line.substr(0, c), lineno));
        v.push_back(parse_real(line.substr(c + 1), lineno));
    }
    if (t.empty())
        throw InputError("tabulated profile: no data rows");
    return TabulatedProfile(std::move(t), std::move(v), asymptotes, first);
}

TabulatedProfile load_tabulated(const std::filesystem::path &path,
                                const std::optional<std::filesystem::path> &sidecar)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());

    std::optional<std::filesystem::path> side = sidecar;
    if (!side) {
        std::filesystem::path guess = path;
        guess.replace_extension(".json");
        if (std::filesystem::exists(guess))
            side = guess;
    }

    std::optional<TabulatedAsymptotes> declared;
    if (side) {
        std::ifstream js(*side);
        if (!js)
            throw IoError("cannot open " + side->string());
        nlohmann::json j;
        try {
            js >> j;
            declared = TabulatedAsymptotes{j.at("asymptote_minus").get<double>(),
                                           j.at("asymptote_plus").get<double>(),
                                           j.at("tolerance").get<double>()};
        } catch (const nlohmann::json::exception &e) {
            throw InputError("sidecar " + side->string() + ": " + e.what());
        }
    }

    if (declared)
        return parse_tabulated(in, *declared);
    std::stringstream buf;
    buf << in.rdbuf();
    // Without a declaration, pin the asymptotes to the end samples.
    TabulatedProfile raw = parse_tabulated(buf, {0.0, 0.0, std::numeric_limits<double>::infinity()});
    TabulatedAsymptotes ends{raw.values().front(), raw.values().back(), 0.0};
    return TabulatedProfile(raw.abscissae(), raw.values(), ends, raw.axis_name());
}

namespace {

double tabulated_scale(const TabulatedProfile &tab)
{
    return (tab.upper() - tab.lower()) / 50.0;
}

} // namespace

SpinFieldProfile as_spin_profile(const TabulatedProfile &tab, double b0)
{
    if (!(b0 != 0.0) || !std::isfinite(b0))
        throw InputError("spin profile: longitudinal field b0 must be non-zero");
    if (tab.asymptotes().minus != 0.0 || tab.asymptotes().plus != 0.0)
        throw InputError("spin profile: transverse field must vanish asymptotically");
    SpinFieldProfile sp;
    sp.field = [tab, b0](double t) { return Vector3(tab(t), 0.0, b0); };
    sp.field_derivative = [tab](double t) { return Vector3(tab.derivative(t), 0.0, 0.0); };
    sp.field_minus = sp.field_plus = Vector3(0.0, 0.0, b0);
    sp.center = 0.5 * (tab.lower() + tab.upper());
    sp.horizon = 0.5 * (tab.upper() - tab.lower());
    sp.tolerance = std::max(tab.asymptotes().tolerance, 1e-300);
    sp.scale = tabulated_scale(tab);
    return sp;
}

BarrierProfile as_barrier_profile(const TabulatedProfile &tab, double k)
{
    BarrierProfile bp;
    bp.potential = [tab](double x) { return tab(x); };
    bp.potential_derivative = [tab](double x) { return tab.derivative(x); };
    bp.k = k;
    bp.u_minus = tab.asymptotes().minus;
    bp.u_plus = tab.asymptotes().plus;
    bp.center = 0.5 * (tab.lower() + tab.upper());
    bp.horizon = 0.5 * (tab.upper() - tab.lower());
    bp.tolerance = std::max(tab.asymptotes().tolerance, 1e-300);
    bp.scale = tabulated_scale(tab);
    return bp;
}

} // namespace natrans
