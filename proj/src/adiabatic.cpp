#include "natrans/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "natrans/finite_difference.hpp"

namespace natrans {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Absolute accuracy attainable when the integrand carries an order-`order`
// finite-difference derivative of O(1) quantities: roundoff ~ eps / h^order
// per evaluation, integrated over `width`.
double fd_noise_floor(double width, double scale, double fd_step, int order)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    return 100.0 * eps * width / std::pow(fd_step * scale, order) * std::pow(scale, order - 1);
}

int phase_nodes(double lower, double upper, double scale, const AdiabaticOptions &opts)
{
    const double n = opts.phase_nodes_per_scale * (upper - lower) / scale;
    return static_cast<int>(std::clamp(n, 1025.0, 65537.0));
}

std::vector<double> sample_grid(double center, double horizon, int samples)
{
    std::vector<double> t(std::max(samples, 2));
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = center - horizon + 2.0 * horizon * static_cast<double>(i) / (t.size() - 1);
    return t;
}

Vector3 field_rate(const SpinFieldProfile &sp, double t)
{
    if (sp.field_derivative)
        return (*sp.field_derivative)(t);
    return derivative(sp.field, t, 1e-3 * sp.scale);
}

// Transverse unit direction (d1, d2) along which the field leaves the
// 3-axis near +horizon; scans inward until the transverse part is resolved.
Eigen::Vector2d exit_direction(const SpinFieldProfile &sp)
{
    for (int i = 0; i <= 4000; ++i) {
        const double t = sp.center + sp.horizon * (1.0 - i / 4000.0);
        const Vector3 b = sp.field(t);
        const double rho = std::hypot(b[0], b[1]);
        if (rho > 1e-12 * b.norm())
            return Eigen::Vector2d(b[0], b[1]) / rho;
    }
    throw DomainError("spin profile: cannot resolve the rotation plane of an inverting field");
}

// Frame used inside the integrands; tolerates the pole of an inverting
// field by falling back to the declared plus frame.
GroupElement frame_at(const DrivingProfile &profile, double t)
{
    const AlgebraElement b = profile(t);
    if (b.c[0] == 0.0 && b.c[1] == 0.0 && b.c[2] * profile.cartan_sign() < 0.0)
        return profile.frame_plus.v;
    return cartan_decompose(b, profile.cartan_sign()).v;
}

double beta3(const DrivingProfile &profile, double t)
{
    const Vector3 c = profile(t).c;
    const double q = profile.sig == Signature::Compact
                         ? c.squaredNorm()
                         : c[2] * c[2] - c[0] * c[0] - c[1] * c[1];
    if (!(q > 0.0))
        throw DomainError("generator leaves the elliptic regime at t = " + std::to_string(t));
    return profile.cartan_sign() * std::sqrt(q);
}

TruncationOptions window_options(double center, double scale)
{
    TruncationOptions w;
    w.center = center;
    w.scale = scale;
    return w;
}

// Oscillatory integral int env(x) exp(i * factor * Phi(x)) dx with Phi the
// cumulative phase of `rate` referenced at x0.
QuadratureResult phase_integral(const std::function<double(double)> &env,
                                const std::function<double(double)> &rate, double factor,
                                double x0, double center, double scale, double horizon,
                                const QuadratureSpec &ctrl, const AdiabaticOptions &opts,
                                int fd_order = 0, double magnitude = 1.0)
{
    const TruncationOptions wo = window_options(center, scale);
    // A differenced envelope bottoms out at its roundoff instead of zero.
    QuadratureSpec probe = ctrl;
    if (fd_order > 0)
        probe.truncation_threshold =
            std::max(ctrl.truncation_threshold, 10.0 * std::numeric_limits<double>::epsilon() /
                                                    std::pow(opts.fd_step * scale, fd_order) *
                                                    std::pow(scale, fd_order - 1));
    const TruncationWindow w = find_truncation_window(env, probe, wo);
    QuadratureSpec s = ctrl;
    if (fd_order > 0)
        s.abs_tol = std::max(ctrl.abs_tol, magnitude * fd_noise_floor(w.upper - w.lower, scale,
                                                                      opts.fd_step, fd_order));
    const double lo = std::min(w.lower, center - horizon);
    const double hi = std::max(w.upper, center + horizon);
    const PhaseTable phase(rate, lo, hi, x0, ctrl, phase_nodes(lo, hi, scale, opts));
    TruncationOptions fixed = wo;
    fixed.lower = w.lower;
    fixed.upper = w.upper;
    QuadratureResult r = integrate_improper_oscillatory(
        env, [&](double x) { return factor * phase(x); }, s, fixed);
    r.error_estimate += w.tail_bound;
    return r;
}

double max_over_grid(const std::function<double(double)> &f, double center, double horizon,
                     int samples)
{
    double m = 0.0;
    for (double t : sample_grid(center, horizon, samples))
        m = std::max(m, std::abs(f(t)));
    return m;
}

void check_converged(const QuadratureResult &r, const char *what)
{
    if (!r.converged)
        throw ConvergenceError(std::string(what) + ": quadrature did not converge (error " +
                               std::to_string(r.error_estimate) + ")");
}

} // namespace

void SpinFieldProfile::validate(int samples) const
{
    if (!field)
        throw std::invalid_argument("spin profile: missing field");
    if (!(horizon > 0.0) || !(tolerance > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("spin profile: horizon, tolerance and scale must be positive");
    for (const Vector3 *a : {&field_minus, &field_plus})
        if (std::hypot((*a)[0], (*a)[1]) > 0.0 || (*a)[2] == 0.0)
            throw DomainError("spin profile: asymptotic field must lie on the 3-axis");
    if ((field(center - horizon) - field_minus).norm() > tolerance ||
        (field(center + horizon) - field_plus).norm() > tolerance)
        throw DomainError("spin profile: field misses its asymptotes at the horizon");
    for (double t : sample_grid(center, horizon, samples)) {
        const Vector3 b = field(t);
        if (!b.allFinite())
            throw DomainError("spin profile: non-finite field at t = " + std::to_string(t));
        if (!(b.norm() > 0.0))
            throw DomainError("spin profile: field vanishes (level crossing) at t = " +
                              std::to_string(t));
    }
}

void BarrierProfile::validate(int samples) const
{
    if (!potential)
        throw std::invalid_argument("barrier profile: missing potential");
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("barrier profile: k must be positive");
    if (!(horizon > 0.0) || !(tolerance > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("barrier profile: horizon, tolerance and scale must be positive");
    if (std::abs(potential(center - horizon) - u_minus) > tolerance ||
        std::abs(potential(center + horizon) - u_plus) > tolerance)
        throw DomainError("barrier profile: potential misses its asymptotes at the horizon");
    for (double x : sample_grid(center, horizon, samples)) {
        const double u = potential(x);
        if (!std::isfinite(u))
            throw DomainError("barrier profile: non-finite potential at x = " + std::to_string(x));
        if (!(k * k - u > 0.0))
            throw DomainError("barrier profile: k^2 - U <= 0 (under-barrier) at x = " +
                              std::to_string(x));
    }
    for (double u : {u_minus, u_plus})
        if (!(k * k - u > 0.0))
            throw DomainError("barrier profile: asymptote is under-barrier");
}

double BarrierProfile::momentum(double x) const
{
    const double p2 = k * k - potential(x);
    if (!(p2 > 0.0))
        throw DomainError("p^2 <= 0 at x = " + std::to_string(x));
    return std::sqrt(p2);
}

double BarrierProfile::potential_prime(double x, double fd_step) const
{
    if (potential_derivative)
        return (*potential_derivative)(x);
    return derivative(potential, x, fd_step * scale);
}

double BarrierProfile::potential_second(double x, double fd_step) const
{
    if (potential_second_derivative)
        return (*potential_second_derivative)(x);
    if (potential_derivative)
        return derivative(*potential_derivative, x, fd_step * scale);
    return second_derivative(potential, x, fd_step * scale);
}

DrivingProfile to_driving_profile(const SpinFieldProfile &sp)
{
    sp.validate();
    const Signature sig = Signature::Compact;
    FieldFn field = sp.field;
    auto gen = [field, sig](double t) { return AlgebraElement(sig, -2.0 * field(t)); };
    const AlgebraElement bm(sig, -2.0 * sp.field_minus);
    const AlgebraElement bp(sig, -2.0 * sp.field_plus);
    const double tol = 2.0 * std::sqrt(2.0) * sp.tolerance * (1.0 + 1e-9);

    std::optional<AlgebraElement> plus_frame;
    if (sp.field_minus[2] * sp.field_plus[2] < 0.0) {
        const Eigen::Vector2d d = exit_direction(sp);
        plus_frame = AlgebraElement(sig, kPi * d[1], -kPi * d[0], 0.0);
    }
    return DrivingProfile::make(sig, gen, bm, bp, sp.horizon, tol, sp.center, sp.scale,
                                plus_frame);
}

DrivingProfile to_driving_profile(const BarrierProfile &bp)
{
    bp.validate();
    const Signature sig = Signature::NonCompact;
    const double k = bp.k;
    auto pot = bp.potential;
    auto gen = [pot, k, sig](double x) {
        const double u = pot(x);
        return AlgebraElement(sig, 0.0, u / k, -2.0 * k + u / k);
    };
    const AlgebraElement bm(sig, 0.0, bp.u_minus / k, -2.0 * k + bp.u_minus / k);
    const AlgebraElement bpl(sig, 0.0, bp.u_plus / k, -2.0 * k + bp.u_plus / k);
    const double tol = 2.0 * bp.tolerance / k * (1.0 + 1e-9);
    return DrivingProfile::make(sig, gen, bm, bpl, bp.horizon, tol, bp.center, bp.scale);
}

AlgebraElement frame_velocity(const DrivingProfile &profile, double t, double fd_step)
{
    const double h = fd_step * profile.scale;
    const Matrix2 vdot = derivative([&](double s) { return Matrix2(frame_at(profile, s).m); }, t, h);
    const GroupElement v = frame_at(profile, t);
    return from_matrix(v.inverse().m * vdot, profile.sig);
}

double adiabaticity_ratio(const DrivingProfile &profile, const AdiabaticOptions &opts)
{
    double worst = 0.0;
    for (double t : sample_grid(profile.center, profile.horizon, opts.diagnostic_samples)) {
        const double beta_norm = std::sqrt(2.0) * std::abs(beta3(profile, t));
        const double r = algebra_norm(frame_velocity(profile, t, opts.fd_step)) / beta_norm;
        if (!std::isfinite(r))
            throw DomainError("adiabaticity ratio is not finite at t = " + std::to_string(t));
        worst = std::max(worst, r);
    }
    return worst;
}

GammaResult gamma_element(const DrivingProfile &profile, double t_ref, const QuadratureSpec &ctrl,
                          const AdiabaticOptions &opts)
{
    ctrl.validate();
    const Signature sig = profile.sig;
    auto envelope = [&](double t) { return algebra_norm(frame_velocity(profile, t, opts.fd_step)); };
    // The finite-difference envelope cannot resolve values below its roundoff.
    QuadratureSpec probe = ctrl;
    probe.truncation_threshold =
        std::max(ctrl.truncation_threshold,
                 1e3 * std::numeric_limits<double>::epsilon() / (opts.fd_step * profile.scale));
    const TruncationWindow w =
        find_truncation_window(envelope, probe, window_options(profile.center, profile.scale));

    const double lo = std::min({w.lower, profile.center - profile.horizon, t_ref});
    const double hi = std::max({w.upper, profile.center + profile.horizon, t_ref});
    const PhaseTable phi([&](double t) { return beta3(profile, t); }, lo, hi, t_ref, ctrl,
                         phase_nodes(lo, hi, profile.scale, opts));
    const AlgebraElement j3 = AlgebraElement::basis(sig, 3);

    auto integrand = [&](double t) -> Vector3 {
        const GroupElement h0_inv = exp_map(-phi(t) * j3);
        return adjoint_deficit(h0_inv, frame_velocity(profile, t, opts.fd_step)).c;
    };
    QuadratureSpec s = ctrl;
    s.abs_tol = std::max(ctrl.abs_tol,
                         fd_noise_floor(w.upper - w.lower, profile.scale, opts.fd_step, 1));
    s.initial_intervals = std::max(
        ctrl.initial_intervals,
        std::min(ctrl.max_subdivisions,
                 static_cast<int>(std::ceil((w.upper - w.lower) / profile.scale))));
    const auto q = integrate_adaptive_generic(integrand, w.lower, w.upper, s);
    if (!q.converged)
        throw ConvergenceError("gamma_element: quadrature did not converge (error " +
                               std::to_string(q.error_estimate) + ")");

    GammaResult r;
    r.gamma = AlgebraElement(sig, q.value) + (profile.frame_plus.generator -
                                              profile.frame_minus.generator);
    r.error_estimate = q.error_estimate + w.tail_bound;
    r.truncated_at = {w.lower, w.upper};
    return r;
}

double leading_order_probability(const AlgebraElement &gamma, const ProjectorPair &proj)
{
    if (!gamma.is_finite())
        throw DomainError("leading_order_probability: non-finite gamma");
    const ProjectorPair p = ProjectorPair::from_matrices(proj.plus, proj.minus);
    const Matrix2 g = to_matrix(gamma);
    return (p.plus * g * p.minus * g.adjoint()).trace().real();
}

TransitionResult generic_transition(const DrivingProfile &profile, double t_ref,
                                    const QuadratureSpec &ctrl, const AdiabaticOptions &opts)
{
    const GammaResult g = gamma_element(profile, t_ref, ctrl, opts);
    TransitionResult r;
    r.amplitude = to_matrix(g.gamma)(0, 1);
    r.probability = leading_order_probability(g.gamma, ProjectorPair::cartan());
    r.error_estimate = 2.0 * std::abs(r.amplitude) * g.error_estimate;
    r.adiabaticity_ratio = adiabaticity_ratio(profile, opts);
    r.valid = r.adiabaticity_ratio <= opts.validity_threshold;
    return r;
}

TransitionResult spin_flip_amplitude(const SpinFieldProfile &sp, const QuadratureSpec &ctrl,
                                     const AdiabaticOptions &opts)
{
    sp.validate(opts.diagnostic_samples);
    ctrl.validate();
    for (double t : sample_grid(sp.center, sp.horizon, opts.diagnostic_samples)) {
        const Vector3 b = sp.field(t);
        if (std::abs(b[1]) > 1e-12 * b.norm())
            throw DomainError("spin_flip_amplitude: field leaves the 1-3 plane at t = " +
                              std::to_string(t));
    }

    auto theta_dot = [&](double t) {
        const Vector3 b = sp.field(t);
        const Vector3 db = field_rate(sp, t);
        const double den = b[0] * b[0] + b[2] * b[2];
        return -(db[0] * b[2] - b[0] * db[2]) / den;
    };
    auto magnitude = [&](double t) { return sp.field(t).norm(); };
    const QuadratureResult q =
        phase_integral(theta_dot, magnitude, 2.0, sp.center, sp.center, sp.scale, sp.horizon, ctrl,
                       opts, sp.field_derivative ? 0 : 1);
    check_converged(q, "spin_flip_amplitude");

    TransitionResult r;
    r.amplitude = 0.5 * q.value;
    r.probability = std::norm(r.amplitude);
    r.error_estimate = 0.5 * q.error_estimate * (2.0 * std::abs(r.amplitude) + 0.5 * q.error_estimate);
    r.adiabaticity_ratio = adiabaticity_ratio(to_driving_profile(sp), opts);
    r.valid = r.adiabaticity_ratio <= opts.validity_threshold;
    return r;
}

std::function<double(double)> spin_phase_general(std::function<double(double)> theta,
                                                 std::function<double(double)> phi,
                                                 std::function<double(double)> magnitude,
                                                 double fd_step)
{
    return [theta = std::move(theta), phi = std::move(phi), magnitude = std::move(magnitude),
            fd_step](double t) {
        const double b = magnitude(t);
        if (!(b > 0.0))
            throw DomainError("spin_phase_general: magnitude must be positive");
        const double th = theta(t);
        const double phi_dot = derivative(phi, t, fd_step);
        const double s = std::sin(th), c = std::cos(th) - phi_dot / b;
        return std::sqrt(s * s + c * c) * b;
    };
}

double geodesic_curvature(const PathOnSphere &path, double s, double min_speed)
{
    const Vector3 n = path.n(s);
    if (std::abs(n.norm() - 1.0) > 1e-10)
        throw DomainError("geodesic_curvature: |n| deviates from 1 at s = " + std::to_string(s));
    const Vector3 d1 = derivative(path.n, s, path.fd_step, path.fd_order);
    const Vector3 d2 = second_derivative(path.n, s, path.fd_step, path.fd_order);
    const double speed2 = d1.squaredNorm();
    if (!(std::sqrt(speed2) >= min_speed))
        throw DomainError("geodesic_curvature: path is stationary at s = " + std::to_string(s));
    return d2.dot(d1.cross(n)) / speed2;
}

double first_order_fourier_spinflip(const PathOnSphere &path, double T, const QuadratureSpec &ctrl,
                                    const TruncationOptions &window)
{
    if (!(T > 0.0))
        throw std::invalid_argument("first_order_fourier_spinflip: T must be positive");
    ctrl.validate();
    auto speed = [&](double s) {
        return derivative(path.n, s, path.fd_step, path.fd_order).norm();
    };
    const double s0 = window.center;
    if (max_over_grid(speed, s0, window.scale * 20.0, 401) == 0.0)
        return 0.0;

    const TruncationWindow w = find_truncation_window(speed, ctrl, window);
    // The curvature is irrelevant where the envelope has died out.
    auto kappa = [&](double s) {
        if (speed(s) < 1e-9)
            return 0.0;
        return geodesic_curvature(path, s, 0.0);
    };
    const double lo = std::min(w.lower, 0.0), hi = std::max(w.upper, 0.0);
    const int nodes = static_cast<int>(std::clamp(128.0 * (hi - lo) / window.scale, 1025.0, 65537.0));
    const PhaseTable smooth(kappa, lo, hi, 0.0, ctrl, nodes);

    // A path that stops and turns back has a cusp whose curvature is a delta
    // of weight pi; without it |n'| would stand in for a signed speed.
    auto tangent = [&](double s) -> Vector3 {
        const Vector3 d = derivative(path.n, s, path.fd_step, path.fd_order);
        const double v = d.norm();
        return v > 1e-12 ? Vector3(d / v) : Vector3::Zero();
    };
    std::vector<double> cusps;
    {
        const double h = (hi - lo) / (nodes - 1);
        Vector3 prev = tangent(lo);
        for (int i = 1; i < nodes; ++i) {
            const double s = lo + i * h;
            const Vector3 cur = tangent(s);
            if (prev.dot(cur) < -0.5) {
                double a = s - h, b = s;
                for (int it = 0; it < 60; ++it) {
                    const double m = 0.5 * (a + b);
                    (tangent(m).dot(prev) > 0.0 ? a : b) = m;
                }
                cusps.push_back(0.5 * (a + b));
            }
            if (cur.squaredNorm() > 0.0)
                prev = cur;
        }
    }
    auto sigma = [&](double s) {
        double jump = 0.0;
        for (double c : cusps)
            jump += c < 0.0 ? (s < c ? -kPi : 0.0) : (s > c ? kPi : 0.0);
        return smooth(s) + jump;
    };

    TruncationOptions fixed = window;
    fixed.lower = w.lower;
    fixed.upper = w.upper;
    const QuadratureResult q = integrate_improper_oscillatory(
        [&](double s) { return 0.5 * speed(s); },
        [&](double s) { return -2.0 * T * s - sigma(s) + 0.5 * kPi; }, ctrl, fixed);
    check_converged(q, "first_order_fourier_spinflip");
    return std::norm(q.value);
}

TransitionResult reflection_amplitude(const BarrierProfile &bp, const QuadratureSpec &ctrl,
                                      const AdiabaticOptions &opts)
{
    bp.validate(opts.diagnostic_samples);
    ctrl.validate();
    const double k2 = bp.k * bp.k;
    auto env = [&](double x) { return bp.potential_prime(x, opts.fd_step) / (k2 - bp.potential(x)); };
    auto p = [&](double x) { return bp.momentum(x); };
    const QuadratureResult q =
        phase_integral(env, p, 2.0, bp.center, bp.center, bp.scale, bp.horizon, ctrl, opts,
                       bp.potential_derivative ? 0 : 1, 1.0 / k2);
    check_converged(q, "reflection_amplitude");

    TransitionResult r;
    r.amplitude = 0.25 * q.value;
    r.probability = std::norm(r.amplitude);
    r.error_estimate = 0.25 * q.error_estimate * (2.0 * std::abs(r.amplitude) + 0.25 * q.error_estimate);
    // |dp/dx| / p^2 = |U'| / (2 p^3)
    r.adiabaticity_ratio = max_over_grid(
        [&](double x) {
            const double pp = bp.momentum(x);
            return bp.potential_prime(x, opts.fd_step) / (2.0 * pp * pp * pp);
        },
        bp.center, bp.horizon, opts.diagnostic_samples);
    r.valid = r.adiabaticity_ratio <= opts.validity_threshold;
    return r;
}

TransitionResult maitra_heller_amplitude(const BarrierProfile &bp, const QuadratureSpec &ctrl,
                                         const AdiabaticOptions &opts)
{
    bp.validate(opts.diagnostic_samples);
    ctrl.validate();
    auto u_eff = [&](double x) {
        const double p = bp.momentum(x);
        const double dp = -bp.potential_prime(x, opts.fd_step) / (2.0 * p);
        const double ddp = (-bp.potential_second(x, opts.fd_step) - 2.0 * dp * dp) / (2.0 * p);
        return -0.75 * dp * dp / (p * p) + ddp / (2.0 * p);
    };
    auto env = [&](double x) { return u_eff(x) / bp.momentum(x); };
    auto p = [&](double x) { return bp.momentum(x); };
    const int order = bp.potential_second_derivative ? 0 : (bp.potential_derivative ? 1 : 2);
    const QuadratureResult q = phase_integral(env, p, 2.0, bp.center, bp.center, bp.scale,
                                              bp.horizon, ctrl, opts, order, 1.0 / (bp.k * bp.k * bp.k));
    check_converged(q, "maitra_heller_amplitude");

    TransitionResult r;
    r.amplitude = q.value / std::complex<double>(0.0, 2.0);
    r.probability = std::norm(r.amplitude);
    r.error_estimate = 0.5 * q.error_estimate * (2.0 * std::abs(r.amplitude) + 0.5 * q.error_estimate);
    r.adiabaticity_ratio =
        max_over_grid(u_eff, bp.center, bp.horizon, opts.diagnostic_samples) / (bp.k * bp.k);
    r.valid = r.adiabaticity_ratio <= opts.validity_threshold;
    return r;
}

TransitionResult born_amplitude(const BarrierProfile &bp, const QuadratureSpec &ctrl,
                                const AdiabaticOptions &opts)
{
    bp.validate(opts.diagnostic_samples);
    ctrl.validate();
    const double k = bp.k;
    TruncationOptions wo = window_options(bp.center, bp.scale);
    const QuadratureResult q = integrate_improper_oscillatory(
        [&](double x) { return bp.potential_prime(x, opts.fd_step); },
        [&](double x) { return 2.0 * k * (x - bp.center); }, ctrl, wo);
    check_converged(q, "born_amplitude");

    TransitionResult r;
    r.amplitude = q.value / (4.0 * k * k);
    r.probability = std::norm(r.amplitude);
    const double e = q.error_estimate / (4.0 * k * k);
    r.error_estimate = e * (2.0 * std::abs(r.amplitude) + e);
    r.adiabaticity_ratio =
        max_over_grid(bp.potential, bp.center, bp.horizon, opts.diagnostic_samples) / (k * k);
    r.valid = r.adiabaticity_ratio <= opts.validity_threshold;
    return r;
}

WkbjWavefunction::WkbjWavefunction(const BarrierProfile &bp, std::complex<double> c1,
                                   std::complex<double> c2, double x0, const QuadratureSpec &spec,
                                   const AdiabaticOptions &opts)
    : bp_(bp), c1_(c1), c2_(c2), fd_step_(opts.fd_step)
{
    bp_.validate(opts.diagnostic_samples);
    const double lo = std::min(bp.center - bp.horizon, x0);
    const double hi = std::max(bp.center + bp.horizon, x0);
    phase_ = PhaseTable([this](double x) { return bp_.momentum(x); }, lo, hi, x0, spec,
                        phase_nodes(lo, hi, bp.scale, opts));
}

std::complex<double> WkbjWavefunction::operator()(double x) const
{
    const double p = bp_.momentum(x);
    const double amp = std::sqrt(bp_.k / p);
    const std::complex<double> e = std::polar(1.0, phase_(x));
    return amp * (c1_ * e + c2_ * std::conj(e));
}

std::complex<double> WkbjWavefunction::derivative(double x) const
{
    const double p = bp_.momentum(x);
    const double amp = std::sqrt(bp_.k / p);
    const double dp = -bp_.potential_prime(x, fd_step_) / (2.0 * p);
    const std::complex<double> e = std::polar(1.0, phase_(x));
    const std::complex<double> i(0.0, 1.0);
    const double decay = -dp / (2.0 * p);
    return amp * ((decay + i * p) * c1_ * e + (decay - i * p) * c2_ * std::conj(e));
}

WkbjWavefunction wkbj_wavefunction(const BarrierProfile &bp, std::complex<double> c1,
                                   std::complex<double> c2, double x0)
{
    return WkbjWavefunction(bp, c1, c2, x0);
}

} // namespace natrans
