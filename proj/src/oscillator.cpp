#include "natrans/oscillator.hpp"

#include <cmath>
#include <memory>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "natrans/legendre.hpp"

namespace natrans {

void OscillatorSpec::validate(int samples) const
{
    if (!omega)
        throw std::invalid_argument("oscillator: missing frequency profile");
    if (!(omega_minus > 0.0) || !(omega_plus > 0.0))
        throw DomainError("oscillator: asymptotic frequencies must be positive");
    if (!(horizon > 0.0) || !(tolerance > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("oscillator: horizon, tolerance and scale must be positive");
    if (std::abs(omega(center - horizon) - omega_minus) > tolerance ||
        std::abs(omega(center + horizon) - omega_plus) > tolerance)
        throw DomainError("oscillator: frequency misses its asymptotes at the horizon");
    const int n = std::max(samples, 2);
    for (int i = 0; i < n; ++i) {
        const double t = center - horizon + 2.0 * horizon * i / (n - 1);
        const double w = omega(t);
        if (!(w > 0.0) || !std::isfinite(w))
            throw DomainError("oscillator: Omega <= 0 at t = " + std::to_string(t));
        if (mass) {
            const double m = (*mass)(t);
            if (!(m > 0.0) || !std::isfinite(m))
                throw DomainError("oscillator: mass <= 0 at t = " + std::to_string(t));
        }
    }
}

OscillatorSpec reduce_mass(const OscillatorSpec &spec, const QuadratureSpec &ctrl)
{
    spec.validate();
    if (!spec.mass)
        return spec;

    const auto mass = *spec.mass;
    const auto omega = spec.omega;
    const double lo = spec.center - spec.horizon, hi = spec.center + spec.horizon;
    const int nodes = std::clamp(static_cast<int>(256.0 * (hi - lo) / spec.scale), 1025, 65537);
    auto tprime = std::make_shared<const PhaseTable>([mass](double t) { return 1.0 / mass(t); },
                                                     lo, hi, spec.center, ctrl, nodes);

    // t(t'): safeguarded Newton on the monotone map t -> t'.
    auto invert = [tprime, mass, lo, hi](double tp) {
        const double a = (*tprime)(lo), b = (*tprime)(hi);
        if (tp <= a)
            return lo + (tp - a) * mass(lo);
        if (tp >= b)
            return hi + (tp - b) * mass(hi);
        std::uintmax_t iters = 200;
        const double guess = lo + (hi - lo) * (tp - a) / (b - a);
        return boost::math::tools::newton_raphson_iterate(
            [&](double t) {
                return std::make_pair((*tprime)(t) - tp, tprime->rate_at(t));
            },
            guess, lo, hi, 52, iters);
    };

    OscillatorSpec out;
    out.omega = [invert, mass, omega](double tp) {
        const double t = invert(tp);
        return mass(t) * omega(t);
    };
    const double m_minus = mass(lo), m_plus = mass(hi);
    out.omega_minus = m_minus * spec.omega_minus;
    out.omega_plus = m_plus * spec.omega_plus;
    out.center = 0.0;
    out.horizon = std::max(std::abs((*tprime)(lo)), std::abs((*tprime)(hi)));
    out.scale = spec.scale / mass(spec.center);
    const double dev = std::max(std::abs(out.omega(-out.horizon) - out.omega_minus),
                                std::abs(out.omega(out.horizon) - out.omega_plus));
    out.tolerance = std::max(dev, spec.tolerance * std::max(m_minus, m_plus)) * (1.0 + 1e-9) + 1e-300;
    return out;
}

BarrierProfile oscillator_barrier(const OscillatorSpec &spec)
{
    spec.validate();
    if (spec.mass)
        throw std::invalid_argument("oscillator_barrier: reduce the mass first");
    const double k = spec.omega_minus;
    const auto omega = spec.omega;
    BarrierProfile bp;
    bp.potential = [omega, k](double t) {
        const double w = omega(t);
        return k * k - w * w;
    };
    // Without an analytic Omega' the barrier differences U itself.
    if (spec.omega_derivative)
        bp.potential_derivative = [omega, domega = *spec.omega_derivative](double t) {
            return -2.0 * omega(t) * domega(t);
        };
    bp.k = k;
    bp.u_minus = 0.0;
    bp.u_plus = k * k - spec.omega_plus * spec.omega_plus;
    bp.horizon = spec.horizon;
    bp.center = spec.center;
    bp.scale = spec.scale;
    const double wmax = std::max(spec.omega_minus, spec.omega_plus);
    bp.tolerance = (2.0 * wmax + spec.tolerance) * spec.tolerance * (1.0 + 1e-9);
    return bp;
}

TransitionResult theta_coefficient(const OscillatorSpec &spec, const QuadratureSpec &ctrl,
                                   const AdiabaticOptions &opts)
{
    const OscillatorSpec reduced = spec.mass ? reduce_mass(spec, ctrl) : spec;
    return reflection_amplitude(oscillator_barrier(reduced), ctrl, opts);
}

TransitionMatrixSlice perelomov_popov_matrix(double theta, int n_max, int level_cap)
{
    if (!(theta >= 0.0) || !(theta < 1.0))
        throw DomainError("perelomov_popov_matrix: theta must lie in [0, 1)");
    if (n_max < 0)
        throw std::invalid_argument("perelomov_popov_matrix: n_max must be >= 0");
    if (n_max > level_cap)
        throw std::invalid_argument("perelomov_popov_matrix: n_max exceeds the level cap " +
                                    std::to_string(level_cap));

    TransitionMatrixSlice w;
    w.theta = theta;
    w.n_max = n_max;
    w.entries = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    const double x = std::sqrt(1.0 - theta);
    for (int m = 0; m <= n_max; ++m) {
        for (int n = m; n <= n_max; n += 2) {
            const int nu = (m + n) / 2, mu = (n - m) / 2;
            const double ratio = std::exp(std::lgamma(m + 1.0) - std::lgamma(n + 1.0));
            const double p = assoc_legendre(mu, nu, x);
            const double v = ratio * (1.0 - theta) * p * p;
            w.entries(m, n) = v;
            w.entries(n, m) = v;
        }
    }
    return w;
}

TransitionMatrixSlice excitation_pipeline(const OscillatorSpec &spec, int n_max,
                                          const QuadratureSpec &ctrl, const AdiabaticOptions &opts,
                                          int level_cap)
{
    const TransitionResult t = theta_coefficient(spec, ctrl, opts);
    if (!(t.probability < 1.0))
        throw DomainError("excitation_pipeline: reflection coefficient theta >= 1");
    TransitionMatrixSlice w = perelomov_popov_matrix(t.probability, n_max, level_cap);
    w.adiabaticity_ratio = t.adiabaticity_ratio;
    w.valid = t.valid;
    return w;
}

OscillatorSpec logistic_oscillator(const LogisticBarrierParams &p, double k)
{
    const BarrierProfile bp = logistic_profile(p, k);
    OscillatorSpec s;
    const auto u = bp.potential;
    const auto du = *bp.potential_derivative;
    s.omega = [u, k](double t) { return std::sqrt(k * k - u(t)); };
    s.omega_derivative = [u, du, k](double t) { return -du(t) / (2.0 * std::sqrt(k * k - u(t))); };
    s.omega_minus = k;
    s.omega_plus = k * std::sqrt(1.0 - p.beta);
    s.horizon = bp.horizon;
    s.center = bp.center;
    s.scale = bp.scale;
    s.tolerance = bp.tolerance / s.omega_plus;
    return s;
}

} // namespace natrans
