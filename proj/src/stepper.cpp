#include "natrans/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace natrans {

namespace {

// Fourth-order Magnus step over [t, t + h]: two Gauss-Legendre nodes and
// one commutator.
GroupElement magnus4(const std::function<AlgebraElement(double)> &b, double t, double h)
{
    constexpr double c = 0.28867513459481288225; // sqrt(3)/6
    const AlgebraElement a1 = b(t + (0.5 - c) * h);
    const AlgebraElement a2 = b(t + (0.5 + c) * h);
    const AlgebraElement omega = (0.5 * h) * (a1 + a2) + (c * 0.5 * h * h) * commutator(a2, a1);
    return exp_map(omega);
}

GroupElement midpoint(const std::function<AlgebraElement(double)> &b, double t, double h)
{
    return exp_map(h * b(t + 0.5 * h));
}

} // namespace

const char *to_string(StepperScheme s)
{
    return s == StepperScheme::ExponentialMidpoint ? "exponential-midpoint" : "magnus4";
}

PropagationResult ode_propagate(const std::function<AlgebraElement(double)> &b, double t0,
                                double t1, const QuadratureSpec &ctrl, double initial_step,
                                StepperScheme scheme)
{
    const bool fourth = scheme == StepperScheme::Magnus4;
    auto step_fn = fourth ? magnus4 : midpoint;
    // Richardson factor 2^p - 1 and controller exponent 1/p for local order p + 1.
    const double richardson = fourth ? 15.0 : 3.0;
    const double expo = fourth ? 0.25 : 0.5;
    ctrl.validate();
    const AlgebraElement b0 = b(t0);
    PropagationResult out;
    out.g = GroupElement::identity(b0.sig);
    if (t0 == t1)
        return out;

    const double span = std::abs(t1 - t0);
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double h = initial_step > 0.0 ? std::min(initial_step, span) : span;
    double t = t0;
    const double h_min = 1e-13 * std::max(span, std::abs(t0) + std::abs(t1));

    while (dir * (t1 - t) > 0.0) {
        const bool last = h >= dir * (t1 - t);
        const double step = last ? dir * (t1 - t) : h;
        const double hs = dir * step;

        const GroupElement full = step_fn(b, t, hs);
        const GroupElement fine = step_fn(b, t + 0.5 * hs, 0.5 * hs) * step_fn(b, t, 0.5 * hs);
        const double err = max_abs(full.m - fine.m) / richardson;

        const double scale = std::max(1.0, max_abs(out.g.m));
        const double tol = std::max(ctrl.abs_tol, ctrl.rel_tol * scale) * step / span;
        if (err <= tol) {
            out.g = (fine * out.g).restored();
            out.error_estimate += err;
            out.max_constraint_violation =
                std::max(out.max_constraint_violation, out.g.constraint_violation());
            ++out.steps;
            if (last)
                break;
            t += hs;
            const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, expo) : 4.0;
            h = step * std::min(4.0, std::max(1.0, grow));
            if (out.steps >= ctrl.max_subdivisions)
                throw ConvergenceError("ode_propagate: step budget of " +
                                       std::to_string(ctrl.max_subdivisions) + " exhausted at t=" +
                                       std::to_string(t));
        } else {
            ++out.rejected;
            h = step * std::max(0.1, 0.9 * std::pow(tol / err, expo));
            if (h < h_min)
                throw ConvergenceError("ode_propagate: step size underflow at t=" +
                                       std::to_string(t));
        }
    }
    return out;
}

} // namespace natrans
