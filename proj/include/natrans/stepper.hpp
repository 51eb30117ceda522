#pragma once

#include <functional>

#include "natrans/lie.hpp"
#include "natrans/quadrature.hpp"

namespace natrans {

struct PropagationResult {
    GroupElement g;
    int steps = 0;
    int rejected = 0;
    /// Sum of the accepted local error estimates (max-entry norm).
    double error_estimate = 0.0;
    /// Largest group-constraint violation seen along the trajectory.
    double max_constraint_violation = 0.0;
};

enum class StepperScheme {
    /// G <- exp(h b(t + h/2)) G; second order.
    ExponentialMidpoint,
    /// G <- exp(h/2 (b1 + b2) + sqrt(3) h^2/12 [b2, b1]) G with b1, b2 at
    /// the two Gauss nodes; fourth order.
    Magnus4,
};

const char *to_string(StepperScheme s);

/// Integrates dG/dt = b(t) G, G(t0) = I, composing exponentials of algebra
/// elements. Step doubling supplies the local error estimate; each
/// accepted step applies the two half steps. Every factor is an exp_map
/// output and the product is restored to canonical form after each step,
/// so G stays on the group manifold whatever the step count.
///
/// ctrl.rel_tol (scaled by |G|) and ctrl.abs_tol bound the global error,
/// distributed per unit time; ctrl.max_subdivisions caps the step count.
/// Throws ConvergenceError on step underflow or an exhausted step budget.
PropagationResult ode_propagate(const std::function<AlgebraElement(double)> &b, double t0,
                                double t1, const QuadratureSpec &ctrl,
                                double initial_step = 0.0,
                                StepperScheme scheme = StepperScheme::ExponentialMidpoint);

} // namespace natrans
