#pragma once

// Central finite differences used wherever a model does not supply
// analytic derivatives.

#include <stdexcept>
#include <type_traits>

namespace natrans {

/// First derivative, central, order 2 or 4 in the step h.
template <class F, class R = std::decay_t<std::invoke_result_t<const F &, double>>>
R derivative(const F &f, double x, double h, int order = 4)
{
    if (order == 2)
        return R((f(x + h) - f(x - h)) * (0.5 / h));
    if (order != 4)
        throw std::invalid_argument("finite difference order must be 2 or 4");
    return R((f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) * (1.0 / (12.0 * h)));
}

/// Second derivative, central, order 2 or 4 in the step h.
template <class F, class R = std::decay_t<std::invoke_result_t<const F &, double>>>
R second_derivative(const F &f, double x, double h, int order = 4)
{
    if (order == 2)
        return R((f(x + h) - 2.0 * f(x) + f(x - h)) * (1.0 / (h * h)));
    if (order != 4)
        throw std::invalid_argument("finite difference order must be 2 or 4");
    return R((-f(x - 2 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2 * h)) *
             (1.0 / (12.0 * h * h)));
}

} // namespace natrans
