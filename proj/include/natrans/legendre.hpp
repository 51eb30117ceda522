#pragma once

namespace natrans {

/// Associated Legendre function P^mu_nu(x) on 0 <= x <= 1 with the
/// Condon-Shortley phase. Upward recurrence in degree from the closed-form
/// seed P^mu_mu. Returns 0 for mu > nu; throws std::domain_error for x
/// outside [0, 1] and std::invalid_argument for negative indices.
double assoc_legendre(int mu, int nu, double x);

} // namespace natrans
