#include "natrans/legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace natrans {

double assoc_legendre(int mu, int nu, double x)
{
    if (mu < 0 || nu < 0)
        throw std::invalid_argument("assoc_legendre: negative order or degree");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("assoc_legendre: argument outside [0, 1]");
    if (mu > nu)
        return 0.0;

    // P^mu_mu = (-1)^mu (2mu-1)!! (1-x^2)^(mu/2)
    double pmm = 1.0;
    if (mu > 0) {
        const double s = std::sqrt((1.0 - x) * (1.0 + x));
        double odd = 1.0;
        for (int i = 1; i <= mu; ++i) {
            pmm *= -odd * s;
            odd += 2.0;
        }
    }
    if (nu == mu)
        return pmm;

    double prev = pmm;
    double cur = x * (2 * mu + 1) * pmm;
    for (int l = mu + 1; l < nu; ++l) {
        const double next = ((2 * l + 1) * x * cur - (l + mu) * prev) / (l - mu + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

} // namespace natrans
