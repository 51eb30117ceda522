#include "natrans/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "natrans/legendre.hpp"
#include "natrans/models.hpp"
#include "natrans/oscillator.hpp"

namespace natrans {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string sci(const char *label, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.3e", label, v);
    return buf;
}

AlgebraElement random_element(std::mt19937_64 &rng, Signature sig, double scale = 2.0)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    return {sig, u(rng), u(rng), u(rng)};
}

// Elliptic su(1,1) elements need |c3| > |(c1, c2)|.
AlgebraElement random_elliptic(std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double c1 = u(rng), c2 = u(rng);
    const double c3 = (std::hypot(c1, c2) + 0.1 + std::abs(u(rng))) * (u(rng) < 0 ? -1.0 : 1.0);
    return {Signature::NonCompact, c1, c2, c3};
}

CheckResult check(const std::string &name, double worst, double limit)
{
    return {name, worst <= limit, sci("worst", worst) + " " + sci("limit", limit)};
}

} // namespace

std::vector<CheckResult> run_self_checks()
{
    std::vector<CheckResult> out;
    std::mt19937_64 rng(20240611);
    const Signature sigs[] = {Signature::Compact, Signature::NonCompact};

    auto guarded = [&](const std::string &name, const std::function<CheckResult()> &f) {
        try {
            out.push_back(f());
        } catch (const std::exception &e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };

    guarded("jacobi-identity", [&] {
        double worst = 0.0;
        for (Signature s : sigs)
            for (int i = 0; i < 100; ++i) {
                const auto a = random_element(rng, s), b = random_element(rng, s),
                           c = random_element(rng, s);
                const auto r = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                               commutator(c, commutator(a, b));
                worst = std::max(worst, r.c.cwiseAbs().maxCoeff());
            }
        return check("jacobi-identity", worst, 1e-12);
    });

    guarded("exp-inverse", [&] {
        double worst = 0.0;
        for (Signature s : sigs)
            for (int i = 0; i < 100; ++i) {
                const auto a = random_element(rng, s);
                worst = std::max(worst, max_abs((exp_map(a) * exp_map(-a)).m - Matrix2::Identity()));
            }
        return check("exp-inverse", worst, 1e-12);
    });

    guarded("cartan-round-trip", [&] {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            for (const auto &b : {random_element(rng, Signature::Compact), random_elliptic(rng)}) {
                const CartanFrame f = cartan_decompose(b);
                worst = std::max(worst, (conjugate(f.v, f.beta).c - b.c).norm());
            }
        }
        return check("cartan-round-trip", worst, 1e-10);
    });

    guarded("norm-conjugation-invariance", [&] {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto y = random_element(rng, Signature::Compact);
            const auto g = exp_map(random_element(rng, Signature::Compact));
            worst = std::max(worst, std::abs(algebra_norm(conjugate(g, y)) - algebra_norm(y)));
        }
        return check("norm-conjugation-invariance", worst, 1e-10);
    });

    guarded("group-drift", [&] {
        double worst = 0.0;
        for (Signature s : sigs) {
            GroupElement g = GroupElement::identity(s);
            for (int i = 0; i < 10000; ++i)
                g = exp_map(random_element(rng, s, 0.05)) * g;
            worst = std::max(worst, g.constraint_violation() / std::max(1.0, max_abs(g.m)));
        }
        return check("group-drift", worst, 1e-10);
    });

    guarded("sech-fourier-pair", [&] {
        double worst = 0.0;
        for (double w : {0.5, 1.0, 3.0}) {
            const auto q = integrate_improper_oscillatory([](double t) { return 1.0 / std::cosh(t); },
                                                          [w](double t) { return w * t; }, {});
            worst = std::max(worst, std::abs(q.value - kPi / std::cosh(0.5 * kPi * w)));
        }
        return check("sech-fourier-pair", worst, 1e-8);
    });

    guarded("legendre-recurrence", [&] {
        double worst = 0.0;
        std::uniform_real_distribution<double> ux(0.0, 1.0);
        std::uniform_int_distribution<int> un(2, 30);
        for (int i = 0; i < 100; ++i) {
            const int nu = un(rng);
            const int mu = std::uniform_int_distribution<int>(0, nu - 2)(rng);
            const double x = ux(rng);
            const double r = (nu - mu) * assoc_legendre(mu, nu, x) -
                             (2 * nu - 1) * x * assoc_legendre(mu, nu - 1, x) +
                             (nu + mu - 1) * assoc_legendre(mu, nu - 2, x);
            worst = std::max(worst, std::abs(r) / std::max(1.0, std::abs(assoc_legendre(mu, nu, x))));
        }
        return check("legendre-recurrence", worst, 1e-12);
    });

    guarded("trace-formula", [&] {
        double worst = 0.0;
        const ProjectorPair proj = ProjectorPair::cartan();
        for (int i = 0; i < 100; ++i) {
            const auto s = exp_map(random_element(rng, Signature::Compact, 4.0));
            worst = std::max(worst, std::abs(transition_probability(s, proj).probability -
                                             std::norm(s.m(0, 1))));
        }
        return check("trace-formula", worst, 1e-12);
    });

    guarded("oracle-rosen-zener", [&] {
        const RosenZenerParams p{1.0, 0.5, 1.0};
        const auto o = oracle_transition(to_driving_profile(rosen_zener_profile(p)),
                                         default_oracle_control());
        const double exact = rosen_zener_exact(p);
        CheckResult r = check("oracle-rosen-zener",
                              std::abs(o.result.probability - exact) / exact, 1e-5);
        r.passed = r.passed && o.s.max_constraint_violation < 1e-9;
        return r;
    });

    guarded("gauge-invariance", [&] {
        const auto prof = to_driving_profile(rosen_zener_profile({2.0, 0.5, 1.0}));
        const double w0 = generic_transition(prof, 0.0, {}).probability;
        double worst = 0.0;
        for (double shift : {-5.0, 5.0})
            worst = std::max(worst, std::abs(generic_transition(prof, shift, {}).probability - w0));
        return check("gauge-invariance", worst, 1e-9);
    });

    guarded("spin-route-equivalence", [&] {
        double worst = 0.0;
        for (double b1 : {0.5, 1.5}) {
            const RosenZenerParams p{2.0, b1, 1.0};
            const auto sp = rosen_zener_profile(p);
            const double direct = spin_flip_amplitude(sp, {}).probability;
            worst = std::max(worst,
                             std::abs(std::abs(spin_flip_amplitude(sp, {}).amplitude) -
                                      std::abs(rosen_zener_adiabatic_transformed(p, {}).amplitude)));
            worst = std::max(
                worst, std::abs(generic_transition(to_driving_profile(sp), 0.0, {}).probability - direct));
        }
        return check("spin-route-equivalence", worst, 1e-6);
    });

    guarded("barrier-route-equivalence", [&] {
        double worst = 0.0;
        for (double beta : {0.1, 0.3}) {
            const LogisticBarrierParams p{2.0, beta};
            worst = std::max(worst, std::abs(std::abs(reflection_amplitude(logistic_profile(p), {}).amplitude) -
                                             std::abs(logistic_adiabatic_transformed(p, {}).amplitude)));
        }
        return check("barrier-route-equivalence", worst, 1e-6);
    });

    guarded("born-linearity", [&] {
        BarrierProfile bp = logistic_profile({1.0, 0.01});
        const auto a1 = born_amplitude(bp, {}).amplitude;
        auto u = bp.potential;
        auto du = *bp.potential_derivative;
        bp.potential = [u](double x) { return 2.0 * u(x); };
        bp.potential_derivative = [du](double x) { return 2.0 * du(x); };
        bp.u_plus *= 2.0;
        bp.tolerance *= 2.0;
        const auto a2 = born_amplitude(bp, {}).amplitude;
        return check("born-linearity", std::abs(a2 - 2.0 * a1) / std::abs(a1), 1e-9);
    });

    guarded("perelomov-popov-structure", [&] {
        double worst = (perelomov_popov_matrix(0.0, 40).entries -
                        Eigen::MatrixXd::Identity(41, 41)).cwiseAbs().maxCoeff();
        const auto w = perelomov_popov_matrix(0.3, 40);
        worst = std::max(worst, (w.entries - w.entries.transpose()).cwiseAbs().maxCoeff());
        for (int m = 0; m <= 40; ++m)
            for (int n = 0; n <= 40; ++n) {
                if ((m - n) % 2 != 0)
                    worst = std::max(worst, std::abs(w.entries(m, n)));
                if (w.entries(m, n) < 0.0 || w.entries(m, n) > 1.0)
                    worst = std::max(worst, 1.0);
            }
        return check("perelomov-popov-structure", worst, 1e-12);
    });

    guarded("oscillator-logistic-theta", [&] {
        const LogisticBarrierParams p{2.0, 0.2};
        const double theta = theta_coefficient(logistic_oscillator(p), {}).probability;
        const double exact = logistic_exact(p);
        return check("oscillator-logistic-theta", std::abs(std::sqrt(theta) - exact) / exact, 0.15);
    });

    return out;
}

} // namespace natrans
