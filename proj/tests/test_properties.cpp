#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "natrans/cli.hpp"
#include "natrans/legendre.hpp"
#include "natrans/models.hpp"
#include "natrans/oscillator.hpp"

using namespace natrans;

namespace {

constexpr int kCases = 100;
constexpr double kPi = 3.14159265358979323846;

std::mt19937_64 rng_for(const char *name)
{
    std::seed_seq seq(name, name + std::char_traits<char>::length(name));
    return std::mt19937_64(seq);
}

double uniform(std::mt19937_64 &rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

AlgebraElement random_element(std::mt19937_64 &rng, Signature sig, double scale = 2.0)
{
    return {sig, uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

AlgebraElement random_elliptic(std::mt19937_64 &rng, Signature sig)
{
    if (sig == Signature::Compact)
        return random_element(rng, sig);
    const double c1 = uniform(rng, -1, 1), c2 = uniform(rng, -1, 1);
    const double mag = std::hypot(c1, c2) + uniform(rng, 0.05, 1.5);
    return {sig, c1, c2, uniform(rng, 0, 1) < 0.5 ? -mag : mag};
}

GroupElement random_group(std::mt19937_64 &rng, Signature sig)
{
    return exp_map(random_element(rng, sig, 1.5)) * exp_map(random_element(rng, sig, 1.5));
}

RosenZenerParams random_rz(std::mt19937_64 &rng)
{
    return {uniform(rng, 1.0, 3.0), uniform(rng, 0.05, 2.95), uniform(rng, 0.3, 3.0)};
}

// Inside the region where the leading-order reflection estimate is trusted.
LogisticBarrierParams random_logistic(std::mt19937_64 &rng)
{
    const double alpha = uniform(rng, 1.0, 3.0);
    const double beta_max = 0.2 * alpha / (1.0 + 0.2 * alpha);
    return {alpha, uniform(rng, 0.02, std::min(beta_max, 0.5))};
}

QuadratureSpec tight_oracle()
{
    return default_oracle_control();
}

// Fixed-step exponential midpoint, independent of the adaptive stepper.
GroupElement fixed_midpoint(const std::function<AlgebraElement(double)> &b, double t0, double t1, int n)
{
    const double h = (t1 - t0) / n;
    GroupElement g = GroupElement::identity(b(t0).sig);
    for (int i = 0; i < n; ++i)
        g = exp_map(h * b(t0 + (i + 0.5) * h)) * g;
    return g;
}

} // namespace

// ---------------------------------------------------------------- lie_core

TEST_CASE("cartan decomposition round trip")
{
    auto rng = rng_for("cartan");
    for (Signature sig : {Signature::Compact, Signature::NonCompact})
        for (int i = 0; i < kCases; ++i) {
            const auto b = random_elliptic(rng, sig);
            const CartanFrame f = cartan_decompose(b);
            CHECK(f.beta.on_cartan_axis());
            CHECK((conjugate(f.v, f.beta).c - b.c).norm() <= 1e-10);
        }
}

TEST_CASE("exp inverse")
{
    auto rng = rng_for("exp");
    for (Signature sig : {Signature::Compact, Signature::NonCompact})
        for (int i = 0; i < kCases; ++i) {
            const auto a = random_element(rng, sig, 3.0);
            CHECK(max_abs((exp_map(a) * exp_map(-a)).m - Matrix2::Identity()) <= 1e-12);
        }
}

TEST_CASE("adjoint deficit is linear")
{
    auto rng = rng_for("deficit");
    for (Signature sig : {Signature::Compact, Signature::NonCompact})
        for (int i = 0; i < kCases; ++i) {
            const auto h = random_group(rng, sig);
            const auto e1 = random_element(rng, sig), e2 = random_element(rng, sig);
            const double a = uniform(rng, -3, 3), b = uniform(rng, -3, 3);
            const auto lhs = adjoint_deficit(h, a * e1 + b * e2);
            const auto rhs = a * adjoint_deficit(h, e1) + b * adjoint_deficit(h, e2);
            const double scale = 1.0 + lhs.c.norm() + rhs.c.norm();
            CHECK((lhs.c - rhs.c).norm() <= 1e-12 * scale);
        }
}

TEST_CASE("norm conjugation invariance")
{
    auto rng = rng_for("norm");
    for (int i = 0; i < kCases; ++i) {
        const auto y = random_element(rng, Signature::Compact);
        const auto g = random_group(rng, Signature::Compact);
        CHECK(std::abs(algebra_norm(conjugate(g, y)) - algebra_norm(y)) <= 1e-10);
    }
    // su(1,1): the trace norm is invariant under the compact Cartan subgroup,
    // the invariant quadratic form under every group element.
    for (int i = 0; i < kCases; ++i) {
        const auto y = random_element(rng, Signature::NonCompact);
        const auto h = exp_map(AlgebraElement(Signature::NonCompact, 0.0, 0.0, uniform(rng, -kPi, kPi)));
        CHECK(std::abs(algebra_norm(conjugate(h, y)) - algebra_norm(y)) <= 1e-10);
        const auto g = random_group(rng, Signature::NonCompact);
        const auto gy = conjugate(g, y);
        CHECK(std::abs(square_scalar(gy) - square_scalar(y)) <= 1e-10 * (1.0 + gy.c.squaredNorm()));
    }
}

TEST_CASE("group constraints survive long products")
{
    auto rng = rng_for("drift");
    for (Signature sig : {Signature::Compact, Signature::NonCompact})
        for (int i = 0; i < kCases; ++i) {
            GroupElement g = GroupElement::identity(sig);
            double worst = 0.0;
            for (int k = 0; k < 10000; ++k) {
                g = exp_map(random_element(rng, sig, 0.02)) * g;
                worst = std::max(worst, g.constraint_violation() / std::max(1.0, max_abs(g.m)));
            }
            CHECK(worst < 1e-10);
        }
}

// ---------------------------------------------------------------- numerics

TEST_CASE("propagation drift over long runs")
{
    auto rng = rng_for("propagate");
    for (Signature sig : {Signature::Compact, Signature::NonCompact})
        for (int i = 0; i < kCases; ++i) {
            const auto a = random_element(rng, sig, 0.3), b = random_element(rng, sig, 0.3);
            const double w = uniform(rng, 0.5, 2.0), phi = uniform(rng, 0, 2 * kPi);
            auto gen = [a, b, w, phi](double t) { return std::cos(w * t + phi) * a + std::sin(w * t) * b; };
            QuadratureSpec q;
            q.rel_tol = 1e-7;
            q.abs_tol = 1e-7;
            q.max_subdivisions = 1'000'000;
            // Chained runs until 1e5 accepted steps have been composed.
            GroupElement g = GroupElement::identity(sig);
            int steps = 0;
            double t = 0.0, worst = 0.0;
            while (steps < 100000) {
                const auto r = ode_propagate(gen, t, t + 20.0, q, 0.01);
                g = r.g * g;
                steps += r.steps;
                t += 20.0;
                worst = std::max({worst, r.max_constraint_violation,
                                  g.constraint_violation() / std::max(1.0, max_abs(g.m))});
            }
            CHECK(worst < 1e-10);
        }
}

TEST_CASE("tighter step control approaches the extrapolated reference")
{
    auto rng = rng_for("richardson");
    for (int i = 0; i < kCases; ++i) {
        const Signature sig = i % 2 ? Signature::NonCompact : Signature::Compact;
        const auto a = random_element(rng, sig, 1.0), b = random_element(rng, sig, 1.0);
        const double w = uniform(rng, 0.5, 2.0);
        auto gen = [a, b, w](double t) { return std::cos(w * t) * a + std::sin(w * t) * b; };
        const double t1 = uniform(rng, 2.0, 6.0);
        const GroupElement coarse = fixed_midpoint(gen, 0.0, t1, 4000);
        const GroupElement fine = fixed_midpoint(gen, 0.0, t1, 8000);
        const Matrix2 reference = fine.m + (fine.m - coarse.m) / 3.0;

        double prev = std::numeric_limits<double>::infinity();
        for (double tol : {1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6}) {
            QuadratureSpec q;
            q.rel_tol = tol;
            q.abs_tol = tol;
            const double dev = max_abs(ode_propagate(gen, 0.0, t1, q).g.m - reference);
            CHECK(dev <= prev);
            prev = dev;
        }
    }
}

TEST_CASE("adaptive quadrature is exact on low-degree polynomials")
{
    auto rng = rng_for("poly");
    for (int i = 0; i < kCases; ++i) {
        const int degree = std::uniform_int_distribution<int>(0, 13)(rng);
        std::vector<double> c(degree + 1);
        for (double &v : c)
            v = uniform(rng, -1, 1);
        const double lo = uniform(rng, -2, 0), hi = uniform(rng, 0.1, 2);
        auto poly = [&c](double x) {
            double s = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it)
                s = s * x + *it;
            return std::complex<double>(s, 0.0);
        };
        double exact = 0.0, magnitude = 0.0;
        for (int k = 0; k <= degree; ++k) {
            const double term = c[k] * (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
            exact += term;
            magnitude += std::abs(c[k]) * (std::pow(std::abs(hi), k + 1) + std::pow(std::abs(lo), k + 1)) / (k + 1);
        }
        const auto r = integrate_adaptive(poly, lo, hi, {});
        CHECK(std::abs(r.value.real() - exact) <= 1e-14 * std::max(1.0, magnitude));
    }
}

TEST_CASE("associated Legendre degree recurrence")
{
    auto rng = rng_for("legendre");
    for (int i = 0; i < kCases; ++i) {
        const int nu = std::uniform_int_distribution<int>(2, 40)(rng);
        const int mu = std::uniform_int_distribution<int>(0, nu - 2)(rng);
        const double x = uniform(rng, 0.0, 1.0);
        const double r = (nu - mu) * assoc_legendre(mu, nu, x) - (2 * nu - 1) * x * assoc_legendre(mu, nu - 1, x) +
                         (nu + mu - 1) * assoc_legendre(mu, nu - 2, x);
        const double scale = std::max({1.0, std::abs((2 * nu - 1) * x * assoc_legendre(mu, nu - 1, x))});
        CHECK(std::abs(r) <= 1e-12 * scale);
    }
}

// ---------------------------------------------------------------- propagator_oracle

TEST_CASE("transition probability is invariant under Cartan gauge changes")
{
    auto rng = rng_for("gauge");
    const ProjectorPair proj = ProjectorPair::cartan();
    for (Signature sig : {Signature::Compact, Signature::NonCompact})
        for (int i = 0; i < kCases; ++i) {
            const GroupElement s = random_group(rng, sig);
            const auto h1 = exp_map(AlgebraElement(sig, 0.0, 0.0, uniform(rng, -10, 10)));
            const auto h2 = exp_map(AlgebraElement(sig, 0.0, 0.0, uniform(rng, -10, 10)));
            const double w0 = transition_probability(s, proj).probability;
            const double w1 = transition_probability(h1 * s * h2, proj).probability;
            CHECK(std::abs(w1 - w0) <= 1e-9 * std::max(1.0, w0));
        }
}

TEST_CASE("oracle on random pulses: unitarity, exact solution and time scale")
{
    auto rng = rng_for("oracle-rz");
    for (int i = 0; i < kCases; ++i) {
        const RosenZenerParams p = random_rz(rng);
        const OracleTransition o = oracle_transition(to_driving_profile(rosen_zener_profile(p)), tight_oracle());
        const Matrix2 &s = o.s.s.m;
        CHECK(max_abs(s * s.adjoint() - Matrix2::Identity()) <= 1e-9);
        const double stay = std::norm(s(0, 0)), flip = std::norm(s(1, 0));
        CHECK(std::abs(stay + flip - 1.0) <= 1e-9);
        CHECK(o.s.max_constraint_violation < 1e-9);

        const double exact = rosen_zener_exact(p);
        CHECK(std::abs(o.result.probability - exact) <= 1e-6);

        RosenZenerParams q = p;
        q.T = uniform(rng, 0.3, 3.0);
        CHECK(rosen_zener_exact(q) == exact);
        const double other =
            oracle_transition(to_driving_profile(rosen_zener_profile(q)), tight_oracle()).result.probability;
        CHECK(std::abs(other - o.result.probability) <= 1e-6);
    }
}

TEST_CASE("oracle on random barriers conserves current")
{
    auto rng = rng_for("oracle-barrier");
    for (int i = 0; i < kCases; ++i) {
        const LogisticBarrierParams p{uniform(rng, 0.3, 3.0), uniform(rng, 0.05, 0.9)};
        const OracleTransition o = oracle_transition(to_driving_profile(logistic_profile(p, uniform(rng, 0.5, 2.0))),
                                                     tight_oracle());
        const Matrix2 &s = o.s.s.m;
        CHECK(std::abs(std::norm(s(0, 0)) - std::norm(s(0, 1)) - 1.0) <= 1e-9);
        CHECK(std::abs(std::abs(s.determinant()) - 1.0) <= 1e-9);
    }
}

TEST_CASE("forward and backward propagation are inverse")
{
    auto rng = rng_for("reversal");
    // Fourth order keeps the step count manageable at this tolerance.
    QuadratureSpec q = tight_oracle();
    q.rel_tol = 1e-11;
    q.abs_tol = 1e-12;
    for (int i = 0; i < kCases; ++i) {
        const bool spin = i % 2 == 0;
        const DrivingProfile prof = spin ? to_driving_profile(rosen_zener_profile(random_rz(rng)))
                                         : to_driving_profile(logistic_profile({uniform(rng, 0.5, 3.0),
                                                                                uniform(rng, 0.05, 0.9)}));
        const double L = uniform(rng, 2.0, 6.0) * prof.scale;
        const auto fwd = evolve(prof, prof.center - L, prof.center + L, q, StepperScheme::Magnus4);
        const auto bwd = evolve(prof, prof.center + L, prof.center - L, q, StepperScheme::Magnus4);
        CHECK(max_abs((bwd.g * fwd.g).m - Matrix2::Identity()) <= 1e-9);
    }
}

// ---------------------------------------------------------------- adiabatic_engine

TEST_CASE("gamma element lies off the Cartan axis")
{
    auto rng = rng_for("gamma");
    for (int i = 0; i < kCases; ++i) {
        const bool spin = i % 2 == 0;
        const DrivingProfile prof = spin ? to_driving_profile(rosen_zener_profile(random_rz(rng)))
                                         : to_driving_profile(logistic_profile(random_logistic(rng)));
        const GammaResult g = gamma_element(prof, prof.center, {});
        CHECK(std::abs(g.gamma.c[2]) <= std::max(10.0 * g.error_estimate, 1e-12));
    }
}

TEST_CASE("leading-order probability is invariant under reference shifts")
{
    auto rng = rng_for("t-ref");
    for (int i = 0; i < kCases; ++i) {
        const bool spin = i % 2 == 0;
        const DrivingProfile prof = spin ? to_driving_profile(rosen_zener_profile(random_rz(rng)))
                                         : to_driving_profile(logistic_profile(random_logistic(rng)));
        const double w0 = generic_transition(prof, prof.center, {}).probability;
        const double shift = uniform(rng, -5.0, 5.0) * prof.scale;
        const double w1 = generic_transition(prof, prof.center + shift, {}).probability;
        CHECK(std::abs(w1 - w0) <= 1e-9);
    }
}

TEST_CASE("spin-flip probability under translation and reversal")
{
    auto rng = rng_for("spin-symmetry");
    for (int i = 0; i < kCases; ++i) {
        const SpinFieldProfile sp = rosen_zener_profile(random_rz(rng));
        const double w0 = spin_flip_amplitude(sp, {}).probability;

        const double d = uniform(rng, -20.0, 20.0);
        SpinFieldProfile moved = sp;
        moved.field = [f = sp.field, d](double t) { return f(t - d); };
        moved.field_derivative = [f = *sp.field_derivative, d](double t) { return f(t - d); };
        moved.center = sp.center + d;
        CHECK(std::abs(spin_flip_amplitude(moved, {}).probability - w0) <= 1e-10 + 1e-8 * w0);

        SpinFieldProfile reversed = sp;
        reversed.field = [f = sp.field](double t) { return f(-t); };
        reversed.field_derivative = [f = *sp.field_derivative](double t) { return Vector3(-f(-t)); };
        CHECK(std::abs(spin_flip_amplitude(reversed, {}).probability - w0) <= 1e-10 + 1e-8 * w0);
    }
}

TEST_CASE("reflection probability under translation and phase reference")
{
    auto rng = rng_for("barrier-symmetry");
    for (int i = 0; i < kCases; ++i) {
        const BarrierProfile bp = logistic_profile(random_logistic(rng), uniform(rng, 0.5, 2.0));
        const auto r0 = reflection_amplitude(bp, {});
        const double w0 = r0.probability;
        auto agrees = [&](const TransitionResult &r) {
            return std::abs(r.probability - w0) <= 1e-8 * w0 + r.error_estimate + r0.error_estimate;
        };

        const double d = uniform(rng, -20.0, 20.0) * bp.scale;
        BarrierProfile moved = bp;
        moved.potential = [u = bp.potential, d](double x) { return u(x - d); };
        moved.potential_derivative = [u = *bp.potential_derivative, d](double x) { return u(x - d); };
        moved.center = bp.center + d;
        CHECK(agrees(reflection_amplitude(moved, {})));

        const double x0 = uniform(rng, -3.0, 3.0) * bp.scale;
        BarrierProfile rephased = bp;
        rephased.center = bp.center + x0;
        rephased.horizon = bp.horizon + std::abs(x0);
        CHECK(agrees(reflection_amplitude(rephased, {})));
    }
}

TEST_CASE("specialized formulas match the generic pipeline")
{
    auto rng = rng_for("routes");
    for (int i = 0; i < kCases; ++i) {
        const SpinFieldProfile sp = rosen_zener_profile(random_rz(rng));
        CHECK(std::abs(spin_flip_amplitude(sp, {}).probability -
                       generic_transition(to_driving_profile(sp), sp.center, {}).probability) <= 1e-6);
        const BarrierProfile bp = logistic_profile(random_logistic(rng));
        CHECK(std::abs(reflection_amplitude(bp, {}).probability -
                       generic_transition(to_driving_profile(bp), bp.center, {}).probability) <= 1e-6);
    }
}

TEST_CASE("weak-barrier estimators converge to each other")
{
    auto rng = rng_for("weak");
    for (int i = 0; i < kCases; ++i) {
        const double alpha = uniform(rng, 0.5, 2.0);
        // Deviations shrink until they reach the quadrature floor.
        constexpr double floor = 1e-6;
        double prev_born = std::numeric_limits<double>::infinity(), prev_mh = prev_born;
        for (double beta : {1e-2, 1e-3, 1e-4}) {
            const BarrierProfile bp = logistic_profile({alpha, beta});
            const double r = std::abs(reflection_amplitude(bp, {}).amplitude);
            const double born_abs = std::abs(born_amplitude(bp, {}).amplitude);
            const double mh_abs = std::abs(maitra_heller_amplitude(bp, {}).amplitude);
            const double born = std::abs(born_abs / r - 1.0);
            const double mh = std::abs(mh_abs / r - 1.0);
            CHECK(born <= std::max(prev_born, floor));
            CHECK(mh <= std::max(prev_mh, floor));
            prev_born = born;
            prev_mh = mh;
            if (beta == 1e-4)
                CHECK(std::abs(born_abs / mh_abs - 1.0) < 0.01);
        }
        CHECK(prev_born < 0.01);
        CHECK(prev_mh < 0.01);
    }
}

// ---------------------------------------------------------------- models

TEST_CASE("substituted barrier integral matches the direct route")
{
    auto rng = rng_for("logistic-routes");
    for (int i = 0; i < kCases; ++i) {
        const LogisticBarrierParams p{uniform(rng, 0.5, 4.0), uniform(rng, 0.02, 0.95)};
        const double a = std::abs(logistic_adiabatic_transformed(p, {}).amplitude);
        const double b = std::abs(reflection_amplitude(logistic_profile(p), {}).amplitude);
        CHECK(std::abs(a - b) <= 1e-6);
    }
}

TEST_CASE("logistic closed form lies in the unit interval")
{
    auto rng = rng_for("logistic-range");
    for (int i = 0; i < kCases; ++i) {
        // Up to alpha = 50 the closed form stays above the double underflow limit.
        const LogisticBarrierParams p{std::exp(uniform(rng, std::log(1e-3), std::log(50.0))),
                                      uniform(rng, 1e-9, 1.0 - 1e-9)};
        const double a = logistic_exact(p);
        CHECK(a > 0.0);
        CHECK(a < 1.0);
    }
}

// ---------------------------------------------------------------- oscillator

TEST_CASE("zero theta gives the identity")
{
    auto rng = rng_for("pp-identity");
    for (int i = 0; i < kCases; ++i) {
        const int n = std::uniform_int_distribution<int>(0, kDefaultMaxLevel)(rng);
        CHECK(perelomov_popov_matrix(0.0, n).entries == Eigen::MatrixXd::Identity(n + 1, n + 1));
    }
}

TEST_CASE("transition matrix entries are symmetric probabilities")
{
    auto rng = rng_for("pp-structure");
    for (int i = 0; i < kCases; ++i) {
        const double theta = uniform(rng, 0.0, 0.999);
        const int n = std::uniform_int_distribution<int>(0, kDefaultMaxLevel)(rng);
        const auto w = perelomov_popov_matrix(theta, n).entries;
        CHECK(w.minCoeff() >= 0.0);
        CHECK(w.maxCoeff() <= 1.0);
        CHECK((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("theta is the reflection probability of the mapped barrier")
{
    auto rng = rng_for("theta-map");
    for (int i = 0; i < kCases; ++i) {
        const OscillatorSpec s = logistic_oscillator(random_logistic(rng), uniform(rng, 0.5, 2.0));
        CHECK(theta_coefficient(s, {}).probability == reflection_amplitude(oscillator_barrier(s), {}).probability);
    }
}

TEST_CASE("theta survives the mass-reduction round trip")
{
    auto rng = rng_for("mass");
    for (int i = 0; i < kCases; ++i) {
        const OscillatorSpec base = logistic_oscillator(random_logistic(rng));
        const double a = uniform(rng, 0.0, 1.0), w = uniform(rng, 0.5, 2.0);
        // m = 1 / (1 + a sech^2(t/w)), so t' = t + a w tanh(t/w) and Omega = Omega0(t') / m.
        auto tp = [a, w](double t) { return t + a * w * std::tanh(t / w); };
        auto mass = [a, w](double t) { return 1.0 / (1.0 + a / std::pow(std::cosh(t / w), 2)); };
        OscillatorSpec s = base;
        s.omega = [o = base.omega, tp, mass](double t) { return o(tp(t)) / mass(t); };
        s.omega_derivative.reset();
        s.mass = mass;
        s.horizon = base.horizon + a * w;
        s.tolerance = base.tolerance * 10.0;
        const double t0 = theta_coefficient(base, {}).probability;
        const double t1 = theta_coefficient(s, {}).probability;
        CHECK(std::abs(t1 - t0) <= 1e-6 * t0 + 1e-14);
    }
}

// ---------------------------------------------------------------- cli

TEST_CASE("sweep output is reproducible and flags every probability")
{
    using namespace natrans::cli;
    auto rng = rng_for("cli");
    for (int i = 0; i < kCases; ++i) {
        RunConfig c;
        c.command = Command::Sweep;
        std::ostringstream grid;
        grid.precision(17);
        switch (i % 3) {
        case 0:
            c.model = Model::RosenZener;
            grid << uniform(rng, 0.05, 1.0) << ':' << uniform(rng, 1.5, 3.0) << ':' << uniform(rng, 0.3, 0.7);
            c.params["beta1"] = grid.str();
            break;
        case 1:
            c.command = Command::Reflect;
            c.model = Model::Logistic;
            grid << uniform(rng, 0.05, 0.3) << ',' << uniform(rng, 0.4, 0.9);
            c.params["beta"] = grid.str();
            break;
        default:
            c.command = Command::Oscillator;
            c.model = Model::Logistic;
            grid << uniform(rng, 0.02, 0.3);
            c.params["beta"] = grid.str();
            break;
        }
        c.threads = 1 + i % 3;
        if (i % 10 != 0) {
            c.estimators = {cli::Estimator::Exact, cli::Estimator::Adiabatic};
            if (c.model == Model::RosenZener || c.command == Command::Reflect)
                c.estimators.push_back(cli::Estimator::Transformed);
        }
        const std::string first = format_csv(run_sweep(c));
        CHECK(format_csv(run_sweep(c)) == first);

        std::string header = first.substr(0, first.find('\n'));
        std::size_t pos = 0;
        int probs = 0;
        while ((pos = header.find("_probability", pos)) != std::string::npos) {
            const std::size_t start = header.rfind(',', pos) + 1;
            const std::string tag = header.substr(start, pos - start);
            CHECK(header.find(tag + "_valid") != std::string::npos);
            ++probs;
            pos += 1;
        }
        CHECK(probs > 0);
    }
}
