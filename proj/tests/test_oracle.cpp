#include <doctest.h>

#include <cmath>
#include <random>

#include "natrans/models.hpp"
#include "natrans/oracle.hpp"

using namespace natrans;

namespace {

constexpr double kPi = 3.14159265358979323846;

DrivingProfile constant_profile(const AlgebraElement &b)
{
    return DrivingProfile::make(b.sig, [b](double) { return b; }, b, b, 5.0, 1e-12);
}

} // namespace

TEST_CASE("evolve")
{
    SUBCASE("zero generator gives the identity")
    {
        // A zero generator has no Cartan frame, so integrate directly.
        const auto r = ode_propagate([](double) { return AlgebraElement::zero(Signature::Compact); },
                                     -3.0, 3.0, default_oracle_control());
        CHECK(max_abs(r.g.m - Matrix2::Identity()) == 0.0);
    }
    SUBCASE("constant Cartan generator gives a diagonal phase")
    {
        const auto p = constant_profile(AlgebraElement(Signature::Compact, 0, 0, 1.7));
        const auto g = evolve(p, -2.0, 3.0, default_oracle_control()).g;
        CHECK(std::abs(g.m(0, 1)) == 0.0);
        CHECK(std::abs(g.m(1, 0)) == 0.0);
        CHECK(std::arg(g.m(0, 0)) == doctest::Approx(std::remainder(0.5 * 1.7 * 5.0, 2 * kPi)));
    }
}

TEST_CASE("driving profile construction")
{
    const AlgebraElement b(Signature::Compact, 0, 0, 1.0);
    CHECK_THROWS_AS(DrivingProfile::make(Signature::Compact, [](double t) {
                        return AlgebraElement(Signature::Compact, 0.0, 0.0, 1.0 + std::exp(-t * t));
                    },
                                         b, b, 0.5, 1e-12),
                    DomainError);
    CHECK_THROWS_AS(DrivingProfile::make(Signature::NonCompact, [b](double) { return b; }, b, b, 1.0,
                                         1e-12),
                    SignatureMismatch);
    CHECK_THROWS_AS(DrivingProfile::make(Signature::Compact, [b](double) { return b; }, b, b, -1.0,
                                         1e-12),
                    std::invalid_argument);
}

TEST_CASE("S-operator")
{
    SUBCASE("pure Cartan profile is all free phase")
    {
        const auto p = constant_profile(AlgebraElement(Signature::Compact, 0, 0, -2.3));
        const auto s = s_operator(p, default_oracle_control());
        CHECK(max_abs(s.s.m - Matrix2::Identity()) < 1e-12);
    }
    SUBCASE("Rosen-Zener off-diagonal element")
    {
        const RosenZenerParams rz{1.0, 0.5, 1.0};
        const auto prof = to_driving_profile(rosen_zener_profile(rz));
        const auto s = s_operator(prof, default_oracle_control());
        const double exact = std::pow(std::sin(kPi * 0.5) / std::cosh(kPi * 1.0), 2);
        CHECK(std::norm(s.s.m(0, 1)) == doctest::Approx(exact).epsilon(1e-6));
        CHECK(s.max_constraint_violation < 1e-9);

        // Doubling the horizon again moves S by less than 10x the asymptotic tolerance
        // plus the stepper allowance.
        DrivingProfile wide = prof;
        wide.horizon = s.horizon;
        const auto s2 = s_operator(wide, default_oracle_control());
        CHECK(max_abs(s2.s.m - s.s.m) < 10 * prof.asymptotic_tol + 1e-7);
    }
    SUBCASE("driving that never dies out does not converge")
    {
        // Vanishes at every doubled horizon 4 * 2^k but nowhere in between.
        auto gen = [](double t) {
            const double s = std::sin(0.25 * kPi * t);
            return AlgebraElement(Signature::Compact, 0.5 * s * s, 0.0, 1.0);
        };
        const AlgebraElement b(Signature::Compact, 0, 0, 1.0);
        const auto p = DrivingProfile::make(Signature::Compact, gen, b, b, 4.0, 1e-9);
        CHECK_THROWS_AS(s_operator(p, default_oracle_control(), 2), ConvergenceError);
    }
}

TEST_CASE("transition probability")
{
    const ProjectorPair proj = ProjectorPair::cartan();
    CHECK(transition_probability(GroupElement::identity(Signature::Compact), proj).probability == 0.0);
    // exp(pi J2) = i sigma2: |<+|S|->|^2 = 1 and Tr(P+ S P- S^dagger) = 1.
    const auto flip = exp_map(kPi * AlgebraElement::basis(Signature::Compact, 2));
    CHECK(transition_probability(flip, proj).probability == doctest::Approx(1.0));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const auto s = exp_map(AlgebraElement(Signature::Compact, u(rng), u(rng), u(rng)));
        const auto r = transition_probability(s, proj);
        CHECK(r.probability == doctest::Approx(std::norm(s.m(0, 1))).epsilon(1e-12).scale(1.0));
    }

    // NonCompact: |b/a|^2 of the transfer matrix.
    const auto t = exp_map(AlgebraElement(Signature::NonCompact, 0.7, -0.4, 0.2));
    const auto r = transition_probability(t, proj);
    CHECK(r.probability == doctest::Approx(std::norm(t.m(0, 1) / t.m(0, 0))));
}

TEST_CASE("projector validation")
{
    const auto p = ProjectorPair::cartan();
    CHECK(max_abs(p.plus * p.plus - p.plus) == 0.0);
    CHECK(max_abs(p.plus * p.minus) == 0.0);
    Matrix2 bad = Matrix2::Identity();
    CHECK_THROWS_AS(ProjectorPair::from_matrices(bad, p.minus), DomainError);
    CHECK_THROWS_AS(ProjectorPair::from_matrices(p.plus, p.plus), DomainError);
    // A rotated pair is admissible.
    const auto g = exp_map(AlgebraElement(Signature::Compact, 0.3, 0.8, -0.1));
    CHECK_NOTHROW(ProjectorPair::from_matrices(g.m * p.plus * g.m.adjoint(),
                                               g.m * p.minus * g.m.adjoint()));
}

TEST_CASE("over-barrier reflection oracle conserves the current")
{
    const auto prof = to_driving_profile(logistic_profile({2.0, 0.5}));
    const auto o = oracle_transition(prof, default_oracle_control());
    const complex a = o.s.s.m(0, 0), b = o.s.s.m(0, 1);
    CHECK(std::norm(a) - std::norm(b) == doctest::Approx(1.0).epsilon(1e-9));
    const double exact = logistic_exact({2.0, 0.5});
    CHECK(o.result.probability == doctest::Approx(exact * exact).epsilon(1e-6));
}
