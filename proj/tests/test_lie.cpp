#include <doctest.h>

#include <cmath>

#include "natrans/lie.hpp"

using namespace natrans;

namespace {

constexpr double kPi = 3.14159265358979323846;
const complex I(0.0, 1.0);

Matrix2 sigma(int k)
{
    Matrix2 s;
    if (k == 1)
        s << 0, 1, 1, 0;
    else if (k == 2)
        s << 0, -I, I, 0;
    else
        s << 1, 0, 0, -1;
    return s;
}

} // namespace

TEST_CASE("matrix realization follows i sigma / 2 and the hyperbolic variant")
{
    for (int k = 1; k <= 3; ++k) {
        CHECK(max_abs(to_matrix(AlgebraElement::basis(Signature::Compact, k)) - 0.5 * I * sigma(k)) ==
              0.0);
    }
    CHECK(max_abs(to_matrix(AlgebraElement::basis(Signature::NonCompact, 1)) - 0.5 * sigma(1)) == 0.0);
    CHECK(max_abs(to_matrix(AlgebraElement::basis(Signature::NonCompact, 2)) - 0.5 * sigma(2)) == 0.0);
    CHECK(max_abs(to_matrix(AlgebraElement::basis(Signature::NonCompact, 3)) - 0.5 * I * sigma(3)) ==
          0.0);
}

TEST_CASE("commutator of J1 and J2 from explicit 2x2 products")
{
    for (Signature s : {Signature::Compact, Signature::NonCompact}) {
        const auto j1 = AlgebraElement::basis(s, 1), j2 = AlgebraElement::basis(s, 2);
        const Matrix2 a = to_matrix(j1), b = to_matrix(j2);
        const Matrix2 expected = a * b - b * a;
        CHECK(max_abs(to_matrix(commutator(j1, j2)) - expected) < 1e-15);
    }
    // [i s1/2, i s2/2] = -(1/4) 2i s3 = -J3
    const auto c = commutator(AlgebraElement::basis(Signature::Compact, 1),
                              AlgebraElement::basis(Signature::Compact, 2));
    CHECK(c.c[0] == 0.0);
    CHECK(c.c[1] == 0.0);
    CHECK(c.c[2] == doctest::Approx(-1.0));
}

TEST_CASE("commutator is antisymmetric and rejects mixed signatures")
{
    const AlgebraElement a(Signature::Compact, 0.3, -1.2, 2.0);
    CHECK(commutator(a, a).c.norm() == 0.0);
    CHECK_THROWS_AS(commutator(a, AlgebraElement::basis(Signature::NonCompact, 1)), SignatureMismatch);
}

TEST_CASE("algebra norm of J3 from the hand-assembled adjoint matrix")
{
    // Compact structure constants [Ji, Jj] = -eps_ijk Jk, so ad(J3) has
    // entries Y(2,1) = -1, Y(1,2) = 1.
    Eigen::Matrix3d y = Eigen::Matrix3d::Zero();
    y(1, 0) = -1.0;
    y(0, 1) = 1.0;
    const double expected = std::sqrt((y * y.transpose()).trace());
    CHECK(algebra_norm(AlgebraElement::basis(Signature::Compact, 3)) == doctest::Approx(expected));
    CHECK(expected == doctest::Approx(std::sqrt(2.0)));
    CHECK(algebra_norm(AlgebraElement::zero(Signature::Compact)) == 0.0);
    const AlgebraElement a(Signature::NonCompact, 0.4, 0.1, -0.7);
    CHECK(algebra_norm(-3.5 * a) == doctest::Approx(3.5 * algebra_norm(a)));
}

TEST_CASE("exponential map closed forms")
{
    CHECK(max_abs(exp_map(AlgebraElement::zero(Signature::Compact)).m - Matrix2::Identity()) == 0.0);
    // exp(pi J2) = cos(pi/2) + i sin(pi/2) s2 = i s2, a half-turn; its square is -I.
    const GroupElement half = exp_map(kPi * AlgebraElement::basis(Signature::Compact, 2));
    CHECK(max_abs(half.m - I * sigma(2)) < 1e-15);
    CHECK(max_abs((half * half).m + Matrix2::Identity()) < 1e-15);
    CHECK(max_abs(exp_map(2.0 * kPi * AlgebraElement::basis(Signature::Compact, 2)).m +
                  Matrix2::Identity()) < 1e-15);

    // Boost by eta along J1: cosh(eta/2) + sinh(eta/2) s1.
    const double eta = 1.7;
    const GroupElement boost = exp_map(eta * AlgebraElement::basis(Signature::NonCompact, 1));
    Matrix2 expected = std::cosh(eta / 2) * Matrix2::Identity() + std::sinh(eta / 2) * sigma(1);
    CHECK(max_abs(boost.m - expected) < 1e-15);
    const complex a = boost.m(0, 0), b = boost.m(0, 1);
    CHECK(std::norm(a) - std::norm(b) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(boost.constraint_violation() < 1e-14);
}

TEST_CASE("adjoint deficit")
{
    const auto j1 = AlgebraElement::basis(Signature::Compact, 1);
    const auto j3 = AlgebraElement::basis(Signature::Compact, 3);
    CHECK(adjoint_deficit(exp_map(0.83 * j3), j3).c.norm() == doctest::Approx(0.0));
    CHECK(adjoint_deficit(GroupElement::identity(Signature::Compact), j1).c.norm() == 0.0);
    // h = diag(e^{i th/2}, e^{-i th/2}) multiplies the off-diagonal entries
    // of J1 by e^{+-i th}: h J1 h^-1 = cos th J1 - sin th J2.
    const double th = 0.61;
    const auto d = adjoint_deficit(exp_map(th * j3), j1);
    CHECK(d.c[0] == doctest::Approx(std::cos(th) - 1.0));
    CHECK(d.c[1] == doctest::Approx(-std::sin(th)));
    CHECK(std::abs(d.c[2]) < 1e-15);
}

TEST_CASE("Cartan decomposition")
{
    SUBCASE("element on the Cartan axis")
    {
        const AlgebraElement b(Signature::Compact, 0.0, 0.0, 1.3);
        const auto f = cartan_decompose(b);
        CHECK(f.beta.c[2] == doctest::Approx(1.3));
        CHECK(max_abs(f.v.m - Matrix2::Identity()) < 1e-15);
    }
    SUBCASE("spin field (B1, 0, B0)")
    {
        const double b0 = 0.8, b1 = 0.6, mu = 1.0;
        const AlgebraElement b = -2.0 * mu * AlgebraElement(Signature::Compact, b1, 0.0, b0);
        const auto f = cartan_decompose(b);
        CHECK(f.beta.c[0] == 0.0);
        CHECK(f.beta.c[1] == 0.0);
        CHECK(std::abs(f.beta.c[2]) == doctest::Approx(2.0 * mu * std::hypot(b0, b1)));
        // v = exp(theta J2) with tan theta = -B1/B0.
        CHECK(f.generator.c[0] == doctest::Approx(0.0));
        CHECK(std::tan(f.generator.c[1]) == doctest::Approx(-b1 / b0));
        CHECK((conjugate(f.v, f.beta).c - b.c).norm() < 1e-12);
    }
    SUBCASE("scattering generator: exp(2 eta) = p / k")
    {
        const double k = 1.0, u = 0.36;
        const double p = std::sqrt(k * k - u);
        const AlgebraElement b(Signature::NonCompact, 0.0, u / k, -2.0 * k + u / k);
        const auto f = cartan_decompose(b);
        CHECK(std::abs(f.beta.c[2]) == doctest::Approx(2.0 * p));
        // v = exp(2 eta n.J) with the sigma/2 normalization of J1, J2.
        CHECK(std::exp(-f.generator.c.norm()) == doctest::Approx(p / k));
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(cartan_decompose(AlgebraElement::zero(Signature::Compact)), DomainError);
        CHECK_THROWS_AS(cartan_decompose(AlgebraElement(Signature::NonCompact, 2.0, 0.0, 1.0)),
                        DomainError);
    }
}
