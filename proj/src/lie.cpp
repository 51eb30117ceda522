#include "natrans/lie.hpp"

#include <cmath>

namespace natrans {

namespace {

const complex I1{0.0, 1.0};

Matrix2 pauli(int a)
{
    Matrix2 s;
    switch (a) {
    case 1: s << 0.0, 1.0, 1.0, 0.0; break;
    case 2: s << 0.0, -I1, I1, 0.0; break;
    default: s << 1.0, 0.0, 0.0, -1.0; break;
    }
    return s;
}

const Matrix2 &sigma3()
{
    static const Matrix2 s = pauli(3);
    return s;
}

void require_same(Signature a, Signature b)
{
    if (a != b)
        throw SignatureMismatch(a, b);
}

// cosh(sqrt(d)) and sinh(sqrt(d))/sqrt(d), continued analytically to d < 0.
void exp_coefficients(double d, double &c, double &s)
{
    if (std::abs(d) < 1e-8) {
        c = 1.0 + d / 2.0 + d * d / 24.0;
        s = 1.0 + d / 6.0 + d * d / 120.0;
    } else if (d > 0.0) {
        const double r = std::sqrt(d);
        c = std::cosh(r);
        s = std::sinh(r) / r;
    } else {
        const double r = std::sqrt(-d);
        c = std::cos(r);
        s = std::sin(r) / r;
    }
}

} // namespace

const char *to_string(Signature sig)
{
    return sig == Signature::Compact ? "compact" : "noncompact";
}

SignatureMismatch::SignatureMismatch(Signature a, Signature b)
    : std::invalid_argument(std::string("signature mismatch: ") + to_string(a) + " vs " +
                            to_string(b))
{
}

AlgebraElement::AlgebraElement(Signature s, double c1, double c2, double c3)
    : c(c1, c2, c3), sig(s)
{
}

AlgebraElement::AlgebraElement(Signature s, const Vector3 &coeffs) : c(coeffs), sig(s) {}

AlgebraElement AlgebraElement::basis(Signature s, int index)
{
    if (index < 1 || index > 3)
        throw std::out_of_range("basis index must be 1, 2 or 3");
    AlgebraElement e = zero(s);
    e.c[index - 1] = 1.0;
    return e;
}

AlgebraElement &AlgebraElement::operator+=(const AlgebraElement &o)
{
    require_same(sig, o.sig);
    c += o.c;
    return *this;
}

AlgebraElement &AlgebraElement::operator-=(const AlgebraElement &o)
{
    require_same(sig, o.sig);
    c -= o.c;
    return *this;
}

AlgebraElement &AlgebraElement::operator*=(double s)
{
    c *= s;
    return *this;
}

AlgebraElement operator+(AlgebraElement a, const AlgebraElement &b) { return a += b; }
AlgebraElement operator-(AlgebraElement a, const AlgebraElement &b) { return a -= b; }
AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }
AlgebraElement operator*(AlgebraElement a, double s) { return a *= s; }

GroupElement GroupElement::inverse() const
{
    Matrix2 adj;
    adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return {sig, adj / m.determinant()};
}

double GroupElement::constraint_violation() const
{
    const double det_dev = std::abs(m.determinant() - 1.0);
    Matrix2 metric_dev;
    if (sig == Signature::Compact)
        metric_dev = m.adjoint() * m - Matrix2::Identity();
    else
        metric_dev = m.adjoint() * sigma3() * m - sigma3();
    return std::max(det_dev, max_abs(metric_dev));
}

GroupElement GroupElement::restored() const
{
    const std::complex<double> a = 0.5 * (m(0, 0) + std::conj(m(1, 1)));
    Matrix2 r;
    if (sig == Signature::Compact) {
        const std::complex<double> b = 0.5 * (m(1, 0) - std::conj(m(0, 1)));
        const double n = std::sqrt(std::norm(a) + std::norm(b));
        r << a / n, -std::conj(b) / n, b / n, std::conj(a) / n;
    } else {
        const std::complex<double> b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
        const double n = std::sqrt(std::norm(a) - std::norm(b));
        r << a / n, b / n, std::conj(b) / n, std::conj(a) / n;
    }
    return {sig, r};
}

GroupElement &GroupElement::operator*=(const GroupElement &o)
{
    require_same(sig, o.sig);
    m = m * o.m;
    return *this;
}

GroupElement operator*(GroupElement a, const GroupElement &b) { return a *= b; }

double max_abs(const Matrix2 &x) { return x.cwiseAbs().maxCoeff(); }

Matrix2 to_matrix(const AlgebraElement &a)
{
    const double c1 = a.c[0], c2 = a.c[1], c3 = a.c[2];
    Matrix2 x;
    if (a.sig == Signature::Compact) {
        // (i/2)(c1 s1 + c2 s2 + c3 s3)
        x << I1 * c3, I1 * c1 + c2, I1 * c1 - c2, -I1 * c3;
        x *= 0.5;
    } else {
        // (1/2)(c1 s1 + c2 s2 + i c3 s3)
        x << I1 * c3, complex(c1, -c2), complex(c1, c2), -I1 * c3;
        x *= 0.5;
    }
    return x;
}

AlgebraElement from_matrix(const Matrix2 &x, Signature sig, double *residual)
{
    const complex t1 = (pauli(1) * x).trace();
    const complex t2 = (pauli(2) * x).trace();
    const complex t3 = (pauli(3) * x).trace();
    AlgebraElement a = sig == Signature::Compact
                           ? AlgebraElement(sig, t1.imag(), t2.imag(), t3.imag())
                           : AlgebraElement(sig, t1.real(), t2.real(), t3.imag());
    if (residual)
        *residual = max_abs(x - to_matrix(a));
    return a;
}

AlgebraElement commutator(const AlgebraElement &a, const AlgebraElement &b)
{
    require_same(a.sig, b.sig);
    const Vector3 x = a.c.cross(b.c);
    // Compact: [J1,J2] = -J3 cyclically. NonCompact: [J1,J2] = J3,
    // [J2,J3] = -J1, [J3,J1] = -J2.
    if (a.sig == Signature::Compact)
        return {a.sig, -x};
    return {a.sig, -x[0], -x[1], x[2]};
}

Eigen::Matrix3d adjoint_matrix(const AlgebraElement &y)
{
    Eigen::Matrix3d m;
    for (int j = 0; j < 3; ++j)
        m.col(j) = commutator(y, AlgebraElement::basis(y.sig, j + 1)).c;
    return m;
}

double algebra_norm(const AlgebraElement &y)
{
    const Eigen::Matrix3d m = adjoint_matrix(y);
    return std::sqrt((m * m.transpose()).trace());
}

double square_scalar(const AlgebraElement &a)
{
    const Vector3 &c = a.c;
    if (a.sig == Signature::Compact)
        return -c.squaredNorm() / 4.0;
    return (c[0] * c[0] + c[1] * c[1] - c[2] * c[2]) / 4.0;
}

GroupElement exp_map(const AlgebraElement &a)
{
    double c = 1.0, s = 1.0;
    exp_coefficients(square_scalar(a), c, s);
    return {a.sig, c * Matrix2::Identity() + s * to_matrix(a)};
}

AlgebraElement conjugate(const GroupElement &h, const AlgebraElement &eta)
{
    require_same(h.sig, eta.sig);
    const Matrix2 x = h.m * to_matrix(eta) * h.inverse().m;
    double residual = 0.0;
    AlgebraElement out = from_matrix(x, eta.sig, &residual);
    if (!(residual <= 1e-9 * (1.0 + max_abs(x))))
        throw DomainError("conjugation left the algebra (residual " + std::to_string(residual) +
                          ")");
    return out;
}

AlgebraElement adjoint_deficit(const GroupElement &h, const AlgebraElement &eta)
{
    return conjugate(h, eta) - eta;
}

CartanFrame cartan_decompose(const AlgebraElement &b, int sign_hint)
{
    if (!b.is_finite())
        throw DomainError("cartan_decompose: non-finite element");
    const Vector3 &c = b.c;
    double magnitude = 0.0;
    if (b.sig == Signature::Compact) {
        magnitude = c.norm();
        if (magnitude == 0.0)
            throw DomainError("cartan_decompose: zero element");
    } else {
        const double q = c[2] * c[2] - c[0] * c[0] - c[1] * c[1];
        if (!(q > 0.0))
            throw DomainError("cartan_decompose: generator is not elliptic (p^2 <= 0)");
        magnitude = std::sqrt(q);
    }

    const int sign = sign_hint != 0 ? (sign_hint > 0 ? 1 : -1) : (c[2] >= 0.0 ? 1 : -1);
    const Vector3 n = (sign / magnitude) * c;
    const double rho = std::hypot(n[0], n[1]);

    double angle = 0.0;
    if (b.sig == Signature::Compact) {
        angle = std::atan2(rho, n[2]);
        if (rho == 0.0 && n[2] < 0.0)
            throw DomainError("cartan_decompose: antipodal axis, rotation plane undefined");
    } else {
        if (n[2] < 0.0)
            throw DomainError("cartan_decompose: sign hint selects the opposite hyperboloid sheet");
        angle = std::asinh(rho);
    }
    const double scale = rho > 1e-300 ? angle / rho : 1.0;

    CartanFrame f;
    f.sign = sign;
    f.beta = AlgebraElement(b.sig, 0.0, 0.0, sign * magnitude);
    f.generator = AlgebraElement(b.sig, scale * n[1], -scale * n[0], 0.0);
    f.v = exp_map(f.generator);
    return f;
}

} // namespace natrans
