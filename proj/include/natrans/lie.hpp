#pragma once

// Algebra and group types for su(2) and su(1,1) in the 2x2 fundamental
// representation.
//
// Basis realization:
//   Compact     J1 = i sigma1/2, J2 = i sigma2/2, J3 = i sigma3/2
//   NonCompact  J1 = sigma1/2,   J2 = sigma2/2,   J3 = i sigma3/2
// In both cases J3 spans the Cartan subalgebra and generates a U(1)
// subgroup, so spin and scattering problems share one code path.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace natrans {

using complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Vector3 = Eigen::Vector3d;

enum class Signature { Compact, NonCompact };

const char *to_string(Signature sig);

/// Raised when two operands carry different signatures.
class SignatureMismatch : public std::invalid_argument {
public:
    SignatureMismatch(Signature a, Signature b);
};

/// Raised when an argument lies outside the domain of an operation
/// (zero element, hyperbolic generator, non-algebra matrix, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct AlgebraElement {
    Vector3 c = Vector3::Zero();
    Signature sig = Signature::Compact;

    AlgebraElement() = default;
    AlgebraElement(Signature s, double c1, double c2, double c3);
    AlgebraElement(Signature s, const Vector3 &coeffs);

    static AlgebraElement zero(Signature s) { return {s, 0.0, 0.0, 0.0}; }
    /// Basis element J_index, index in {1, 2, 3}.
    static AlgebraElement basis(Signature s, int index);

    bool is_finite() const { return c.allFinite(); }
    /// True when the J1 and J2 coefficients vanish exactly.
    bool on_cartan_axis() const { return c[0] == 0.0 && c[1] == 0.0; }

    AlgebraElement operator-() const { return {sig, -c}; }
    AlgebraElement &operator+=(const AlgebraElement &o);
    AlgebraElement &operator-=(const AlgebraElement &o);
    AlgebraElement &operator*=(double s);
};

AlgebraElement operator+(AlgebraElement a, const AlgebraElement &b);
AlgebraElement operator-(AlgebraElement a, const AlgebraElement &b);
AlgebraElement operator*(double s, AlgebraElement a);
AlgebraElement operator*(AlgebraElement a, double s);

struct GroupElement {
    Matrix2 m = Matrix2::Identity();
    Signature sig = Signature::Compact;

    GroupElement() = default;
    GroupElement(Signature s, const Matrix2 &mat) : m(mat), sig(s) {}

    static GroupElement identity(Signature s) { return {s, Matrix2::Identity()}; }

    /// Inverse through the adjugate; exact for det m = 1.
    GroupElement inverse() const;
    /// Largest deviation from det m = 1 and from (pseudo-)unitarity.
    double constraint_violation() const;
    /// Rebuilt in the canonical form [[a, -b*], [b, a*]] (Compact) or
    /// [[a, b], [b*, a*]] (NonCompact) with the invariant renormalized to 1,
    /// which clears accumulated roundoff.
    GroupElement restored() const;

    GroupElement &operator*=(const GroupElement &o);
};

GroupElement operator*(GroupElement a, const GroupElement &b);

/// b = v beta v^-1 with beta on the J3 axis.
struct CartanFrame {
    AlgebraElement beta;
    GroupElement v;
    /// Logarithm of v: v = exp(generator), generator in the J1-J2 plane.
    AlgebraElement generator;
    /// Sign of the J3 coefficient of beta relative to the invariant magnitude.
    int sign = 1;
};

/// 2x2 matrix of an algebra element in the fundamental representation.
Matrix2 to_matrix(const AlgebraElement &a);

/// Projects a 2x2 matrix back onto the basis. If `residual` is given it
/// receives the max-entry distance between the matrix and its projection.
AlgebraElement from_matrix(const Matrix2 &x, Signature sig, double *residual = nullptr);

AlgebraElement commutator(const AlgebraElement &a, const AlgebraElement &b);

/// Adjoint-representation matrix Y with [y, J_j] = sum_i Y_ij J_i.
Eigen::Matrix3d adjoint_matrix(const AlgebraElement &y);

/// sqrt(Tr(Y Y^dagger)) with Y = adjoint_matrix(y).
double algebra_norm(const AlgebraElement &y);

/// X^2 = delta * I for every element of both algebras; returns delta.
double square_scalar(const AlgebraElement &a);

/// Closed-form exponential: exp(X) = C(delta) I + S(delta) X.
GroupElement exp_map(const AlgebraElement &a);

/// h eta h^-1.
AlgebraElement conjugate(const GroupElement &h, const AlgebraElement &eta);

/// R(h) eta = h eta h^-1 - eta.
AlgebraElement adjoint_deficit(const GroupElement &h, const AlgebraElement &eta);

/// Reduces b to the Cartan axis. `sign_hint` (+1 / -1) fixes the sign of
/// the beta coefficient; 0 takes the sign of b's own J3 coefficient. v is
/// the minimal rotation (Compact) or boost (NonCompact) carrying the J3
/// axis onto b's axis.
CartanFrame cartan_decompose(const AlgebraElement &b, int sign_hint = 0);

/// Max-entry matrix distance, used for all tolerance checks on 2x2 matrices.
double max_abs(const Matrix2 &x);

} // namespace natrans
