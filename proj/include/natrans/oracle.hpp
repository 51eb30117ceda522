#pragma once

// Brute-force propagation of dG/dt = B(t) G and extraction of the
// asymptotic S-operator. This is the independent reference every
// approximation in the library is checked against.

#include <functional>
#include <optional>

#include "natrans/lie.hpp"
#include "natrans/quadrature.hpp"
#include "natrans/stepper.hpp"

namespace natrans {

/// Time-dependent generator b(t) with declared asymptotic generators.
///
/// The asymptotic generators b± need not lie on the J3 axis themselves
/// (a step potential does not); their Cartan frames b± = v± beta± v±^-1 are
/// fixed at construction, with the sign of beta+ continued from beta-.
struct DrivingProfile {
    Signature sig = Signature::Compact;
    std::function<AlgebraElement(double)> generator;
    AlgebraElement asymptote_minus;
    AlgebraElement asymptote_plus;
    /// |t - center| beyond which b is within asymptotic_tol of b±.
    double horizon = 0.0;
    double asymptotic_tol = 0.0;
    /// Symmetry point / phase reference, and the characteristic time scale.
    double center = 0.0;
    double scale = 1.0;

    CartanFrame frame_minus;
    CartanFrame frame_plus;

    /// Validates the asymptotics and computes the frames.
    /// `frame_plus_generator` (in the J1-J2 plane) fixes v+ = exp(generator)
    /// where the plus frame cannot be derived pointwise (an asymptote
    /// antipodal to the minus one).
    static DrivingProfile make(Signature sig, std::function<AlgebraElement(double)> generator,
                               AlgebraElement asymptote_minus, AlgebraElement asymptote_plus,
                               double horizon, double asymptotic_tol, double center = 0.0,
                               double scale = 1.0,
                               std::optional<AlgebraElement> frame_plus_generator = std::nullopt);

    AlgebraElement operator()(double t) const { return generator(t); }
    int cartan_sign() const { return frame_minus.sign; }
};

/// Rank-one spectral projectors onto the asymptotic J3 eigenstates.
struct ProjectorPair {
    Matrix2 plus;
    Matrix2 minus;

    /// P+ projects on the +i/2 eigenvector of J3 (upper component), P- on
    /// the -i/2 one. They commute with every Cartan element.
    static ProjectorPair cartan();
    /// Validates Hermiticity, idempotence, unit trace and orthogonality.
    static ProjectorPair from_matrices(const Matrix2 &plus, const Matrix2 &minus);
};

struct TransitionResult {
    std::complex<double> amplitude{};
    double probability = 0.0;
    double adiabaticity_ratio = 0.0;
    double error_estimate = 0.0;
    /// False when a validity diagnostic exceeded its threshold.
    bool valid = true;
};

struct SOperatorResult {
    GroupElement s;
    double horizon = 0.0;
    /// Change of S under the last horizon doubling (max-entry norm).
    double residual = 0.0;
    int doublings = 0;
    int steps = 0;
    double error_estimate = 0.0;
    double max_constraint_violation = 0.0;
};

/// G(t1) for dG/dt = b(t) G, G(t0) = I.
PropagationResult evolve(const DrivingProfile &profile, double t0, double t1,
                         const QuadratureSpec &ctrl,
                         StepperScheme scheme = StepperScheme::ExponentialMidpoint);

/// exp(-beta+ T) v+^-1 G(center - T -> center + T) v- exp(-beta- T),
/// starting at T = horizon and doubling T until the result moves by less
/// than 10 * asymptotic_tol plus the stepper's own error allowance.
/// Throws ConvergenceError when `max_doublings` is exhausted.
SOperatorResult s_operator(const DrivingProfile &profile, const QuadratureSpec &ctrl,
                           int max_doublings = 6,
                           StepperScheme scheme = StepperScheme::ExponentialMidpoint);

/// Compact: Tr(P+ S P- S^dagger), amplitude <+|S|->.
/// NonCompact: |<+|S|->|^2 / |<+|S|+>|^2, i.e. |b/a|^2 of the transfer
/// matrix; amplitude <+|S|-> / <+|S|+>.
TransitionResult transition_probability(const GroupElement &s, const ProjectorPair &proj);

struct OracleTransition {
    TransitionResult result;
    SOperatorResult s;
};

/// s_operator followed by transition_probability with Cartan projectors.
OracleTransition oracle_transition(const DrivingProfile &profile, const QuadratureSpec &ctrl,
                                   StepperScheme scheme = StepperScheme::ExponentialMidpoint);

/// Step control used by the oracle unless a caller supplies its own.
QuadratureSpec default_oracle_control();

} // namespace natrans
