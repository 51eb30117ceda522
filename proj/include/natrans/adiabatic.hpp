#pragma once

// Leading-order non-adiabatic transition machinery: the gamma element and
// its trace formula, the specialized spin-flip and over-barrier reflection
// amplitudes, and the comparison estimators (WKBJ, Maitra-Heller, Born,
// first-order Fourier on the sphere).

#include <complex>
#include <functional>
#include <optional>

#include "natrans/lie.hpp"
#include "natrans/oracle.hpp"
#include "natrans/quadrature.hpp"

namespace natrans {

/// Knobs shared by the estimators.
struct AdiabaticOptions {
    /// Estimates whose diagnostic ratio exceeds this are flagged invalid.
    double validity_threshold = 0.3;
    /// Finite-difference step, in units of the profile scale.
    double fd_step = 1e-3;
    /// Phase-table nodes per unit of profile scale (clamped to [1025, 65537]).
    int phase_nodes_per_scale = 128;
    /// Samples used for max-over-t diagnostics.
    int diagnostic_samples = 2001;
};

using FieldFn = std::function<Vector3(double)>;

/// Spin in a field: i dpsi/dt = (B . sigma) psi, with B = mu * field in
/// units of inverse time. The field is asymptotically along the 3-axis.
struct SpinFieldProfile {
    FieldFn field;
    /// Analytic d field / dt; finite differences are used when absent.
    std::optional<FieldFn> field_derivative;
    Vector3 field_minus = Vector3::Zero();
    Vector3 field_plus = Vector3::Zero();
    double horizon = 0.0;
    double tolerance = 0.0;
    double center = 0.0;
    double scale = 1.0;

    /// Checks that the asymptotes are along the 3-axis, that the field
    /// reaches them at the horizon, and that |B| > 0 on a sample grid.
    void validate(int samples = 2001) const;
};

/// 1D scattering Psi'' + (k^2 - U(x)) Psi = 0 in the over-barrier regime.
struct BarrierProfile {
    std::function<double(double)> potential;
    std::optional<std::function<double(double)>> potential_derivative;
    std::optional<std::function<double(double)>> potential_second_derivative;
    double k = 1.0;
    /// U(x) as x -> -inf and x -> +inf.
    double u_minus = 0.0;
    double u_plus = 0.0;
    double horizon = 0.0;
    double tolerance = 0.0;
    double center = 0.0;
    double scale = 1.0;

    /// Checks k > 0, k^2 - U > 0 on a sample grid and the asymptotes.
    void validate(int samples = 2001) const;

    double momentum(double x) const;
    double potential_prime(double x, double fd_step) const;
    double potential_second(double x, double fd_step) const;
};

/// A path n(s) on the unit sphere; derivatives by finite differences.
struct PathOnSphere {
    FieldFn n;
    double fd_step = 1e-3;
    int fd_order = 4;
};

/// Adjoint phase of the Cartan part and the integrated generator.
struct GammaResult {
    AlgebraElement gamma;
    double error_estimate = 0.0;
    std::pair<double, double> truncated_at{0.0, 0.0};
};

DrivingProfile to_driving_profile(const SpinFieldProfile &sp);
DrivingProfile to_driving_profile(const BarrierProfile &bp);

/// v^-1 dv/dt of the Cartan frame at t (fourth-order differences of v).
AlgebraElement frame_velocity(const DrivingProfile &profile, double t, double fd_step);

/// max_t ||v^-1 dv/dt|| / ||beta|| over a grid spanning the horizon.
double adiabaticity_ratio(const DrivingProfile &profile, const AdiabaticOptions &opts = {});

/// gamma = int R(h0^-1)(v^-1 dv/dt) dtau, h0 = exp(int_{t_ref}^tau beta),
/// plus the asymptotic frame correction log v+ - log v- (zero when the
/// generator returns to the J3 axis at both ends).
GammaResult gamma_element(const DrivingProfile &profile, double t_ref,
                          const QuadratureSpec &ctrl, const AdiabaticOptions &opts = {});

/// Tr(P+ Gamma P- Gamma^dagger) with Gamma the 2x2 matrix of gamma.
double leading_order_probability(const AlgebraElement &gamma, const ProjectorPair &proj);

/// gamma_element + leading_order_probability, packaged with diagnostics.
TransitionResult generic_transition(const DrivingProfile &profile, double t_ref,
                                    const QuadratureSpec &ctrl, const AdiabaticOptions &opts = {});

/// A = (1/2) int exp(2i alpha) dtheta/dt dtau with alpha = int_{center}^tau |B|
/// and tan(theta) = -B1/B0; probability |A|^2. Requires a field in the
/// 1-3 plane.
TransitionResult spin_flip_amplitude(const SpinFieldProfile &sp, const QuadratureSpec &ctrl,
                                     const AdiabaticOptions &opts = {});

/// Phase integrand sqrt(sin^2 theta + (cos theta - dphi/dt / |B|)^2) |B| for a
/// field with azimuthal motion. `magnitude` is mu |B|.
std::function<double(double)> spin_phase_general(std::function<double(double)> theta,
                                                 std::function<double(double)> phi,
                                                 std::function<double(double)> magnitude,
                                                 double fd_step = 1e-4);

/// n'' . (n' x n) / |n'|^2 at s. Throws DomainError when |n'| < min_speed
/// or |n| deviates from 1 by more than 1e-10.
double geodesic_curvature(const PathOnSphere &path, double s, double min_speed = 1e-10);

/// |int exp(-2iTs) chi(s) ds|^2 with chi = (i/2)|n'| exp(-i varsigma),
/// varsigma = int_0^s kappa_g. Returns 0 for a stationary path.
double first_order_fourier_spinflip(const PathOnSphere &path, double T,
                                    const QuadratureSpec &ctrl,
                                    const TruncationOptions &window = {});

/// Bremmer amplitude A = (1/4) int exp(2i int_{x0}^x p) U'/(k^2 - U) dx with
/// x0 = bp.center; probability |A|^2.
TransitionResult reflection_amplitude(const BarrierProfile &bp, const QuadratureSpec &ctrl,
                                      const AdiabaticOptions &opts = {});

/// Maitra-Heller distorted-wave amplitude
/// A = (1/2i) int U_eff exp(2i int p) / p dx,
/// U_eff = -3 p'^2 / (4 p^2) + p'' / (2 p). The adiabaticity_ratio slot holds
/// max |U_eff| / k^2.
TransitionResult maitra_heller_amplitude(const BarrierProfile &bp, const QuadratureSpec &ctrl,
                                         const AdiabaticOptions &opts = {});

/// First-order Born amplitude A = (1/2ik) int exp(2ikx) U dx, evaluated in
/// the integrated-by-parts form (1/4k^2) int exp(2ikx) U' dx so that
/// step-like potentials are admissible. The adiabaticity_ratio slot holds
/// max |U| / k^2.
TransitionResult born_amplitude(const BarrierProfile &bp, const QuadratureSpec &ctrl,
                                const AdiabaticOptions &opts = {});

/// C1 sqrt(k/p) exp(i int_{x0}^x p) + C2 sqrt(k/p) exp(-i int_{x0}^x p).
class WkbjWavefunction {
public:
    WkbjWavefunction(const BarrierProfile &bp, std::complex<double> c1, std::complex<double> c2,
                     double x0, const QuadratureSpec &spec = {}, const AdiabaticOptions &opts = {});

    std::complex<double> operator()(double x) const;
    /// Analytic derivative of the WKBJ expression.
    std::complex<double> derivative(double x) const;

private:
    BarrierProfile bp_;
    std::complex<double> c1_, c2_;
    double fd_step_;
    PhaseTable phase_;
};

WkbjWavefunction wkbj_wavefunction(const BarrierProfile &bp, std::complex<double> c1,
                                   std::complex<double> c2, double x0);

} // namespace natrans
