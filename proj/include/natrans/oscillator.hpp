#pragma once

// Parametric excitation of a quantum oscillator. The classical
// over-barrier reflection coefficient theta of the frequency profile fixes
// the whole transition matrix W_mn.

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "natrans/adiabatic.hpp"
#include "natrans/models.hpp"

namespace natrans {

/// H = p^2 / (2 m(t)) + m(t) Omega(t)^2 x^2 / 2.
struct OscillatorSpec {
    std::function<double(double)> omega;
    std::optional<std::function<double(double)>> omega_derivative;
    double omega_minus = 1.0;
    double omega_plus = 1.0;
    /// Absent means unit mass.
    std::optional<std::function<double(double)>> mass;
    double horizon = 0.0;
    double tolerance = 0.0;
    double center = 0.0;
    double scale = 1.0;

    void validate(int samples = 2001) const;
};

struct TransitionMatrixSlice {
    double theta = 0.0;
    int n_max = 0;
    /// W(m, n), 0 <= m, n <= n_max.
    Eigen::MatrixXd entries;
    double adiabaticity_ratio = 0.0;
    bool valid = true;

    /// Diagnostic only: the row sums are not asserted to be one.
    Eigen::VectorXd row_sums() const { return entries.rowwise().sum(); }
};

/// Default cap on n_max; log-factorials keep larger values finite but the
/// Legendre recurrence loses accuracy beyond it.
inline constexpr int kDefaultMaxLevel = 60;

/// Constant-mass equivalent via t' = int dt / m, Omega' = m Omega. The new
/// time origin is the old center. Identity when the mass is absent.
OscillatorSpec reduce_mass(const OscillatorSpec &spec, const QuadratureSpec &ctrl = {});

/// Over-barrier reflection problem with p(x) = Omega(x): k = Omega_-,
/// U = Omega_-^2 - Omega^2.
BarrierProfile oscillator_barrier(const OscillatorSpec &spec);

/// theta = (1/4) |int exp(2i int Omega) Omega'/Omega dt|^2, evaluated as the
/// reflection probability of oscillator_barrier(spec). A spec with a mass
/// is reduced first.
TransitionResult theta_coefficient(const OscillatorSpec &spec, const QuadratureSpec &ctrl,
                                   const AdiabaticOptions &opts = {});

/// W_mn = (n_<! / n_>!) (1 - theta) [P^mu_nu(sqrt(1 - theta))]^2 with
/// nu = (m + n)/2, mu = |m - n|/2; zero for odd m - n (parity).
TransitionMatrixSlice perelomov_popov_matrix(double theta, int n_max,
                                             int level_cap = kDefaultMaxLevel);

/// reduce_mass -> theta_coefficient -> perelomov_popov_matrix.
TransitionMatrixSlice excitation_pipeline(const OscillatorSpec &spec, int n_max,
                                          const QuadratureSpec &ctrl,
                                          const AdiabaticOptions &opts = {},
                                          int level_cap = kDefaultMaxLevel);

/// Omega(t)^2 = k^2 - U0 / (1 + exp(-gamma t)), the frequency profile whose
/// reflection problem is the logistic barrier.
OscillatorSpec logistic_oscillator(const LogisticBarrierParams &p, double k = 1.0);

} // namespace natrans
