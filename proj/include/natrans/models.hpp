#pragma once

// Exactly solvable benchmarks (Rosen-Zener pulse, logistic barrier) with
// their closed forms and substituted-variable integrals, plus tabulated
// user profiles.

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "natrans/adiabatic.hpp"

namespace natrans {

/// Malformed or inconsistent user input (CSV, sidecar, config).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// B(t) = (1/T)(beta1 / cosh(t/T), 0, beta0).
struct RosenZenerParams {
    double beta0 = 1.0;
    double beta1 = 0.5;
    double T = 1.0;

    void validate() const;
};

SpinFieldProfile rosen_zener_profile(const RosenZenerParams &p);

/// [sin(pi beta1) / cosh(pi beta0)]^2, independent of T.
double rosen_zener_exact(const RosenZenerParams &p);

/// Real integral over xi in (0, inf) after the substitution
/// cos k sinh(t/T) = sinh xi, tan k = beta1/beta0:
/// A = sin k int sin(2 alpha(xi)) tanh xi / sqrt(sinh^2 xi + cos^2 k) dxi,
/// alpha(xi) = beta0 xi + beta1 atan(tan k tanh xi).
TransitionResult rosen_zener_adiabatic_transformed(const RosenZenerParams &p,
                                                   const QuadratureSpec &ctrl);

/// Field of constant magnitude beta0/T turned from +z to -z in the 1-3
/// plane: B = (beta0/T)(sech(t/T), 0, -tanh(t/T)), so dtheta/dt = sech(t/T)/T.
struct InversionParams {
    double beta0 = 1.0;
    double T = 1.0;

    void validate() const;
};

SpinFieldProfile inversion_profile(const InversionParams &p);

/// In the frame co-rotating with the field the problem is a Rosen-Zener
/// pulse with beta1 = 1/2, so the probability of leaving the adiabatic
/// state is 1 / cosh^2(pi beta0).
double inversion_exact(const InversionParams &p);

/// U(x) = U0 / (1 + exp(-gamma x)) with alpha = k/gamma, beta = U0/k^2.
struct LogisticBarrierParams {
    double alpha = 2.0;
    double beta = 0.5;

    void validate() const;
};

BarrierProfile logistic_profile(const LogisticBarrierParams &p, double k = 1.0);

/// |A| = sinh(pi alpha (1 - s)) / sinh(pi alpha (1 + s)), s = sqrt(1 - beta).
double logistic_exact(const LogisticBarrierParams &p);

/// pi alpha^2 beta^2 / (4 sinh^2(2 pi alpha)), as printed. Its constant
/// differs from the small-beta limit of logistic_exact by a factor of pi.
double logistic_perturbative(const LogisticBarrierParams &p);

/// The z = exp(gamma x) form of the reflection amplitude, integrated in
/// u = ln z over the real line:
/// A = (beta/4) int exp(2i alpha Phi(u)) e^u / ((1 + e^u)(1 + (1 - beta) e^u)) du.
TransitionResult logistic_adiabatic_transformed(const LogisticBarrierParams &p,
                                                const QuadratureSpec &ctrl);

/// Antiderivative of p/k in u = gamma x used by the transformed integral.
double logistic_phase(const LogisticBarrierParams &p, double u);

/// Declared asymptotes of a tabulated profile.
struct TabulatedAsymptotes {
    double minus = 0.0;
    double plus = 0.0;
    double tolerance = 0.0;
};

/// Samples of a scalar profile (a transverse field or a potential),
/// interpolated with modified Akima cubics (linear below four samples) and
/// held at the declared asymptotes outside the sampled range.
class TabulatedProfile {
public:
    TabulatedProfile(std::vector<double> abscissae, std::vector<double> values,
                     TabulatedAsymptotes asymptotes, std::string axis_name = "t");

    double operator()(double t) const;
    double derivative(double t) const;

    const std::vector<double> &abscissae() const { return t_; }
    const std::vector<double> &values() const { return v_; }
    const TabulatedAsymptotes &asymptotes() const { return asym_; }
    const std::string &axis_name() const { return axis_; }
    bool is_cubic() const { return static_cast<bool>(spline_); }
    double lower() const { return t_.front(); }
    double upper() const { return t_.back(); }

private:
    struct Spline;
    std::vector<double> t_, v_;
    TabulatedAsymptotes asym_;
    std::string axis_;
    std::shared_ptr<const Spline> spline_;
};

/// Parses `t,value` / `x,value` CSV text.
TabulatedProfile parse_tabulated(std::istream &csv, const TabulatedAsymptotes &asymptotes);

/// Reads the CSV at `path` and its sidecar JSON. Without an explicit
/// sidecar, `<path minus extension>.json` is used when present; otherwise
/// the end samples are taken as the asymptotes.
TabulatedProfile load_tabulated(const std::filesystem::path &path,
                                const std::optional<std::filesystem::path> &sidecar = std::nullopt);

/// Field (value(t), 0, b0) for a tabulated transverse component.
SpinFieldProfile as_spin_profile(const TabulatedProfile &tab, double b0);

/// Potential U(x) = value(x) at asymptotic wavenumber k.
BarrierProfile as_barrier_profile(const TabulatedProfile &tab, double k);

} // namespace natrans
