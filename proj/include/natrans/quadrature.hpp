#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature with global error control, a
// truncation scheme for improper integrals with decaying envelopes, and a
// cumulative phase table for the phase integrals queried by the
// oscillatory integrands.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace natrans {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 20000;
    /// Envelope magnitude below which improper tails are cut.
    double truncation_threshold = 1e-15;
    /// Number of equal panels the range is split into before adaptation.
    int initial_intervals = 1;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

template <class V>
struct BasicQuadratureResult {
    V value{};
    double error_estimate = 0.0;
    int subdivisions_used = 0;
    std::pair<double, double> truncated_at{0.0, 0.0};
    bool converged = true;
};

using QuadratureResult = BasicQuadratureResult<std::complex<double>>;

/// Raised when an improper integrand does not decay at the probe horizon.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double> &v) { return std::abs(v); }
inline double magnitude(const Eigen::Vector3d &v) { return v.norm(); }

template <class V>
V zero_value()
{
    if constexpr (std::is_same_v<V, Eigen::Vector3d>)
        return Eigen::Vector3d::Zero();
    else
        return V{};
}

struct Kronrod15 {
    static constexpr double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    // Gauss weights on xgk[1], xgk[3], xgk[5], xgk[7].
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

template <class V>
struct Panel {
    double a = 0.0, b = 0.0;
    V value{};
    double error = 0.0;
};

template <class V, class F>
Panel<V> gk15(const F &f, double a, double b)
{
    using K = Kronrod15;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const V fc = f(center);
    V kron = K::wgk[7] * fc;
    V gauss = K::wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * K::xgk[j];
        const V sum = f(center - dx) + f(center + dx);
        kron += K::wgk[j] * sum;
        if (j % 2 == 1)
            gauss += K::wg[j / 2] * sum;
    }
    Panel<V> p;
    p.a = a;
    p.b = b;
    p.value = half * kron;
    p.error = magnitude(V(half * (kron - gauss)));
    return p;
}

} // namespace detail

/// Globally adaptive integration of f over [a, b] for value types double,
/// std::complex<double> and Eigen::Vector3d. The worst panel is bisected
/// until the summed error meets max(abs_tol, rel_tol * |value|) or the
/// subdivision budget runs out (converged = false, best value returned).
/// The final sum runs over panels in left-endpoint order, so the result is
/// independent of heap ordering.
template <class F>
auto integrate_adaptive_generic(const F &f, double a, double b, const QuadratureSpec &spec)
    -> BasicQuadratureResult<std::decay_t<decltype(f(a))>>
{
    using V = std::decay_t<decltype(f(a))>;
    spec.validate();
    BasicQuadratureResult<V> result;
    result.truncated_at = {a, b};
    result.value = detail::zero_value<V>();
    if (a == b)
        return result;
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);

    auto worse = [](const detail::Panel<V> &x, const detail::Panel<V> &y) {
        if (x.error != y.error)
            return x.error < y.error;
        return x.a > y.a;
    };
    std::priority_queue<detail::Panel<V>, std::vector<detail::Panel<V>>, decltype(worse)> heap(
        worse);

    const int n0 = std::max(1, spec.initial_intervals);
    V total = detail::zero_value<V>();
    double total_err = 0.0;
    for (int i = 0; i < n0; ++i) {
        const double x0 = lo + (hi - lo) * i / n0;
        const double x1 = i + 1 == n0 ? hi : lo + (hi - lo) * (i + 1) / n0;
        auto p = detail::gk15<V>(f, x0, x1);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    int panels = n0;
    bool converged = false;
    while (true) {
        const double target = std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(total));
        if (total_err <= target) {
            converged = true;
            break;
        }
        if (panels >= spec.max_subdivisions)
            break;
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break; // panel at roundoff resolution
        heap.pop();
        auto left = detail::gk15<V>(f, worst.a, mid);
        auto right = detail::gk15<V>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    std::vector<detail::Panel<V>> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto &x, const auto &y) { return x.a < y.a; });
    V sum = detail::zero_value<V>();
    double err = 0.0;
    for (const auto &p : all) {
        sum += p.value;
        err += p.error;
    }
    result.value = sign * sum;
    result.error_estimate = err;
    result.subdivisions_used = panels;
    result.converged = converged;
    return result;
}

/// Complex-valued adaptive integration over [a, b].
QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)> &f,
                                    double a, double b, const QuadratureSpec &spec);

/// Where to look for the truncation points of an improper integral.
struct TruncationOptions {
    double center = 0.0;
    /// Characteristic width of the envelope; probe spacing is scale / 2.
    double scale = 1.0;
    /// Finite limits replace probing on that side.
    std::optional<double> lower;
    std::optional<double> upper;
    /// Probing gives up beyond center +- max_extent * scale.
    double max_extent = 4000.0;
};

struct TruncationWindow {
    double lower = 0.0;
    double upper = 0.0;
    /// Estimated |integral| of the envelope beyond the window.
    double tail_bound = 0.0;
};

/// Finds truncation points where |envelope| has dropped below the quadrature
/// threshold on three consecutive probes; the discarded tails are bounded
/// by geometric extrapolation of the envelope.
TruncationWindow find_truncation_window(const std::function<double(double)> &envelope,
                                        const QuadratureSpec &spec,
                                        const TruncationOptions &opts = {});

/// Integral of envelope(t) * exp(i phase(t)) over the real line (or the
/// half-lines fixed by opts), truncated where the envelope is negligible.
QuadratureResult integrate_improper_oscillatory(const std::function<double(double)> &envelope,
                                                const std::function<double(double)> &phase,
                                                const QuadratureSpec &spec,
                                                const TruncationOptions &opts = {});

/// Cumulative integral Phi(t) = int_ref^t rate, tabulated on a uniform grid
/// and interpolated with cubic Hermite polynomials (node derivatives are the
/// rate itself). Linear extrapolation with the end rates outside the grid.
class PhaseTable {
public:
    PhaseTable() = default;
    PhaseTable(const std::function<double(double)> &rate, double a, double b, double ref,
               const QuadratureSpec &spec, int nodes = 4097);

    double operator()(double t) const;
    double rate_at(double t) const;
    double lower() const { return a_; }
    double upper() const { return b_; }

private:
    std::function<double(double)> rate_;
    double a_ = 0.0, b_ = 0.0, h_ = 1.0;
    std::vector<double> values_;
    std::vector<double> rates_;
};

} // namespace natrans
