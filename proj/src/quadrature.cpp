#include "natrans/quadrature.hpp"

#include <string>

namespace natrans {

void QuadratureSpec::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("quadrature tolerances must be positive");
    if (max_subdivisions < 1)
        throw std::invalid_argument("max_subdivisions must be >= 1");
    if (!(truncation_threshold > 0.0))
        throw std::invalid_argument("truncation_threshold must be positive");
    if (initial_intervals < 1)
        throw std::invalid_argument("initial_intervals must be >= 1");
}

QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)> &f,
                                    double a, double b, const QuadratureSpec &spec)
{
    return integrate_adaptive_generic(f, a, b, spec);
}

namespace {

// Walks outward from the center in steps of scale/2 until three successive
// envelope samples fall below threshold. Returns the first of the three.
double probe_side(const std::function<double(double)> &envelope, double threshold,
                  const TruncationOptions &o, double direction)
{
    const double step = 0.5 * o.scale;
    const int max_steps = static_cast<int>(std::ceil(o.max_extent / 0.5));
    int quiet = 0;
    double first_quiet = o.center;
    for (int i = 1; i <= max_steps; ++i) {
        const double x = o.center + direction * step * i;
        const double e = std::abs(envelope(x));
        if (!std::isfinite(e))
            throw ConvergenceError("envelope is not finite at probe point " + std::to_string(x));
        if (e < threshold) {
            if (quiet == 0)
                first_quiet = x;
            if (++quiet == 3)
                return first_quiet;
        } else {
            quiet = 0;
        }
    }
    throw ConvergenceError("envelope does not decay below the truncation threshold within " +
                           std::to_string(o.max_extent) + " scale units");
}

double tail_estimate(const std::function<double(double)> &envelope, double x, double step)
{
    const double e1 = std::abs(envelope(x));
    if (e1 == 0.0)
        return 0.0;
    const double e2 = std::abs(envelope(x + step));
    if (e2 < e1 && e2 > 0.0)
        return e1 * std::abs(step) / std::log(e1 / e2);
    // No measurable decay between probes: charge a generous slab.
    return e1 * 10.0 * std::abs(step);
}

} // namespace

TruncationWindow find_truncation_window(const std::function<double(double)> &envelope,
                                        const QuadratureSpec &spec, const TruncationOptions &opts)
{
    spec.validate();
    if (!(opts.scale > 0.0))
        throw std::invalid_argument("truncation scale must be positive");
    TruncationWindow w;
    w.lower = opts.lower ? *opts.lower : probe_side(envelope, spec.truncation_threshold, opts, -1.0);
    w.upper = opts.upper ? *opts.upper : probe_side(envelope, spec.truncation_threshold, opts, 1.0);
    if (!opts.lower)
        w.tail_bound += tail_estimate(envelope, w.lower, -0.5 * opts.scale);
    if (!opts.upper)
        w.tail_bound += tail_estimate(envelope, w.upper, 0.5 * opts.scale);
    if (!(w.upper > w.lower))
        throw std::invalid_argument("empty truncation window");
    return w;
}

QuadratureResult integrate_improper_oscillatory(const std::function<double(double)> &envelope,
                                                const std::function<double(double)> &phase,
                                                const QuadratureSpec &spec,
                                                const TruncationOptions &opts)
{
    const TruncationWindow w = find_truncation_window(envelope, spec, opts);
    QuadratureSpec s = spec;
    const int panels = static_cast<int>(std::ceil((w.upper - w.lower) / opts.scale));
    s.initial_intervals = std::max(spec.initial_intervals, std::min(panels, spec.max_subdivisions));
    auto integrand = [&](double t) {
        const double e = envelope(t);
        if (e == 0.0)
            return std::complex<double>{};
        const double ph = phase(t);
        return std::complex<double>(e * std::cos(ph), e * std::sin(ph));
    };
    QuadratureResult r = integrate_adaptive_generic(integrand, w.lower, w.upper, s);
    r.error_estimate += w.tail_bound;
    r.truncated_at = {w.lower, w.upper};
    return r;
}

PhaseTable::PhaseTable(const std::function<double(double)> &rate, double a, double b, double ref,
                       const QuadratureSpec &spec, int nodes)
    : rate_(rate), a_(a), b_(b)
{
    if (!(b > a))
        throw std::invalid_argument("PhaseTable: empty range");
    if (nodes < 2)
        throw std::invalid_argument("PhaseTable: need at least two nodes");
    h_ = (b - a) / (nodes - 1);
    values_.assign(nodes, 0.0);
    rates_.assign(nodes, 0.0);
    QuadratureSpec seg = spec;
    seg.initial_intervals = 1;
    std::function<double(double)> r = rate;
    for (int i = 0; i < nodes; ++i) {
        rates_[i] = rate(a + h_ * i);
        if (i > 0) {
            auto q = integrate_adaptive_generic(r, a + h_ * (i - 1), a + h_ * i, seg);
            values_[i] = values_[i - 1] + q.value;
        }
    }
    const double shift = (*this)(ref);
    for (double &v : values_)
        v -= shift;
}

double PhaseTable::operator()(double t) const
{
    const int n = static_cast<int>(values_.size());
    if (t <= a_)
        return values_.front() + rates_.front() * (t - a_);
    if (t >= b_)
        return values_.back() + rates_.back() * (t - b_);
    int i = static_cast<int>((t - a_) / h_);
    i = std::clamp(i, 0, n - 2);
    const double s = (t - (a_ + h_ * i)) / h_;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * values_[i] + h10 * h_ * rates_[i] + h01 * values_[i + 1] +
           h11 * h_ * rates_[i + 1];
}

double PhaseTable::rate_at(double t) const { return rate_(t); }

} // namespace natrans
