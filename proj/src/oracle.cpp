#include "natrans/oracle.hpp"

#include <cmath>
#include <string>

namespace natrans {

namespace {

// Unit vector spanning the range of a rank-one projector.
Eigen::Vector2cd range_vector(const Matrix2 &p)
{
    const double n0 = p.col(0).norm(), n1 = p.col(1).norm();
    return n0 >= n1 ? Eigen::Vector2cd(p.col(0) / n0) : Eigen::Vector2cd(p.col(1) / n1);
}

} // namespace

DrivingProfile DrivingProfile::make(Signature sig, std::function<AlgebraElement(double)> generator,
                                    AlgebraElement asymptote_minus, AlgebraElement asymptote_plus,
                                    double horizon, double asymptotic_tol, double center,
                                    double scale,
                                    std::optional<AlgebraElement> frame_plus_generator)
{
    if (!generator)
        throw std::invalid_argument("DrivingProfile: missing generator");
    if (asymptote_minus.sig != sig)
        throw SignatureMismatch(sig, asymptote_minus.sig);
    if (asymptote_plus.sig != sig)
        throw SignatureMismatch(sig, asymptote_plus.sig);
    if (!(horizon > 0.0) || !(asymptotic_tol > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("DrivingProfile: horizon, tolerance and scale must be positive");

    DrivingProfile p;
    p.sig = sig;
    p.generator = std::move(generator);
    p.asymptote_minus = asymptote_minus;
    p.asymptote_plus = asymptote_plus;
    p.horizon = horizon;
    p.asymptotic_tol = asymptotic_tol;
    p.center = center;
    p.scale = scale;

    const double dev_minus = algebra_norm(p.generator(center - horizon) - asymptote_minus);
    const double dev_plus = algebra_norm(p.generator(center + horizon) - asymptote_plus);
    if (!(dev_minus <= asymptotic_tol) || !(dev_plus <= asymptotic_tol))
        throw DomainError("DrivingProfile: generator misses its declared asymptotes at the "
                          "horizon (deviations " +
                          std::to_string(dev_minus) + ", " + std::to_string(dev_plus) + ")");

    p.frame_minus = cartan_decompose(asymptote_minus);
    if (frame_plus_generator) {
        if (frame_plus_generator->sig != sig)
            throw SignatureMismatch(sig, frame_plus_generator->sig);
        if (frame_plus_generator->c[2] != 0.0)
            throw DomainError("DrivingProfile: frame generator must lie in the J1-J2 plane");
        CartanFrame f;
        f.generator = *frame_plus_generator;
        f.v = exp_map(f.generator);
        f.beta = conjugate(f.v.inverse(), asymptote_plus);
        f.sign = p.frame_minus.sign;
        if (std::abs(f.beta.c[0]) + std::abs(f.beta.c[1]) > 1e-9 * (1.0 + f.beta.c.norm()))
            throw DomainError("DrivingProfile: declared plus frame does not diagonalize b+");
        f.beta.c[0] = f.beta.c[1] = 0.0;
        p.frame_plus = f;
    } else {
        p.frame_plus = cartan_decompose(asymptote_plus, p.frame_minus.sign);
    }
    return p;
}

ProjectorPair ProjectorPair::cartan()
{
    ProjectorPair p;
    p.plus << 1.0, 0.0, 0.0, 0.0;
    p.minus << 0.0, 0.0, 0.0, 1.0;
    return p;
}

ProjectorPair ProjectorPair::from_matrices(const Matrix2 &plus, const Matrix2 &minus)
{
    constexpr double tol = 1e-12;
    for (const Matrix2 *m : {&plus, &minus}) {
        if (max_abs(*m - m->adjoint()) > tol)
            throw DomainError("projector is not Hermitian");
        if (max_abs(*m * *m - *m) > tol)
            throw DomainError("projector is not idempotent");
        if (std::abs(m->trace() - 1.0) > tol)
            throw DomainError("projector does not have unit trace");
    }
    if (max_abs(plus * minus) > tol || max_abs(minus * plus) > tol)
        throw DomainError("projectors are not orthogonal");
    return {plus, minus};
}

PropagationResult evolve(const DrivingProfile &profile, double t0, double t1,
                         const QuadratureSpec &ctrl, StepperScheme scheme)
{
    if (!std::isfinite(t0) || !std::isfinite(t1))
        throw std::invalid_argument("evolve: interval must be finite");
    return ode_propagate(profile.generator, t0, t1, ctrl, 0.25 * profile.scale, scheme);
}

SOperatorResult s_operator(const DrivingProfile &profile, const QuadratureSpec &ctrl,
                           int max_doublings, StepperScheme scheme)
{
    const double c = profile.center;
    double T = profile.horizon;
    const GroupElement v_minus = profile.frame_minus.v;
    const GroupElement v_plus_inv = profile.frame_plus.v.inverse();
    const AlgebraElement &beta_minus = profile.frame_minus.beta;
    const AlgebraElement &beta_plus = profile.frame_plus.beta;

    auto strip = [&](const GroupElement &g, double half_width) {
        return exp_map(-half_width * beta_plus) * v_plus_inv * g * v_minus *
               exp_map(-half_width * beta_minus);
    };

    SOperatorResult out;
    PropagationResult core = evolve(profile, c - T, c + T, ctrl, scheme);
    GroupElement g = core.g;
    out.steps = core.steps;
    out.error_estimate = core.error_estimate;
    out.max_constraint_violation = core.max_constraint_violation;
    GroupElement s = strip(g, T);

    for (int d = 1; d <= max_doublings; ++d) {
        PropagationResult left = evolve(profile, c - 2 * T, c - T, ctrl, scheme);
        PropagationResult right = evolve(profile, c + T, c + 2 * T, ctrl, scheme);
        g = right.g * g * left.g;
        out.steps += left.steps + right.steps;
        const double extension_err = left.error_estimate + right.error_estimate;
        out.error_estimate += extension_err;
        out.max_constraint_violation =
            std::max({out.max_constraint_violation, left.max_constraint_violation,
                      right.max_constraint_violation, g.constraint_violation()});
        T *= 2.0;
        const GroupElement next = strip(g, T);
        out.residual = max_abs(next.m - s.m);
        s = next;
        out.doublings = d;
        const double allowance = 10.0 * profile.asymptotic_tol + 10.0 * extension_err +
                                 std::max(ctrl.abs_tol, ctrl.rel_tol * max_abs(s.m));
        if (out.residual <= allowance) {
            out.s = s;
            out.horizon = T;
            out.error_estimate += out.residual;
            return out;
        }
    }
    throw ConvergenceError("s_operator: S did not stabilize after " +
                           std::to_string(max_doublings) + " horizon doublings (last change " +
                           std::to_string(out.residual) + ")");
}

TransitionResult transition_probability(const GroupElement &s, const ProjectorPair &proj)
{
    ProjectorPair checked = ProjectorPair::from_matrices(proj.plus, proj.minus);
    const Eigen::Vector2cd e_plus = range_vector(checked.plus);
    const Eigen::Vector2cd e_minus = range_vector(checked.minus);

    TransitionResult r;
    const std::complex<double> off = e_plus.dot(s.m * e_minus);
    if (s.sig == Signature::Compact) {
        r.amplitude = off;
        r.probability = (checked.plus * s.m * checked.minus * s.m.adjoint()).trace().real();
    } else {
        const std::complex<double> diag = e_plus.dot(s.m * e_plus);
        r.amplitude = off / diag;
        r.probability = std::norm(r.amplitude);
    }
    return r;
}

QuadratureSpec default_oracle_control()
{
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    q.abs_tol = 1e-11;
    q.max_subdivisions = 20'000'000;
    return q;
}

OracleTransition oracle_transition(const DrivingProfile &profile, const QuadratureSpec &ctrl,
                                   StepperScheme scheme)
{
    OracleTransition o;
    o.s = s_operator(profile, ctrl, 6, scheme);
    o.result = transition_probability(o.s.s, ProjectorPair::cartan());
    o.result.error_estimate = o.s.error_estimate;
    return o;
}

} // namespace natrans
