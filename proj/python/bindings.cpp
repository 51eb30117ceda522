#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "natrans/models.hpp"
#include "natrans/oscillator.hpp"
#include "natrans/selfcheck.hpp"

namespace py = pybind11;
using namespace natrans;

namespace {

QuadratureSpec quadrature(double rel_tol, double abs_tol)
{
    QuadratureSpec q;
    q.rel_tol = rel_tol;
    q.abs_tol = abs_tol;
    return q;
}

// End samples double as the asymptotes.
TabulatedProfile tabulated(std::vector<double> x, std::vector<double> v, const std::string &axis)
{
    const TabulatedAsymptotes a{v.empty() ? 0.0 : v.front(), v.empty() ? 0.0 : v.back(), 0.0};
    return TabulatedProfile(std::move(x), std::move(v), a, axis);
}

} // namespace

PYBIND11_MODULE(_natrans, m)
{
    m.doc() = "Non-adiabatic transition amplitudes: exact benchmarks, a group-valued propagator "
              "and leading-order adiabatic estimators.";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::enum_<Signature>(m, "Signature")
        .value("Compact", Signature::Compact)
        .value("NonCompact", Signature::NonCompact);

    py::class_<AlgebraElement>(m, "AlgebraElement")
        .def(py::init<Signature, double, double, double>(), py::arg("sig"), py::arg("c1"), py::arg("c2"),
             py::arg("c3"))
        .def_property_readonly("coefficients", [](const AlgebraElement &a) { return Eigen::Vector3d(a.c); })
        .def_readonly("sig", &AlgebraElement::sig)
        .def("matrix", [](const AlgebraElement &a) { return Eigen::Matrix2cd(to_matrix(a)); })
        .def("__add__", [](const AlgebraElement &a, const AlgebraElement &b) { return a + b; })
        .def("__sub__", [](const AlgebraElement &a, const AlgebraElement &b) { return a - b; })
        .def("__mul__", [](const AlgebraElement &a, double s) { return a * s; })
        .def("__rmul__", [](const AlgebraElement &a, double s) { return s * a; });

    m.def("commutator", &commutator);
    m.def("algebra_norm", &algebra_norm);
    m.def("exp_map", [](const AlgebraElement &a) { return Eigen::Matrix2cd(exp_map(a).m); },
          "2x2 matrix of exp(a).");
    m.def(
        "cartan_decompose",
        [](const AlgebraElement &b) {
            const CartanFrame f = cartan_decompose(b);
            return py::make_tuple(f.beta, Eigen::Matrix2cd(f.v.m), f.generator);
        },
        "(beta, v, log v) with b = v beta v^-1.");

    py::class_<TransitionResult>(m, "TransitionResult")
        .def_readonly("amplitude", &TransitionResult::amplitude)
        .def_readonly("probability", &TransitionResult::probability)
        .def_readonly("adiabaticity_ratio", &TransitionResult::adiabaticity_ratio)
        .def_readonly("error_estimate", &TransitionResult::error_estimate)
        .def_readonly("valid", &TransitionResult::valid)
        .def("__repr__", [](const TransitionResult &r) {
            return "TransitionResult(probability=" + std::to_string(r.probability) +
                   ", valid=" + (r.valid ? "True" : "False") + ")";
        });

    m.def(
        "rosen_zener_exact",
        [](double beta0, double beta1, double T) { return rosen_zener_exact({beta0, beta1, T}); },
        py::arg("beta0"), py::arg("beta1"), py::arg("T") = 1.0);
    m.def(
        "spin_flip",
        [](double beta0, double beta1, double T, double rel_tol, double abs_tol) {
            return spin_flip_amplitude(rosen_zener_profile({beta0, beta1, T}), quadrature(rel_tol, abs_tol));
        },
        py::arg("beta0"), py::arg("beta1"), py::arg("T") = 1.0, py::arg("rel_tol") = 1e-10,
        py::arg("abs_tol") = 1e-14, "Leading-order spin-flip amplitude for the sech pulse.");
    m.def(
        "spin_flip_transformed",
        [](double beta0, double beta1, double T) {
            return rosen_zener_adiabatic_transformed({beta0, beta1, T}, {});
        },
        py::arg("beta0"), py::arg("beta1"), py::arg("T") = 1.0);
    m.def(
        "spin_flip_oracle",
        [](double beta0, double beta1, double T) {
            py::gil_scoped_release release;
            return oracle_transition(to_driving_profile(rosen_zener_profile({beta0, beta1, T})),
                                     default_oracle_control())
                .result;
        },
        py::arg("beta0"), py::arg("beta1"), py::arg("T") = 1.0,
        "Transition probability from direct propagation of the group equation.");
    m.def(
        "spin_flip_generic",
        [](double beta0, double beta1, double T) {
            const SpinFieldProfile sp = rosen_zener_profile({beta0, beta1, T});
            return generic_transition(to_driving_profile(sp), sp.center, {});
        },
        py::arg("beta0"), py::arg("beta1"), py::arg("T") = 1.0);
    m.def(
        "spin_flip_tabulated",
        [](std::vector<double> t, std::vector<double> b1, double b0, double tolerance) {
            const TabulatedProfile tab(std::move(t), std::move(b1), {0.0, 0.0, tolerance}, "t");
            return spin_flip_amplitude(as_spin_profile(tab, b0), {});
        },
        py::arg("t"), py::arg("b1"), py::arg("b0"), py::arg("tolerance") = 1e-12,
        "Spin flip for a sampled transverse field b1(t) that vanishes at both ends.");

    m.def(
        "logistic_exact", [](double alpha, double beta) { return logistic_exact({alpha, beta}); },
        py::arg("alpha"), py::arg("beta"));
    m.def(
        "logistic_perturbative", [](double alpha, double beta) { return logistic_perturbative({alpha, beta}); },
        py::arg("alpha"), py::arg("beta"));
    m.def(
        "reflection",
        [](double alpha, double beta, double k) { return reflection_amplitude(logistic_profile({alpha, beta}, k), {}); },
        py::arg("alpha"), py::arg("beta"), py::arg("k") = 1.0);
    m.def(
        "reflection_transformed",
        [](double alpha, double beta) { return logistic_adiabatic_transformed({alpha, beta}, {}); },
        py::arg("alpha"), py::arg("beta"));
    m.def(
        "born", [](double alpha, double beta, double k) { return born_amplitude(logistic_profile({alpha, beta}, k), {}); },
        py::arg("alpha"), py::arg("beta"), py::arg("k") = 1.0);
    m.def(
        "maitra_heller",
        [](double alpha, double beta, double k) {
            return maitra_heller_amplitude(logistic_profile({alpha, beta}, k), {});
        },
        py::arg("alpha"), py::arg("beta"), py::arg("k") = 1.0);
    m.def(
        "reflection_tabulated",
        [](std::vector<double> x, std::vector<double> u, double k) {
            return reflection_amplitude(as_barrier_profile(tabulated(std::move(x), std::move(u), "x"), k), {});
        },
        py::arg("x"), py::arg("u"), py::arg("k"), "Reflection amplitude for a sampled potential U(x).");

    m.def(
        "perelomov_popov_matrix",
        [](double theta, int n_max) { return Eigen::MatrixXd(perelomov_popov_matrix(theta, n_max).entries); },
        py::arg("theta"), py::arg("n_max"), "Level transition probabilities W[m, n].");
    m.def(
        "oscillator_theta",
        [](double alpha, double beta, double k) {
            return theta_coefficient(logistic_oscillator({alpha, beta}, k), {}).probability;
        },
        py::arg("alpha"), py::arg("beta"), py::arg("k") = 1.0,
        "Reflection coefficient theta of the logistic frequency profile.");

    m.def("self_check", [] {
        py::list out;
        for (const auto &r : run_self_checks())
            out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
    });
}
