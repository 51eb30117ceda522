"""Non-adiabatic transition amplitudes for two-level and over-barrier problems."""

from ._natrans import (
    AlgebraElement,
    ConvergenceError,
    DomainError,
    InputError,
    Signature,
    TransitionResult,
    algebra_norm,
    born,
    cartan_decompose,
    commutator,
    exp_map,
    logistic_exact,
    logistic_perturbative,
    maitra_heller,
    oscillator_theta,
    perelomov_popov_matrix,
    reflection,
    reflection_tabulated,
    reflection_transformed,
    rosen_zener_exact,
    self_check,
    spin_flip,
    spin_flip_generic,
    spin_flip_oracle,
    spin_flip_tabulated,
    spin_flip_transformed,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
