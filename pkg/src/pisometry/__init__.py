"""Numerical toolkit for completely non-unitary partial isometries.

Characteristic functions, finite Blaschke model spaces, reproducing
kernels and the order relations between matrix partial isometries.
"""
from .exceptions import InputError, NumericalError, PisometryError
from .herglotz import (
    ModelFrame,
    abstract_kernel,
    canonical_multiplier,
    gamma_kernel,
    herglotz_kernel,
    herglotz_transform,
    inverse_herglotz_transform,
)
from .livsic import CharFn, charfn_defect, charfn_extension, coincide, hml_equivalent
from .model_space import (
    AtomicMeasure,
    FiniteBlaschke,
    clark_measure,
    compressed_shift,
    crofoot,
    inner_from_measure,
    isometric_multiplier,
    mult_partial_isometry,
    multiplier_exists,
    multiplier_space,
    tm_basis,
)
from .numerics import DEFAULT_TOL, Tolerance
from .orders import OrderVerdict, leq, leq_q, sim_check, simq_check
from .partial_isometry import (
    PartialIsometry,
    cayley,
    deficiency_indices,
    hm_leq,
    inverse_cayley,
    is_completely_non_unitary,
    unitary_extension,
    validate,
)
from .rational import Rational, h2_inner

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "InputError",
    "NumericalError",
    "PisometryError",
    "ModelFrame",
    "abstract_kernel",
    "canonical_multiplier",
    "gamma_kernel",
    "herglotz_kernel",
    "herglotz_transform",
    "inverse_herglotz_transform",
    "CharFn",
    "charfn_defect",
    "charfn_extension",
    "coincide",
    "hml_equivalent",
    "AtomicMeasure",
    "FiniteBlaschke",
    "clark_measure",
    "compressed_shift",
    "crofoot",
    "inner_from_measure",
    "isometric_multiplier",
    "mult_partial_isometry",
    "multiplier_exists",
    "multiplier_space",
    "tm_basis",
    "DEFAULT_TOL",
    "Tolerance",
    "OrderVerdict",
    "leq",
    "leq_q",
    "sim_check",
    "simq_check",
    "PartialIsometry",
    "cayley",
    "deficiency_indices",
    "hm_leq",
    "inverse_cayley",
    "is_completely_non_unitary",
    "unitary_extension",
    "validate",
    "Rational",
    "h2_inner",
]
