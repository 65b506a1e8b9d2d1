"""Numerical laboratory for sharp radial functional inequalities.

The package evaluates, verifies, and explores the classical Hardy and
Sobolev inequalities together with their critical-exponent and
high-dimension limiting forms: exponential integrability, boundary-weighted
improvements, entropy bounds, rearrangement quasi-norms, equivalence
transformations, and variational best-constant recovery.
"""

from .constants import Params, constant
from .errors import (DomainError, IneqLabError, InconsistencyError, NumericalError,
                     SingularityError)
from .functionals import InequalityReport, evaluate, radial_lemma_margin, test_family
from .grid import (RadialFn, RadialGrid, ball_grid, high_exponent_norm,
                   radial_derivative, space_grid, weighted_integral)
from .limits import SweepTable, fit_decay_exponent, sweep, tm_series_radius
from .rearrange import LZIndex, decreasing_rearrangement, embedding_chain_check, lz_quasinorm
from .transforms import (TransformSpec, map_radius, pull_function, push_function,
                         tensor_identity_check, verify_identities)
from .varopt import QuotientSpec, minimize_rayleigh, minimizing_sequence_sweep

__version__ = "0.1.0"

__all__ = [
    "DomainError", "IneqLabError", "InconsistencyError", "InequalityReport",
    "LZIndex", "NumericalError", "Params", "QuotientSpec", "RadialFn", "RadialGrid",
    "SingularityError", "SweepTable", "TransformSpec", "ball_grid", "constant",
    "decreasing_rearrangement", "embedding_chain_check", "evaluate",
    "fit_decay_exponent", "high_exponent_norm", "lz_quasinorm", "map_radius",
    "minimize_rayleigh", "minimizing_sequence_sweep", "pull_function",
    "push_function", "radial_derivative", "radial_lemma_margin", "space_grid",
    "sweep", "tensor_identity_check", "test_family", "tm_series_radius",
    "verify_identities", "weighted_integral",
]
