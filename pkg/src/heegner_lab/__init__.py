"""Exact lattice computations for period spaces of polarized hyperkahler manifolds of K3^[m] type."""

from .errors import BudgetExceeded, HeegnerLabError, ValidationError
from .lattice import GramLattice, smith_normal_form
from .discform import DiscIsometry, FiniteQuadraticForm, discriminant_form, enumerate_isometries, is_K_normal
from .hperp import PolarizationData, make_polarization, perp_gram
from .reflections import ReflectionClass, SymbolicPerpVector, classify_reflection, enumerate_ramification_classes
from .hk import analyze, galois_group, image_status, normality

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "DiscIsometry",
    "FiniteQuadraticForm",
    "GramLattice",
    "HeegnerLabError",
    "PolarizationData",
    "ReflectionClass",
    "SymbolicPerpVector",
    "ValidationError",
    "analyze",
    "classify_reflection",
    "discriminant_form",
    "enumerate_isometries",
    "enumerate_ramification_classes",
    "galois_group",
    "image_status",
    "is_K_normal",
    "make_polarization",
    "normality",
    "perp_gram",
    "smith_normal_form",
]
