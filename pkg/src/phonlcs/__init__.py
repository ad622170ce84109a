"""Nonlinear coherent states attached to x_n = (n+sigma)^2 (n+2gamma-1)/n.

Modules
-------
specfun   hypergeometric series, Bessel/Macdonald functions, Kampe de Feriet, G^{20}_{12}
quad      adaptive Gauss-Legendre panels and a vectorised exp-sinh rule
nlcs      sequences, factorials, normalization, coefficients, photon statistics
measure   resolution-of-identity weight, moments, identity matrix
pho       pseudoharmonic oscillator eigenbasis
bargmann  wavefunctions, Bargmann-type transform, integral identities
cli       command-line verification and data emission
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetExceeded,
    DenominatorPole,
    InvalidGrid,
    NLCSError,
    NonConvergent,
    NotSupported,
    ParameterOutOfDomain,
    QuadratureNoConvergence,
)
from .nlcs import DomainClass, Params, StateSpec, classify  # noqa: E402

__all__ = [
    "BudgetExceeded",
    "DenominatorPole",
    "DomainClass",
    "InvalidGrid",
    "NLCSError",
    "NonConvergent",
    "NotSupported",
    "ParameterOutOfDomain",
    "Params",
    "QuadratureNoConvergence",
    "StateSpec",
    "classify",
]
