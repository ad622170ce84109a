"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` so the CLI can
report failures without parsing messages.
"""


class NLCSError(Exception):
    code = "NLCS_ERROR"


class DenominatorPole(NLCSError, ZeroDivisionError):
    code = "DENOMINATOR_POLE"


class NonConvergent(NLCSError, ArithmeticError):
    code = "NON_CONVERGENT"


class NotSupported(NLCSError, ValueError):
    code = "NOT_SUPPORTED"


class ParameterOutOfDomain(NLCSError, ValueError):
    code = "PARAM_OUT_OF_DOMAIN"


class QuadratureNoConvergence(NLCSError, ArithmeticError):
    code = "QUAD_NO_CONVERGENCE"


class BudgetExceeded(QuadratureNoConvergence):
    code = "QUAD_BUDGET_EXCEEDED"


class InvalidGrid(NLCSError, ValueError):
    code = "INVALID_GRID"
