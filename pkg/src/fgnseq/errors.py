"""Exception types shared across the package.

``ValueError`` is used for plain domain/usage violations; the classes here
mark *numerical* failures that callers may want to catch separately (the CLI
maps them to exit code 4).
"""


class NumericalError(Exception):
    """A numerical routine failed to meet its accuracy contract."""


class BracketingError(NumericalError):
    """A root bracket did not change sign.

    This signals an accuracy bug in the special-function evaluation, not a
    recoverable condition; zero finding aborts rather than guessing.
    """


class SingularToeplitzError(NumericalError):
    """Levinson recursion hit a reflection coefficient of magnitude ~1."""


class QuadratureError(NumericalError):
    """A quadrature did not converge under refinement."""


class SymmetryError(NumericalError):
    """A conjugate-symmetric series synthesized a non-real function."""


class ConsistencyError(NumericalError):
    """Two representations of the same quantity disagree beyond tolerance."""
