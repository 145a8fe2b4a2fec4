"""Exception hierarchy.

Every domain error carries a stable ``code`` (the class name) so that the
command line front-end can report it verbatim.
"""


class FloerPotError(Exception):
    """Base class for all domain errors raised by the package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ParseError(FloerPotError, ValueError):
    pass


class NotAUnit(FloerPotError, ArithmeticError):
    pass


class NoSolution(FloerPotError):
    pass


class Unbounded(FloerPotError):
    pass


class BasepointOnFacet(FloerPotError):
    pass


class BasepointExcluded(FloerPotError):
    pass


class PrecisionTooLow(FloerPotError):
    pass


class WeightTooSmall(FloerPotError):
    pass


class InhomogeneousValuations(FloerPotError):
    pass


class NoSolutionFound(FloerPotError):
    """No residue solution was found. This is not a proof that none exists."""


class DegenerateJacobian(FloerPotError):
    pass


class NonTerminating(FloerPotError):
    pass


class PrecisionExhausted(FloerPotError):
    pass


class MissingCertificate(FloerPotError):
    pass
