"""Exception hierarchy.

Verification failures are never raised: they are recorded in reports.
Exceptions signal misuse (bad levels, points outside a domain), malformed
input files, or internal inconsistencies that the theory rules out.
"""


class GapQIError(Exception):
    """Base class for all package errors."""


class InverseOfZero(GapQIError, ZeroDivisionError):
    pass


class OutsideDomain(GapQIError, ValueError):
    pass


class BadLevels(GapQIError, ValueError):
    pass


class GapAxiomError(GapQIError, ValueError):
    """A structure that must be a GAP relation is not one."""


class MissingPotentialValue(GapQIError, KeyError):
    pass


class CocycleMismatch(GapQIError, ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidWitness(GapQIError, ValueError):
    pass


class UnresolvedZeta(GapQIError, ValueError):
    pass


class ZetaNotIntegrable(GapQIError, ValueError):
    pass


class InconsistentVerdicts(GapQIError, AssertionError):
    """Raised when verdicts that must agree do not (indicates a bug)."""


class EmptyWn(GapQIError, ValueError):
    pass


class EmptyWinf(GapQIError, ValueError):
    pass


class NotInvariantK(GapQIError, ValueError):
    pass


class ZeroMass(GapQIError, ValueError):
    pass


class ZeroStartMass(ZeroMass):
    pass


class NoConvergence(GapQIError, RuntimeError):
    """Iteration did not settle; ``result`` holds the partial outcome."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


# model-file errors
class ModelError(GapQIError, ValueError):
    pass


class ParseError(ModelError):
    pass


class UnknownId(ModelError):
    pass


class NonInvariantOverride(ModelError):
    pass


class InvariantViolation(GapQIError, AssertionError):
    """A structural invariant guaranteed by the theory failed (indicates a bug
    or an inconsistent input such as contradictory overrides)."""
