"""Exception types shared across the package."""

from __future__ import annotations


class NonInvertible(ValueError):
    """Raised when a residue has no inverse modulo the requested modulus."""


class NotPrime(ValueError):
    pass


class NotPrimitive(ValueError):
    pass


class NonCoprimeModuli(ValueError):
    pass


class InvariantViolation(ValueError):
    """A precondition on the arithmetic parameters of an instance failed."""


class OutOfRange(ValueError):
    pass


class PoleProximity(ValueError):
    """The gamma factor was requested too close to one of its poles."""


class QuadratureNonConvergence(RuntimeError):
    pass


class TruncationBudgetExceeded(RuntimeError):
    pass


class ConfigInvalid(ValueError):
    """A configuration field failed validation; `problems` maps field to message."""

    def __init__(self, problems: dict[str, str]):
        self.problems = dict(problems)
        super().__init__("; ".join(f"{k}: {v}" for k, v in sorted(self.problems.items())))
