"""Exception hierarchy shared by all ramify modules.

The CLI maps these onto process exit codes, so library code should raise
the most specific class that applies.
"""


class RamifyError(Exception):
    """Base class for all errors raised by this package."""


class InputError(RamifyError, ValueError):
    """Malformed or out-of-domain input (bad JSON, negative break, non-prime p)."""


class InfeasiblePlanError(RamifyError):
    """A tower plan violates an admissibility or feasibility condition."""


class InconsistentPresentationError(RamifyError):
    """A power-commutator presentation failed the consistency check.

    Carries the witness triple (x, y, z) with (x*y)*z != x*(y*z) when one
    is available.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CapExceededError(RamifyError):
    """An enumeration would exceed the configured element cap."""
