"""Exception hierarchy shared by the simulator and the command line."""

import numpy as np


class EITError(Exception):
    """Base class for every error raised by :mod:`eitent`."""


class InvalidParams(EITError, ValueError):
    """A parameter set violates its invariants."""


class SingularSystem(EITError, np.linalg.LinAlgError):
    """The 9x9 atomic system cannot be solved (degenerate configuration)."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConvergenceFailure(EITError, RuntimeError):
    """Grid doubling or the optimizer refinement did not settle."""


class DomainError(EITError, ValueError):
    """A closed-form expression was queried outside its domain."""
