"""Exception types shared across the package.

Two failure classes matter to callers (and to the CLI exit codes): bad input
versus a computation that could not be carried out numerically.
"""


class FreemultError(Exception):
    """Base class for all package errors."""


class InputError(FreemultError, ValueError):
    """Invalid input: malformed measure, domain violation, bad configuration."""


class NumericalError(FreemultError, ArithmeticError):
    """A numerically well-posed request that failed during evaluation."""


class BranchError(NumericalError):
    """A principal-branch requirement was violated (value left its half-plane)."""
