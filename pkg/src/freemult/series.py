"""Truncated complex power series.

All moment-level transform calculus in this package runs through formal
expansions ``c0 + c1 z + ... + cN z**N`` with a fixed truncation order.  The
class below supplies the ring operations together with exp/log (by the usual
ODE recurrences), composition (Horner), and compositional reversion (Newton
iteration on series, quadratically convergent).

Binary operations between series of different orders truncate to the smaller
order.  Reversion requires ``c0 == 0`` and ``c1 != 0``; composition requires
the inner series to have ``c0 == 0``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import InputError

DEFAULT_ORDER = 12


class TruncatedSeries:
    """Complex power series truncated at a fixed order.

    Parameters
    ----------
    coeffs : sequence of complex
        Coefficients ``c0..cN``.  A scalar is promoted to a constant series.
    order : int, optional
        Pad with zeros or truncate to this order instead of ``len(coeffs)-1``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order: int | None = None):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if c.ndim != 1:
            raise InputError("series coefficients must be one-dimensional")
        if order is not None:
            if order < 0:
                raise InputError(f"series order must be >= 0, got {order}")
            out = np.zeros(order + 1, dtype=complex)
            m = min(len(c), order + 1)
            out[:m] = c[:m]
            c = out
        elif c.size == 0:
            raise InputError("empty coefficient list")
        self.coeffs = c

    # -- construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, value: complex, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls([value], order=order)

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        """The series ``z``."""
        return cls([0.0, 1.0], order=order)

    @classmethod
    def geometric(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        """The series ``z/(1-z) = z + z^2 + ...`` (maps 0 to 0)."""
        c = np.ones(order + 1, dtype=complex)
        c[0] = 0.0
        return cls(c)

    # -- basics ---------------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def truncated(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, order=order)

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.coeffs.tolist()!r})"

    def __call__(self, x: complex) -> complex:
        """Evaluate by Horner's rule."""
        acc = 0.0 + 0.0j
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc

    def max_abs_diff(self, other: "TruncatedSeries") -> float:
        """Largest coefficient deviation up to the common order."""
        n = min(self.order, other.order)
        return float(np.max(np.abs(self.coeffs[: n + 1] - other.coeffs[: n + 1])))

    # -- ring arithmetic ------------------------------------------------------

    def _common(self, other) -> tuple[np.ndarray, np.ndarray]:
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, order=self.order)
        n = min(self.order, other.order)
        return self.coeffs[: n + 1], other.coeffs[: n + 1]

    def __add__(self, other) -> "TruncatedSeries":
        a, b = self._common(other)
        return TruncatedSeries(a + b)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other) -> "TruncatedSeries":
        a, b = self._common(other)
        return TruncatedSeries(a - b)

    def __rsub__(self, other) -> "TruncatedSeries":
        return (-self) + other

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.coeffs * complex(other))
        a, b = self._common(other)
        return TruncatedSeries(np.convolve(a, b)[: len(a)])

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.coeffs / complex(other))
        a, b = self._common(other)
        if b[0] == 0:
            raise InputError("series division by a series with zero constant term")
        n = len(a)
        q = np.zeros(n, dtype=complex)
        for k in range(n):
            q[k] = (a[k] - np.dot(q[:k], b[k:0:-1])) / b[0]
        return TruncatedSeries(q)

    def __rtruediv__(self, other) -> "TruncatedSeries":
        return TruncatedSeries.constant(other, order=self.order) / self

    # -- transcendental operations --------------------------------------------

    def exp(self) -> "TruncatedSeries":
        """Formal exponential, ``(e^f)' = f' e^f`` recurrence."""
        a = self.coeffs
        n = len(a)
        b = np.zeros(n, dtype=complex)
        b[0] = cmath.exp(a[0])
        for k in range(1, n):
            b[k] = sum(j * a[j] * b[k - j] for j in range(1, k + 1)) / k
        return TruncatedSeries(b)

    def log(self) -> "TruncatedSeries":
        """Formal logarithm with the principal branch at the constant term."""
        a = self.coeffs
        if a[0] == 0:
            raise InputError("series logarithm requires a nonzero constant term")
        n = len(a)
        b = np.zeros(n, dtype=complex)
        b[0] = cmath.log(a[0])
        for k in range(1, n):
            s = sum((k - j) * a[j] * b[k - j] for j in range(1, k))
            b[k] = (k * a[k] - s) / (k * a[0])
        return TruncatedSeries(b)

    def deriv(self) -> "TruncatedSeries":
        """Formal derivative (order drops by one)."""
        if self.order == 0:
            return TruncatedSeries([0.0])
        return TruncatedSeries(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """Truncated ``self(inner(z))``; requires ``inner`` to vanish at 0."""
        if inner.coeffs[0] != 0:
            raise InputError("composition requires the inner series to have zero constant term")
        n = min(self.order, inner.order)
        g = inner.truncated(n)
        acc = TruncatedSeries.constant(self.coeffs[min(self.order, n)], order=n)
        for k in range(min(self.order, n) - 1, -1, -1):
            acc = acc * g + self.coeffs[k]
        return acc

    def revert(self) -> "TruncatedSeries":
        """Compositional inverse g with ``self(g(w)) = w`` up to the order.

        Newton iteration ``g <- g - (f(g) - id)/f'(g)`` starting from
        ``w/c1``; the number of correct coefficients doubles per step.
        """
        if self.coeffs[0] != 0:
            raise InputError("reversion requires zero constant term")
        if self.coeffs[1] == 0:
            raise InputError("reversion requires nonzero linear term")
        n = self.order
        ident = TruncatedSeries.identity(n)
        g = TruncatedSeries([0.0, 1.0 / self.coeffs[1]], order=n)
        fprime = self.deriv().truncated(n)
        steps = max(1, int(math.ceil(math.log2(n + 1))) + 1) if n > 0 else 1
        for _ in range(steps):
            g = g - (self.compose(g) - ident) / fprime.compose(g)
        return g
