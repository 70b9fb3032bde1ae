"""Numerical and series evaluators for the multiplicative transform calculus.

For an atomic probability measure nu the moment generating transform is

    psi_nu(z) = integral of t z / (1 - t z) dnu(t),

an exact finite sum.  On the half-line psi_nu is strictly increasing on
(-inf, 0) with range (-1, 0), so its inverse there is found by a safeguarded
bracketed Newton iteration.  The S-transform is

    S_nu(z) = (1 + z)/z * psi_nu^{-1}(z),   z in (-1, 0),

with S constant 1/a for a point mass at a.  On the circle everything runs at
moment level: psi is the series with coefficients m_k, S comes from series
reversion, and Sigma_nu(z) = S_nu(z/(1-z)) satisfies Sigma_nu(0) = 1/m_1.

The Mellin-Fourier transform Phi_nu(s) = integral of t^{is} dnu(t) is the
multiplicative analogue of the characteristic function: it turns classical
multiplicative convolution into products.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import InputError, NumericalError
from .measures import AtomicProbabilityMeasure, Space, moment
from .series import TruncatedSeries

PSI_INV_RESIDUAL_TOL = 1e-13
MIN_FIRST_MOMENT = 1e-8


def psi_eval(nu: AtomicProbabilityMeasure, z: complex) -> complex:
    """Exact finite sum for psi_nu(z).

    Half-line: z anywhere off (0, +inf).  Circle: |z| < 1.
    """
    z = complex(z)
    if nu.space is Space.POSITIVE:
        if z.imag == 0.0 and z.real > 0.0:
            raise InputError(f"psi on the half-line is not defined on (0, inf); got z = {z.real}")
    else:
        if abs(z) >= 1.0:
            raise InputError(f"psi on the circle needs |z| < 1, got |z| = {abs(z)}")
    total = 0.0 + 0.0j
    for t, w in zip(nu.support_values(), nu.weights):
        denom = 1.0 - t * z
        if abs(denom) < 1e-14:
            raise NumericalError(f"psi evaluated at a singular point, z ~ 1/t for atom t = {t}")
        total += w * t * z / denom
    return total


def _psi_real(nu: AtomicProbabilityMeasure, z: float) -> float:
    return sum(w * t * z / (1.0 - t * z) for t, w in nu.atoms)


def _psi_deriv_real(nu: AtomicProbabilityMeasure, z: float) -> float:
    return sum(w * t / (1.0 - t * z) ** 2 for t, w in nu.atoms)


def psi_inv_neg(nu: AtomicProbabilityMeasure, w: float) -> float:
    """The unique z < 0 with psi_nu(z) = w, for w in (-1, 0).

    psi is strictly increasing from -1 to 0 on (-inf, 0), so a bracket plus a
    safeguarded Newton step is unconditionally safe.  The residual
    |psi(z) - w| is driven below 1e-13.
    """
    if nu.space is not Space.POSITIVE:
        raise InputError("psi inversion on the negative axis needs a half-line measure")
    if not (-1.0 < w < 0.0):
        raise InputError(f"psi^-1 needs w in (-1, 0), got {w}")
    if len(nu.atoms) == 1:
        a = nu.atoms[0][0]
        return w / (a * (1.0 + w))
    tmin = nu.atoms[0][0]
    tmax = nu.atoms[-1][0]
    # point-mass comparisons bracket the root; widen a hair against roundoff
    lo = w / (tmin * (1.0 + w)) * (1.0 + 1e-9)
    hi = w / (tmax * (1.0 + w)) * (1.0 - 1e-9)
    z = 0.5 * (lo + hi)
    for _ in range(200):
        resid = _psi_real(nu, z) - w
        if abs(resid) <= PSI_INV_RESIDUAL_TOL:
            return z
        if resid < 0.0:
            lo = z
        else:
            hi = z
        step = resid / _psi_deriv_real(nu, z)
        candidate = z - step
        z = candidate if lo < candidate < hi else 0.5 * (lo + hi)
    if abs(_psi_real(nu, z) - w) <= 1e-10:
        return z
    raise NumericalError(f"psi inversion did not converge at w = {w}")


def s_eval_pos(nu: AtomicProbabilityMeasure, z: float) -> float:
    """S_nu(z) = (1+z)/z * psi_nu^{-1}(z) on (-1, 0); strictly positive."""
    zinv = psi_inv_neg(nu, z)
    return (1.0 + z) / z * zinv


def psi_series(nu: AtomicProbabilityMeasure, order: int) -> TruncatedSeries:
    """psi as a formal series: c_0 = 0, c_k = m_k(nu)."""
    coeffs = [0.0j] + [moment(nu, k) for k in range(1, order + 1)]
    return TruncatedSeries(coeffs)


def s_series(nu: AtomicProbabilityMeasure, order: int) -> TruncatedSeries:
    """S-transform as a formal series at 0: revert psi, multiply by (1+z)/z."""
    psi = psi_series(nu, order + 1)
    if abs(psi.coeffs[1]) <= MIN_FIRST_MOMENT:
        raise InputError(
            f"S-series needs |m_1| > {MIN_FIRST_MOMENT}; got {abs(psi.coeffs[1])} "
            "(vanishing first moment)"
        )
    inv = psi.revert()
    over_z = TruncatedSeries(inv.coeffs[1:])  # psi^{-1}(z)/z, constant term 1/m_1
    return over_z * TruncatedSeries([1.0, 1.0], order=order)


def sigma_series(nu: AtomicProbabilityMeasure, order: int) -> TruncatedSeries:
    """Sigma_nu(z) = S_nu(z/(1-z)) as a series; Sigma_nu(0) = 1/m_1."""
    if nu.space is not Space.CIRCLE:
        raise InputError("the Sigma-transform series is defined for circle measures")
    return s_series(nu, order).compose(TruncatedSeries.geometric(order))


def mellin_fourier(nu: AtomicProbabilityMeasure, s: float) -> complex:
    """Phi_nu(s) = sum of w * t^{is}; |Phi| <= 1 and Phi(0) = 1."""
    if nu.space is not Space.POSITIVE:
        raise InputError("the Mellin-Fourier transform is defined for half-line measures")
    return complex(sum(w * cmath.exp(1j * s * math.log(t)) for t, w in nu.atoms))


def s_approximation_ratio(nu: AtomicProbabilityMeasure, z: float) -> complex:
    """(S_nu(z) - 1) / integral of (1-t)/(1+z-tz) dnu(t).

    The denominator is the first-order correction to S around the point mass
    at 1; the ratio tends to 1 as nu concentrates at 1.
    """
    denom = sum(w * (1.0 - t) / (1.0 + z - t * z) for t, w in nu.atoms)
    if denom == 0.0:
        raise NumericalError("approximation denominator vanishes (measure is a point mass at 1?)")
    return (s_eval_pos(nu, z) - 1.0) / denom
