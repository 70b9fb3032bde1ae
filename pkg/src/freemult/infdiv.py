"""Infinitely divisible laws for both multiplicative convolutions.

Free case, half-line: a law is parameterized by gamma in R and a finite
positive measure sigma on [0, +inf], through S(w) = exp(v(w)) with

    v(z/(1-z)) = gamma - sigma({+inf}) z + integral (1+tz)/(z-t) dsigma(t).

Free case, circle: Sigma(z) = exp(u(z)) with

    u(z) = -i gamma + integral (1+tz)/(1-tz) dsigma(t),

plus the Haar law (zero first moment) marked separately.  Classical case: the
Mellin-Fourier transform is the Levy-type exponential

    Phi(s) = exp[ i lambda s
                  + integral (t^{-is} - 1 + is log t/(log^2 t + 1))
                             (log^2 t + 1)/log^2 t  drho(t) ],

whose integrand extends to t = 1 by continuity with value -s^2/2, so atoms of
rho at 1 contribute a Gaussian factor.

The free/classical parameter correspondence for triangular-array limits whose
sigma charges neither endpoint is implemented atomwise:

    drho(t)  = dsigma(t) / D(t),        D(t) = ((log^2 t + 1)/log^2 t) (t-1)^2/(t^2+1),
    lambda   = -gamma + integral J(t) drho(t),

with D(1) = 1/2 by continuity and

    J(t) = ((t^2-1)/(t^2+1)) (log^2 t + 1)/log^2 t - 1/log t,

an odd function of log t, continuous at t = 1 with J(1) = 0.  Both continuity
values and the form of the lambda shift were re-derived independently from the
compound-Poisson, central-limit and point-mass families; each family pins the
map uniquely (see tests).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .freeconv import MomentVector
from .measures import (
    FinitePositiveMeasure,
    GridSpec,
    Space,
    finite_measure_from_json,
    finite_measure_to_json,
    wrap_angle,
)
from .series import TruncatedSeries

ATOM_AT_ONE_TOL = 1e-12


@dataclass(frozen=True)
class FreeIdPosParams:
    """(gamma, sigma) for a free-multiplicative id law on the half-line."""

    gamma: float
    sigma: FinitePositiveMeasure

    def __post_init__(self):
        if self.sigma.space is not Space.COMPACTIFIED:
            raise InputError("sigma must live on the compactified half-line")


@dataclass(frozen=True)
class FreeIdCircParams:
    """(gamma mod 2 pi, sigma) for the circle, or the Haar marker."""

    gamma: float
    sigma: FinitePositiveMeasure
    haar: bool = False

    def __post_init__(self):
        if self.sigma.space is not Space.CIRCLE:
            raise InputError("sigma must live on the circle")
        object.__setattr__(self, "gamma", wrap_angle(self.gamma))

    @classmethod
    def haar_law(cls) -> "FreeIdCircParams":
        return cls(0.0, FinitePositiveMeasure.zero(Space.CIRCLE), haar=True)


@dataclass(frozen=True)
class ClassicalIdParams:
    """(lambda, rho) for a classically id law on the half-line; rho may charge 1."""

    lam: float
    rho: FinitePositiveMeasure

    def __post_init__(self):
        if self.rho.space is not Space.COMPACTIFIED:
            raise InputError("rho must live on the (compactified) half-line")
        if self.rho.mass_at_zero or self.rho.mass_at_infinity:
            raise InputError("rho must not charge 0 or +inf")


class VValue(NamedTuple):
    w: float
    value: float


def v_eval(params: FreeIdPosParams, z: float) -> VValue:
    """Evaluate v at the argument w = z/(1-z), reported as a (w, value) pair.

    The caller-facing argument w is the one S-transforms use; z in (-1, 0) is
    the integration-formula variable, where z - t < 0 kills all singularities.
    Both are returned so grid comparisons can be keyed by w.
    """
    if not (-1.0 < z < 0.0):
        raise InputError(f"v needs z in (-1, 0), got {z}")
    sig = params.sigma
    val = params.gamma - sig.mass_at_infinity * z
    if sig.mass_at_zero:
        val += sig.mass_at_zero / z
    for t, m in sig.atoms:
        val += m * (1.0 + t * z) / (z - t)
    return VValue(z / (1.0 - z), val)


def idlaw_s_pos(params: FreeIdPosParams, grid: GridSpec) -> list[float]:
    """exp(v) on a w-grid: the S-transform of the id law, strictly positive.

    Grid points are w-values; the matching formula variable z = w/(1+w) must
    land in (-1, 0), which restricts w to (-1/2, 0).
    """
    if grid.space is not Space.POSITIVE:
        raise InputError("id-law S-evaluation needs a half-line grid")
    out = []
    for w in grid.points:
        if not (-0.5 < w < 0.0):
            raise InputError(f"w-grid point {w} outside (-1/2, 0)")
        out.append(math.exp(v_eval(params, w / (1.0 + w)).value))
    return out


def circ_sigma_moment(sigma: FinitePositiveMeasure, j: int) -> complex:
    """integral of t^j dsigma over the circle."""
    return complex(sum(w * cmath.exp(1j * j * th) for th, w in sigma.atoms))


def u_series(params: FreeIdCircParams, order: int) -> TruncatedSeries:
    """u as a series: -i gamma + sigma(T) + 2 sum_j (integral t^j dsigma) z^j.

    The geometric expansion of the Herglotz kernel (1+tz)/(1-tz) is exact for
    atomic sigma.
    """
    if params.haar:
        raise InputError("the Haar law has zero first moment and no Sigma-transform")
    coeffs = np.zeros(order + 1, dtype=complex)
    coeffs[0] = -1j * params.gamma + params.sigma.total_mass
    for j in range(1, order + 1):
        coeffs[j] = 2.0 * circ_sigma_moment(params.sigma, j)
    return TruncatedSeries(coeffs)


def idlaw_moments_circ(params: FreeIdCircParams, order: int) -> MomentVector:
    """Moments of the circle id law: Sigma = exp(u) pushed back through the
    series calculus (Sigma -> S -> psi^{-1} -> revert); m_1 = exp(i gamma - sigma(T))."""
    k = order + 1
    sig_series = u_series(params, k).exp()
    # S(w) = Sigma(w/(1+w))
    w_over = TruncatedSeries.identity(k) / TruncatedSeries([1.0, 1.0], order=k)
    s_ser = sig_series.compose(w_over)
    psi_inv = s_ser * w_over
    psi = psi_inv.revert()
    return MomentVector(Space.CIRCLE, tuple(psi.coeffs[1 : order + 1]))


def _phi_integrand(t: float, s: float) -> complex:
    if abs(t - 1.0) <= ATOM_AT_ONE_TOL:
        return -0.5 * s * s + 0.0j
    ln = math.log(t)
    ln2 = ln * ln
    return (cmath.exp(-1j * s * ln) - 1.0 + 1j * s * ln / (ln2 + 1.0)) * (ln2 + 1.0) / ln2


def classical_phi_idlaw(params: ClassicalIdParams, s: float) -> complex:
    """Mellin-Fourier transform of the classical id law with parameters (lambda, rho)."""
    expo = 1j * params.lam * s
    for t, m in params.rho.atoms:
        expo += m * _phi_integrand(t, s)
    return cmath.exp(expo)


# -- the free/classical parameter correspondence ------------------------------------


def levy_density_ratio(t: float) -> float:
    """dsigma/drho density D(t); D(1) = 1/2 by continuity."""
    if abs(t - 1.0) <= ATOM_AT_ONE_TOL:
        return 0.5
    ln2 = math.log(t) ** 2
    return (ln2 + 1.0) / ln2 * (t - 1.0) ** 2 / (t * t + 1.0)


def gamma_shift_integrand(t: float) -> float:
    """J(t) in lambda = -gamma + integral J drho; odd in log t, J(1) = 0.

    Near t = 1 the two singular pieces cancel; a short series in L = log t
    avoids the cancellation:  J = (2/3) L - L^3/5 + (5/63) L^5 + O(L^7).
    """
    if abs(t - 1.0) <= ATOM_AT_ONE_TOL:
        return 0.0
    ln = math.log(t)
    if abs(ln) < 1e-2:
        l2 = ln * ln
        return ln * (2.0 / 3.0 + l2 * (-0.2 + l2 * (5.0 / 63.0)))
    return math.tanh(ln) * (ln * ln + 1.0) / (ln * ln) - 1.0 / ln


def cor34_map(params: FreeIdPosParams) -> ClassicalIdParams:
    """Free (gamma, sigma) -> classical (lambda, rho), for endpoint-free sigma."""
    sig = params.sigma
    if sig.mass_at_zero > 0.0 or sig.mass_at_infinity > 0.0:
        raise InputError("the correspondence requires sigma({0}) = sigma({inf}) = 0")
    atoms = [(t, m / levy_density_ratio(t)) for t, m in sig.atoms]
    rho = FinitePositiveMeasure.build(Space.COMPACTIFIED, atoms)
    lam = -params.gamma + sum(m * gamma_shift_integrand(t) for t, m in rho.atoms)
    return ClassicalIdParams(lam, rho)


def cor34_inverse(params: ClassicalIdParams) -> FreeIdPosParams:
    """Classical (lambda, rho) -> free (gamma, sigma); exact inverse of cor34_map."""
    atoms = [(t, m * levy_density_ratio(t)) for t, m in params.rho.atoms]
    sigma = FinitePositiveMeasure.build(Space.COMPACTIFIED, atoms)
    gamma = -params.lam + sum(m * gamma_shift_integrand(t) for t, m in params.rho.atoms)
    return FreeIdPosParams(gamma, sigma)


# -- JSON parameter schemas ----------------------------------------------------------


def free_params_to_json(params: FreeIdPosParams | FreeIdCircParams) -> dict:
    haar = isinstance(params, FreeIdCircParams) and params.haar
    return {
        "gamma": params.gamma,
        "sigma": finite_measure_to_json(params.sigma),
        "haar": haar,
    }


def free_params_from_json(data: dict):
    try:
        sigma = finite_measure_from_json(data["sigma"])
        gamma = float(data["gamma"])
        haar = bool(data.get("haar", False))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed id-law parameter JSON: {exc}") from exc
    if sigma.space is Space.CIRCLE or haar:
        if haar and sigma.total_mass > 0.0:
            raise InputError("the Haar marker excludes (gamma, sigma) content")
        return FreeIdCircParams(gamma, sigma, haar=haar)
    return FreeIdPosParams(gamma, sigma)


def classical_params_to_json(params: ClassicalIdParams) -> dict:
    return {"lambda": params.lam, "rho": finite_measure_to_json(params.rho)}


def classical_params_from_json(data: dict) -> ClassicalIdParams:
    try:
        return ClassicalIdParams(float(data["lambda"]), finite_measure_from_json(data["rho"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed classical parameter JSON: {exc}") from exc
