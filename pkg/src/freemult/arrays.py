"""Triangular arrays, centering, and per-row limit diagnostics.

A row of the array is a list of atomic probability measures.  With a window
parameter tau, each member gets a centering constant

    half-line:  b = exp( integral of log t over e^{-tau} < t < e^{tau} ),
    circle:     b = exp( i * integral of arg t over |arg t| < tau ),

and the centered measure is the pushforward under t -> t/b.  The diagnostics
a row contributes are:

    sigma_n  (half-line): atom a of a centered measure, weight w, places
             w (t-1)^2/(t^2+1) at t = 1/a on [0, +inf];
    gamma_n  (half-line): -log alpha_n
             + sum_k [ integral (t^2-1)/(t^2+1) at t = 1/a - log b_k ];
    sigma_n  (circle): weight w (1 - cos theta) at each centered atom angle;
    gamma_n  (circle): arg lambda_n + sum_k [ integral sin theta + arg b_k ],
             meaningful only through e^{i gamma_n};
    haar statistic: the total mass of the circle sigma_n, which diverges
             exactly when the row products drift to the Haar law.

``diagnose`` runs a schedule of rows and issues a finite-n verdict: the
sigma_n / gamma_n sequences Cauchy-settling below tolerance, the haar
statistic blowing past its threshold, or inconclusive.  The thresholds are
configuration, not mathematics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import InputError
from .measures import (
    AtomicProbabilityMeasure,
    FinitePositiveMeasure,
    RotateBy,
    ScaleBy,
    Space,
    infinitesimality_stat,
    make_measure,
    measure_from_json,
    pushforward,
    weak_distance,
    wrap_angle,
)

OVERFLOW_RECIPROCAL = 1e-300
DEFAULT_INFINITESIMAL_EPS = 0.1


# -- array specifications -----------------------------------------------------------


@dataclass(frozen=True)
class ArraySpec:
    """A triangular array: n -> (k_n measures, scaling constant), plus tau.

    Built-in families cover the standard limit scenarios; inline rows allow
    arbitrary arrays keyed by n.
    """

    space: Space
    family: str
    params: tuple = ()
    tau: float = 1.0
    scaling_value: complex = 1.0
    inline_rows: tuple = ()  # ((n, (measure, ...)), ...) for the inline family

    _FAMILIES = ("point_mass", "two_point_poisson", "symmetric_pair", "inline")

    def __post_init__(self):
        if self.family not in self._FAMILIES:
            raise InputError(f"unknown family {self.family!r}; choose from {self._FAMILIES}")
        hi = math.pi if self.space is Space.CIRCLE else math.inf
        if not (0.0 < self.tau < hi):
            raise InputError(f"tau must lie in (0, {hi}) for {self.space.value}, got {self.tau}")
        if self.space is Space.POSITIVE:
            a = complex(self.scaling_value)
            if a.imag != 0.0 or a.real <= 0.0:
                raise InputError("half-line scaling constants must be positive reals")
        else:
            if abs(abs(complex(self.scaling_value)) - 1.0) > 1e-9:
                raise InputError("circle scaling constants must lie on the unit circle")

    # family constructors

    @classmethod
    def point_mass(cls, space: Space | str, c: float, tau: float = 1.0, scaling=1.0):
        """Row n: k_n = n copies of the point mass at exp(c/n) (or angle c/n)."""
        return cls(Space(space), "point_mass", (float(c),), tau, scaling)

    @classmethod
    def two_point_poisson(cls, space: Space | str, c: float, jump: float, tau: float = 1.0, scaling=1.0):
        """Row n: k_n = n copies of (1 - c/n) delta_1 + (c/n) delta at the jump
        (a position t0 on the half-line, an angle on the circle)."""
        if c <= 0.0:
            raise InputError(f"rate c must be positive, got {c}")
        return cls(Space(space), "two_point_poisson", (float(c), float(jump)), tau, scaling)

    @classmethod
    def symmetric_pair(cls, beta: float = 0.25, tau: float = 1.0, scaling=1.0):
        """Circle rows of (delta at n^-beta + delta at -n^-beta)/2, k_n = n."""
        if beta <= 0.0:
            raise InputError(f"decay exponent beta must be positive, got {beta}")
        return cls(Space.CIRCLE, "symmetric_pair", (float(beta),), tau, scaling)

    @classmethod
    def inline(cls, space: Space | str, rows: dict, tau: float = 1.0, scaling=1.0):
        packed = tuple(sorted((int(n), tuple(ms)) for n, ms in rows.items()))
        return cls(Space(space), "inline", (), tau, scaling, packed)

    # row access

    def row(self, n: int) -> list[AtomicProbabilityMeasure]:
        if n < 1:
            raise InputError(f"row index must be >= 1, got {n}")
        if self.family == "point_mass":
            (c,) = self.params
            pos = math.exp(c / n) if self.space is Space.POSITIVE else wrap_angle(c / n)
            return [make_measure(self.space, [(pos, 1.0)])] * n
        if self.family == "two_point_poisson":
            c, jump = self.params
            if c >= n:
                raise InputError(f"two-point row needs n > c, got n = {n}, c = {c}")
            base = 1.0 if self.space is Space.POSITIVE else 0.0
            m = make_measure(self.space, [(base, 1.0 - c / n), (jump, c / n)])
            return [m] * n
        if self.family == "symmetric_pair":
            (beta,) = self.params
            theta = n ** (-beta)
            m = make_measure(self.space, [(theta, 0.5), (-theta, 0.5)])
            return [m] * n
        for packed_n, measures in self.inline_rows:
            if packed_n == n:
                return list(measures)
        raise InputError(f"no inline row for n = {n}")

    def scaling(self, n: int) -> complex | float:
        if self.space is Space.POSITIVE:
            return float(complex(self.scaling_value).real)
        return complex(self.scaling_value)


def load_array_config(data: dict) -> tuple[ArraySpec, list[int]]:
    """Parse the JSON array schema; returns the spec and the row schedule."""
    try:
        space = Space(data["space"])
        family = data["family"]
        params = data.get("params", {})
        tau = float(data.get("tau", 1.0))
        schedule = [int(round(float(n))) for n in data.get("rows", [])]
        scaling_cfg = data.get("scaling", {"type": "const", "value": 1.0})
        if scaling_cfg.get("type") != "const":
            raise InputError(f"unsupported scaling type {scaling_cfg.get('type')!r}")
        raw = scaling_cfg.get("value", 1.0)
        scaling = complex(raw[0], raw[1]) if isinstance(raw, (list, tuple)) else float(raw)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed array JSON: {exc}") from exc
    if family == "point_mass":
        spec = ArraySpec.point_mass(space, params.get("c", 0.0), tau, scaling)
    elif family == "two_point_poisson":
        jump = params["t0"] if space is Space.POSITIVE else params["theta"]
        spec = ArraySpec.two_point_poisson(space, params["c"], jump, tau, scaling)
    elif family == "symmetric_pair":
        spec = ArraySpec.symmetric_pair(params.get("beta", 0.25), tau, scaling)
    elif family == "inline":
        rows = {
            int(entry["n"]): [measure_from_json(m) for m in entry["measures"]]
            for entry in params["rows"]
        }
        spec = ArraySpec.inline(space, rows, tau, scaling)
    else:
        raise InputError(f"unknown family {family!r}")
    return spec, schedule


# -- centering ------------------------------------------------------------------------


def centering_constants(row: list[AtomicProbabilityMeasure], tau: float):
    """Per-measure centering constants over the window |log t| < tau."""
    out = []
    for nu in row:
        if nu.space is Space.POSITIVE:
            acc = sum(w * math.log(t) for t, w in nu.atoms if abs(math.log(t)) < tau)
            out.append(math.exp(acc))
        else:
            acc = sum(w * th for th, w in nu.atoms if abs(th) < tau)
            out.append(cmath.exp(1j * acc))
    return out


def center_row(row: list[AtomicProbabilityMeasure], constants) -> list[AtomicProbabilityMeasure]:
    """Pushforward each measure under t -> t / b_k."""
    if len(row) != len(constants):
        raise InputError(f"row length {len(row)} != constants length {len(constants)}")
    out = []
    cache: dict = {}
    for nu, b in zip(row, constants):
        key = (nu, b)
        hit = cache.get(key)
        if hit is None:
            mapping = ScaleBy(b) if nu.space is Space.POSITIVE else RotateBy(b)
            hit = cache[key] = pushforward(nu, mapping)
        out.append(hit)
    return out


# -- row diagnostics -------------------------------------------------------------------


def sigma_n_pos(centered_row: list[AtomicProbabilityMeasure]) -> FinitePositiveMeasure:
    """Half-line diagnostic measure on [0, +inf]."""
    acc: dict[float, float] = {}
    mass_zero = 0.0
    mass_inf = 0.0
    for nu in centered_row:
        if nu.space is not Space.POSITIVE:
            raise InputError("half-line diagnostics need half-line measures")
        for a, w in nu.atoms:
            if a < OVERFLOW_RECIPROCAL:
                mass_inf += w  # density (t-1)^2/(t^2+1) -> 1 at t = +inf
            elif a > 1.0 / OVERFLOW_RECIPROCAL:
                mass_zero += w
            else:
                t = 1.0 / a
                fac = (t - 1.0) ** 2 / (t * t + 1.0)
                if fac > 0.0:
                    acc[t] = acc.get(t, 0.0) + w * fac
    return FinitePositiveMeasure.build(Space.COMPACTIFIED, acc.items(), mass_zero, mass_inf)


def _odd_tail_ratio(a: float) -> float:
    """(t^2-1)/(t^2+1) at t = 1/a, evaluated overflow-safely as (1-a^2)/(1+a^2)."""
    if a > 1e150:
        return -1.0
    if a < 1e-150:
        return 1.0
    return (1.0 - a * a) / (1.0 + a * a)


def gamma_n_pos(row: list[AtomicProbabilityMeasure], alpha: float, tau: float) -> float:
    """Half-line centering-corrected drift for one row."""
    if alpha <= 0.0:
        raise InputError(f"alpha must be positive, got {alpha}")
    constants = centering_constants(row, tau)
    centered = center_row(row, constants)
    total = -math.log(alpha)
    for nu, b in zip(centered, constants):
        total += sum(w * _odd_tail_ratio(a) for a, w in nu.atoms) - math.log(b)
    return total


def sigma_n_circ(centered_row: list[AtomicProbabilityMeasure]) -> FinitePositiveMeasure:
    """Circle diagnostic measure: weight w (1 - cos theta) at each atom."""
    acc: dict[float, float] = {}
    for nu in centered_row:
        if nu.space is not Space.CIRCLE:
            raise InputError("circle diagnostics need circle measures")
        for th, w in nu.atoms:
            fac = 1.0 - math.cos(th)
            if fac > 0.0:
                acc[th] = acc.get(th, 0.0) + w * fac
    return FinitePositiveMeasure.build(Space.CIRCLE, acc.items())


def gamma_n_circ(row: list[AtomicProbabilityMeasure], lam: complex, tau: float) -> float:
    """Circle drift, reported as its canonical representative in [-pi, pi);
    only e^{i gamma_n} is meaningful downstream."""
    constants = centering_constants(row, tau)
    centered = center_row(row, constants)
    total = cmath.phase(complex(lam))
    for nu, b in zip(centered, constants):
        total += sum(w * math.sin(th) for th, w in nu.atoms) + cmath.phase(b)
    return wrap_angle(total)


def haar_statistic(centered_row: list[AtomicProbabilityMeasure]) -> float:
    """Total mass of the circle diagnostic measure; diverges on Haar-bound rows."""
    return sum(
        w * (1.0 - math.cos(th)) for nu in centered_row for th, w in nu.atoms
    )


# -- the compactly supported kernel functionals ------------------------------------------


def g_eval(nu_centered: AtomicProbabilityMeasure, w: complex) -> complex:
    """Half-line kernel functional of a centered measure, Im w > 0.

    g(w) = integral [(t^2-1)/(t^2+1) + ((1+tw)/(w-t)) (t-1)^2/(t^2+1)]
    against the reciprocal image of the measure; Im g <= 0 on the upper
    half-plane and g(conj w) = conj g(w).
    """
    w = complex(w)
    if not w.imag > 0.0:
        raise InputError(f"g needs Im w > 0, got {w}")
    if nu_centered.space is not Space.POSITIVE:
        raise InputError("g is defined for half-line measures")
    total = 0.0 + 0.0j
    for a, wt in nu_centered.atoms:
        t = 1.0 / a
        tail = _odd_tail_ratio(a)
        fac = (t - 1.0) ** 2 / (t * t + 1.0)
        total += wt * (tail + (1.0 + t * w) / (w - t) * fac)
    return total


def h_eval(nu_centered: AtomicProbabilityMeasure, z: complex) -> complex:
    """Circle kernel functional of a centered measure, |z| < 1.

    h(z) = -i integral Im t + integral ((1+tz)/(1-tz)) (1 - Re t); the
    Herglotz kernel keeps Re h >= 0 inside the disk.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise InputError(f"h needs |z| < 1, got |z| = {abs(z)}")
    if nu_centered.space is not Space.CIRCLE:
        raise InputError("h is defined for circle measures")
    total = 0.0 + 0.0j
    for th, wt in nu_centered.atoms:
        t = cmath.exp(1j * th)
        total += wt * (-1j * math.sin(th) + (1.0 + t * z) / (1.0 - t * z) * (1.0 - math.cos(th)))
    return total


# -- proof-constant bounds for the kernel inequalities ------------------------------------


def halfline_kernel_bound(test_points, t_grid_size: int = 4001) -> float:
    """M = (74 + M1)/M2 with M1 = max |Re (1+tw)/(w-t)| and M2 = min of
    -Im (1+tw)/(w-t), extrema over t in (0, inf) and w in the test set.

    Valid for centered measures whose log-scale mean is at most 1/2 in
    absolute value (tau = 1 windows and near-infinitesimal rows).
    """
    ts = np.concatenate([[0.0], np.logspace(-8.0, 8.0, t_grid_size)])
    m1 = 0.0
    m2 = math.inf
    for w in test_points:
        w = complex(w)
        if not (w.imag > 0.0 and w.real < 0.0):
            raise InputError(f"test point {w} must have Im w > 0 and Re w < 0")
        x, y = w.real, w.imag
        cand = list(ts)
        # stationary points of (1+t^2)/|w-t|^2:  x t^2 - (x^2+y^2-1) t - x = 0
        disc = (x * x + y * y - 1.0) ** 2 + 4.0 * x * x
        if disc >= 0.0 and x != 0.0:
            for root in np.roots([x, -(x * x + y * y - 1.0), -x]):
                if abs(root.imag) < 1e-12 and root.real > 0.0:
                    cand.append(float(root.real))
        t = np.asarray(cand)
        kern = (1.0 + t * w) / (w - t)
        m1 = max(m1, float(np.max(np.abs(kern.real))), abs(x) / (x * x + y * y), abs(x))
        m2 = min(m2, float(np.min(-kern.imag)), y / (x * x + y * y), y)
    return (74.0 + m1) / m2


def circle_kernel_bound(radius: float = 0.25, grid: int = 720) -> float:
    """M = (12 + M2)/M1 with M1 = min Re (1+tz)/(1-tz), M2 = max |Im ...|,
    over |t| = 1 and |z| <= radius.

    Valid for centered circle measures with arg-mean at most 1/10.
    """
    if not (0.0 < radius < 1.0):
        raise InputError(f"radius must be in (0, 1), got {radius}")
    th = np.linspace(-math.pi, math.pi, grid, endpoint=False)
    t = np.exp(1j * th)
    m1 = math.inf
    m2 = 0.0
    # extrema over the disk are attained on the boundary circle
    for r in (radius, 0.5 * radius):
        for phi in np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False):
            z = r * cmath.exp(1j * phi)
            kern = (1.0 + t * z) / (1.0 - t * z)
            m1 = min(m1, float(np.min(kern.real)))
            m2 = max(m2, float(np.max(np.abs(kern.imag))))
    # exact boundary values of the Poisson kernel sharpen the grid minimum
    m1 = min(m1, (1.0 - radius) / (1.0 + radius))
    return (12.0 + m2) / m1


# -- schedule diagnostics -------------------------------------------------------------------


class VerdictKind(str, Enum):
    CONVERGES = "converges"
    HAAR = "haar"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    gamma_hat: float | None = None
    sigma_hat: FinitePositiveMeasure | None = None


@dataclass(frozen=True)
class RowDiagnostics:
    n: int
    b: tuple
    sigma_n: FinitePositiveMeasure
    gamma_n: float
    haar_stat: float | None
    infinitesimality: float


@dataclass(frozen=True)
class DiagnoseConfig:
    cauchy_tol: float = 1e-2
    haar_threshold: float = 10.0
    infinitesimal_eps: float = DEFAULT_INFINITESIMAL_EPS


@dataclass(frozen=True)
class DiagnoseResult:
    rows: tuple[RowDiagnostics, ...]
    verdict: Verdict


def row_diagnostics(spec: ArraySpec, n: int, eps: float = DEFAULT_INFINITESIMAL_EPS) -> RowDiagnostics:
    row = spec.row(n)
    constants = centering_constants(row, spec.tau)
    centered = center_row(row, constants)
    stat = infinitesimality_stat(row, eps)
    if spec.space is Space.POSITIVE:
        sigma = sigma_n_pos(centered)
        gamma = gamma_n_pos(row, float(spec.scaling(n)), spec.tau)
        haar = None
    else:
        sigma = sigma_n_circ(centered)
        gamma = gamma_n_circ(row, spec.scaling(n), spec.tau)
        haar = haar_statistic(centered)
    return RowDiagnostics(n, tuple(constants), sigma, gamma, haar, stat)


def _non_increasing(xs, slack: float = 1e-12) -> bool:
    return all(b <= a + slack for a, b in zip(xs, xs[1:]))


def diagnose(spec: ArraySpec, ns: list[int], config: DiagnoseConfig = DiagnoseConfig()) -> DiagnoseResult:
    """Run a row schedule and issue a finite-n verdict.

    The schedule must be strictly increasing with at least three rows.  The
    verdict is a numerical judgment at finite n: Cauchy-settling of the
    (sigma_n, gamma_n) sequence below the tolerance, haar-statistic blow-up
    past the threshold, or inconclusive.
    """
    if len(ns) < 3 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise InputError("the row schedule must be strictly increasing with length >= 3")
    rows = tuple(row_diagnostics(spec, n, config.infinitesimal_eps) for n in ns)

    if spec.space is Space.CIRCLE:
        stats = [r.haar_stat for r in rows]
        if all(b > a for a, b in zip(stats, stats[1:])) and stats[-1] >= config.haar_threshold:
            return DiagnoseResult(rows, Verdict(VerdictKind.HAAR))

    dists = [weak_distance(a.sigma_n, b.sigma_n) for a, b in zip(rows, rows[1:])]
    if spec.space is Space.CIRCLE:
        gaps = [
            abs(cmath.exp(1j * a.gamma_n) - cmath.exp(1j * b.gamma_n))
            for a, b in zip(rows, rows[1:])
        ]
    else:
        gaps = [abs(a.gamma_n - b.gamma_n) for a, b in zip(rows, rows[1:])]
    if (
        _non_increasing(dists)
        and _non_increasing(gaps)
        and dists[-1] < config.cauchy_tol
        and gaps[-1] < config.cauchy_tol
    ):
        last = rows[-1]
        return DiagnoseResult(rows, Verdict(VerdictKind.CONVERGES, last.gamma_n, last.sigma_n))
    return DiagnoseResult(rows, Verdict(VerdictKind.INCONCLUSIVE))
