"""Atomic measures on the positive half-line, the unit circle, and the
compactified half-line [0, +inf].

Probability measures are finitely many weighted atoms: positions ``t > 0`` on
the half-line, principal angles in ``[-pi, pi)`` on the circle.  Finite
positive (not normalized) measures additionally carry explicit masses at 0 and
+inf on the compactified half-line; they hold the diagnostic measures produced
by the array module.

All values are immutable and canonicalized on construction (atoms sorted by
position, positions equal within 1e-12 merged), so structural equality is
measure equality.

``weak_distance`` is the bounded-Lipschitz dual metric

    d(s1, s2) = sup { integral of f d(s1 - s2) : |f| <= 1, Lip(f) <= 1 },

computed exactly for atomic measures.  The chart ``t -> t/(1+t)`` maps the
compactified half-line onto [0, 1]; the circle uses arc-length distance.  On a
line the supremum is a small linear program whose feasible set is a chain of
interval constraints; it is solved exactly by dynamic programming over
piecewise-linear concave value functions.  On the circle an optimal transport
never crosses some gap between adjacent atoms, so the value is the minimum of
the line problem over all cuts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InputError

POSITION_MERGE_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-9
TWO_PI = 2.0 * math.pi


class Space(str, Enum):
    POSITIVE = "positive"
    CIRCLE = "circle"
    COMPACTIFIED = "compactified"


def wrap_angle(theta: float) -> float:
    """Principal angle in [-pi, pi)."""
    out = math.fmod(theta + math.pi, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    return out - math.pi


def _merge_sorted(atoms: list[tuple[float, float]], wrap: bool) -> list[tuple[float, float]]:
    """Merge positions equal within POSITION_MERGE_TOL; atoms must be sorted."""
    merged: list[list[float]] = []
    for pos, w in atoms:
        if merged and pos - merged[-1][0] <= POSITION_MERGE_TOL:
            merged[-1][1] += w
        else:
            merged.append([pos, w])
    # the circle seam: -pi and angles just below pi are the same point
    if wrap and len(merged) > 1 and (merged[-1][0] - merged[0][0]) >= TWO_PI - POSITION_MERGE_TOL:
        merged[0][1] += merged[-1][1]
        merged.pop()
    return [(p, w) for p, w in merged]


@dataclass(frozen=True)
class AtomicProbabilityMeasure:
    """Finitely many weighted atoms with total mass one."""

    space: Space
    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.space not in (Space.POSITIVE, Space.CIRCLE):
            raise InputError(f"probability measures live on 'positive' or 'circle', got {self.space}")

    @property
    def positions(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.atoms)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.atoms)

    def support_values(self) -> np.ndarray:
        """Atom locations as numbers: reals t, or unit complexes e^{i theta}."""
        if self.space is Space.POSITIVE:
            return np.array(self.positions, dtype=float)
        return np.exp(1j * np.array(self.positions, dtype=float))


def _canonical_probability(space: Space, atoms, wrap: bool) -> AtomicProbabilityMeasure:
    cleaned = []
    for pos, w in atoms:
        pos = float(pos)
        w = float(w)
        if w <= 0.0:
            raise InputError(f"atom weight must be strictly positive, got {w}")
        if space is Space.POSITIVE:
            if pos <= 0.0:
                raise InputError(f"half-line atom position must be strictly positive, got {pos}")
        else:
            if wrap:
                pos = wrap_angle(pos)
            elif not (-math.pi <= pos < math.pi):
                raise InputError(f"circle angle must lie in [-pi, pi), got {pos}")
        cleaned.append((pos, w))
    if not cleaned:
        raise InputError("a probability measure needs at least one atom")
    cleaned.sort(key=lambda a: a[0])
    merged = _merge_sorted(cleaned, wrap=(space is Space.CIRCLE))
    total = sum(w for _, w in merged)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise InputError(f"weights must sum to 1 within {WEIGHT_SUM_TOL}, got {total}")
    merged = [(p, w / total) for p, w in merged]
    return AtomicProbabilityMeasure(space, tuple(merged))


def make_measure(space: Space | str, atoms) -> AtomicProbabilityMeasure:
    """Build a canonical atomic probability measure from (position, weight) pairs.

    Duplicate positions (within 1e-12) are merged by summing weights; weights
    are renormalized to an exact unit total after passing the 1e-9 sum check.
    """
    return _canonical_probability(Space(space), atoms, wrap=False)


def point_mass(space: Space | str, position: float) -> AtomicProbabilityMeasure:
    return make_measure(space, [(position, 1.0)])


def _rebuilt(space: Space, atoms) -> AtomicProbabilityMeasure:
    """Internal constructor for computed results: wraps circle angles."""
    return _canonical_probability(space, atoms, wrap=True)


# -- operations on probability measures ----------------------------------------


def classical_multconv(
    mu: AtomicProbabilityMeasure, nu: AtomicProbabilityMeasure
) -> AtomicProbabilityMeasure:
    """Classical multiplicative convolution: the law of a product of
    independent variables.  Exact atom arithmetic: pairwise position products
    (angle sums mod 2 pi on the circle) with multiplied weights."""
    if mu.space is not nu.space:
        raise InputError(f"space mismatch: {mu.space.value} vs {nu.space.value}")
    out = []
    if mu.space is Space.POSITIVE:
        for a, wa in mu.atoms:
            for b, wb in nu.atoms:
                out.append((a * b, wa * wb))
    else:
        for a, wa in mu.atoms:
            for b, wb in nu.atoms:
                out.append((a + b, wa * wb))
    return _rebuilt(mu.space, out)


@dataclass(frozen=True)
class Reciprocal:
    """t -> 1/t on the half-line."""


@dataclass(frozen=True)
class ScaleBy:
    """Centering map: the image measure of nu under t -> t/factor."""

    factor: float


@dataclass(frozen=True)
class RotateBy:
    """Circle centering: rotate every atom by the conjugate of `point`."""

    point: complex


def pushforward(nu: AtomicProbabilityMeasure, mapping) -> AtomicProbabilityMeasure:
    """Pushforward of an atomic measure under Reciprocal, ScaleBy, or RotateBy."""
    if isinstance(mapping, Reciprocal):
        if nu.space is not Space.POSITIVE:
            raise InputError("reciprocal pushforward is defined on the half-line only")
        return _rebuilt(nu.space, [(1.0 / p, w) for p, w in nu.atoms])
    if isinstance(mapping, ScaleBy):
        if nu.space is not Space.POSITIVE:
            raise InputError("scaling pushforward is defined on the half-line only")
        if not mapping.factor > 0.0:
            raise InputError(f"scale factor must be positive, got {mapping.factor}")
        return _rebuilt(nu.space, [(p / mapping.factor, w) for p, w in nu.atoms])
    if isinstance(mapping, RotateBy):
        if nu.space is not Space.CIRCLE:
            raise InputError("rotation pushforward is defined on the circle only")
        r = abs(mapping.point)
        if abs(r - 1.0) > 1e-9:
            raise InputError(f"rotation point must lie on the unit circle, |b| = {r}")
        ang = cmath.phase(mapping.point)
        return _rebuilt(nu.space, [(p - ang, w) for p, w in nu.atoms])
    raise InputError(f"unknown pushforward mapping {mapping!r}")


def moment(nu: AtomicProbabilityMeasure, k: int) -> complex | float:
    """k-th moment; real on the half-line, complex (with t = e^{i theta}) on
    the circle."""
    if k < 0:
        raise InputError(f"moment order must be >= 0, got {k}")
    if nu.space is Space.POSITIVE:
        return float(sum(w * p**k for p, w in nu.atoms))
    return complex(sum(w * cmath.exp(1j * k * p) for p, w in nu.atoms))


def infinitesimality_stat(row: list[AtomicProbabilityMeasure], eps: float) -> float:
    """max over the row of the mass outside the eps-window around 1:
    nu({|t - 1| >= eps}) on the half-line, nu({|arg t| >= eps}) on the circle."""
    if eps <= 0.0:
        raise InputError(f"eps must be positive, got {eps}")
    if not row:
        raise InputError("empty row")
    worst = 0.0
    for nu in row:
        if nu.space is Space.POSITIVE:
            mass = sum(w for p, w in nu.atoms if abs(p - 1.0) >= eps)
        else:
            mass = sum(w for p, w in nu.atoms if abs(p) >= eps)
        worst = max(worst, mass)
    return worst


# -- finite positive measures ----------------------------------------------------


@dataclass(frozen=True)
class FinitePositiveMeasure:
    """Finite positive atomic measure; zero measure is an empty atom list.

    On the compactified half-line the masses at the endpoints 0 and +inf are
    explicit fields; interior atoms have positions in (0, inf).
    """

    space: Space
    atoms: tuple[tuple[float, float], ...] = ()
    mass_at_zero: float = 0.0
    mass_at_infinity: float = 0.0

    def __post_init__(self):
        if self.space not in (Space.COMPACTIFIED, Space.CIRCLE):
            raise InputError(
                f"finite positive measures live on 'compactified' or 'circle', got {self.space}"
            )
        if self.mass_at_zero < 0.0 or self.mass_at_infinity < 0.0:
            raise InputError("endpoint masses must be nonnegative")
        if self.space is Space.CIRCLE and (self.mass_at_zero or self.mass_at_infinity):
            raise InputError("circle measures have no endpoint masses")

    @classmethod
    def build(cls, space: Space | str, atoms=(), mass_at_zero=0.0, mass_at_infinity=0.0):
        """Canonical constructor: drops zero-weight atoms, sorts and merges."""
        space = Space(space)
        cleaned = []
        for pos, w in atoms:
            pos, w = float(pos), float(w)
            if w < 0.0:
                raise InputError(f"atom weight must be nonnegative, got {w}")
            if w == 0.0:
                continue
            if space is Space.COMPACTIFIED:
                if pos <= 0.0 or math.isinf(pos):
                    raise InputError("interior atoms need positions in (0, inf); use endpoint masses")
            else:
                pos = wrap_angle(pos)
            cleaned.append((pos, w))
        cleaned.sort(key=lambda a: a[0])
        merged = _merge_sorted(cleaned, wrap=(space is Space.CIRCLE))
        return cls(space, tuple(merged), float(mass_at_zero), float(mass_at_infinity))

    @classmethod
    def zero(cls, space: Space | str) -> "FinitePositiveMeasure":
        return cls(Space(space))

    @property
    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms) + self.mass_at_zero + self.mass_at_infinity

    def scaled(self, c: float) -> "FinitePositiveMeasure":
        if c < 0.0:
            raise InputError("scale factor must be nonnegative")
        return FinitePositiveMeasure.build(
            self.space,
            [(p, c * w) for p, w in self.atoms],
            c * self.mass_at_zero,
            c * self.mass_at_infinity,
        )

    def __add__(self, other: "FinitePositiveMeasure") -> "FinitePositiveMeasure":
        if self.space is not other.space:
            raise InputError(f"space mismatch: {self.space.value} vs {other.space.value}")
        return FinitePositiveMeasure.build(
            self.space,
            list(self.atoms) + list(other.atoms),
            self.mass_at_zero + other.mass_at_zero,
            self.mass_at_infinity + other.mass_at_infinity,
        )


# -- bounded-Lipschitz distance ------------------------------------------------


class _ConcavePL:
    """Piecewise-linear concave function on [-1, 1], stored as breakpoints."""

    __slots__ = ("xs", "ys")

    def __init__(self, xs, ys):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)

    def at(self, x: float) -> float:
        return float(np.interp(x, self.xs, self.ys))

    def argmax_interval(self) -> tuple[float, float, float]:
        vmax = float(np.max(self.ys))
        tol = 1e-14 * max(1.0, abs(vmax))
        idx = np.nonzero(self.ys >= vmax - tol)[0]
        return float(self.xs[idx[0]]), float(self.xs[idx[-1]]), vmax

    def add_linear(self, slope: float) -> "_ConcavePL":
        return _ConcavePL(self.xs, self.ys + slope * self.xs)

    def slide_max(self, c: float) -> "_ConcavePL":
        """W(f) = max of self over [max(-1, f - c), min(1, f + c)], f in [-1, 1].

        Concave again: the rising branch shifted, a plateau at the max, the
        falling branch shifted the other way.
        """
        xl, xr, _ = self.argmax_interval()
        cands = [-1.0, 1.0, xl - c, xr + c, c - 1.0, 1.0 - c]
        cands += [x - c for x in self.xs] + [x + c for x in self.xs]
        grid = np.unique(np.clip(np.asarray(cands), -1.0, 1.0))
        ys = []
        for f in grid:
            lo = max(-1.0, f - c)
            hi = min(1.0, f + c)
            ys.append(self.at(min(max(xl, lo), hi)))
        return _ConcavePL(grid, ys)


def _bl_chain(gaps: np.ndarray, signed: np.ndarray) -> float:
    """sup of sum(signed * f) over |f_i| <= 1, |f_{i+1} - f_i| <= gaps[i]."""
    value = _ConcavePL([-1.0, 1.0], [-signed[0], signed[0]])
    for gap, d in zip(gaps, signed[1:]):
        value = value.slide_max(float(gap)).add_linear(float(d))
    return value.argmax_interval()[2]


def _signed_atoms(sigma1: FinitePositiveMeasure, sigma2: FinitePositiveMeasure):
    """Merged (position, s1-mass minus s2-mass) list in chart coordinates."""
    entries: list[tuple[float, float]] = []

    def chart(t: float) -> float:
        return t / (1.0 + t)

    for sig, sgn in ((sigma1, 1.0), (sigma2, -1.0)):
        if sig.space is Space.COMPACTIFIED:
            if sig.mass_at_zero:
                entries.append((0.0, sgn * sig.mass_at_zero))
            if sig.mass_at_infinity:
                entries.append((1.0, sgn * sig.mass_at_infinity))
            entries.extend((chart(p), sgn * w) for p, w in sig.atoms)
        else:
            entries.extend((p, sgn * w) for p, w in sig.atoms)
    entries.sort(key=lambda e: e[0])
    merged: list[list[float]] = []
    for pos, d in entries:
        if merged and pos - merged[-1][0] <= POSITION_MERGE_TOL:
            merged[-1][1] += d
        else:
            merged.append([pos, d])
    return [(p, d) for p, d in merged if d != 0.0]


def weak_distance(sigma1: FinitePositiveMeasure, sigma2: FinitePositiveMeasure) -> float:
    """Bounded-Lipschitz dual distance between finite positive measures.

    Metrizes weak-* convergence including total-mass differences; exact for
    atomic measures.
    """
    if sigma1.space is not sigma2.space:
        raise InputError(f"space mismatch: {sigma1.space.value} vs {sigma2.space.value}")
    pairs = _signed_atoms(sigma1, sigma2)
    if not pairs:
        return 0.0
    pos = np.array([p for p, _ in pairs])
    signed = np.array([d for _, d in pairs])
    if len(pairs) == 1:
        return float(abs(signed[0]))
    if sigma1.space is Space.COMPACTIFIED:
        return _bl_chain(np.diff(pos), signed)
    # circle: wrap seam already merged; optimal transport leaves some gap
    # between cyclically adjacent atoms empty, so cut there and take the best.
    m = len(pairs)
    gaps_all = np.diff(np.concatenate([pos, [pos[0] + TWO_PI]]))
    best = math.inf
    for cut in range(m):
        order = np.arange(cut + 1, cut + 1 + m) % m
        chain_gaps = gaps_all[(np.arange(cut + 1, cut + m)) % m]
        best = min(best, _bl_chain(chain_gaps, signed[order]))
    return best


# -- evaluation grids ------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Finite evaluation grid: real points in (-1, 0) for half-line work,
    complex points inside the unit disk for circle work."""

    space: Space
    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.space is Space.POSITIVE:
            for z in self.points:
                if not (-1.0 < z < 0.0):
                    raise InputError(f"half-line grid point {z} outside (-1, 0)")
        elif self.space is Space.CIRCLE:
            for z in self.points:
                if abs(z) >= 1.0:
                    raise InputError(f"circle grid point {z} outside the open unit disk")
        else:
            raise InputError(f"grids live on 'positive' or 'circle', got {self.space}")

    @classmethod
    def default_half_line(cls, n: int = 16, lo: float = -0.45, hi: float = -0.05) -> "GridSpec":
        return cls(Space.POSITIVE, tuple(np.linspace(lo, hi, n)))

    @classmethod
    def default_circle(cls, n: int = 16, radius: float = 0.25) -> "GridSpec":
        angs = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return cls(Space.CIRCLE, tuple(radius * np.exp(1j * angs)))


# -- JSON schemas -----------------------------------------------------------------


def measure_to_json(nu: AtomicProbabilityMeasure) -> dict:
    key = "t" if nu.space is Space.POSITIVE else "theta"
    return {
        "space": nu.space.value,
        "atoms": [{key: p, "w": w} for p, w in nu.atoms],
    }


def measure_from_json(data: dict) -> AtomicProbabilityMeasure:
    try:
        space = Space(data["space"])
        key = "t" if space is Space.POSITIVE else "theta"
        atoms = [(a[key], a["w"]) for a in data["atoms"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed measure JSON: {exc}") from exc
    return make_measure(space, atoms)


def finite_measure_to_json(sigma: FinitePositiveMeasure) -> dict:
    if sigma.space is Space.COMPACTIFIED:
        return {
            "space": "positive",
            "atoms": [{"t": p, "w": w} for p, w in sigma.atoms],
            "massAtZero": sigma.mass_at_zero,
            "massAtInfinity": sigma.mass_at_infinity,
        }
    return {
        "space": "circle",
        "atoms": [{"theta": p, "w": w} for p, w in sigma.atoms],
    }


def finite_measure_from_json(data: dict) -> FinitePositiveMeasure:
    try:
        raw = data["space"]
        if raw == "positive":
            atoms = [(a["t"], a["w"]) for a in data["atoms"]]
            return FinitePositiveMeasure.build(
                Space.COMPACTIFIED,
                atoms,
                data.get("massAtZero", 0.0),
                data.get("massAtInfinity", 0.0),
            )
        if raw == "circle":
            atoms = [(a["theta"], a["w"]) for a in data["atoms"]]
            return FinitePositiveMeasure.build(Space.CIRCLE, atoms)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed finite-measure JSON: {exc}") from exc
    raise InputError(f"unknown space {raw!r} in finite-measure JSON")
