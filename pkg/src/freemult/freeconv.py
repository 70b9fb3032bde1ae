"""Free multiplicative convolution at moment level.

The working route multiplies S-transforms as formal series:

    psi-series -> revert -> S-series   (per factor)
    product of S-series -> psi^{-1}-series -> revert -> moments.

The independent check is combinatorial: with free cumulants kappa defined by
m_n = sum over non-crossing partitions pi of prod kappa_{|B|}, the moments of
a free product satisfy

    m_n(mu x nu) = sum_{pi in NC(n)} kappa_pi[mu] * m_{K(pi)}[nu],

where K(pi) is the Kreweras complement.  NC(n) is enumerated exhaustively
(|NC(8)| = 1430), and K(pi) is read off the permutation identity
sigma_{K(pi)} = sigma_pi^{-1} o c with c the long cycle (1 2 ... n).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .errors import BranchError, InputError
from .measures import AtomicProbabilityMeasure, GridSpec, Space, moment
from .series import TruncatedSeries
from .transforms import MIN_FIRST_MOMENT, s_eval_pos, s_series, sigma_series

NC_MAX_ORDER = 10

CATALAN = (1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796)


@dataclass(frozen=True)
class MomentVector:
    """Moments m_1..m_N; m_0 is implicitly 1."""

    space: Space
    values: tuple[complex, ...]

    def m(self, k: int) -> complex:
        if k == 0:
            return 1.0 + 0.0j
        return self.values[k - 1]

    @property
    def order(self) -> int:
        return len(self.values)

    def real_values(self) -> np.ndarray:
        return np.asarray(self.values, dtype=complex).real


def moments_of(nu: AtomicProbabilityMeasure, order: int) -> MomentVector:
    return MomentVector(nu.space, tuple(complex(moment(nu, k)) for k in range(1, order + 1)))


# -- non-crossing partitions -----------------------------------------------------


def _partitions_of(elems: tuple[int, ...]):
    """All non-crossing partitions of an ordered tuple, as tuples of blocks."""
    if not elems:
        yield ()
        return
    first, rest = elems[0], elems[1:]
    for size in range(len(rest) + 1):
        for combo in combinations(range(len(rest)), size):
            block = (first,) + tuple(rest[i] for i in combo)
            # elements strictly between consecutive block members are isolated
            segments = []
            prev = -1
            for i in combo:
                segments.append(rest[prev + 1 : i])
                prev = i
            segments.append(rest[prev + 1 :])
            for parts in product(*(_partitions_of(seg) for seg in segments)):
                out = (block,)
                for p in parts:
                    out = out + p
                yield out


@lru_cache(maxsize=None)
def noncrossing_partitions(n: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All non-crossing partitions of {1..n}, cached; |NC(n)| = Catalan(n)."""
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    if n > NC_MAX_ORDER:
        raise InputError(f"non-crossing enumeration capped at n = {NC_MAX_ORDER}, got {n}")
    parts = tuple(
        tuple(sorted((tuple(sorted(b)) for b in p), key=lambda b: b[0]))
        for p in _partitions_of(tuple(range(1, n + 1)))
    )
    assert len(parts) == CATALAN[n]
    return parts


def kreweras_complement(pi, n: int):
    """Kreweras complement via sigma_K = sigma_pi^{-1} composed with the long cycle."""
    nxt = {}
    for block in pi:
        for i, b in enumerate(block):
            nxt[b] = block[(i + 1) % len(block)]
    inv = {v: k for k, v in nxt.items()}
    kperm = {i: inv[i % n + 1] for i in range(1, n + 1)}
    seen = set()
    blocks = []
    for start in range(1, n + 1):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        j = kperm[start]
        while j != start:
            cyc.append(j)
            seen.add(j)
            j = kperm[j]
        blocks.append(tuple(sorted(cyc)))
    return tuple(sorted(blocks, key=lambda b: b[0]))


# -- moment/cumulant calculus ------------------------------------------------------


def free_cumulants(m: MomentVector) -> np.ndarray:
    """kappa_1..kappa_N from the moment-cumulant relation over NC(n)."""
    n = m.order
    kappa = np.zeros(n + 1, dtype=complex)
    for k in range(1, n + 1):
        rest = 0.0 + 0.0j
        for pi in noncrossing_partitions(k):
            if len(pi) == 1:
                continue
            term = 1.0 + 0.0j
            for block in pi:
                term *= kappa[len(block)]
            rest += term
        kappa[k] = m.m(k) - rest
    return kappa[1:]


def moments_from_free_cumulants(kappa, space: Space = Space.POSITIVE) -> MomentVector:
    """Inverse map: m_n = sum over NC(n) of the cumulant products."""
    kappa = np.asarray(kappa, dtype=complex)
    n = len(kappa)
    values = []
    for k in range(1, n + 1):
        total = 0.0 + 0.0j
        for pi in noncrossing_partitions(k):
            term = 1.0 + 0.0j
            for block in pi:
                term *= kappa[len(block) - 1]
            total += term
        values.append(total)
    return MomentVector(space, tuple(values))


# -- free multiplicative convolution -----------------------------------------------


def boxtimes_moments(
    mu: AtomicProbabilityMeasure, nu: AtomicProbabilityMeasure, order: int
) -> MomentVector:
    """Moments of the free multiplicative convolution, via S-series products."""
    if mu.space is not nu.space:
        raise InputError(f"space mismatch: {mu.space.value} vs {nu.space.value}")
    k = order + 1
    s_prod = s_series(mu, k) * s_series(nu, k)
    # psi^{-1}(z) = z S(z)/(1+z); revert back to the psi-series of the product
    psi_inv = s_prod * (TruncatedSeries.identity(k) / TruncatedSeries([1.0, 1.0], order=k))
    psi = psi_inv.revert()
    return MomentVector(mu.space, tuple(psi.coeffs[1 : order + 1]))


def nc_moment_oracle(
    mu: AtomicProbabilityMeasure, nu: AtomicProbabilityMeasure, order: int
) -> MomentVector:
    """Brute-force moments of the free product by exhaustive NC enumeration."""
    if mu.space is not nu.space:
        raise InputError(f"space mismatch: {mu.space.value} vs {nu.space.value}")
    if order > 8:
        raise InputError(f"oracle order capped at 8, got {order}")
    kap = free_cumulants(moments_of(mu, order))
    mv = moments_of(nu, order)
    values = []
    for n in range(1, order + 1):
        total = 0.0 + 0.0j
        for pi in noncrossing_partitions(n):
            term = 1.0 + 0.0j
            for block in pi:
                term *= kap[len(block) - 1]
            for block in kreweras_complement(pi, n):
                term *= mv.m(len(block))
            total += term
        values.append(total)
    return MomentVector(mu.space, tuple(values))


# -- row products -------------------------------------------------------------------


def _grouped(row):
    """Collapse a row into (measure, multiplicity) pairs; rows from parametric
    families repeat one measure, so products become powers."""
    counts: dict[AtomicProbabilityMeasure, int] = {}
    for m in row:
        counts[m] = counts.get(m, 0) + 1
    return list(counts.items())


def row_s_product(
    row: list[AtomicProbabilityMeasure], alpha: float, grid: GridSpec
) -> tuple[list[float], list[float]]:
    """(1/alpha) * product of S_nu over the row, at each half-line grid point.

    Returns (values, log_values) where log_values are the principal-branch
    sums -log alpha + sum log S; every S must stay in the right half-plane.
    """
    if not row:
        raise InputError("empty row")
    if alpha <= 0.0:
        raise InputError(f"scaling constant must be positive, got {alpha}")
    if grid.space is not Space.POSITIVE:
        raise InputError("row S-products need a half-line grid")
    groups = _grouped(row)
    logs = []
    for z in grid.points:
        acc = -math.log(alpha)
        for m, count in groups:
            s = s_eval_pos(m, z)
            if s <= 0.0:
                raise BranchError(f"S left the right half-plane at z = {z}")
            acc += count * math.log(s)
        logs.append(acc)
    return [math.exp(v) for v in logs], logs


def row_sigma_product(
    row: list[AtomicProbabilityMeasure], lam: complex, order: int
) -> TruncatedSeries:
    """(1/lambda) * product of Sigma_nu over a circle row, as a series."""
    if not row:
        raise InputError("empty row")
    if abs(abs(lam) - 1.0) > 1e-9:
        raise InputError(f"scaling constant must lie on the unit circle, |lambda| = {abs(lam)}")
    log_sum = TruncatedSeries.constant(-cmath.log(lam), order=order)
    for m, count in _grouped(row):
        if abs(moment(m, 1)) <= MIN_FIRST_MOMENT:
            raise InputError("row factor has vanishing first moment (no Sigma-transform)")
        log_sum = log_sum + float(count) * sigma_series(m, order).log()
    return log_sum.exp()
