"""End-to-end checks of the limit theorems at finite row sizes.

Each checker compares an exactly computed row product against the
(gamma_n, sigma_n) parameterization of its predicted limit and reports the
per-row sup-discrepancy D_n over a grid (half-line), over series coefficients
(circle), or over a Mellin-Fourier panel (classical correspondence).  The two
sides are genuinely different computations: the row side uses exact
transforms of the row measures, the parameter side runs through the centered
kernel functionals, and the theorems make them asymptotically equal.  A
scenario passes when D_n is monotone non-increasing across the schedule and
the final row lands under the stated tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .arrays import ArraySpec, row_diagnostics
from .errors import InputError
from .freeconv import row_s_product, row_sigma_product
from .infdiv import (
    FreeIdCircParams,
    FreeIdPosParams,
    classical_phi_idlaw,
    cor34_map,
    u_series,
    v_eval,
)
from .measures import (
    AtomicProbabilityMeasure,
    GridSpec,
    Space,
    classical_multconv,
    moment,
    point_mass,
)
from .transforms import mellin_fourier

PRUNE_WEIGHT = 1e-14
DEFAULT_S_PANEL = tuple(np.linspace(-3.0, 3.0, 25))
HAAR_DIVERGENCE_THRESHOLD = 10.0


@dataclass(frozen=True)
class VerificationReport:
    """Per-row discrepancies of one scenario against its predicted limit."""

    scenario: str
    rows: tuple[int, ...]
    discrepancies: tuple[float, ...]
    monotone: bool
    final_discrepancy: float
    tolerance: float
    passed: bool
    runtime_seconds: float
    extras: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        # runtime is intentionally excluded: reports must be byte-identical
        # for identical inputs and seeds
        return {
            "schema_version": 1,
            "scenario": self.scenario,
            "rows": list(self.rows),
            "discrepancies": list(self.discrepancies),
            "monotone": self.monotone,
            "final_discrepancy": self.final_discrepancy,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "extras": self.extras,
        }


# closed-form families sit at float roundoff; do not fail monotonicity there
MONOTONE_NOISE_FLOOR = 1e-9


def _monotone_down(xs, slack: float = MONOTONE_NOISE_FLOOR) -> bool:
    return all(b <= a + slack for a, b in zip(xs, xs[1:]))


def _finish(scenario, ns, discrepancies, tol, t0, extras=None) -> VerificationReport:
    mono = _monotone_down(discrepancies)
    final = discrepancies[-1]
    return VerificationReport(
        scenario=scenario,
        rows=tuple(ns),
        discrepancies=tuple(float(d) for d in discrepancies),
        monotone=mono,
        final_discrepancy=float(final),
        tolerance=float(tol),
        passed=bool(mono and final < tol),
        runtime_seconds=time.perf_counter() - t0,
        extras=extras or {},
    )


def _check_schedule(ns):
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise InputError("the row schedule must be strictly increasing with length >= 2")


def verify_pos(
    spec: ArraySpec, ns: list[int], grid: GridSpec | None = None, tol: float = 1e-2
) -> VerificationReport:
    """Half-line theorem check: log-domain row S-product versus the
    v-functional of the row's own (gamma_n, sigma_n)."""
    t0 = time.perf_counter()
    _check_schedule(ns)
    if spec.space is not Space.POSITIVE:
        raise InputError("verify_pos needs a half-line array")
    grid = grid or GridSpec.default_half_line()
    for w in grid.points:
        if not (-0.5 < w < 0.0):
            raise InputError(f"grid point {w} outside (-1/2, 0); the v-side needs w there")
    discrepancies = []
    stats = []
    for n in ns:
        diag = row_diagnostics(spec, n)
        stats.append(diag.infinitesimality)
        params = FreeIdPosParams(diag.gamma_n, diag.sigma_n)
        _, logs = row_s_product(spec.row(n), float(spec.scaling(n)), grid)
        d = max(
            abs(lhs - v_eval(params, w / (1.0 + w)).value)
            for lhs, w in zip(logs, grid.points)
        )
        discrepancies.append(d)
    return _finish("theorem-pos", ns, discrepancies, tol, t0, {"infinitesimality": stats})


def verify_circ(
    spec: ArraySpec, ns: list[int], order: int = 8, tol: float = 1e-2
) -> VerificationReport:
    """Circle theorem check: row Sigma-product series versus exp(u) of the
    row's own (gamma_n, sigma_n), compared coefficient by coefficient.

    Each deviation is scaled by max(1, |predicted coefficient|): the predicted
    coefficients grow quickly with the order, and the limit statement is
    uniform closeness near zero, which raw high-order coefficients would
    misrepresent.  For O(1) coefficients the metric is plain absolute
    deviation.
    """
    t0 = time.perf_counter()
    _check_schedule(ns)
    if spec.space is not Space.CIRCLE:
        raise InputError("verify_circ needs a circle array")
    discrepancies = []
    for n in ns:
        diag = row_diagnostics(spec, n)
        lhs = row_sigma_product(spec.row(n), spec.scaling(n), order)
        rhs = u_series(FreeIdCircParams(diag.gamma_n, diag.sigma_n), order).exp()
        scale = np.maximum(1.0, np.abs(rhs.coeffs))
        discrepancies.append(float(np.max(np.abs(lhs.coeffs - rhs.coeffs) / scale)))
    return _finish("theorem-circ", ns, discrepancies, tol, t0)


def verify_haar(spec: ArraySpec, ns: list[int]) -> VerificationReport:
    """Haar-limit check: the haar statistic must climb past its divergence
    threshold while the row first-moment modulus decays, both monotonically."""
    t0 = time.perf_counter()
    _check_schedule(ns)
    if spec.space is not Space.CIRCLE:
        raise InputError("verify_haar needs a circle array")
    stats = []
    m1s = []
    for n in ns:
        diag = row_diagnostics(spec, n)
        stats.append(float(diag.haar_stat))
        # |m_1| of the row product = product of |m_1| over the factors
        acc = 0.0
        for m in spec.row(n):
            acc += math.log(max(abs(moment(m, 1)), 1e-300))
        m1s.append(math.exp(acc))
    stats_diverge = all(b > a for a, b in zip(stats, stats[1:])) and stats[-1] >= HAAR_DIVERGENCE_THRESHOLD
    m1_decays = all(b < a for a, b in zip(m1s, m1s[1:]))
    report = VerificationReport(
        scenario="theorem-haar",
        rows=tuple(ns),
        discrepancies=tuple(m1s),
        monotone=m1_decays,
        final_discrepancy=float(m1s[-1]),
        tolerance=HAAR_DIVERGENCE_THRESHOLD,
        passed=bool(stats_diverge and m1_decays),
        runtime_seconds=time.perf_counter() - t0,
        extras={"haar_statistics": stats, "row_first_moment_abs": m1s},
    )
    return report


# -- classical correspondence -----------------------------------------------------------


def _pruned(nu: AtomicProbabilityMeasure, min_weight: float) -> tuple[AtomicProbabilityMeasure, float]:
    kept = [(p, w) for p, w in nu.atoms if w >= min_weight]
    lost = 1.0 - sum(w for _, w in kept)
    if not kept:
        raise InputError("pruning removed every atom")
    total = sum(w for _, w in kept)
    return (
        AtomicProbabilityMeasure(nu.space, tuple((p, w / total) for p, w in kept)),
        max(lost, 0.0),
    )


def classical_row_product(
    row: list[AtomicProbabilityMeasure], alpha: float
) -> tuple[AtomicProbabilityMeasure, float]:
    """Exact classical convolution of a row (times delta_alpha), with atoms
    below weight 1e-14 pruned after each convolution; returns the product and
    the total pruned mass."""
    if not row:
        raise InputError("empty row")
    space = row[0].space
    counts: dict[AtomicProbabilityMeasure, int] = {}
    for m in row:
        counts[m] = counts.get(m, 0) + 1
    pruned_mass = 0.0
    product: AtomicProbabilityMeasure | None = None

    def mul(a, b):
        nonlocal pruned_mass
        out, lost = _pruned(classical_multconv(a, b), PRUNE_WEIGHT)
        pruned_mass += lost
        return out

    for m, count in counts.items():
        base = m
        power: AtomicProbabilityMeasure | None = None
        k = count
        while k:
            if k & 1:
                power = base if power is None else mul(power, base)
            k >>= 1
            if k:
                base = mul(base, base)
        product = power if product is None else mul(product, power)
    if space is Space.POSITIVE and alpha != 1.0:
        product = mul(product, point_mass(space, alpha))
    return product, pruned_mass


def corollary34_check(
    spec: ArraySpec, ns: list[int], s_panel=None, tol: float = 5e-2
) -> VerificationReport:
    """Classical-side correspondence check: the Mellin-Fourier transform of
    the exact classical row product against the id law with parameters mapped
    from the row's free diagnostics."""
    t0 = time.perf_counter()
    _check_schedule(ns)
    if spec.space is not Space.POSITIVE:
        raise InputError("the correspondence check needs a half-line array")
    panel = tuple(s_panel) if s_panel is not None else DEFAULT_S_PANEL
    discrepancies = []
    pruned_masses = []
    for n in ns:
        diag = row_diagnostics(spec, n)
        sig = diag.sigma_n
        if sig.mass_at_zero > 0.0 or sig.mass_at_infinity > 0.0:
            raise InputError("sigma_n charges an endpoint; the correspondence does not apply")
        classical = cor34_map(FreeIdPosParams(diag.gamma_n, sig))
        product, lost = classical_row_product(spec.row(n), float(spec.scaling(n)))
        pruned_masses.append(lost)
        d = max(
            abs(mellin_fourier(product, s) - classical_phi_idlaw(classical, s))
            for s in panel
        )
        discrepancies.append(d)
    return _finish(
        "corollary-classical",
        ns,
        discrepancies,
        tol,
        t0,
        {"pruned_mass": pruned_masses, "s_panel": [float(s) for s in panel]},
    )
