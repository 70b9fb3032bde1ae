"""Random-matrix Monte Carlo oracles for the free multiplicative convolution.

The free product of two half-line laws is realized as the spectral law of
A^{1/2} U B U* A^{1/2} with A, B fixed diagonal matrices whose spectra match
the input atoms (multiplicities by largest remainder) and U Haar orthogonal.
On the circle the model is D_A W D_B W* with unitary diagonals and W Haar
unitary; Haar sampling is QR of a Ginibre matrix with the sign/phase
correction on the diagonal of R.

Per-sample streams come from ``numpy.random.default_rng([seed, index])``, so
results are independent of execution order and bit-reproducible for a fixed
seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .measures import AtomicProbabilityMeasure, Space
from .freeconv import MomentVector


@dataclass(frozen=True)
class MCConfig:
    dim: int
    samples: int
    seed: int
    space: Space = Space.POSITIVE

    def __post_init__(self):
        if self.dim < 2:
            raise InputError(f"matrix dimension must be >= 2, got {self.dim}")
        if self.samples < 1:
            raise InputError(f"sample count must be >= 1, got {self.samples}")


@dataclass(frozen=True)
class MCMoments:
    """Sample means and standard errors of (1/d) tr(M^k), k = 1..K."""

    space: Space
    estimates: tuple[complex, ...]
    stderr: tuple[float, ...]
    config: MCConfig

    def as_moment_vector(self) -> MomentVector:
        return MomentVector(self.space, self.estimates)


def haar_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    a = rng.standard_normal((d, d))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diagonal(r))


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(a)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def spectrum_multiplicities(nu: AtomicProbabilityMeasure, d: int) -> np.ndarray:
    """Round atom weights to integer multiplicities summing to d (largest
    remainder)."""
    if d < len(nu.atoms):
        raise InputError(f"dimension {d} is smaller than the atom count {len(nu.atoms)}")
    w = np.array(nu.weights)
    counts = np.floor(w * d).astype(int)
    counts = np.maximum(counts, 1)
    frac = w * d - counts
    while counts.sum() < d:
        i = int(np.argmax(frac))
        counts[i] += 1
        frac[i] -= 1.0
    while counts.sum() > d:
        order = np.argsort(frac)
        for i in order:
            if counts[i] > 1:
                counts[i] -= 1
                frac[i] += 1.0
                break
    return counts


def _diag_spectrum(nu: AtomicProbabilityMeasure, d: int) -> np.ndarray:
    counts = spectrum_multiplicities(nu, d)
    return np.repeat(nu.support_values(), counts)


def _run_samples(fn, cfg: MCConfig, workers: int = 1):
    indices = range(cfg.samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, indices))
    return [fn(i) for i in indices]


def _collect(space: Space, per_sample: list[np.ndarray], cfg: MCConfig) -> MCMoments:
    arr = np.asarray(per_sample)
    est = arr.mean(axis=0)
    se = arr.std(axis=0, ddof=1) / math.sqrt(cfg.samples) if cfg.samples > 1 else np.zeros(arr.shape[1])
    if space is Space.POSITIVE:
        est = est.real.astype(complex)
    return MCMoments(space, tuple(est), tuple(np.abs(se)), cfg)


def rmt_oracle_pos(
    mu: AtomicProbabilityMeasure,
    nu: AtomicProbabilityMeasure,
    cfg: MCConfig,
    order: int = 4,
    workers: int = 1,
) -> MCMoments:
    """Empirical moments of the free product of two half-line measures."""
    if mu.space is not Space.POSITIVE or nu.space is not Space.POSITIVE:
        raise InputError("the positive-model oracle needs half-line measures")
    d = cfg.dim
    sqrt_a = np.sqrt(_diag_spectrum(mu, d).real)
    b = _diag_spectrum(nu, d).real

    def one(i: int) -> np.ndarray:
        rng = np.random.default_rng([cfg.seed, i])
        u = haar_orthogonal(rng, d)
        m = (u * b) @ u.T
        m = sqrt_a[:, None] * m * sqrt_a[None, :]
        eig = np.linalg.eigvalsh(m)
        return np.array([np.mean(eig**k) for k in range(1, order + 1)])

    return _collect(Space.POSITIVE, _run_samples(one, cfg, workers), cfg)


def rmt_oracle_circ(
    mu: AtomicProbabilityMeasure,
    nu: AtomicProbabilityMeasure,
    cfg: MCConfig,
    order: int = 4,
    workers: int = 1,
) -> MCMoments:
    """Empirical moments of the free product of two circle measures."""
    if mu.space is not Space.CIRCLE or nu.space is not Space.CIRCLE:
        raise InputError("the circle-model oracle needs circle measures")
    d = cfg.dim
    da = _diag_spectrum(mu, d)
    db = _diag_spectrum(nu, d)

    def one(i: int) -> np.ndarray:
        rng = np.random.default_rng([cfg.seed, i])
        w = haar_unitary(rng, d)
        p = da[:, None] * ((w * db) @ w.conj().T)
        eig = np.linalg.eigvals(p)
        return np.array([np.mean(eig**k) for k in range(1, order + 1)])

    return _collect(Space.CIRCLE, _run_samples(one, cfg, workers), cfg)


def rmt_row_oracle_circ(
    row: list[AtomicProbabilityMeasure],
    lam: complex,
    cfg: MCConfig,
    order: int = 4,
    workers: int = 1,
) -> MCMoments:
    """Empirical moments of the free product of a whole circle row (times the
    rotation by lambda); one independent Haar conjugation per factor."""
    if not row:
        raise InputError("empty row")
    d = cfg.dim
    diags = [_diag_spectrum(m, d) for m in row]

    def one(i: int) -> np.ndarray:
        rng = np.random.default_rng([cfg.seed, i])
        p = np.eye(d, dtype=complex) * complex(lam)
        for dk in diags:
            w = haar_unitary(rng, d)
            p = p @ ((w * dk) @ w.conj().T)
        eig = np.linalg.eigvals(p)
        return np.array([np.mean(eig**k) for k in range(1, order + 1)])

    return _collect(Space.CIRCLE, _run_samples(one, cfg, workers), cfg)
