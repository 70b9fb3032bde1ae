import cmath
import math

import numpy as np
import pytest

from freemult import (
    classical_multconv,
    make_measure,
    mellin_fourier,
    moment,
    point_mass,
    psi_eval,
    psi_inv_neg,
    psi_series,
    s_eval_pos,
    sigma_series,
)
from freemult.errors import InputError
from freemult.transforms import s_approximation_ratio


def random_halfline(rng, max_atoms=5, lo=0.1, hi=10.0):
    k = int(rng.integers(1, max_atoms + 1))
    w = rng.dirichlet(np.ones(k))
    return make_measure(
        "positive", [(float(t), float(x)) for t, x in zip(rng.uniform(lo, hi, k), w)]
    )


# -- psi ---------------------------------------------------------------------------


def test_psi_point_mass_closed_form():
    a = 1.7
    m = point_mass("positive", a)
    for z in (-0.4, -2.0, 0.5j, -0.1 + 0.3j):
        want = a * z / (1 - a * z)
        assert psi_eval(m, z) == pytest.approx(want, abs=1e-14)


def test_psi_two_atoms_at_minus_one():
    m = make_measure("positive", [(1.0, 0.5), (2.0, 0.5)])
    assert psi_eval(m, -1.0) == pytest.approx(-7.0 / 12.0, abs=1e-15)


def test_psi_vanishes_at_zero():
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert psi_eval(random_halfline(rng), 0.0) == 0.0


def test_psi_domain_errors():
    m = point_mass("positive", 1.0)
    with pytest.raises(InputError):
        psi_eval(m, 0.5)  # on (0, inf)
    c = point_mass("circle", 0.3)
    with pytest.raises(InputError):
        psi_eval(c, 1.2)


# -- psi inverse --------------------------------------------------------------------


def test_psi_inv_point_mass():
    m = point_mass("positive", 1.0)
    assert psi_inv_neg(m, -0.5) == pytest.approx(-1.0, abs=1e-13)
    # deep bracket: w -> -1 pushes z far out
    assert psi_inv_neg(m, -0.999) == pytest.approx(-999.0, rel=1e-12)


def test_psi_inv_two_atoms():
    m = make_measure("positive", [(1.0, 0.5), (2.0, 0.5)])
    assert psi_inv_neg(m, -0.5) == pytest.approx(-1.0 / math.sqrt(2.0), abs=1e-12)


def test_psi_inv_domain():
    m = point_mass("positive", 1.0)
    for w in (-1.0, 0.0, 0.2, -1.5):
        with pytest.raises(InputError):
            psi_inv_neg(m, w)


def test_psi_roundtrip_randomized():
    rng = np.random.default_rng(99)
    for _ in range(100):
        nu = random_halfline(rng)
        w = float(rng.uniform(-0.95, -0.02))
        z = psi_inv_neg(nu, w)
        assert z < 0.0
        assert abs(psi_eval(nu, z) - w) < 1e-10


# -- S ------------------------------------------------------------------------------


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_s_point_mass_constant(a):
    m = point_mass("positive", a)
    for z in np.linspace(-0.95, -0.05, 20):
        assert abs(s_eval_pos(m, float(z)) - 1.0 / a) < 1e-12


def test_s_two_atoms_value():
    m = make_measure("positive", [(1.0, 0.5), (2.0, 0.5)])
    assert s_eval_pos(m, -0.5) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)


def test_s_positive_everywhere():
    rng = np.random.default_rng(5)
    for _ in range(20):
        nu = random_halfline(rng)
        z = float(rng.uniform(-0.9, -0.05))
        assert s_eval_pos(nu, z) > 0.0


# -- series routes --------------------------------------------------------------------


def test_psi_series_coefficients():
    a = 1.3
    ps = psi_series(point_mass("positive", a), 5)
    assert np.allclose(ps.coeffs, [0] + [a**k for k in range(1, 6)])
    m = make_measure("positive", [(1.0, 0.5), (2.0, 0.5)])
    assert np.allclose(psi_series(m, 3).coeffs, [0, 1.5, 2.5, 4.5])


def test_psi_series_zero_first_moment_flagged_downstream():
    sym = make_measure("circle", [(math.pi / 2, 0.5), (-math.pi / 2, 0.5)])
    assert abs(psi_series(sym, 4).coeffs[1]) < 1e-15
    with pytest.raises(InputError):
        sigma_series(sym, 4)


def test_sigma_point_mass_is_constant():
    theta = 0.8
    sig = sigma_series(point_mass("circle", theta), 8)
    assert abs(sig.coeffs[0] - cmath.exp(-1j * theta)) < 1e-12
    assert np.max(np.abs(sig.coeffs[1:])) < 1e-10


def test_sigma_at_zero_is_reciprocal_first_moment():
    eps, theta = 0.3, 1.1
    nu = make_measure("circle", [(0.0, 1 - eps), (theta, eps)])
    sig = sigma_series(nu, 8)
    assert sig.coeffs[0] == pytest.approx(1.0 / moment(nu, 1), abs=1e-12)


def test_sigma_needs_circle():
    with pytest.raises(InputError):
        sigma_series(point_mass("positive", 1.0), 4)


# -- Mellin-Fourier -------------------------------------------------------------------


def test_phi_point_mass():
    a, s = 2.0, 1.7
    assert mellin_fourier(point_mass("positive", a), s) == pytest.approx(
        cmath.exp(1j * s * math.log(a)), abs=1e-15
    )


def test_phi_normalization_and_bound():
    rng = np.random.default_rng(1)
    for _ in range(20):
        nu = random_halfline(rng)
        assert mellin_fourier(nu, 0.0) == pytest.approx(1.0, abs=1e-15)
        s = float(rng.uniform(-5, 5))
        assert abs(mellin_fourier(nu, s)) <= 1.0 + 1e-12


@pytest.mark.parametrize("s", [0.7, 1.3])
def test_phi_multiplicative_under_classical_convolution(s):
    m = make_measure("positive", [(1.0, 0.5), (2.0, 0.5)])
    prod = classical_multconv(m, m)
    assert mellin_fourier(prod, s) == pytest.approx(
        mellin_fourier(m, s) ** 2, abs=1e-14
    )


# -- approximation ratio ---------------------------------------------------------------


def test_approximation_ratio_tends_to_one():
    grid = np.linspace(-0.45, -0.05, 8)
    devs = []
    for eps in (1e-2, 1e-3, 1e-4):
        nu = make_measure("positive", [(1.0, 1 - eps), (2.0, eps)])
        devs.append(max(abs(s_approximation_ratio(nu, float(z)) - 1.0) for z in grid))
    assert all(b < a for a, b in zip(devs, devs[1:]))
    assert devs[-1] < 1e-3
