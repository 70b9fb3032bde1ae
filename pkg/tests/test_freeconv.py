import cmath
import math

import numpy as np
import pytest

from freemult import (
    GridSpec,
    boxtimes_moments,
    free_cumulants,
    kreweras_complement,
    make_measure,
    moment,
    moments_from_free_cumulants,
    moments_of,
    nc_moment_oracle,
    noncrossing_partitions,
    point_mass,
    row_s_product,
    row_sigma_product,
)
from freemult.errors import InputError
from freemult.freeconv import CATALAN, MomentVector
from freemult.measures import Space

HALF = make_measure("positive", [(1.0, 0.5), (2.0, 0.5)])


def random_measure(rng, space, n_atoms=(2, 4), min_m1=0.3):
    """Random small measure, conditioned on a well-separated first moment so
    the series route stays well-conditioned (the oracle needs no such guard)."""
    while True:
        k = int(rng.integers(n_atoms[0], n_atoms[1] + 1))
        w = rng.dirichlet(np.ones(k))
        if space == "positive":
            pos = rng.uniform(0.3, 3.0, k)
        else:
            pos = rng.uniform(-2.0, 2.0, k)
        m = make_measure(space, [(float(t), float(x)) for t, x in zip(pos, w)])
        if abs(moment(m, 1)) >= min_m1:
            return m


# -- non-crossing partitions --------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 9))
def test_nc_counts_are_catalan(n):
    assert len(noncrossing_partitions(n)) == CATALAN[n]


def test_nc_partitions_are_noncrossing():
    for pi in noncrossing_partitions(5):
        membership = {}
        for b, block in enumerate(pi):
            for x in block:
                membership[x] = b
        for a in range(1, 6):
            for b in range(a + 1, 6):
                for c in range(b + 1, 6):
                    for d in range(c + 1, 6):
                        crossing = membership[a] == membership[c] != membership[b] == membership[d]
                        assert not crossing


def test_kreweras_extremes():
    full = kreweras_complement((((1, 2, 3)),), 3)
    assert full == ((1,), (2,), (3,))
    discrete = kreweras_complement(((1,), (2,), (3,)), 3)
    assert discrete == ((1, 2, 3),)


def test_kreweras_block_count_identity():
    # |pi| + |K(pi)| = n + 1 for every non-crossing partition
    for n in (3, 5, 6):
        for pi in noncrossing_partitions(n):
            assert len(pi) + len(kreweras_complement(pi, n)) == n + 1


# -- cumulants -------------------------------------------------------------------------


def test_first_two_cumulants():
    kap = free_cumulants(moments_of(HALF, 4))
    assert kap[0] == pytest.approx(1.5)
    assert kap[1] == pytest.approx(2.5 - 1.5**2)  # 0.25


def test_moment_cumulant_roundtrip():
    rng = np.random.default_rng(12)
    for _ in range(10):
        vals = tuple(complex(a, b) for a, b in rng.uniform(-1, 1, (8, 2)))
        mv = MomentVector(Space.POSITIVE, vals)
        back = moments_from_free_cumulants(free_cumulants(mv))
        assert np.allclose(back.values, vals, atol=1e-10)


# -- free product moments ----------------------------------------------------------------


def test_first_moment_multiplicativity():
    mv = boxtimes_moments(HALF, HALF, 2)
    assert mv.values[0] == pytest.approx(2.25, abs=1e-12)


def test_second_moment_closed_form():
    # m2 m1^2 + m1^2 m2 - m1^4 with m1 = 1.5, m2 = 2.5
    mv = boxtimes_moments(HALF, HALF, 2)
    assert mv.values[1] == pytest.approx(6.1875, abs=1e-10)


def test_point_mass_acts_as_dilation():
    a = 1.7
    nu = make_measure("positive", [(0.5, 0.4), (2.0, 0.6)])
    mv = boxtimes_moments(point_mass("positive", a), nu, 6)
    for k in range(1, 7):
        assert mv.values[k - 1] == pytest.approx(a**k * moment(nu, k), rel=1e-11)


def test_delta_one_is_identity():
    nu = make_measure("positive", [(0.5, 0.4), (2.0, 0.6)])
    mv = boxtimes_moments(point_mass("positive", 1.0), nu, 6)
    for k in range(1, 7):
        assert mv.values[k - 1] == pytest.approx(moment(nu, k), rel=1e-11)


def test_commutativity():
    rng = np.random.default_rng(7)
    for _ in range(10):
        mu = random_measure(rng, "positive")
        nu = random_measure(rng, "positive")
        a = boxtimes_moments(mu, nu, 6)
        b = boxtimes_moments(nu, mu, 6)
        assert max(abs(x - y) for x, y in zip(a.values, b.values)) < 1e-10


@pytest.mark.parametrize("space", ["positive", "circle"])
def test_series_route_matches_nc_oracle(space):
    rng = np.random.default_rng(21 if space == "positive" else 22)
    for _ in range(12):
        mu = random_measure(rng, space)
        nu = random_measure(rng, space)
        series = boxtimes_moments(mu, nu, 6)
        oracle = nc_moment_oracle(mu, nu, 6)
        assert max(abs(a - b) for a, b in zip(series.values, oracle.values)) < 1e-9


def test_oracle_order_cap():
    with pytest.raises(InputError):
        nc_moment_oracle(HALF, HALF, 9)


def test_circle_first_moment_modulus_multiplicative():
    rng = np.random.default_rng(31)
    for _ in range(10):
        mu = random_measure(rng, "circle")
        nu = random_measure(rng, "circle")
        m1 = boxtimes_moments(mu, nu, 1).values[0]
        assert abs(m1) == pytest.approx(abs(moment(mu, 1)) * abs(moment(nu, 1)), rel=1e-10)


def test_vanishing_first_moment_rejected():
    sym = make_measure("circle", [(math.pi / 2, 0.5), (-math.pi / 2, 0.5)])
    ok = point_mass("circle", 0.1)
    with pytest.raises(InputError):
        boxtimes_moments(sym, ok, 4)


# -- row products ---------------------------------------------------------------------------


def test_row_s_product_identity_row():
    grid = GridSpec.default_half_line(8)
    values, logs = row_s_product([point_mass("positive", 1.0)] * 2, 1.0, grid)
    assert np.allclose(values, 1.0)
    assert np.allclose(logs, 0.0)


def test_row_s_product_point_masses():
    grid = GridSpec.default_half_line(5)
    values, _ = row_s_product(
        [point_mass("positive", 2.0), point_mass("positive", 3.0)], 6.0, grid
    )
    assert np.allclose(values, 1.0 / 36.0)


def test_row_s_product_single_two_atom():
    grid = GridSpec(Space.POSITIVE, (-0.5,))
    values, _ = row_s_product([HALF], 1.0, grid)
    assert values[0] == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)


def test_row_sigma_product_point_masses():
    a, b = 0.7, -0.4
    lam = cmath.exp(1j * (a + b))
    series = row_sigma_product([point_mass("circle", a), point_mass("circle", b)], lam, 6)
    assert abs(series.coeffs[0] - 1.0) < 1e-12
    assert np.max(np.abs(series.coeffs[1:])) < 1e-10


def test_row_sigma_product_trivial():
    series = row_sigma_product([point_mass("circle", 0.0)], 1.0, 4)
    assert np.allclose(series.coeffs, [1, 0, 0, 0, 0])


def test_row_sigma_first_moment_modulus():
    # |prod Sigma(0)|^{-1} = (cos theta)^k for the symmetric pair family
    theta, k = 0.3, 7
    sym = make_measure("circle", [(theta, 0.5), (-theta, 0.5)])
    series = row_sigma_product([sym] * k, 1.0, 4)
    assert 1.0 / abs(series.coeffs[0]) == pytest.approx(math.cos(theta) ** k, rel=1e-10)


def test_row_sigma_rejects_zero_first_moment():
    sym = make_measure("circle", [(math.pi / 2, 0.5), (-math.pi / 2, 0.5)])
    with pytest.raises(InputError):
        row_sigma_product([sym], 1.0, 4)
