import math

import numpy as np
import pytest

from freemult import (
    FinitePositiveMeasure,
    Reciprocal,
    RotateBy,
    ScaleBy,
    classical_multconv,
    infinitesimality_stat,
    make_measure,
    measure_from_json,
    measure_to_json,
    finite_measure_from_json,
    finite_measure_to_json,
    moment,
    point_mass,
    pushforward,
    weak_distance,
)
from freemult.errors import InputError

from _oracles import bl_linprog


def halfline(*atoms):
    return make_measure("positive", list(atoms))


# -- construction ----------------------------------------------------------------


def test_point_mass_moments():
    d1 = point_mass("positive", 1.0)
    assert moment(d1, 1) == 1.0
    assert moment(point_mass("positive", 3.0), 4) == 81.0


def test_two_atom_moments():
    m = halfline((1.0, 0.5), (2.0, 0.5))
    assert moment(m, 1) == pytest.approx(1.5, abs=1e-15)
    assert moment(m, 2) == pytest.approx(2.5, abs=1e-15)


def test_validation_errors():
    with pytest.raises(InputError):
        make_measure("positive", [(-1.0, 1.0)])
    with pytest.raises(InputError):
        make_measure("positive", [(1.0, 0.0)])
    with pytest.raises(InputError):
        make_measure("positive", [(1.0, 0.7)])  # weights sum to 0.7
    with pytest.raises(InputError):
        make_measure("circle", [(3.5, 1.0)])  # outside [-pi, pi)
    with pytest.raises(InputError):
        make_measure("positive", [])


def test_duplicate_positions_merge():
    m = make_measure("positive", [(2.0, 0.25), (2.0 + 1e-13, 0.35), (1.0, 0.4)])
    assert len(m.atoms) == 2
    assert m.atoms[1][1] == pytest.approx(0.6)


def test_atoms_sorted_canonical_equality():
    a = make_measure("positive", [(2.0, 0.5), (1.0, 0.5)])
    b = make_measure("positive", [(1.0, 0.5), (2.0, 0.5)])
    assert a == b


# -- classical convolution ---------------------------------------------------------


def test_point_masses_convolve():
    prod = classical_multconv(point_mass("positive", 2.0), point_mass("positive", 3.0))
    assert prod.atoms == ((6.0, 1.0),)


def test_two_atom_square():
    m = halfline((1.0, 0.5), (2.0, 0.5))
    sq = classical_multconv(m, m)
    assert sq.atoms == ((1.0, 0.25), (2.0, 0.5), (4.0, 0.25))


def test_space_mismatch():
    with pytest.raises(InputError):
        classical_multconv(point_mass("positive", 1.0), point_mass("circle", 0.0))


def test_circle_angles_add_mod_2pi():
    a = point_mass("circle", 3.0)
    prod = classical_multconv(a, a)  # 6.0 wraps to 6 - 2 pi
    assert prod.atoms[0][0] == pytest.approx(6.0 - 2 * math.pi)


def test_convolution_commutes_and_associates():
    rng = np.random.default_rng(3)
    for _ in range(20):
        ms = []
        for _ in range(3):
            k = rng.integers(1, 4)
            w = rng.dirichlet(np.ones(k))
            ms.append(make_measure("positive", [(float(t), float(x)) for t, x in
                                                zip(rng.uniform(0.3, 3.0, k), w)]))
        a, b, c = ms
        assert classical_multconv(a, b) == classical_multconv(b, a)
        left = classical_multconv(classical_multconv(a, b), c)
        right = classical_multconv(a, classical_multconv(b, c))
        assert left.space == right.space
        assert np.allclose([p for p, _ in left.atoms], [p for p, _ in right.atoms])
        assert np.allclose([w for _, w in left.atoms], [w for _, w in right.atoms])


def test_first_moment_multiplicative():
    rng = np.random.default_rng(11)
    for _ in range(20):
        k1, k2 = rng.integers(1, 4, 2)
        mk = lambda k: make_measure(
            "positive",
            [(float(t), float(x)) for t, x in zip(rng.uniform(0.2, 4.0, k), rng.dirichlet(np.ones(k)))],
        )
        mu, nu = mk(k1), mk(k2)
        assert moment(classical_multconv(mu, nu), 1) == pytest.approx(
            moment(mu, 1) * moment(nu, 1), rel=1e-12
        )


# -- pushforwards -------------------------------------------------------------------


def test_scale_pushforward():
    assert pushforward(point_mass("positive", 4.0), ScaleBy(2.0)).atoms == ((2.0, 1.0),)


def test_reciprocal_involution():
    m = halfline((0.5, 0.3), (2.0, 0.7))
    assert pushforward(pushforward(m, Reciprocal()), Reciprocal()) == m


def test_rotate_pushforward():
    rot = pushforward(point_mass("circle", math.pi / 2), RotateBy(np.exp(1j * math.pi / 2)))
    assert rot.atoms[0][0] == pytest.approx(0.0, abs=1e-15)


def test_scale_unscale_identity():
    m = halfline((0.7, 0.4), (1.9, 0.6))
    back = pushforward(pushforward(m, ScaleBy(3.7)), ScaleBy(1.0 / 3.7))
    assert all(
        abs(p - q) < 1e-12 and abs(w - v) < 1e-15
        for (p, w), (q, v) in zip(back.atoms, m.atoms)
    )


def test_circle_moment_symmetry():
    theta = 0.9
    m = make_measure("circle", [(theta, 0.5), (-theta, 0.5)])
    assert moment(m, 1) == pytest.approx(math.cos(theta), abs=1e-15)


# -- infinitesimality ----------------------------------------------------------------


def test_stat_examples():
    row = [point_mass("positive", 1.0)] * 4
    assert infinitesimality_stat(row, 0.3) == 0.0
    assert infinitesimality_stat([point_mass("positive", 2.0)], 0.5) == 1.0
    n, c, theta = 50, 2.0, 1.0
    mix = make_measure("circle", [(0.0, 1 - c / n), (theta, c / n)])
    assert infinitesimality_stat([mix] * n, 0.5) == pytest.approx(c / n)


def test_stat_monotone_in_eps():
    row = [make_measure("positive", [(0.5, 0.3), (1.05, 0.5), (3.0, 0.2)])]
    vals = [infinitesimality_stat(row, e) for e in (0.01, 0.1, 0.6, 2.5)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_stat_empty_row():
    with pytest.raises(InputError):
        infinitesimality_stat([], 0.1)


# -- weak distance --------------------------------------------------------------------


def _random_finite(rng, space):
    k = int(rng.integers(0, 5))
    if space == "compactified":
        atoms = [(float(rng.uniform(0.05, 15.0)), float(rng.uniform(0.05, 1.5))) for _ in range(k)]
        mz = float(rng.uniform(0, 0.4)) if rng.random() < 0.3 else 0.0
        mi = float(rng.uniform(0, 0.4)) if rng.random() < 0.3 else 0.0
        return FinitePositiveMeasure.build(space, atoms, mz, mi)
    atoms = [(float(rng.uniform(-math.pi, math.pi)), float(rng.uniform(0.05, 1.5))) for _ in range(k)]
    return FinitePositiveMeasure.build(space, atoms)


def test_distance_to_self_is_zero():
    sig = FinitePositiveMeasure.build("compactified", [(1.0, 0.5), (2.0, 0.2)], 0.1, 0.0)
    assert weak_distance(sig, sig) == 0.0


def test_single_atom_against_zero():
    # the constant test function 1 is feasible, so the distance is the mass
    zero = FinitePositiveMeasure.zero("compactified")
    sig = FinitePositiveMeasure.build("compactified", [(3.0, 0.7)])
    assert weak_distance(sig, zero) == pytest.approx(0.7, abs=1e-12)
    assert weak_distance(sig, zero) == pytest.approx(bl_linprog(sig, zero), abs=1e-10)


def test_endpoint_masses_distance():
    d0 = FinitePositiveMeasure.build("compactified", [], 1.0, 0.0)
    dinf = FinitePositiveMeasure.build("compactified", [], 0.0, 1.0)
    # chart points 0 and 1: the Lipschitz constraint binds at |f(0)-f(1)| <= 1
    assert weak_distance(d0, dinf) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("space", ["compactified", "circle"])
def test_distance_matches_linprog_oracle(space):
    rng = np.random.default_rng(17 if space == "compactified" else 18)
    for _ in range(60):
        a = _random_finite(rng, space)
        b = _random_finite(rng, space)
        assert weak_distance(a, b) == pytest.approx(bl_linprog(a, b), abs=1e-9)


@pytest.mark.parametrize("space", ["compactified", "circle"])
def test_metric_axioms(space):
    rng = np.random.default_rng(23)
    panel = [_random_finite(rng, space) for _ in range(8)]
    for a in panel:
        assert weak_distance(a, a) == pytest.approx(0.0, abs=1e-14)
        for b in panel:
            dab = weak_distance(a, b)
            assert dab >= 0.0
            assert dab == pytest.approx(weak_distance(b, a), abs=1e-11)
            if a != b and dab < 1e-13:
                # identity of indiscernibles up to atom merging
                assert a.total_mass == pytest.approx(b.total_mass, abs=1e-12)
            for c in panel:
                assert dab <= weak_distance(a, c) + weak_distance(c, b) + 1e-10


def test_space_mismatch_distance():
    with pytest.raises(InputError):
        weak_distance(
            FinitePositiveMeasure.zero("compactified"), FinitePositiveMeasure.zero("circle")
        )


# -- JSON ------------------------------------------------------------------------------


def test_measure_json_roundtrip():
    m = halfline((0.5, 0.25), (2.0, 0.75))
    assert measure_from_json(measure_to_json(m)) == m
    c = make_measure("circle", [(-1.0, 0.5), (1.0, 0.5)])
    assert measure_from_json(measure_to_json(c)) == c


def test_finite_measure_json_roundtrip():
    sig = FinitePositiveMeasure.build("compactified", [(2.0, 0.3)], 0.1, 0.2)
    assert finite_measure_from_json(finite_measure_to_json(sig)) == sig
    circ = FinitePositiveMeasure.build("circle", [(0.5, 1.2)])
    assert finite_measure_from_json(finite_measure_to_json(circ)) == circ


def test_malformed_json():
    with pytest.raises(InputError):
        measure_from_json({"space": "positive"})
    with pytest.raises(InputError):
        measure_from_json({"space": "nowhere", "atoms": []})
