import math

import numpy as np
import pytest

from groupcodes.core import config
from groupcodes.core.code import (
    GroupElementSigns,
    InitialVector,
    brute_force_min_distance,
    constraint_coefficients,
    min_distance,
    render_element,
    torus_map,
)
from groupcodes.core.errors import DegenerateRadius, GuardExceeded, IdentityElement
from groupcodes.core.intmat import IntMatrix
from groupcodes.core.lattice import GroupElementTable, enumerate_lattices, group_elements, lattice_from_generators

HALF = math.sqrt(0.5)


def table_for(gens, M):
    return group_elements(lattice_from_generators(gens, M).T, M)


def test_constraint_coefficients():
    assert constraint_coefficients(GroupElementSigns((5,)), 10).tolist() == [-1.0]
    c = constraint_coefficients(GroupElementSigns((1, 3)), 10)
    assert np.allclose(c, [0.80902, -0.30902], atol=1e-5)
    assert constraint_coefficients(GroupElementSigns((0,), (-1,)), 10).tolist() == [1.0, -1.0]


def test_constraint_coefficients_identity():
    with pytest.raises(IdentityElement):
        constraint_coefficients(GroupElementSigns((0,)), 7)
    with pytest.raises(IdentityElement):
        constraint_coefficients(GroupElementSigns((10, 0), (1,)), 10)


def test_coefficients_bounded_and_even():
    M = 37
    for b in range(1, M):
        c = constraint_coefficients(GroupElementSigns((b,)), M)
        assert -1.0 <= c[0] <= 1.0
        assert c[0] == constraint_coefficients(GroupElementSigns((M - b,)), M)[0]


def test_initial_vector_validation():
    with pytest.raises(ValueError):
        InitialVector((0.5, 0.5))
    x = InitialVector.normalized([1.0, 1.0])
    assert np.allclose(x.deltas, [HALF, HALF])
    assert x.ambient(4).tolist() == pytest.approx([HALF, 0.0, HALF, 0.0])
    with pytest.raises(ValueError):
        x.ambient(5)


def test_min_distance_ten_points_dim4():
    x = InitialVector((HALF, HALF))
    assert min_distance(table_for([(1, 3)], 10), 10, x) == pytest.approx(math.sqrt(1.5), abs=1e-12)


def test_min_distance_ten_points_dim6():
    x = InitialVector.from_weights((0.4, 0.4, 0.2))
    assert min_distance(table_for([(3, 1, 5)], 10), 10, x) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_min_distance_square():
    x = InitialVector((1.0,))
    assert min_distance(table_for([(1,)], 4), 4, x) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_torus_map_basics():
    x = InitialVector((HALF, HALF))
    assert np.allclose(torus_map(x, [0.0, 0.0]), [HALF, 0.0, HALF, 0.0])
    assert np.allclose(torus_map(InitialVector((1.0,)), [math.pi / 2]), [0.0, 1.0], atol=1e-15)
    with pytest.raises(DegenerateRadius):
        torus_map(InitialVector((1.0, 0.0)), [0.0, 0.0])


def test_torus_map_matches_rendered_orbit_point():
    M = 10
    x = InitialVector((HALF, HALF))
    b = np.array([1, 3])
    phases = 2 * np.pi * b * np.array(x.deltas) / M
    rendered = render_element(GroupElementSigns((1, 3)), M, 4) @ x.ambient(4)
    assert np.allclose(torus_map(x, phases), rendered, atol=1e-12)


def test_torus_map_on_sphere():
    rng = np.random.default_rng(1)
    for _ in range(50):
        x = InitialVector.from_weights(rng.dirichlet(np.ones(3)) + 1e-3)
        p = torus_map(x, rng.uniform(-10, 10, size=3))
        assert abs(np.linalg.norm(p) - 1.0) < 1e-12


def test_render_element_examples():
    assert np.array_equal(render_element(GroupElementSigns((0, 0), (1,)), 8, 5), np.eye(5))
    assert np.allclose(render_element(GroupElementSigns((5,)), 10, 2), -np.eye(2), atol=1e-15)
    g = render_element(GroupElementSigns((1, 11)), 128, 4)
    a, b = 2 * np.pi / 128, 22 * np.pi / 128
    assert np.allclose(g[:2, :2], [[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    assert np.allclose(g[2:, 2:], [[np.cos(b), -np.sin(b)], [np.sin(b), np.cos(b)]])


def test_render_is_orthogonal_homomorphism():
    rng = np.random.default_rng(9)
    M = 24
    for _ in range(30):
        e = tuple(int(v) for v in rng.integers(0, M, size=2))
        f = tuple(int(v) for v in rng.integers(0, M, size=2))
        s, t = int(rng.choice([1, -1])), int(rng.choice([1, -1]))
        ge = render_element(GroupElementSigns(e, (s,)), M, 5)
        gf = render_element(GroupElementSigns(f, (t,)), M, 5)
        sum_ef = tuple((a + b) % M for a, b in zip(e, f))
        gef = render_element(GroupElementSigns(sum_ef, (s * t,)), M, 5)
        assert np.allclose(ge @ gf, gef, atol=1e-10)
        assert np.allclose(ge @ ge.T, np.eye(5), atol=1e-12)


def test_brute_force_examples():
    x = InitialVector((HALF, HALF))
    table = table_for([(1, 3)], 10)
    bf = brute_force_min_distance(table, 10, 4, x.ambient(4))
    assert bf == pytest.approx(min_distance(table, 10, x), abs=1e-9)
    assert brute_force_min_distance(table_for([(1,)], 4), 4, 2, np.array([1.0, 0.0])) == pytest.approx(math.sqrt(2))


def test_brute_force_guard():
    too_many = GroupElementTable(7, 1, np.zeros((config.BRUTE_FORCE_CAP + 1, 1), dtype=np.int64))
    with pytest.raises(GuardExceeded):
        brute_force_min_distance(too_many, 7, 2, np.array([1.0, 0.0]))


def test_formula_matches_orbit_on_random_candidates():
    rng = np.random.default_rng(42)
    pools = [(M, enumerate_lattices(M, k, "none").candidates) for M, k in [(20, 2), (36, 2), (64, 2), (12, 3), (18, 3)]]
    for _ in range(24):
        M, cands = pools[int(rng.integers(len(pools)))]
        cand = cands[int(rng.integers(len(cands)))]
        table = group_elements(cand.T, M)
        x = InitialVector.from_weights(rng.dirichlet(np.ones(cand.k)))
        formula = min_distance(table, M, x)
        orbit = brute_force_min_distance(table, M, 2 * cand.k, x.ambient())
        assert abs(formula - orbit) < 1e-9


def test_reflection_coordinates_enter_distance():
    table = GroupElementTable(4, 1, np.array([[0], [2], [0], [2]], dtype=np.int64))
    signs = np.array([[1], [1], [-1], [-1]])
    x = InitialVector((math.sqrt(0.75),), (0.5,))
    expected = brute_force_min_distance(table, 4, 3, x.ambient(3), signs)
    assert min_distance(table, 4, x, signs) == pytest.approx(expected, abs=1e-12)
