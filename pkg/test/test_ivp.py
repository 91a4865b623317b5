import math

import numpy as np
import pytest

from groupcodes.core import config
from groupcodes.core.code import min_distance
from groupcodes.core.errors import EmptyGroup, NumericalFailure
from groupcodes.core.ivp import build_lp, optimal_initial_vector, solve
from groupcodes.core.lattice import GroupElementTable, enumerate_lattices, group_elements, lattice_from_generators


def table_for(gens, M):
    return group_elements(lattice_from_generators(gens, M).T, M)


def test_build_lp_folds_conjugate_rows():
    assert build_lp(table_for([(1,)], 8), 8).n_constraints == 4
    assert build_lp(table_for([(1, 3)], 10), 10).n_constraints == 5
    assert build_lp(table_for([(1, 3)], 10), 10, dedupe=False).n_constraints == 9


def test_build_lp_identity_only():
    lone = GroupElementTable(5, 1, np.zeros((1, 1), dtype=np.int64))
    with pytest.raises(EmptyGroup):
        build_lp(lone, 5)


def test_solve_ten_points_dim4():
    sol = solve(build_lp(table_for([(1, 3)], 10), 10))
    assert sol.z == pytest.approx(1.5, abs=1e-12)
    assert np.allclose(sol.y, [0.5, 0.5], atol=1e-12)
    assert sol.status == "optimal"


def test_worked_example_vector():
    x, d = optimal_initial_vector(table_for([(1, 11)], 128), 128)
    assert d == pytest.approx(0.406179, abs=1e-6)
    assert sorted(x.deltas) == pytest.approx([0.65098, 0.759095], abs=1e-5)


def test_single_block_is_forced():
    for M in (3, 6, 8, 25):
        sol = solve(build_lp(table_for([(1,)], M), M))
        assert sol.y == pytest.approx([1.0])
        assert sol.z == pytest.approx(4 * math.sin(math.pi / M) ** 2, abs=1e-12)
    _, d = optimal_initial_vector(table_for([(1,)], 6), 6)
    assert d == pytest.approx(1.0, abs=1e-12)


def test_ten_points_dim6_distance():
    _, d = optimal_initial_vector(table_for([(3, 1, 5)], 10), 10)
    assert d == pytest.approx(math.sqrt(2), abs=1e-9)


def test_degenerate_optimum_is_flagged():
    # (1, 0) leaves the second plane fixed, so all weight moves to the first block
    sol = solve(build_lp(table_for([(1, 0)], 8), 8))
    assert sol.status == "degenerate_flagged"
    assert sol.y[0] == pytest.approx(1.0)


def _grid_max(rows):
    t = np.linspace(0.0, 1.0, 101)
    y = np.stack([t, 1.0 - t], axis=1)
    return float(np.max(np.min(2.0 - 2.0 * (y @ rows.T), axis=1)))


def test_lp_beats_grid_search():
    rng = np.random.default_rng(17)
    pools = [(M, enumerate_lattices(M, 2, "adam").candidates) for M in (30, 64, 100, 150, 200)]
    for _ in range(25):
        M, cands = pools[int(rng.integers(len(pools)))]
        cand = cands[int(rng.integers(len(cands)))]
        problem = build_lp(group_elements(cand.T, M), M)
        sol = solve(problem)
        grid = _grid_max(problem.rows)
        assert sol.z >= grid - 1e-6
        assert sol.z <= grid + 0.05


def test_folding_does_not_change_value():
    rng = np.random.default_rng(23)
    cands = enumerate_lattices(90, 2, "adam").candidates
    for idx in rng.choice(len(cands), size=15, replace=False):
        table = group_elements(cands[int(idx)].T, 90)
        folded = solve(build_lp(table, 90)).z
        full = solve(build_lp(table, 90, dedupe=False)).z
        assert abs(folded - full) < 1e-11


def test_solution_feasible_and_round_trips():
    cands = enumerate_lattices(40, 3, "adam").candidates[:40]
    for cand in cands:
        table = group_elements(cand.T, 40)
        problem = build_lp(table, 40)
        sol = solve(problem)
        assert abs(sol.y.sum() - 1.0) < 1e-9
        assert np.all(sol.y >= -1e-12)
        assert np.all(2.0 - 2.0 * (problem.rows @ sol.y) >= sol.z - 1e-9)
        x, d = optimal_initial_vector(table, 40)
        assert abs(min_distance(table, 40, x) - d) < 1e-9


def test_solver_is_deterministic():
    problem = build_lp(table_for([(1, 7)], 50), 50)
    a, b = solve(problem), solve(problem)
    assert a.z == b.z
    assert np.array_equal(a.y, b.y)


def test_iteration_cap(monkeypatch):
    monkeypatch.setattr(config, "ITERATION_FACTOR", 0)
    with pytest.raises(NumericalFailure):
        solve(build_lp(table_for([(1, 3)], 10), 10))
