"""
Initial vector problem as a linear program.

For weights y_j = δ_j² the squared distance to each group element is affine in
y, so maximising the minimum distance is

    max z  s.t.  2⟨c_i, y⟩ + z ≤ 2,  Σ y = 1,  y ≥ 0, z ≥ 0

with one row per distinct non-identity coefficient vector c_i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from groupcodes.core import config
from groupcodes.core.code import InitialVector, coefficient_table, min_distance
from groupcodes.core.errors import EmptyGroup, NumericalFailure
from groupcodes.core.lattice import GroupElementTable


@dataclass(frozen=True)
class SimplexProblem:
    m: int
    rows: np.ndarray

    @property
    def n_constraints(self) -> int:
        return int(self.rows.shape[0])


@dataclass(frozen=True)
class LpSolution:
    z: float
    y: np.ndarray
    status: Literal["optimal", "degenerate_flagged"]
    iterations: int


def build_lp(
    elements: GroupElementTable,
    M: int,
    signs: np.ndarray | None = None,
    dedupe: bool = True,
) -> SimplexProblem:
    rows = coefficient_table(elements, M, signs)
    if rows.shape[0] == 0:
        raise EmptyGroup("the group has no non-identity element")
    if dedupe:
        rows = np.unique(np.round(rows, config.ROUND_DECIMALS), axis=0)
    return SimplexProblem(int(rows.shape[1]), rows)


class DenseSimplex:
    """Two-phase tableau simplex with Bland's rule on one SimplexProblem."""

    def __init__(self, problem: SimplexProblem):
        self.problem = problem
        m, r = problem.m, problem.n_constraints
        self.z_col = m
        self.art_col = m + 1 + r
        self.budget = config.ITERATION_FACTOR * (m + r)
        self.iterations = 0

        T = np.zeros((r + 2, m + r + 3))
        T[:r, :m] = 2.0 * problem.rows
        T[:r, m] = 1.0
        T[np.arange(r), m + 1 + np.arange(r)] = 1.0
        T[:r, -1] = 2.0
        T[r, :m] = 1.0
        T[r, self.art_col] = 1.0
        T[r, -1] = 1.0
        self.T = T
        self.basis = list(range(m + 1, m + 1 + r)) + [self.art_col]

    @staticmethod
    def _pivot(T: np.ndarray, row: int, col: int) -> None:
        T[row, :] /= T[row, col]
        for r in range(T.shape[0]):
            if r != row and T[r, col] != 0.0:
                T[r, :] -= T[r, col] * T[row, :]

    @staticmethod
    def _enter(obj: np.ndarray) -> int:
        # Bland: leftmost negative reduced cost
        idx = np.flatnonzero(obj[:-1] < -config.PIVOT_TOL)
        return int(idx[0]) if idx.size else -1

    def _leave(self, col: int) -> int:
        T = self.T
        best = None
        for i in range(T.shape[0] - 1):
            a = T[i, col]
            if a > config.PIVOT_TOL:
                key = (T[i, -1] / a, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        return -1 if best is None else best[1]

    def _run(self) -> None:
        while True:
            col = self._enter(self.T[-1, :])
            if col == -1:
                return
            row = self._leave(col)
            if row == -1:
                raise NumericalFailure("simplex reported an unbounded direction")
            self._pivot(self.T, row, col)
            self.basis[row] = col
            self.iterations += 1
            if self.iterations > self.budget:
                raise NumericalFailure(f"simplex did not converge within {self.budget} pivots")

    def solve(self) -> LpSolution:
        m = self.problem.m
        T = self.T

        # phase one: max -a
        T[-1, :] = 0.0
        T[-1, self.art_col] = 1.0
        T[-1, :] -= T[-2, :]
        self._run()
        if T[-1, -1] < -config.FEASIBILITY_TOL:
            raise NumericalFailure("phase one ended infeasible")

        if self.art_col in self.basis:
            row = self.basis.index(self.art_col)
            cols = np.flatnonzero(np.abs(T[row, : self.art_col]) > config.PIVOT_TOL)
            if cols.size:
                self._pivot(T, row, int(cols[0]))
                self.basis[row] = int(cols[0])
        if self.art_col in self.basis:
            raise NumericalFailure("artificial variable could not leave the basis")
        T = np.delete(T, self.art_col, axis=1)
        self.T = T

        # phase two: max z
        T[-1, :] = 0.0
        T[-1, self.z_col] = -1.0
        for r, bc in enumerate(self.basis):
            if bc == self.z_col:
                T[-1, :] += T[r, :]
        self._run()

        values = np.zeros(T.shape[1] - 1)
        for r, bc in enumerate(self.basis):
            values[bc] = T[r, -1]
        y = np.clip(values[:m], 0.0, None)
        total = y.sum()
        if total <= 0.0:
            raise NumericalFailure("simplex returned a zero weight vector")
        y = y / total
        z = float(np.min(2.0 - 2.0 * (self.problem.rows @ y)))
        if abs(z - values[self.z_col]) > 1e-7:
            raise NumericalFailure(f"tableau value {values[self.z_col]!r} disagrees with recomputed {z!r}")
        status = "degenerate_flagged" if np.any(y < config.DEGENERATE_TOL) else "optimal"
        return LpSolution(z, y, status, self.iterations)


def solve(problem: SimplexProblem) -> LpSolution:
    if problem.m < 1 or problem.n_constraints < 1:
        raise EmptyGroup("linear program needs at least one variable and one constraint")
    return DenseSimplex(problem).solve()


def optimal_initial_vector(
    elements: GroupElementTable,
    M: int,
    signs: np.ndarray | None = None,
) -> tuple[InitialVector, float]:
    sol = solve(build_lp(elements, M, signs))
    k = elements.k
    root = np.sqrt(sol.y)
    x = InitialVector(tuple(float(v) for v in root[:k]), tuple(float(v) for v in root[k:]))
    d = math.sqrt(max(sol.z, 0.0))
    check = min_distance(elements, M, x, signs)
    if abs(check - d) > config.FEASIBILITY_TOL:
        raise NumericalFailure(f"LP distance {d!r} disagrees with evaluated distance {check!r}")
    return x, d
