from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from groupcodes.core import config
from groupcodes.core.errors import DegenerateRadius, GuardExceeded, IdentityElement
from groupcodes.core.intmat import IntMatrix
from groupcodes.core.lattice import GroupElementTable, GroupPresentation

NORM_TOL = 1e-12


# =========================================================
# Types
# =========================================================
@dataclass(frozen=True)
class InitialVector:
    """Block radii δ_j of x₀ = (δ₁, 0, …, δ_k, 0) plus any reflection coordinates."""

    deltas: tuple[float, ...]
    reflections: tuple[float, ...] = ()

    def __post_init__(self):
        if any(v < 0 for v in self.deltas):
            raise ValueError(f"block radii must be nonnegative, got {self.deltas}")
        total = sum(v * v for v in self.deltas) + sum(v * v for v in self.reflections)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"initial vector is not on the unit sphere (|x|^2 = {total!r})")

    @classmethod
    def from_weights(cls, y: Sequence[float]) -> "InitialVector":
        """δ_j = √y_j; y must be a probability vector (renormalised here)."""
        arr = np.clip(np.asarray(y, dtype=float), 0.0, None)
        arr = arr / arr.sum()
        return cls(tuple(float(v) for v in np.sqrt(arr)))

    @classmethod
    def normalized(cls, deltas: Sequence[float]) -> "InitialVector":
        arr = np.abs(np.asarray(deltas, dtype=float))
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ValueError("initial vector must be nonzero")
        return cls.from_weights((arr / norm) ** 2)

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.deltas, dtype=float) ** 2

    def ambient(self, n: int | None = None) -> np.ndarray:
        k = len(self.deltas)
        size = 2 * k + len(self.reflections)
        if n is not None and n != size:
            raise ValueError(f"initial vector has ambient dimension {size}, not {n}")
        x = np.zeros(size)
        x[0 : 2 * k : 2] = self.deltas
        x[2 * k :] = self.reflections
        return x


@dataclass(frozen=True)
class GroupElementSigns:
    b: tuple[int, ...]
    signs: tuple[int, ...] = ()

    def is_identity(self, M: int) -> bool:
        return all(x % M == 0 for x in self.b) and all(s == 1 for s in self.signs)


@dataclass
class CodeRecord:
    M: int
    n: int
    presentation: GroupPresentation
    initial_vector: InitialVector
    min_distance: float
    raw_count: int
    tested_count: int
    T: IntMatrix
    candidates: list[tuple[IntMatrix, float]] | None = field(default=None)


# =========================================================
# Distance algebra
# =========================================================
def _folded_cos(b: np.ndarray, M: int) -> np.ndarray:
    # b and M-b give bit-identical cosines
    r = np.mod(b, M)
    r = np.minimum(r, M - r)
    return np.cos(2.0 * np.pi * r / M)


def constraint_coefficients(e: GroupElementSigns, M: int) -> np.ndarray:
    if e.is_identity(M):
        raise IdentityElement(f"element {e.b} with signs {e.signs} is the identity")
    rot = _folded_cos(np.asarray(e.b, dtype=np.int64), M)
    return np.concatenate([rot, np.asarray(e.signs, dtype=float)])


def coefficient_table(
    elements: GroupElementTable, M: int, signs: np.ndarray | None = None
) -> np.ndarray:
    """Constraint rows for every non-identity element, in table order."""
    rot = _folded_cos(elements.elements, M)
    if signs is None:
        keep = np.any(np.mod(elements.elements, M) != 0, axis=1)
        return rot[keep]
    signs = np.asarray(signs, dtype=float).reshape(len(elements), -1)
    keep = np.any(np.mod(elements.elements, M) != 0, axis=1) | np.any(signs != 1, axis=1)
    return np.hstack([rot, signs])[keep]


def min_distance(
    elements: GroupElementTable,
    M: int,
    x: InitialVector,
    signs: np.ndarray | None = None,
) -> float:
    """min over g != e of ‖g x − x‖ = sqrt(2 − 2⟨c(g), y⟩)."""
    y = np.concatenate([x.weights, np.asarray(x.reflections, dtype=float) ** 2])
    if signs is None and x.reflections:
        signs = np.ones((len(elements), len(x.reflections)))
    c = coefficient_table(elements, M, signs)
    d2 = float(np.min(2.0 - 2.0 * (c @ y)))
    return math.sqrt(max(d2, 0.0))


# =========================================================
# Geometry
# =========================================================
def torus_map(x0: InitialVector, y: Sequence[float]) -> np.ndarray:
    deltas = np.asarray(x0.deltas, dtype=float)
    if np.any(deltas == 0.0):
        raise DegenerateRadius(f"torus chart needs positive radii, got {x0.deltas}")
    phases = np.asarray(y, dtype=float)
    if phases.shape != deltas.shape:
        raise ValueError(f"expected {len(deltas)} phases, got {phases.shape}")
    out = np.empty(2 * len(deltas))
    out[0::2] = deltas * np.cos(phases / deltas)
    out[1::2] = deltas * np.sin(phases / deltas)
    return out


def render_element(e: GroupElementSigns, M: int, n: int) -> np.ndarray:
    k = len(e.b)
    if n != 2 * k + len(e.signs):
        raise ValueError(f"element with {k} blocks and {len(e.signs)} signs does not act on R^{n}")
    g = np.zeros((n, n))
    for j, b in enumerate(e.b):
        theta = 2.0 * np.pi * (b % M) / M
        c, s = np.cos(theta), np.sin(theta)
        g[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = [[c, -s], [s, c]]
    for l, mu in enumerate(e.signs):
        g[2 * k + l, 2 * k + l] = mu
    return g


def _element_list(elements: GroupElementTable, signs: np.ndarray | None) -> list[GroupElementSigns]:
    out = []
    for i, row in enumerate(elements.elements):
        mu = () if signs is None else tuple(int(s) for s in np.atleast_1d(signs[i]))
        out.append(GroupElementSigns(tuple(int(v) for v in row), mu))
    return out


def render_orbit(
    elements: GroupElementTable, M: int, x: np.ndarray, signs: np.ndarray | None = None
) -> np.ndarray:
    n = len(x)
    return np.stack([render_element(e, M, n) @ x for e in _element_list(elements, signs)])


def brute_force_min_distance(
    elements: GroupElementTable,
    M: int,
    n: int,
    x: np.ndarray,
    signs: np.ndarray | None = None,
) -> float:
    """Minimum pairwise distance of the rendered orbit; oracle for the cosine formula."""
    if len(elements) > config.BRUTE_FORCE_CAP:
        raise GuardExceeded(f"{len(elements)} elements exceed the brute-force cap {config.BRUTE_FORCE_CAP}")
    x = np.asarray(x, dtype=float)
    if len(x) != n:
        raise ValueError(f"ambient vector has length {len(x)}, expected {n}")
    orbit = render_orbit(elements, M, x, signs)
    sq = np.einsum("ij,ij->i", orbit, orbit)
    best = np.inf
    block = 512
    for start in range(0, len(orbit), block):
        chunk = orbit[start : start + block]
        d2 = sq[start : start + block, None] + sq[None, :] - 2.0 * (chunk @ orbit.T)
        rows = np.arange(len(chunk))
        d2[rows, start + rows] = np.inf
        best = min(best, float(d2.min()))
    return math.sqrt(max(best, 0.0))
