"""Published optimum codes and candidate counts, used by `table --compare` and the tests."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PublishedCode:
    M: int
    n: int
    d_min: float
    deltas: tuple[float, ...]
    factors: tuple[int, ...]
    generators: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PublishedCounts:
    M: int
    binomial: int
    adam_estimate: int
    tested_cyclic: int
    tested_commutative: int


# n = 4
COUNTS_DIM4 = {
    32: PublishedCounts(32, 120, 16, 14, 21),
    64: PublishedCounts(64, 496, 32, 26, 38),
    128: PublishedCounts(128, 2016, 64, 50, 72),
    256: PublishedCounts(256, 8128, 128, 98, 141),
    512: PublishedCounts(512, 32640, 256, 194, 273),
    1024: PublishedCounts(1024, 130816, 512, 386, 542),
}

_DIM4 = [
    (10, 1.224, (0.707, 0.707), (10,), ((1, 3),)),
    (20, 0.959, (0.678, 0.734), (20,), ((3, 4),)),
    (30, 0.831, (0.707, 0.707), (30,), ((3, 5),)),
    (40, 0.714, (0.607, 0.794), (40,), ((4, 5),)),
    (50, 0.628, (0.707, 0.706), (50,), ((7, 2),)),
    (100, 0.468, (0.757, 0.653), (5, 20), ((0, 20), (5, 10))),
    (200, 0.330, (0.750, 0.660), (200,), ((93, 1),)),
    (300, 0.273, (0.656, 0.754), (5, 60), ((60, 120), (10, 15))),
    (400, 0.237, (0.686, 0.727), (400,), ((189, 1),)),
    (500, 0.211, (0.674, 0.738), (500,), ((13, 20),)),
    (600, 0.193, (0.676, 0.736), (600,), ((191, 198),)),
    (700, 0.180, (0.718, 0.695), (700,), ((14, 25),)),
    (800, 0.168, (0.670, 0.742), (800,), ((16, 25),)),
    (900, 0.158, (0.704, 0.709), (900,), ((197, 2),)),
    (1000, 0.149, (0.716, 0.697), (1000,), ((33, 4),)),
]

_DIM6 = [
    (10, 1.414, (0.632, 0.632, 0.447), (10,), ((3, 1, 5),)),
    (20, 1.240, (0.554, 0.620, 0.554), (20,), ((2, 5, 6),)),
    (30, 1.133, (0.534, 0.654, 0.534), (30,), ((3, 5, 9),)),
    (40, 1.044, (0.603, 0.522, 0.603), (2, 20), ((20, 0, 20), (32, 10, 4))),
    (50, 0.976, (0.604, 0.506, 0.615), (50,), ((7, 6, 34),)),
    (100, 0.804, (0.515, 0.684, 0.515), (10, 10), ((50, 10, 0), (30, 0, 10))),
    (200, 0.673, (0.555, 0.619, 0.555), (200,), ((28, 25, 4),)),
    (300, 0.585, (0.585, 0.498, 0.639), (5, 60), ((0, 0, 60), (25, 30, 30))),
    (400, 0.540, (0.562, 0.605, 0.562), (20, 20), ((300, 40, 0), (60, 0, 20))),
    (500, 0.504, (0.577, 0.577, 0.577), (5, 10, 10), ((100, 0, 0), (50, 50, 0), (50, 0, 50))),
    (600, 0.472, (0.549, 0.630, 0.549), (2, 300), ((300, 0, 300), (384, 50, 12))),
    (700, 0.445, (0.531, 0.612, 0.585), (700,), ((457, 664, 298),)),
    (800, 0.427, (0.617, 0.486, 0.617), (20, 40), ((80, 0, 40), (20, 80, 60))),
    (900, 0.413, (0.592, 0.591, 0.547), (3, 300), ((0, 300, 0), (759, 36, 3))),
    (1000, 0.397, (0.560, 0.632, 0.535), (1000,), ((319, 694, 45),)),
]

PUBLISHED_CODES: dict[tuple[int, int], PublishedCode] = {
    (M, n): PublishedCode(M, n, d, deltas, factors, gens)
    for n, rows in ((4, _DIM4), (6, _DIM6))
    for M, d, deltas, factors, gens in rows
}


def published_code(M: int, n: int) -> PublishedCode | None:
    return PUBLISHED_CODES.get((M, n))


def published_counts(M: int, n: int) -> PublishedCounts | None:
    return COUNTS_DIM4.get(M) if n == 4 else None
