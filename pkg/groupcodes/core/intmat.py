"""
Exact integer matrix algebra.

Everything here works on Python ints, so determinants and adjugates of the
enumeration candidates (up to M^(k-1) and beyond in intermediates) never
overflow. Matrices are tiny (k <= 4 in practice); clarity wins over speed.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from groupcodes.core.errors import InternalError, NotSublattice, SingularMatrix


@dataclass(frozen=True)
class IntMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        widths = {len(r) for r in self.entries}
        if len(widths) > 1:
            raise ValueError("IntMatrix rows must all have the same length")

    # ------------------------------------------------
    # Construction
    # ------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(v) for v in row) for row in rows))

    @classmethod
    def identity(cls, k: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k)))

    @classmethod
    def diag(cls, values: Sequence[int]) -> "IntMatrix":
        k = len(values)
        return cls(tuple(tuple(int(values[i]) if i == j else 0 for j in range(k)) for i in range(k)))

    # ------------------------------------------------
    # Accessors
    # ------------------------------------------------
    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))

    def flat(self) -> tuple[int, ...]:
        return tuple(v for row in self.entries for v in row)

    def to_list(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    # ------------------------------------------------
    # Arithmetic
    # ------------------------------------------------
    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries))) if self.entries else self

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols = list(zip(*other.entries))
        return IntMatrix(tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
            for row in self.entries
        ))

    def scale(self, factor: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(factor * v for v in row) for row in self.entries))

    def mod(self, modulus: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(v % modulus for v in row) for row in self.entries))

    def det(self) -> int:
        """Bareiss fraction-free elimination; exact for any size."""
        self._require_square()
        k = self.rows
        if k == 0:
            return 1
        a = self.to_list()
        sign = 1
        prev = 1
        for t in range(k - 1):
            if a[t][t] == 0:
                swap = next((i for i in range(t + 1, k) if a[i][t] != 0), None)
                if swap is None:
                    return 0
                a[t], a[swap] = a[swap], a[t]
                sign = -sign
            for i in range(t + 1, k):
                for j in range(t + 1, k):
                    a[i][j] = (a[i][j] * a[t][t] - a[i][t] * a[t][j]) // prev
            prev = a[t][t]
        return sign * a[k - 1][k - 1]

    def minor(self, i: int, j: int) -> "IntMatrix":
        return IntMatrix(tuple(
            tuple(v for c, v in enumerate(row) if c != j)
            for r, row in enumerate(self.entries) if r != i
        ))

    def adjugate(self) -> "IntMatrix":
        self._require_square()
        k = self.rows
        if k == 1:
            return IntMatrix(((1,),))
        return IntMatrix(tuple(
            tuple((-1) ** (i + j) * self.minor(j, i).det() for j in range(k))
            for i in range(k)
        ))

    def is_upper_triangular(self) -> bool:
        return all(self.entries[i][j] == 0 for i in range(self.rows) for j in range(min(i, self.cols)))

    def _require_square(self) -> None:
        if not self.is_square:
            raise ValueError(f"square matrix required, got {self.rows}x{self.cols}")


@dataclass(frozen=True)
class HnfResult:
    T: IntMatrix
    U: IntMatrix
    V: IntMatrix


@dataclass(frozen=True)
class SnfResult:
    D: IntMatrix
    U: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]


# ------------------------------------------------
# Small helpers
# ------------------------------------------------
def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _combine_rows(mats: list[list[list[int]]], top: int, low: int, col: int) -> None:
    """Unimodular 2-row step putting gcd(A[top][col], A[low][col]) on top and 0 below."""
    a = mats[0][top][col]
    b = mats[0][low][col]
    g, s, t = xgcd(a, b)
    p, q = b // g, a // g
    for m in mats:
        r_top, r_low = m[top], m[low]
        m[top] = [s * x + t * y for x, y in zip(r_top, r_low)]
        m[low] = [-p * x + q * y for x, y in zip(r_top, r_low)]


def _sub_row(mats: list[list[list[int]]], target: int, source: int, factor: int) -> None:
    for m in mats:
        m[target] = [x - factor * y for x, y in zip(m[target], m[source])]


def _column_gcd(a: list[list[int]], start: int, col: int) -> int:
    g = 0
    for i in range(start, len(a)):
        g = gcd(g, a[i][col])
    return g


def permutation_matrix(order: Sequence[int]) -> IntMatrix:
    """V with (B @ V)[:, j] == B[:, order[j]]."""
    k = len(order)
    return IntMatrix(tuple(
        tuple(1 if order[j] == r else 0 for j in range(k)) for r in range(k)
    ))


def is_permutation(V: IntMatrix) -> bool:
    if not V.is_square:
        return False
    for row in V.entries:
        if sorted(row) != [0] * (V.cols - 1) + [1]:
            return False
    return all(sum(col) == 1 for col in zip(*V.entries))


def is_unimodular(A: IntMatrix) -> bool:
    A._require_square()
    return abs(A.det()) == 1


def is_special_hnf(T: IntMatrix) -> bool:
    """The three upper-triangular conditions: increasing diagonal, reduced entries, gcd bound."""
    if not T.is_square or not T.is_upper_triangular():
        return False
    k = T.rows
    diag = T.diagonal()
    if any(d <= 0 for d in diag):
        return False
    if any(diag[i] > diag[i + 1] for i in range(k - 1)):
        return False
    for j in range(k):
        for i in range(j):
            if not 0 <= T[i, j] < diag[j]:
                return False
            g = 0
            for r in range(i, j + 1):
                g = gcd(g, T[r, j])
            if diag[i] > g:
                return False
    return True


# ------------------------------------------------
# Normal forms
# ------------------------------------------------
def special_hnf(B: IntMatrix) -> HnfResult:
    """
    Upper-triangular T = U·B·V, U unimodular, V a permutation.

    Column order: at level t the first remaining column whose entries in rows
    t..k-1 have the least gcd moves to position t, the others keep their
    relative order. At level 0 that is the column of B with the least gcd.
    Sorting every column by its full gcd up front is not enough: for
    [[1,1,0],[0,4,2],[0,0,2]] the stable full sort is the identity and the
    diagonal comes out (1,4,2). The pivot gcd is pulled onto the diagonal by
    extended-gcd row steps, and finally every superdiagonal entry is reduced
    into [0, T(j,j)). On a matrix already in special form every level picks
    column t, so the result is (B, I, I).
    """
    B._require_square()
    k = B.rows
    if B.det() == 0:
        raise SingularMatrix("special_hnf needs a nonsingular matrix")

    a = B.to_list()
    u = IntMatrix.identity(k).to_list()
    order = list(range(k))

    for t in range(k):
        pivot = min(range(t, k), key=lambda j: (_column_gcd(a, t, j), j))
        cols = list(range(t)) + [pivot] + [j for j in range(t, k) if j != pivot]
        a = [[row[j] for j in cols] for row in a]
        order = [order[j] for j in cols]

        for i in range(t + 1, k):
            if a[i][t] != 0:
                _combine_rows([a, u], t, i, t)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    for j in range(1, k):
        for i in range(j):
            q = a[i][j] // a[j][j]
            if q:
                _sub_row([a, u], i, j, q)

    T = IntMatrix.from_rows(a)
    U = IntMatrix.from_rows(u)
    V = permutation_matrix(order)
    if U @ B @ V != T or not is_special_hnf(T):
        raise InternalError(f"special_hnf postcondition failed for {B.entries}")
    return HnfResult(T, U, V)


def snf(A: IntMatrix) -> SnfResult:
    """Smith form D = V·A·U with d_{i+1} | d_i (decreasing convention)."""
    A._require_square()
    k = A.rows
    if A.det() == 0:
        raise SingularMatrix("snf needs a nonsingular matrix")

    d = A.to_list()
    left = IntMatrix.identity(k).to_list()
    # columns of `right` are tracked as rows of its transpose
    right_t = IntMatrix.identity(k).to_list()

    def swap_cols(i: int, j: int) -> None:
        for row in d:
            row[i], row[j] = row[j], row[i]
        right_t[i], right_t[j] = right_t[j], right_t[i]

    def sub_col(target: int, source: int, factor: int) -> None:
        for row in d:
            row[target] -= factor * row[source]
        right_t[target] = [x - factor * y for x, y in zip(right_t[target], right_t[source])]

    for t in range(k):
        while True:
            pi, pj = min(
                ((i, j) for i in range(t, k) for j in range(t, k) if d[i][j] != 0),
                key=lambda ij: (abs(d[ij[0]][ij[1]]), ij),
            )
            d[t], d[pi] = d[pi], d[t]
            left[t], left[pi] = left[pi], left[t]
            swap_cols(t, pj)

            clean = True
            for i in range(t + 1, k):
                q = d[i][t] // d[t][t]
                if q:
                    _sub_row([d, left], i, t, q)
                clean = clean and d[i][t] == 0
            for j in range(t + 1, k):
                q = d[t][j] // d[t][t]
                if q:
                    sub_col(j, t, q)
                clean = clean and d[t][j] == 0
            if not clean:
                continue

            offender = next(
                (i for i in range(t + 1, k) for j in range(t + 1, k) if d[i][j] % d[t][t] != 0),
                None,
            )
            if offender is None:
                break
            _sub_row([d, left], t, offender, -1)

        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            left[t] = [-x for x in left[t]]

    # increasing divisibility -> decreasing by reversing both sides
    rev = list(range(k - 1, -1, -1))
    D = IntMatrix.diag([d[i][i] for i in rev])
    V = IntMatrix.from_rows([left[i] for i in rev])
    U = IntMatrix.from_rows(right_t[i] for i in rev).transpose()
    if V @ A @ U != D:
        raise InternalError(f"snf postcondition failed for {A.entries}")
    return SnfResult(D, U, V, D.diagonal())


def scaled_inverse(T: IntMatrix, M: int) -> IntMatrix:
    """W = M·adj(T)/det(T); NotSublattice unless every entry divides exactly."""
    T._require_square()
    det = T.det()
    if det == 0:
        raise SingularMatrix("scaled_inverse needs a nonsingular matrix")
    adj = T.adjugate()
    out = []
    for row in adj.entries:
        new_row = []
        for v in row:
            num = M * v
            if num % det != 0:
                raise NotSublattice(f"M*Z^k is not inside the lattice of {T.entries} (M={M})")
            new_row.append(num // det)
        out.append(new_row)
    return IntMatrix.from_rows(out)


def hermite_basis(rows: Iterable[Sequence[int]], k: int) -> IntMatrix:
    """
    Row-style Hermite basis of the full-rank lattice spanned by `rows`.

    Upper triangular with positive diagonal and 0 <= H(i,j) < H(j,j). Unique
    per lattice, which is what the canonical signatures rely on.
    """
    pending = [list(int(v) for v in r) for r in rows]
    if any(len(r) != k for r in pending):
        raise ValueError(f"all rows must have length {k}")
    basis: list[list[int]] = []
    for col in range(k):
        pivot = None
        rest = []
        for r in pending:
            if r[col] == 0:
                rest.append(r)
            elif pivot is None:
                pivot = r
            else:
                pair = [pivot, r]
                _combine_rows([pair], 0, 1, col)
                pivot = pair[0]
                if any(pair[1]):
                    rest.append(pair[1])
        if pivot is None:
            raise SingularMatrix("generating rows do not span a full-rank lattice")
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        pending = rest
    for j in range(1, k):
        for i in range(j):
            q = basis[i][j] // basis[j][j]
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], basis[j])]
    return IntMatrix.from_rows(basis)
