"""
Candidate lattices of rotation exponents.

A commutative group of order M acting by rotations on k planes is described by
the lattice of its exponent vectors: an integer lattice containing M·Z^k with
quotient of order M. Its special Hermite basis T is upper triangular with
diagonal d_i = M / a_i, and the search only needs one basis per isometry class.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations, product
from math import gcd, prod
from typing import Iterable, Iterator, Literal, Sequence

import numpy as np

from groupcodes.core import config
from groupcodes.core.errors import InternalError, InvalidGenerators, NotSublattice
from groupcodes.core.intmat import (
    HnfResult,
    IntMatrix,
    hermite_basis,
    scaled_inverse,
    snf,
    special_hnf,
)
from groupcodes.core.logger import add_progress_detail, log

DedupPolicy = Literal["adam", "isometry", "none"]

SignedPermutation = tuple[tuple[int, ...], tuple[int, ...]]


# =========================================================
# Types
# =========================================================
@dataclass(frozen=True)
class DiagonalProfile:
    M: int
    k: int
    a: tuple[int, ...]
    d: tuple[int, ...]

    @property
    def is_scalar(self) -> bool:
        """All divisors equal: the profile of Z_m^k with m^k = M."""
        return self.k > 1 and len(set(self.a)) == 1


@dataclass(frozen=True)
class CandidateLattice:
    M: int
    k: int
    T: IntMatrix
    W: IntMatrix

    @cached_property
    def signature(self) -> bytes:
        return canonical_signature(self.T, self.M)

    @property
    def key(self) -> tuple[int, ...]:
        return self.T.flat()


@dataclass(frozen=True)
class GroupElementTable:
    M: int
    k: int
    elements: np.ndarray

    def __len__(self) -> int:
        return int(self.elements.shape[0])

    def as_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.elements]


@dataclass(frozen=True)
class GroupPresentation:
    invariant_factors: tuple[int, ...]
    generators: tuple[tuple[int, ...], ...]

    @property
    def label(self) -> str:
        if not self.invariant_factors:
            return "Z1"
        return "+".join(f"Z{f}" for f in sorted(self.invariant_factors))


@dataclass
class Enumeration:
    M: int
    k: int
    policy: str
    profiles: list[DiagonalProfile]
    raw: int = 0
    rejected_w: int = 0
    adam_discards: int = 0
    candidates: list[CandidateLattice] = field(default_factory=list)

    @property
    def tested(self) -> int:
        return len(self.candidates)


@dataclass
class _ProfileScan:
    profile: DiagonalProfile
    raw: int = 0
    rejected_w: int = 0
    adam_discards: int = 0
    candidates: list[CandidateLattice] = field(default_factory=list)


# =========================================================
# Signed coordinate permutations
# =========================================================
def signed_permutations(k: int) -> Iterator[SignedPermutation]:
    for sigma in permutations(range(k)):
        for eps in product((1, -1), repeat=k):
            yield sigma, eps


def apply_signed(vec: Sequence[int], sp: SignedPermutation, M: int) -> tuple[int, ...]:
    sigma, eps = sp
    return tuple((eps[j] * vec[sigma[j]]) % M for j in range(len(sigma)))


# =========================================================
# Profiles and superdiagonal fill-in
# =========================================================
def enumerate_diagonals(M: int, k: int) -> list[DiagonalProfile]:
    if M < 1 or k < 1:
        raise ValueError(f"need M >= 1 and k >= 1, got M={M}, k={k}")
    divisors = [i for i in range(1, M + 1) if M % i == 0]

    def split(rest: int, slots: int, cap: int) -> Iterator[tuple[int, ...]]:
        if slots == 1:
            if rest <= cap:
                yield (rest,)
            return
        for a in reversed(divisors):
            if a <= cap and rest % a == 0:
                for tail in split(rest // a, slots - 1, a):
                    yield (a,) + tail

    profiles = []
    for a in split(M, k, M):
        for i in range(k):
            if a[i] ** (i + 1) * prod(a[i + 1:]) > M:
                raise InternalError(f"divisor ordering violated for {a}")
        profiles.append(DiagonalProfile(M, k, a, tuple(M // x for x in a)))
    profiles.sort(key=lambda p: p.d)
    return profiles


def _column_options(d: Sequence[int], j: int) -> list[tuple[int, ...]]:
    """Entries T(0..j-1, j), filled from the diagonal upwards under the gcd bound."""
    partial: list[tuple[tuple[int, ...], int]] = [((), d[j])]
    for i in range(j - 1, -1, -1):
        grown = []
        for tail, g in partial:
            for x in range(d[j]):
                gx = gcd(g, x)
                if d[i] <= gx:
                    grown.append(((x,) + tail, gx))
        partial = grown
    return sorted(tail for tail, _ in partial)


def _sign_folded(column: tuple[int, ...], modulus: int) -> bool:
    # negating the last coordinate maps this column to its negation mod T(k,k)
    return column <= tuple((-x) % modulus for x in column)


def raw_matrices(profile: DiagonalProfile) -> Iterator[IntMatrix]:
    d, k = profile.d, profile.k
    columns = [_column_options(d, j) for j in range(k)]
    if k > 1:
        columns[-1] = [c for c in columns[-1] if _sign_folded(c, d[-1])]
    for choice in product(*columns):
        rows = [[0] * k for _ in range(k)]
        for j, col in enumerate(choice):
            for i, v in enumerate(col):
                rows[i][j] = v
            rows[j][j] = d[j]
        yield IntMatrix.from_rows(rows)


# =========================================================
# Canonical signature
# =========================================================
def _subgroup_form(rows: Iterable[Sequence[int]], k: int, M: int) -> tuple[int, ...]:
    gens = [list(r) for r in rows]
    gens += [[M if i == j else 0 for j in range(k)] for i in range(k)]
    return hermite_basis(gens, k).flat()


def canonical_signature(T: IntMatrix, M: int) -> bytes:
    """
    Smallest Hermite form of the subgroup over all k!·2^k signed coordinate
    permutations, as fixed-width big-endian bytes (byte order == numeric order).

    Multiplying by a unit maps the subgroup onto itself, so unit scalings need
    no separate loop.
    """
    k = T.rows
    best = min(
        _subgroup_form((apply_signed(row, sp, M) for row in T.entries), k, M)
        for sp in signed_permutations(k)
    )
    width = max(1, (M.bit_length() + 7) // 8)
    return b"".join(v.to_bytes(width, "big") for v in best)


class SignatureRegistry:
    """Insert-if-absent map signature -> smallest candidate, safe across workers."""

    def __init__(self):
        self._lock = threading.Lock()
        self._best: dict[bytes, CandidateLattice] = {}

    def offer(self, cand: CandidateLattice) -> None:
        sig = cand.signature
        with self._lock:
            cur = self._best.get(sig)
            if cur is None or cand.key < cur.key:
                self._best[sig] = cand

    def representatives(self) -> list[CandidateLattice]:
        with self._lock:
            return list(self._best.values())


# =========================================================
# Ádám accounting
# =========================================================
def _adam_partner(T: IntMatrix, sp: SignedPermutation, M: int) -> tuple[int, ...] | None:
    """
    Leading row moved by a signed permutation and rescaled by the unit that
    restores T(1,1), then folded entrywise. None when no such unit exists.
    """
    v = apply_signed(T.row(0), sp, M)
    lead = T[0, 0]
    if v[0] % lead:
        return None
    span = M // lead
    u = v[0] // lead
    if gcd(u, span) != 1:
        return None
    alpha = pow(u, -1, span) if span > 1 else 1
    if gcd(alpha, M) != 1:
        return None
    row = [(alpha * x) % M for x in v]
    row[0] = lead
    for j in range(1, len(row)):
        row[j] = min(row[j], M - row[j])
    return tuple(row)


def _adam_discardable(cand: CandidateLattice, pool: dict[tuple[int, ...], CandidateLattice]) -> bool:
    T, M = cand.T, cand.M
    for sp in signed_permutations(cand.k):
        row = _adam_partner(T, sp, M)
        if row is None or row == T.row(0):
            continue
        key = row + T.flat()[cand.k:]
        other = pool.get(key)
        if other is not None and key < cand.key and other.signature == cand.signature:
            return True
    return False


def adam_equivalent(a: Sequence[int], b: Sequence[int], M: int) -> bool:
    """a == α·P(b) mod M for some unit α and signed coordinate permutation P."""
    if len(a) != len(b):
        return False
    target = tuple(x % M for x in a)
    units = [x for x in range(1, max(M, 2)) if gcd(x, M) == 1]
    for sp in signed_permutations(len(b)):
        moved = apply_signed(b, sp, M)
        for alpha in units:
            if tuple((alpha * x) % M for x in moved) == target:
                return True
    return False


# =========================================================
# Enumeration
# =========================================================
def _scan_profile(profile: DiagonalProfile, policy: str) -> _ProfileScan:
    scan = _ProfileScan(profile)
    M, k = profile.M, profile.k
    valid = []
    for T in raw_matrices(profile):
        scan.raw += 1
        try:
            W = scaled_inverse(T, M)
        except NotSublattice:
            scan.rejected_w += 1
            continue
        valid.append(CandidateLattice(M, k, T, W))

    if policy == "adam":
        if profile.is_scalar:
            scan.adam_discards = len(valid)
            return scan
        pool = {c.key: c for c in valid}
        for c in valid:
            if _adam_discardable(c, pool):
                scan.adam_discards += 1
            else:
                scan.candidates.append(c)
    elif policy == "isometry":
        local = SignatureRegistry()
        for c in valid:
            local.offer(c)
        scan.candidates = sorted(local.representatives(), key=lambda c: c.key)
    else:
        scan.candidates = valid
    return scan


def enumerate_candidates(profile: DiagonalProfile, policy: DedupPolicy = "adam") -> list[CandidateLattice]:
    _check_policy(policy)
    return _scan_profile(profile, policy).candidates


def enumerate_lattices(M: int, k: int, policy: DedupPolicy = "adam", threads: int = 1) -> Enumeration:
    _check_policy(policy)
    profiles = enumerate_diagonals(M, k)
    out = Enumeration(M, k, policy, profiles)

    if threads > 1 and len(profiles) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scans = list(pool.map(lambda p: _scan_profile(p, policy), profiles))
    else:
        scans = [_scan_profile(p, policy) for p in profiles]

    registry = SignatureRegistry() if policy == "isometry" else None
    for scan in scans:
        out.raw += scan.raw
        out.rejected_w += scan.rejected_w
        out.adam_discards += scan.adam_discards
        if registry is not None:
            for c in scan.candidates:
                registry.offer(c)
        else:
            out.candidates.extend(scan.candidates)
    if registry is not None:
        out.candidates = sorted(registry.representatives(), key=lambda c: c.key)

    add_progress_detail("profiles", len(profiles))
    add_progress_detail("raw", out.raw)
    add_progress_detail("rejected_w", out.rejected_w)
    add_progress_detail("adam_discards", out.adam_discards)
    log(
        f"ENUMERATE M={M} k={k} policy={policy} -> profiles={len(profiles)} raw={out.raw} "
        f"rejected_w={out.rejected_w} adam_discards={out.adam_discards} tested={out.tested}"
    )
    return out


def _check_policy(policy: str) -> None:
    if policy not in config.DEDUPE_POLICIES:
        raise ValueError(f"unknown dedupe policy {policy!r}; expected one of {config.DEDUPE_POLICIES}")


# =========================================================
# Group elements and presentation
# =========================================================
def _span(generators: np.ndarray, orders: Sequence[int], M: int) -> np.ndarray:
    coeffs = np.indices(tuple(orders), dtype=np.int64).reshape(len(orders), -1).T
    return (coeffs @ generators) % M


def group_elements(T: IntMatrix, M: int) -> GroupElementTable:
    k = T.rows
    diag = T.diagonal()
    if any(M % d for d in diag):
        raise InternalError(f"diagonal {diag} does not divide M={M}")
    orders = [M // d for d in diag]
    elements = _span(np.array(T.entries, dtype=np.int64), orders, M)
    if len(elements) != M or len(np.unique(elements, axis=0)) != M:
        raise InternalError(f"lattice of {T.entries} does not give {M} distinct elements")
    return GroupElementTable(M, k, elements)


def prime_divisors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _has_order(g: Sequence[int], order: int, M: int) -> bool:
    if any((order * x) % M for x in g):
        return False
    return all(any(((order // p) * x) % M for x in g) for p in prime_divisors(order))


def isomorphism_class(T: IntMatrix, M: int, elements: GroupElementTable | None = None) -> GroupPresentation:
    """Invariant factors and generators from the Smith form D = V·W·U of W = M·T⁻¹."""
    W = scaled_inverse(T, M)
    form = snf(W)
    U = form.U
    U_inv = U.adjugate().scale(U.det())
    gens = (U_inv @ T).mod(M)

    factors = form.invariant_factors
    if prod(factors) != M:
        raise InternalError(f"invariant factors {factors} do not multiply to {M}")
    kept = [(f, gens.row(i)) for i, f in enumerate(factors) if f > 1]
    for f, g in kept:
        if not _has_order(g, f, M):
            raise InternalError(f"generator {g} does not have order {f} mod {M}")

    if elements is None:
        elements = group_elements(T, M)
    if kept:
        regen = _span(np.array([g for _, g in kept], dtype=np.int64), [f for f, _ in kept], M)
    else:
        regen = np.zeros((1, T.rows), dtype=np.int64)
    if not np.array_equal(np.unique(regen, axis=0), np.unique(elements.elements, axis=0)):
        raise InternalError(f"generators {[g for _, g in kept]} do not regenerate the group of {T.entries}")
    return GroupPresentation(tuple(f for f, _ in kept), tuple(g for _, g in kept))


def is_cyclic(presentation: GroupPresentation) -> bool:
    return len(presentation.invariant_factors) <= 1


# =========================================================
# Lattices from explicit generators
# =========================================================
def lattice_from_generators(generators: Sequence[Sequence[int]], M: int) -> CandidateLattice:
    """
    Subgroup of Z_M^k generated by exponent vectors, as a candidate in the
    caller's coordinate order (row Hermite basis with M·e_i adjoined).
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        raise InvalidGenerators("at least one generator is required")
    k = len(gens[0])
    if k < 1 or any(len(g) != k for g in gens):
        raise InvalidGenerators("all generators must have the same positive length")
    rows = [[x % M for x in g] for g in gens]
    rows += [[M if i == j else 0 for j in range(k)] for i in range(k)]
    H = hermite_basis(rows, k)
    order = M ** k // H.det()
    if order != M:
        raise InvalidGenerators(f"generators span a group of order {order}, expected {M}", order=order)
    try:
        W = scaled_inverse(H, M)
    except NotSublattice as exc:
        raise InternalError(f"Hermite basis {H.entries} misses M*Z^k") from exc
    return CandidateLattice(M, k, H, W)


def special_form(cand: CandidateLattice) -> HnfResult:
    """Special Hermite form of a candidate; its diagonal names the profile the group falls in."""
    return special_hnf(cand.T)
