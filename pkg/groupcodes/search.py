import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from groupcodes.core import config
from groupcodes.core.code import CodeRecord, InitialVector, brute_force_min_distance, min_distance
from groupcodes.core.errors import InternalError, InvalidDimension, NumericalFailure, OddOrder
from groupcodes.core.intmat import IntMatrix, snf
from groupcodes.core.ivp import optimal_initial_vector
from groupcodes.core.lattice import (
    CandidateLattice,
    GroupElementTable,
    GroupPresentation,
    enumerate_lattices,
    group_elements,
    is_cyclic,
    isomorphism_class,
    prime_divisors,
)
from groupcodes.core.logger import add_progress_detail, log, reset_progress, set_progress

EVALUATE_SHARE = 90

_RUN_LOCK = threading.Lock()


@dataclass(frozen=True)
class SearchParams:
    M: int
    n: int
    dedupe: str = config.DEFAULT_DEDUPE
    threads: int = 1
    list_candidates: bool = False

    @property
    def k(self) -> int:
        return self.n // 2

    @property
    def odd(self) -> bool:
        return self.n % 2 == 1

    def validate(self) -> None:
        if self.M < 2:
            raise ValueError(f"order must be at least 2, got {self.M}")
        if self.n < 2:
            raise InvalidDimension(f"dimension must be at least 2, got {self.n}")
        if self.dedupe not in config.DEDUPE_POLICIES:
            raise ValueError(f"unknown dedupe policy {self.dedupe!r}")
        if self.threads < 1:
            raise ValueError(f"threads must be positive, got {self.threads}")
        if self.odd and self.M % 2:
            raise OddOrder("odd dimension requires even order")
        if self.odd and self.M < 4:
            raise OddOrder(f"odd dimension requires an even order of at least 4, got {self.M}")

    def base(self) -> "SearchParams":
        """Even-dimensional problem whose code seeds the odd-dimensional one."""
        return SearchParams(self.M // 2, self.n - 1, self.dedupe, self.threads, self.list_candidates)


@dataclass
class OddDimCode:
    M: int
    n: int
    base: CodeRecord
    theta: float
    min_distance: float
    initial_vector: InitialVector
    invariant_factors: tuple[int, ...]
    # rotation exponents per generator; its reflection sign is kept apart in `signs`
    generators: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]

    @property
    def label(self) -> str:
        return GroupPresentation(self.invariant_factors, ()).label


@dataclass(frozen=True)
class CountEstimates:
    M: int
    n: int
    binomial: int
    adam_estimate: int
    tested_cyclic: int
    tested_commutative: int
    raw: int


@dataclass
class _Evaluated:
    cand: CandidateLattice
    elements: GroupElementTable
    x: InitialVector
    d: float


# =========================================================
# Even dimension
# =========================================================
def _evaluate(cand: CandidateLattice) -> _Evaluated:
    elements = group_elements(cand.T, cand.M)
    x, d = optimal_initial_vector(elements, cand.M)
    add_progress_detail("tested", 1)
    return _Evaluated(cand, elements, x, d)


def _evaluate_all(cands: list[CandidateLattice], threads: int) -> list[_Evaluated]:
    total = len(cands)
    results = []

    def collect(evaluated) -> None:
        for r in evaluated:
            results.append(r)
            # evaluation spans 0..90 percent, classification takes the rest
            set_progress(percent=EVALUATE_SHARE * len(results) // total)

    if threads > 1 and total > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            collect(pool.map(_evaluate, cands))
    else:
        collect(_evaluate(c) for c in cands)
    return results


def _pick_winner(results: list[_Evaluated]) -> _Evaluated:
    best_d = max(r.d for r in results)
    tied = [r for r in results if r.d >= best_d - config.TIE_TOL]
    # signatures only for the tied group
    return min(tied, key=lambda r: (r.cand.signature, r.cand.key))


def search_optimum(params: SearchParams) -> CodeRecord:
    params.validate()
    if params.odd:
        raise InvalidDimension(f"dimension {params.n} is odd; use search_optimum_odd")
    M, k = params.M, params.k

    set_progress(status="RUNNING", current_step="enumerate", percent=0)
    enum = enumerate_lattices(M, k, params.dedupe, params.threads)
    if not enum.candidates:
        raise InternalError(f"no candidate lattices for M={M}, k={k}")

    set_progress(current_step="evaluate")
    log(f"EVALUATE {enum.tested} candidates (threads={params.threads})")
    results = _evaluate_all(enum.candidates, params.threads)

    set_progress(current_step="classify", percent=95)
    win = _pick_winner(results)
    presentation = isomorphism_class(win.cand.T, M, win.elements)

    record = CodeRecord(
        M=M,
        n=params.n,
        presentation=presentation,
        initial_vector=win.x,
        min_distance=win.d,
        raw_count=enum.raw,
        tested_count=enum.tested,
        T=win.cand.T,
        candidates=[(r.cand.T, r.d) for r in results] if params.list_candidates else None,
    )
    log(
        f"OPTIMUM M={M} n={params.n} d={win.d:.6f} group={presentation.label} "
        f"T={win.cand.T.entries} tested={enum.tested}/{enum.raw}"
    )
    return record


# =========================================================
# Odd dimension
# =========================================================
def _with_reflection(elements: GroupElementTable) -> tuple[GroupElementTable, np.ndarray]:
    """Direct product of the base group with {+1, -1} on the extra coordinate."""
    both = np.vstack([elements.elements, elements.elements])
    signs = np.concatenate([np.ones(len(elements)), -np.ones(len(elements))]).reshape(-1, 1)
    return GroupElementTable(elements.M, elements.k, both), signs


def _bisect_theta(d0: float) -> float:
    lo, hi = 0.0, math.pi / 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.cos(mid) * d0 - 2.0 * math.sin(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def search_optimum_odd(params: SearchParams) -> OddDimCode:
    params.validate()
    if not params.odd:
        raise InvalidDimension(f"dimension {params.n} is even; use search_optimum")
    base = search_optimum(params.base())
    d0 = base.min_distance

    set_progress(current_step="odd-extension")
    theta = math.atan(d0 / 2.0)
    d = 2.0 * d0 / math.sqrt(4.0 + d0 * d0)
    if abs(_bisect_theta(d0) - theta) > config.FEASIBILITY_TOL:
        raise NumericalFailure(f"bisection disagrees with the closed-form angle for d0={d0!r}")

    c, s = math.cos(theta), math.sin(theta)
    x = InitialVector(tuple(c * v for v in base.initial_vector.deltas), (s,))

    Mb = base.M
    elements, signs = _with_reflection(group_elements(base.T, Mb))
    formula = min_distance(elements, Mb, x, signs)
    _, lp_d = optimal_initial_vector(elements, Mb, signs)
    for label, value in (("formula", formula), ("signed LP", lp_d)):
        if abs(value - d) > config.FEASIBILITY_TOL:
            raise NumericalFailure(f"{label} distance {value!r} disagrees with the layered optimum {d!r}")

    if params.M <= config.BRUTE_FORCE_CAP:
        orbit_d = brute_force_min_distance(elements, Mb, params.n, x.ambient(params.n), signs)
        if abs(orbit_d - d) > config.FEASIBILITY_TOL:
            raise InternalError(f"orbit distance {orbit_d!r} disagrees with {d!r}")
    else:
        log(f"ODD orbit check skipped: M={params.M} above cap {config.BRUTE_FORCE_CAP}")

    factors = tuple(f for f in snf(IntMatrix.diag(list(base.presentation.invariant_factors) + [2])).invariant_factors if f > 1)
    gens = tuple(base.presentation.generators) + ((0,) * params.k,)
    gen_signs = (1,) * len(base.presentation.generators) + (-1,)
    log(f"ODD M={params.M} n={params.n} d0={d0:.6f} theta={theta:.6f} d={d:.6f}")
    return OddDimCode(params.M, params.n, base, theta, d, x, factors, gens, gen_signs)


# =========================================================
# Counts
# =========================================================
def euler_phi(n: int) -> int:
    result = n
    for p in prime_divisors(n):
        result -= result // p
    return result


def count_estimates(M: int, n: int, dedupe: str = config.DEFAULT_DEDUPE, threads: int = 1) -> CountEstimates:
    if n % 2 or n < 2:
        raise InvalidDimension(f"count estimates need an even dimension, got {n}")
    if M < 2:
        raise ValueError(f"order must be at least 2, got {M}")
    k = n // 2
    with _RUN_LOCK:
        reset_progress()
        set_progress(status="RUNNING", current_step="enumerate", percent=0)
        enum = enumerate_lattices(M, k, dedupe, threads)
        set_progress(current_step="classify", percent=EVALUATE_SHARE, details={"tested": enum.tested})
        cyclic = sum(1 for c in enum.candidates if is_cyclic(isomorphism_class(c.T, M)))
        set_progress(status="DONE", current_step="done", percent=100)
    return CountEstimates(
        M=M,
        n=n,
        binomial=math.comb(M // 2, k),
        adam_estimate=math.floor(Fraction(M, 2) ** k / euler_phi(M)),
        tested_cyclic=cyclic,
        tested_commutative=enum.tested,
        raw=enum.raw,
    )


# =========================================================
# Pipeline entry
# =========================================================
def run_search(params: SearchParams) -> CodeRecord | OddDimCode:
    """Dispatch on parity with progress bookkeeping; one search at a time."""
    with _RUN_LOCK:
        reset_progress()
        try:
            result = search_optimum_odd(params) if params.odd else search_optimum(params)
        except Exception as exc:
            log(f"❌ SEARCH FAILED -> {exc}")
            set_progress(status="FAILED", current_step="failed")
            raise
        set_progress(status="DONE", current_step="done", percent=100)
        return result
