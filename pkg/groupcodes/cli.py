import argparse
import csv
import json
import sys
import time

from groupcodes.core import config
from groupcodes.core.code import CodeRecord, InitialVector, min_distance
from groupcodes.core.errors import GroupCodeError, InternalError, NumericalFailure
from groupcodes.core.ivp import optimal_initial_vector
from groupcodes.core.lattice import (
    enumerate_lattices,
    group_elements,
    isomorphism_class,
    lattice_from_generators,
    special_form,
)
from groupcodes.core.logger import get_progress, log, reset_progress, set_echo
from groupcodes.core.reference import published_code
from groupcodes.search import OddDimCode, SearchParams, count_estimates, run_search

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

CODE_HEADER = ["M", "n", "d_min", "deltas", "factors", "generators"]
ESTIMATE_HEADER = ["M", "n", "binomial", "adam_estimate", "tested_cyclic", "tested_commutative"]
ENUMERATE_HEADER = ["M", "n", "profile", "T"]
ENUMERATE_COUNT_HEADER = ["M", "n", "raw", "deduped"]


# =========================================================
# Argument parsing
# =========================================================
def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of reals, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one real")
    return values


def _generator_list(text: str) -> list[list[int]]:
    return [_int_list(chunk) for chunk in text.split(";") if chunk.strip()]


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--precision", type=_positive, default=config.DEFAULT_PRECISION,
                        help="significant digits for reals")
    common.add_argument("--verbose", action="store_true", help="echo log lines to stderr")

    search_opts = argparse.ArgumentParser(add_help=False)
    search_opts.add_argument("--dedupe", choices=config.DEDUPE_POLICIES, default=config.DEFAULT_DEDUPE)
    search_opts.add_argument("--no-dedupe", action="store_true", help="same as --dedupe none")
    search_opts.add_argument("--threads", type=_positive, default=None)

    parser = argparse.ArgumentParser(prog="groupcodes", description="Optimum commutative group codes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", parents=[common, search_opts], help="find an optimum code")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--list-candidates", action="store_true")

    p = sub.add_parser("enumerate", parents=[common, search_opts], help="list candidate lattices")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--count-only", action="store_true")

    p = sub.add_parser("evaluate", parents=[common], help="evaluate a given group")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--generators", type=_generator_list, required=True)
    p.add_argument("--initial-vector", type=_float_list, default=None)

    p = sub.add_parser("table", parents=[common, search_opts], help="optimum codes for several orders")
    p.add_argument("--points", type=_int_list, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--compare", action="store_true", help="add published distances where known")

    p = sub.add_parser("estimate", parents=[common, search_opts], help="candidate count estimates")
    p.add_argument("--points", type=_int_list, required=True)
    p.add_argument("--dim", type=int, required=True)
    return parser


# =========================================================
# Formatting helpers
# =========================================================
def _real(value: float, precision: int) -> float:
    return float(f"{value:.{precision}g}")


def _params(args, **extra) -> dict:
    out = {k: v for k, v in vars(args).items() if k not in ("command", "format", "verbose", "no_dedupe")}
    out.update(extra)
    return out


def _dedupe(args) -> str:
    return "none" if getattr(args, "no_dedupe", False) else args.dedupe


def _code_result(rec: CodeRecord, p: int) -> dict:
    pres = rec.presentation
    out = {
        "min_distance": _real(rec.min_distance, p),
        "deltas": [_real(v, p) for v in rec.initial_vector.deltas],
        "group": pres.label,
        "factors": list(pres.invariant_factors),
        "generators": [list(g) for g in pres.generators],
        "T": [list(r) for r in rec.T.entries],
    }
    if rec.candidates is not None:
        out["candidates"] = [{"T": [list(r) for r in T.entries], "d": _real(d, p)} for T, d in rec.candidates]
    return out


def _odd_result(rec: OddDimCode, p: int) -> dict:
    x = rec.initial_vector
    return {
        "min_distance": _real(rec.min_distance, p),
        "deltas": [_real(v, p) for v in x.deltas + x.reflections],
        "theta": _real(rec.theta, p),
        "group": rec.label,
        "factors": list(rec.invariant_factors),
        "generators": [list(g) for g in rec.generators],
        "signs": list(rec.signs),
        "base": _code_result(rec.base, p),
    }


def _result(rec: CodeRecord | OddDimCode, p: int) -> dict:
    return _odd_result(rec, p) if isinstance(rec, OddDimCode) else _code_result(rec, p)


def _counts(rec: CodeRecord | OddDimCode) -> dict:
    base = rec.base if isinstance(rec, OddDimCode) else rec
    return {"raw": base.raw_count, "tested": base.tested_count}


def _csv_code_row(M: int, n: int, result: dict) -> list:
    return [
        M,
        n,
        result["min_distance"],
        " ".join(str(v) for v in result["deltas"]),
        " ".join(str(v) for v in result["factors"]),
        ";".join(" ".join(str(v) for v in g) for g in result["generators"]),
    ]


def _log_progress() -> None:
    p = get_progress()
    details = " ".join(f"{k}={v}" for k, v in sorted(p["details"].items()))
    log(f"PROGRESS {p['status']} {p['percent']}% step={p['current_step'] or '-'} {details}".rstrip())


def _emit(doc: dict, fmt: str, header: list[str], rows: list[list]) -> None:
    if fmt == "json":
        print(json.dumps(doc, indent=2))
        return
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _document(command: str, params: dict, result, counts: dict, started: float) -> dict:
    return {
        "schema_version": config.SCHEMA_VERSION,
        "command": command,
        "params": params,
        "result": result,
        "counts": counts,
        "timing_ms": round((time.perf_counter() - started) * 1000.0, 3),
    }


# =========================================================
# Commands
# =========================================================
def cmd_search(args) -> int:
    started = time.perf_counter()
    params = SearchParams(args.points, args.dim, _dedupe(args), config.resolve_threads(args.threads), args.list_candidates)
    rec = run_search(params)
    result = _result(rec, args.precision)
    doc = _document("search", _params(args, dedupe=params.dedupe, threads=params.threads), result, _counts(rec), started)
    _emit(doc, args.format, CODE_HEADER, [_csv_code_row(params.M, params.n, result)])
    return EXIT_OK


def cmd_enumerate(args) -> int:
    started = time.perf_counter()
    params = SearchParams(args.points, args.dim, _dedupe(args), config.resolve_threads(args.threads))
    params.validate()
    lattice_params = params.base() if params.odd else params
    enum = enumerate_lattices(lattice_params.M, lattice_params.k, params.dedupe, params.threads)
    counts = {
        "raw": enum.raw,
        "deduped": enum.tested,
        "rejected_w": enum.rejected_w,
        "adam_discards": enum.adam_discards,
    }
    if args.count_only:
        result = {"raw": enum.raw, "deduped": enum.tested}
        rows = [[params.M, params.n, enum.raw, enum.tested]]
        header = ENUMERATE_COUNT_HEADER
    else:
        result = {
            "lattice_order": lattice_params.M,
            "profiles": [list(pr.d) for pr in enum.profiles],
            "candidates": [
                {"profile": list(c.T.diagonal()), "T": [list(r) for r in c.T.entries]}
                for c in enum.candidates
            ],
        }
        rows = [
            [
                params.M,
                params.n,
                " ".join(str(v) for v in c.T.diagonal()),
                ";".join(" ".join(str(v) for v in r) for r in c.T.entries),
            ]
            for c in enum.candidates
        ]
        header = ENUMERATE_HEADER
    doc = _document("enumerate", _params(args, dedupe=params.dedupe, threads=params.threads), result, counts, started)
    _emit(doc, args.format, header, rows)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    started = time.perf_counter()
    M = args.points
    if M < 2:
        raise ValueError(f"order must be at least 2, got {M}")
    cand = lattice_from_generators(args.generators, M)
    elements = group_elements(cand.T, M)
    pres = isomorphism_class(cand.T, M, elements)
    if args.initial_vector is not None:
        if len(args.initial_vector) != cand.k:
            raise ValueError(f"initial vector needs {cand.k} block radii, got {len(args.initial_vector)}")
        x = InitialVector.normalized(args.initial_vector)
        d = min_distance(elements, M, x)
        optimized = False
    else:
        x, d = optimal_initial_vector(elements, M)
        optimized = True

    p = args.precision
    result = {
        "min_distance": _real(d, p),
        "deltas": [_real(v, p) for v in x.deltas],
        "group": pres.label,
        "factors": list(pres.invariant_factors),
        "generators": [list(g) for g in pres.generators],
        "T": [list(r) for r in cand.T.entries],
        "special_T": [list(r) for r in special_form(cand).T.entries],
        "optimized": optimized,
    }
    doc = _document("evaluate", _params(args), result, {"elements": len(elements)}, started)
    _emit(doc, args.format, CODE_HEADER, [_csv_code_row(M, 2 * cand.k, result)])
    return EXIT_OK


def cmd_table(args) -> int:
    started = time.perf_counter()
    threads = config.resolve_threads(args.threads)
    rows, csv_rows = [], []
    for M in args.points:
        rec = run_search(SearchParams(M, args.dim, _dedupe(args), threads))
        result = _result(rec, args.precision)
        row = {"M": M, "n": args.dim, "d_min": result["min_distance"], "deltas": result["deltas"],
               "group": result["group"], "factors": result["factors"], "generators": result["generators"],
               "bound": None}
        if args.compare:
            ref = published_code(M, args.dim)
            row["published_d_min"] = ref.d_min if ref else None
        rows.append(row)
        csv_rows.append(_csv_code_row(M, args.dim, result))
    doc = _document("table", _params(args, dedupe=_dedupe(args), threads=threads), {"rows": rows},
                    {"rows": len(rows)}, started)
    _emit(doc, args.format, CODE_HEADER, csv_rows)
    return EXIT_OK


def cmd_estimate(args) -> int:
    started = time.perf_counter()
    threads = config.resolve_threads(args.threads)
    rows = []
    for M in args.points:
        est = count_estimates(M, args.dim, _dedupe(args), threads)
        rows.append({
            "M": est.M,
            "n": est.n,
            "binomial": est.binomial,
            "adam_estimate": est.adam_estimate,
            "tested_cyclic": est.tested_cyclic,
            "tested_commutative": est.tested_commutative,
            "raw": est.raw,
        })
    csv_rows = [[r[h] for h in ESTIMATE_HEADER] for r in rows]
    doc = _document("estimate", _params(args, dedupe=_dedupe(args), threads=threads), {"rows": rows},
                    {"rows": len(rows)}, started)
    _emit(doc, args.format, ESTIMATE_HEADER, csv_rows)
    return EXIT_OK


COMMANDS = {
    "search": cmd_search,
    "enumerate": cmd_enumerate,
    "evaluate": cmd_evaluate,
    "table": cmd_table,
    "estimate": cmd_estimate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.verbose:
        set_echo(True)
    reset_progress()
    try:
        return COMMANDS[args.command](args)
    except (NumericalFailure, InternalError) as exc:
        log(f"{type(exc).__name__} -> {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (GroupCodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        log(f"UNHANDLED ERROR -> {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        if args.verbose:
            _log_progress()
            set_echo(config.LOG_ECHO)
