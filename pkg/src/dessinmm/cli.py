"""Command-line interface: dessin, hurwitz, characters, expect, tau, verify."""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .characters import character_table, hurwitz, hurwitz_bruteforce, hurwitz_weighted
from .dessin import canonical_form, dual, dual_by_permutations, from_faces, graph_comb_holds, parse_faces
from .errors import ArgumentError, DomainError, NumericError, ScaleGuardError, ValidationError
from .expectation import (
    EnsembleSpec,
    SourceAssignment,
    mixed_expectation,
    power_expectation,
    schur_det_expectation,
    schur_expectation,
    theorem_series,
    trace_product_expectation,
)
from .mc import (
    McConfig,
    Z_THRESHOLD,
    estimate,
    mixed_product,
    power_product,
    schur_det_product,
    schur_product,
    trace_product,
    z_scores,
)
from .partitions import Partition, enumerate_partitions, format_fraction
from .symfunc import PowerSumPoint
from .tau import RFunction, hciz, morozov_series, tau_pp_det, tau_scalar, tau_XY, tau_Xp_det
from .verification import run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def num(x: Any) -> Any:
    """Exact values as "num/den"; others as decimals with 15 significant digits."""
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, Fraction)):
        return format_fraction(x)
    c = complex(x)
    re = float(f"{c.real:.15g}")
    if c.imag == 0:
        return re
    return {"re": re, "im": float(f"{c.imag:.15g}")}


def decimal(x: Any) -> Any:
    c = complex(x)
    return float(f"{c.real:.15g}") if c.imag == 0 else num(c)


def parse_profiles(text: str) -> list[Partition]:
    """Partitions separated by '|', parts by ','."""
    if not text.strip():
        return []
    try:
        return [Partition.parse(chunk) for chunk in text.split("|")]
    except ValueError as exc:
        raise ArgumentError(f"bad profile list {text!r}: {exc}") from exc


def parse_number(text: str) -> Any:
    text = str(text).strip()
    try:
        return Fraction(text)
    except ValueError:
        try:
            return complex(text.replace("i", "j"))
        except ValueError as exc:
            raise ArgumentError(f"not a number: {text!r}") from exc


def parse_numbers(text: str) -> list[Any]:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def _faces_from_args(args: argparse.Namespace) -> list[tuple[int, ...]]:
    if getattr(args, "faces_file", None):
        return parse_faces(Path(args.faces_file).read_text())
    if getattr(args, "faces", None):
        text = args.faces.replace(";", "\n").replace("|", "\n")
        return parse_faces(text)
    raise ArgumentError("give --faces or --faces-file")


def _emit(payload: dict[str, Any], args: argparse.Namespace, rows: list[dict[str, Any]] | None = None) -> None:
    if getattr(args, "format", "json") == "csv":
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in row.items()})
        else:
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["key", "value"])
            for k, v in payload.items():
                writer.writerow([k, json.dumps(v) if isinstance(v, (dict, list)) else v])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# dessin


def _words(words: list[tuple[int, ...]]) -> list[list[int]]:
    return [list(w) for w in canonical_form(words)]


def cmd_dessin(args: argparse.Namespace) -> int:
    model = from_faces(_faces_from_args(args))
    params = {"action": args.action, "n": model.n}
    if args.action == "dual":
        d = dual(model)
        payload = {"params": params, "faces": _words(d.face_words()), "vertices": _words(d.vertex_words()), "n": d.n,
                   "F": d.F, "V": d.V, "euler": d.euler}
    else:
        d = dual(model)
        payload = {
            "params": params,
            **model.stats(),
            "faces": _words(model.face_words()),
            "vertices": _words(model.vertex_words()),
            "genus": model.genus,
            "graph_comb": graph_comb_holds(model),
            "dual_matches_permutations": d.same_as(dual_by_permutations(model)),
            "dual_dual_is_identity": dual(d).same_as(model),
        }
    _emit(payload, args)
    return EXIT_OK


# hurwitz and characters


def _hurwitz_value(args: argparse.Namespace, euler: int, profiles: list[Partition], d: int | None) -> Any:
    if args.oracle:
        if euler > 2:
            raise ArgumentError("brute force needs euler <= 2")
        m = (2 - euler) % 2
        h = (2 - euler - m) // 2
        return hurwitz_bruteforce(h, m, profiles, d)
    if args.weight_m:
        if args.N is None:
            raise ArgumentError("--weight-m needs --N")
        return hurwitz_weighted(euler, profiles, args.weight_m, parse_number(args.N), d)
    return hurwitz(euler, profiles, d)


def cmd_hurwitz(args: argparse.Namespace) -> int:
    params = {"euler": args.euler, "weight_m": args.weight_m, "N": args.N, "oracle": args.oracle}
    if args.table is not None:
        params.update(table=args.table, arity=args.arity)
        basis = enumerate_partitions(args.table)
        rows = []
        for combo in itertools.combinations_with_replacement(basis, args.arity):
            value = _hurwitz_value(args, args.euler, list(combo), args.table)
            rows.append({"profiles": "|".join(map(str, combo)), "value": num(value), "decimal": decimal(value)})
        _emit({"params": params, "rows": rows}, args, rows)
        return EXIT_OK
    profiles = parse_profiles(args.profiles or "")
    params["profiles"] = [str(p) for p in profiles]
    value = _hurwitz_value(args, args.euler, profiles, args.d)
    _emit({"params": params, "value": num(value), "decimal": decimal(value)}, args)
    return EXIT_OK


def cmd_characters(args: argparse.Namespace) -> int:
    table = character_table(args.d)
    basis = enumerate_partitions(args.d)
    rows = [{"lambda": str(lam), **{str(delta): int(table[(lam, delta)]) for delta in basis}} for lam in basis]
    payload = {"params": {"d": args.d}, "classes": [str(p) for p in basis], "rows": rows}
    _emit(payload, args, rows)
    return EXIT_OK


# expect


def _load_sources(path: str) -> SourceAssignment:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"sources file is not JSON: {exc}") from exc
    if isinstance(data, dict) and "sources" in data:
        data = data["sources"]
    return SourceAssignment.from_json(data)


def cmd_expect(args: argparse.Namespace) -> int:
    model = from_faces(_faces_from_args(args))
    sources = _load_sources(args.sources_file)
    N = sources.N
    hbar = parse_number(args.hbar) if args.hbar is not None else None
    ens = EnsembleSpec.parse(args.ensemble, N, hbar)
    side = args.side
    parts = parse_profiles(args.partitions) if args.partitions else []
    formula = args.formula
    if formula == "trace":
        res = trace_product_expectation(model, sources, ens, side)
        obs = trace_product()
    elif formula == "schur":
        res = schur_expectation(model, sources, ens, parts, side)
        obs = schur_product(parts)
    elif formula == "schur-det":
        alphas = [int(a) for a in (args.alphas or "").split(",") if a.strip()]
        res = schur_det_expectation(model, sources, ens, parts, alphas, side)
        obs = schur_det_product(parts, alphas)
    elif formula == "mixed":
        k = args.k
        if k is None:
            raise ArgumentError("mixed needs --k (number of leading power-sum words)")
        res = mixed_expectation(model, sources, ens, parts[:k], parts[k:], side)
        obs = mixed_product(parts[:k], parts[k:])
    elif formula == "power":
        res = power_expectation(model, sources, ens, parts, side)
        obs = power_product(parts)
    else:
        words = model.face_words() if side == "faces" else model.vertex_words()
        r = RFunction.parse(args.r, args.r_kind) if args.r else None
        point = PowerSumPoint.from_values(parse_numbers(args.p)) if args.p else PowerSumPoint.infinity()
        res = theorem_series(model, sources, ens, [r] * len(words), [point] * len(words), side, args.dmax)
        obs = None
    payload: dict[str, Any] = {
        "params": {
            "formula": formula,
            "side": side,
            "ensemble": list(ens.kinds),
            "N": N,
            "hbar": num(ens.hbar),
            "partitions": [str(p) for p in parts],
            "dmax": args.dmax if formula == "theorem" else None,
            "exact": res.exact,
        },
        "value": num(res.value),
        "decimal": decimal(res.value),
        "formula": res.formula,
        "model": model.stats(),
        "diagnostics": res.diagnostics,
    }
    if res.series is not None:
        payload["series"] = [
            {"term": [str(p) for p in key] if isinstance(key, tuple) else str(key), "value": num(val)}
            for key, val in res.series
        ]
    if args.mc:
        if obs is None:
            raise ArgumentError("Monte Carlo is not available for the theorem series")
        cfg = McConfig(samples=args.mc, seed=args.seed, workers=args.workers, N=N, hbar=float(ens.hbar))
        est = estimate(model, sources, ens.kinds, obs, cfg, side)
        z = z_scores(res.value, est)
        payload["params"].update(samples=args.mc, seed=args.seed)
        payload["mc"] = {"mean": num(est.mean), "stderr": list(est.stderr), "z": list(z),
                         "pass": max(z) <= args.threshold}
        _emit(payload, args)
        return EXIT_OK if max(z) <= args.threshold else EXIT_FAIL
    _emit(payload, args)
    return EXIT_OK


# tau


def _matrix(text: str | None, name: str) -> np.ndarray:
    if not text:
        raise ArgumentError(f"--{name} is required")
    text = text.strip()
    if text.startswith("["):
        return np.array(json.loads(text), dtype=complex)
    return np.diag([complex(v) for v in parse_numbers(text)])


def _point(text: str | None) -> PowerSumPoint:
    if not text or text.strip() in ("inf", "infinity", "p_infty"):
        return PowerSumPoint.infinity()
    return PowerSumPoint.from_values(parse_numbers(text))


def cmd_tau(args: argparse.Namespace) -> int:
    r = RFunction.parse(args.r, args.r_kind) if args.r else RFunction.constant(1)
    params = {"which": args.which, "r": args.r, "r_kind": args.r_kind if args.r else "constant", "n": args.n,
              "cap": args.cap}
    which = args.which
    if which == "scalar":
        x = parse_number(args.x)
        value = tau_scalar(r, args.n, x, args.cap)
        payload = {"params": {**params, "x": args.x}, "value": num(value), "decimal": decimal(value)}
        _emit(payload, args)
        return EXIT_OK
    if which == "morozov":
        p, pbar = _point(args.p), _point(args.p2)
        value = morozov_series(p, pbar, args.N, args.cap)
        payload = {"params": {**params, "p": args.p, "p2": args.p2, "N": args.N}, "value": num(value),
                   "decimal": decimal(value)}
        _emit(payload, args)
        return EXIT_OK
    if which == "xy":
        res = tau_XY(r, args.n, _matrix(args.X, "X"), _matrix(args.Y, "Y"), args.cap)
        params.update(X=args.X, Y=args.Y)
    elif which == "pp":
        res = tau_pp_det(r, args.n, _point(args.p), _point(args.p2), args.cap)
        params.update(p=args.p, p2=args.p2)
    elif which == "xp":
        res = tau_Xp_det(r, args.n, _matrix(args.X, "X"), _point(args.p), args.cap)
        params.update(X=args.X, p=args.p)
    else:
        alpha = complex(parse_number(args.alpha))
        res = hciz(alpha if alpha.imag else alpha.real, _matrix(args.X, "X"), _matrix(args.Y, "Y"), args.cap)
        params.update(alpha=args.alpha, X=args.X, Y=args.Y)
    payload = {
        "params": params,
        "series": num(res.series),
        "determinant": None if res.determinant is None else num(res.determinant),
        "discrepancy": res.discrepancy,
        "diagnostics": res.diagnostics,
    }
    if res.closed is not None:
        payload["closed"] = num(res.closed)
    _emit(payload, args)
    return EXIT_OK


# verify


def cmd_verify(args: argparse.Namespace) -> int:
    hbar = None
    if args.hbar:
        value = parse_number(args.hbar)
        if not isinstance(value, Fraction):
            raise ArgumentError("--hbar must be a positive real")
        hbar = float(value)
    cfg = McConfig(samples=args.samples, seed=args.seed, workers=args.workers, N=args.N, hbar=hbar)
    reports = run_suite(args.suite, cfg, args.threshold, args.source_seed)
    rows = [r.to_json() for r in reports]
    ok = all(r.passed for r in reports)
    payload = {
        "params": {"suite": args.suite, "N": args.N, "hbar": cfg.hbar_value, "samples": args.samples, "seed": args.seed,
                   "workers": cfg.workers, "threshold": args.threshold, "source_seed": args.source_seed},
        "passed": sum(r.passed for r in reports),
        "total": len(reports),
        "all_pass": ok,
        "cases": rows,
    }
    _emit(payload, args, rows)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dessinmm", description="Maps, Hurwitz numbers and matrix-model expectations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", help="write to this path instead of stdout")

    def faces(p: argparse.ArgumentParser) -> None:
        p.add_argument("--faces", help="face words separated by ';', letters by spaces")
        p.add_argument("--faces-file", help="one face per line, or a JSON array of integer arrays")

    p = sub.add_parser("dessin", help="dual map or model statistics")
    p.add_argument("action", choices=("dual", "check"))
    faces(p)
    common(p)
    p.set_defaults(func=cmd_dessin)

    p = sub.add_parser("hurwitz", help="Hurwitz numbers by the character formula or brute force")
    p.add_argument("--euler", type=int, required=True)
    p.add_argument("--profiles", help='e.g. "2|1,1"')
    p.add_argument("--d", type=int, help="weight when no profiles are given")
    p.add_argument("--weight-m", type=int, default=0, help="exponent m of the (N)_lam^-m weight")
    p.add_argument("--N", help="N for the weighted sum")
    p.add_argument("--oracle", action="store_true", help="count permutation tuples instead")
    p.add_argument("--table", type=int, help="tabulate all profile tuples of this weight")
    p.add_argument("--arity", type=int, default=2)
    common(p)
    p.set_defaults(func=cmd_hurwitz)

    p = sub.add_parser("characters", help="character table of S_d")
    p.add_argument("--d", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_characters)

    p = sub.add_parser("expect", help="closed-form expectation values")
    p.add_argument("--formula", choices=("trace", "schur", "schur-det", "mixed", "power", "theorem"), required=True)
    faces(p)
    p.add_argument("--sources-file", required=True)
    p.add_argument("--ensemble", required=True, help='e.g. "G,U"')
    p.add_argument("--hbar", help="default 1/N")
    p.add_argument("--side", choices=("faces", "vertices"), default="faces")
    p.add_argument("--partitions", help='one per observed word, e.g. "2|1,1"')
    p.add_argument("--alphas", help="determinant exponents, comma separated")
    p.add_argument("--k", type=int, help="number of leading power-sum words for mixed")
    p.add_argument("--r", help='r function, e.g. "p:1,2;q:3"')
    p.add_argument("--r-kind", choices=("rational", "ratio", "constant"), default="rational")
    p.add_argument("--p", help="power sums p_1,p_2,... for the theorem series (default p_infinity)")
    p.add_argument("--dmax", type=int, default=6)
    p.add_argument("--mc", type=int, default=0, help="also estimate by Monte Carlo with this many samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=0)
    p.add_argument("--threshold", type=float, default=Z_THRESHOLD)
    common(p)
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("tau", help="tau function series and determinant forms")
    p.add_argument("--which", choices=("scalar", "xy", "pp", "xp", "hciz", "morozov"), required=True)
    p.add_argument("--r", help='e.g. "p:1,2;q:3"; default r = 1')
    p.add_argument("--r-kind", choices=("rational", "ratio", "constant"), default="rational")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--x", default="0", help="scalar argument")
    p.add_argument("--X", help="eigenvalues, comma separated, or a JSON matrix")
    p.add_argument("--Y", help="eigenvalues, comma separated, or a JSON matrix")
    p.add_argument("--p", help="power sums p_1,p_2,... or 'infinity'")
    p.add_argument("--p2", help="second power-sum point")
    p.add_argument("--alpha", default="1")
    p.add_argument("--N", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("verify", help="closed forms against Monte Carlo")
    p.add_argument("--suite", choices=("lemmas", "prop1", "prop2", "prop4", "hciz", "morozov", "controls", "all"),
                   default="all")
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--hbar", help="default 1/N")
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=0, help="default from DESSINMM_WORKERS or 1")
    p.add_argument("--threshold", type=float, default=Z_THRESHOLD)
    p.add_argument("--source-seed", type=int, default=2024)
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ArgumentError, DomainError, ValidationError, ScaleGuardError, NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
