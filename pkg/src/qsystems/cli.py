"""Command-line front end: ``qsys {solve,series,verify,decompose,identities}``.

Exit codes: 0 success, 1 a gating verification check failed, 2 malformed
input, 3 a solver precondition failed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Dict, Hashable, Optional, Sequence

from .combinat import TYPE_I, TYPE_II, coefficient_table, series_K, series_K_specialized, series_R, series_R_specialized
from .kr import kr_canonical, kr_multiplicities, verify
from .liedata import LieDataError, denominator_identity_check, kr_matrices, parse_algebra
from .qsolve import QSystemSpec, SolverError, solve_general, solve_specialized, solve_standard
from .report import VerificationReport
from .series import SeriesError, as_fraction, parse_label

EXIT_OK, EXIT_CHECK_FAILED, EXIT_BAD_INPUT, EXIT_SOLVER = 0, 1, 2, 3
DEFAULT_MAX_CUTOFF = 16


class InputError(ValueError):
    """Malformed command-line or file input."""


def max_cutoff() -> int:
    raw = os.environ.get("QSYS_MAX_CUTOFF", str(DEFAULT_MAX_CUTOFF))
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"QSYS_MAX_CUTOFF must be an integer, got {raw!r}") from None


def parse_nu(text: Optional[str]) -> Dict[Hashable, Fraction]:
    """``"(1,1):2,(2,1):1"`` -> ``{(1, 1): 2, (2, 1): 1}``; a bare key has value 1."""
    out: Dict[Hashable, Fraction] = {}
    if text is None or not text.strip():
        return out
    items, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append(cur)
            cur = ""
        else:
            cur += ch
    items.append(cur)
    for item in items:
        item = item.strip()
        if not item:
            raise InputError(f"empty entry in nu {text!r}")
        key, sep, val = item.rpartition(":") if ":" in item else (item, "", "1")
        try:
            label = parse_label(key.strip())
            value = as_fraction(val.strip())
        except (SeriesError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad nu entry {item!r}: {exc}") from None
        out[label] = out.get(label, Fraction(0)) + value
    return out


def load_spec(path: str) -> QSystemSpec:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not text.strip():
        raise InputError(f"{path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    try:
        return QSystemSpec.from_json(data)
    except (SolverError, ValueError, TypeError) as exc:
        raise InputError(f"bad spec in {path}: {exc}") from None


def _algebra(selector: str):
    try:
        return parse_algebra(selector)
    except LieDataError as exc:
        raise InputError(str(exc)) from None


def _cutoff(value: int) -> int:
    if value < 1:
        raise InputError("cutoff must be at least 1")
    cap = max_cutoff()
    if value > cap:
        raise InputError(f"cutoff {value} exceeds QSYS_MAX_CUTOFF={cap}")
    return value


def _source(args) -> None:
    if bool(args.spec) == bool(args.algebra):
        raise InputError("give exactly one of --spec and --algebra")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_solve(args) -> tuple:
    _source(args)
    cutoff = _cutoff(args.cutoff)
    if args.algebra:
        sol = kr_canonical(_algebra(args.algebra), cutoff)
    else:
        spec = load_spec(args.spec)
        if spec.kind == "standard":
            sol = solve_standard(spec, cutoff)
        elif spec.kind == "specialized":
            sol = solve_specialized(spec, spec.rank, cutoff)
        else:
            sol = solve_general(spec, cutoff)
    pretty = "\n".join(f"Q[{k}] = {v}" for k, v in ((k, sol.members[k]) for k in sol.members))
    return sol.to_json(), pretty, EXIT_OK


def cmd_series(args) -> tuple:
    _source(args)
    cutoff = _cutoff(args.cutoff)
    nu = parse_nu(args.nu)
    if args.algebra:
        alg = _algebra(args.algebra)
        top = max([m for (_, m) in nu] + [cutoff]) if all(isinstance(k, tuple) for k in nu) else cutoff
        spec = kr_matrices(alg, top)
        if args.table:
            raise InputError("--table needs --spec")
        fn = series_K_specialized if args.which == "K" else series_R_specialized
        f = fn(spec, nu, cutoff, convention=args.convention)
    else:
        spec = load_spec(args.spec)
        if args.table:
            rows = coefficient_table(spec, nu, cutoff, args.convention)
            pretty = "\n".join(f"{r['N']}: K={r['K']} R={r['R']}" for r in rows)
            return rows, pretty, EXIT_OK
        fn = series_K if args.which == "K" else series_R
        f = fn(spec, nu, cutoff, convention=args.convention)
    return f.to_json(), f"{args.which} = {f}", EXIT_OK


def _report_output(report: VerificationReport) -> tuple:
    lines = []
    for c in report.checks:
        tag = "" if c.gating else " (informational)"
        extra = f"  {c.witness.to_json()}" if c.witness else (f"  {c.message}" if c.message else "")
        lines.append(f"{c.status.upper():7} {c.name}{tag}{extra}")
    return report.to_json(), "\n".join(lines), EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_verify(args) -> tuple:
    if not args.algebra:
        raise InputError("verify needs --algebra")
    alg = _algebra(args.algebra)
    cutoff = _cutoff(args.cutoff)
    return _report_output(verify(alg, cutoff, seed=args.seed, convention=args.convention))


def cmd_decompose(args) -> tuple:
    if not args.algebra:
        raise InputError("decompose needs --algebra")
    alg = _algebra(args.algebra)
    cutoff = _cutoff(args.cutoff)
    nu = parse_nu(args.nu)
    try:
        table = kr_multiplicities(alg, nu, cutoff, convention=args.convention)
    except LieDataError as exc:
        raise InputError(str(exc)) from None
    pretty = "\n".join(f"{list(w)}: {v}" for w, v in table.entries)
    if not table.complete:
        pretty += "\n(cutoff too small to reach every dominant weight)"
    return table.to_json(), pretty, EXIT_OK


def cmd_identities(args) -> tuple:
    which = ["denom7", "denom12", "denom13"] if args.which == "all" else [args.which]
    report = VerificationReport("identities", 0)
    for w in which:
        lo = 1 if w == "denom7" else 2
        ranks = [args.rank] if args.rank else list(range(lo, 4))
        for n in ranks:
            if n < lo:
                raise InputError(f"{w} needs rank >= {lo}")
            report.add(denominator_identity_check(w, n))
    return _report_output(report)


COMMANDS = {"solve": cmd_solve, "series": cmd_series, "verify": cmd_verify,
            "decompose": cmd_decompose, "identities": cmd_identities}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsys", description="Exact Q-system solver and KR identity checker.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, nu=False, source=True):
        if source:
            p.add_argument("--spec", help="Q-system spec JSON file")
        p.add_argument("--algebra", help="algebra selector such as A2, B3, A4^2, D4^3")
        p.add_argument("--cutoff", type=int, default=8, help="total y- or w-degree cutoff")
        if nu:
            p.add_argument("--nu", default="", help='comma-separated "(a,m):value" pairs')
        p.add_argument("--convention", choices=[TYPE_I, TYPE_II], default=TYPE_I)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write JSON here instead of stdout")
        p.add_argument("--pretty", action="store_true", help="human-readable output")

    common(sub.add_parser("solve", help="solve a Q-system"))
    p = sub.add_parser("series", help="evaluate the K or R series")
    p.add_argument("which", choices=["K", "R"])
    p.add_argument("--table", action="store_true", help="emit a coefficient table instead of a series")
    common(p, nu=True)
    common(sub.add_parser("verify", help="run the KR verification suite"), source=False)
    common(sub.add_parser("decompose", help="g0-multiplicities from K^nu"), nu=True, source=False)
    p = sub.add_parser("identities", help="check the B/C/D denominator identities")
    p.add_argument("--which", choices=["denom7", "denom12", "denom13", "all"], default="all")
    p.add_argument("--rank", type=int)
    p.add_argument("--out")
    p.add_argument("--pretty", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, pretty, code = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (SolverError, SeriesError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    text = pretty if args.pretty else json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if code == EXIT_CHECK_FAILED:
        print("error: a gating check failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
