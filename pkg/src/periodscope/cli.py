"""periodscope command line.

Exit codes: 0 ok, 1 malformed input, 2 validation failure,
3 numerical non-convergence, 4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional

from .exactpoly import AlgebraicError
from .potential import InputError, Potential, PotentialError, annulus, potential_from_json
from .quadrature import QuadratureError

EXIT_OK, EXIT_INPUT, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3, 4




def _num(v):
    """JSON-safe float: infinities become strings."""
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _num(obj)


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def fmt(v: Optional[float]) -> str:
    if v is None:
        return ""
    return format(v, ".15g")


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------


def _potentials(args) -> list[Potential]:
    out = []
    for text in args.poly or []:
        out.append(potential_from_json({"type": "polynomial", "coeffs": text}))
    for name in args.named or []:
        out.append(potential_from_json({"type": "named", "name": name}))
    for path in args.input or []:
        try:
            obj = json.loads(Path(path).read_text())
        except OSError as e:
            raise InputError(f"field 'input': cannot read {path}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise InputError(f"field 'input': {path} is not valid JSON ({e.msg})") from None
        items = obj if isinstance(obj, list) else [obj]
        out.extend(potential_from_json(o) for o in items)
    if not out:
        raise InputError("no potential given: use --poly, --named or --input")
    return out


def _one(args) -> Potential:
    ps = _potentials(args)
    if len(ps) != 1:
        raise InputError(f"expected exactly one potential, got {len(ps)}")
    return ps[0]


def _check_config(args) -> None:
    grid = getattr(args, "grid", None)
    if grid is not None and grid < 8:
        raise InputError("field 'grid': at least 8 points")
    tol = getattr(args, "tol", None)
    if tol is not None and not (1e-15 <= tol <= 1e-3):
        raise InputError("field 'tol': must lie in [1e-15, 1e-3]")
    hmax = getattr(args, "hmax", None)
    if hmax is not None and not hmax > 0:
        raise InputError("field 'hmax': must be positive")


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _potential_json(p: Potential) -> dict:
    if p.is_polynomial:
        return {"type": "polynomial", "coeffs": [str(c) for c in p.poly.coeffs], "name": p.name}
    return {"type": "named", "name": p.name}


def cmd_analyze(args) -> int:
    from .criteria import classify

    p = _one(args)
    rep = classify(p, grid=args.grid, h_max=args.hmax, tol=args.tol)
    out = rep.to_json()
    out["input"] = _potential_json(p)
    _emit(args, dumps(out))
    return EXIT_OK


def period_rows(p: Potential, n: int, h_max: Optional[float], tol: float) -> list[tuple]:
    from .criteria import _map
    from .quadrature import default_grid, sample

    ann = annulus(p)
    hs = default_grid(ann, n, h_max=h_max if h_max is not None else 1e6)

    def row(h):
        s = sample(p, ann, float(h), tol)
        return (float(h), s.T, s.Tp, s.Tpp, s.error)

    return _map(row, list(hs))


def table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["h", "T", "Tp", "Tpp", "error"])
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def cmd_period_table(args) -> int:
    ps = _potentials(args)
    if args.format != "plotdata" and len(ps) != 1:
        raise InputError("several potentials need --format plotdata")
    tables = [(p, period_rows(p, args.grid, args.hmax, args.tol)) for p in ps]
    if args.format == "csv":
        text = table_csv(tables[0][1])
    elif args.format == "json":
        p, rows = tables[0]
        keys = ("h", "T", "Tp", "Tpp", "error")
        text = dumps({"input": _potential_json(p), "rows": [dict(zip(keys, r)) for r in rows]})
    else:
        blocks = []
        for p, rows in tables:
            lines = [f"# {p.name or 'potential'}: h T"] + [f"{fmt(r[0])} {fmt(r[1])}" for r in rows]
            blocks.append("\n".join(lines))
        text = "\n\n".join(blocks) + "\n"
    _emit(args, text)
    return EXIT_OK


def cmd_sas_solve(args) -> int:
    from .criteria import build_sas, count_balance_zeros

    p = _one(args)
    if not p.has_rational_form:
        raise InputError("sas-solve needs a polynomial potential or one with rational forms")
    ann = annulus(p)
    sas = build_sas(p, ann)
    bc = count_balance_zeros(p, ann)
    out = {
        "input": _potential_json(p),
        "system": sas.to_json(),
        "U": str(sas.U),
        "Psi": str(sas.Psi),
        "solutions": "curve of solutions" if bc.isochronous else bc.l,
        "boxes": [b.to_json() for b in bc.boxes],
    }
    if args.format == "json":
        _emit(args, dumps(out))
    else:
        lines = [f"deg U = {sas.U.total_degree}", f"deg Psi = {sas.Psi.total_degree}"]
        if bc.isochronous:
            lines.append("curve of solutions")
        else:
            lines.append(f"{bc.l} box(es)")
            for b in bc.boxes:
                lines.append(
                    f"[{b.x_interval.lo}, {b.x_interval.hi}] x [{b.z_interval.lo}, {b.z_interval.hi}]"
                    + ("" if b.certified else "  (uncertified)")
                )
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import run

    try:
        checks = run(args.only)
    except KeyError as e:
        raise InputError(f"field 'only': {e.args[0]}") from None
    failed = [c for c in checks if not c.passed]
    if args.format == "json":
        text = dumps({"checks": [c.to_json() for c in checks], "passed": not failed})
    else:
        rows = [("result", "group", "check", "expected", "actual")]
        rows += [("PASS" if c.passed else "FAIL", c.group, c.name, c.expected, c.actual) for c in checks]
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(r[i].ljust(widths[i]) for i in range(4)) + "  " + r[4] for r in rows]
        lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return EXIT_VERIFY if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_input(sp) -> None:
    sp.add_argument("--poly", action="append", help='coefficients of g, lowest degree first: "0,1,0,-1/2"')
    sp.add_argument("--named", action="append", help="built-in potential, e.g. hyperelliptic:beta=7/5")
    sp.add_argument("--input", action="append", help="JSON file with a potential (or a list of them)")


def _add_numeric(sp, grid: int) -> None:
    sp.add_argument("--grid", type=int, default=grid, help="number of energies (>= 8)")
    sp.add_argument("--hmax", type=float, default=None, help="largest energy for unbounded annuli")
    sp.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="periodscope", description="Period function analysis of potential centers.")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="classify the period function")
    _add_input(a)
    _add_numeric(a, 60)
    a.add_argument("--format", choices=["json"], default="json")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("period-table", help="tabulate T, T', T'' over an energy grid")
    _add_input(t)
    _add_numeric(t, 50)
    t.add_argument("--format", choices=["csv", "json", "plotdata"], default="csv")
    t.add_argument("--out")
    t.set_defaults(func=cmd_period_table)

    s = sub.add_parser("sas-solve", help="isolate the zeros of the balance system")
    _add_input(s)
    s.add_argument("--format", choices=["json", "text"], default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sas_solve)

    v = sub.add_parser("verify", help="run the built-in reference checks")
    v.add_argument("--only", help="run a single check group")
    v.add_argument("--format", choices=["json", "text"], default="text")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        _check_config(args)
        return args.func(args)
    except InputError as e:
        print(f"periodscope: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except PotentialError as e:
        print(f"periodscope: validation failed: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QuadratureError, AlgebraicError) as e:
        print(f"periodscope: no convergence: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
