"""Command line runner: bound tables, fixture construction and verification,
game simulation and the exact advice oracle.

Exit codes: 0 success, 2 domain or parse error, 3 verification failure,
4 resource budget exceeded.  Budgets can be raised through the
ADVICE_LAB_* environment variables; all randomness comes from --seed.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import exact_advice as xa
from .errors import AdviceLabError, InputError, ParseError, SoundnessError
from .fixtures import KINDS, KIND_ALIASES, build_fixture, require, verify_fixture
from .graph_core import PROPERTIES, get_property, opt_max_pi, opt_min_pi
from .guessing_games import FORMULA_ALIASES, FORMULAS, BoundReport
from .online_engine import (
    MAX,
    MIN,
    PLAIN,
    PREEMPTIVE,
    AcceptAll,
    AdviceDrivenPreemptive,
    BitmapAdvice,
    GreedyAccept,
    RejectAll,
    bitmap_oracle,
    competitive_ratio,
    dumps_instance,
    loads_instance,
    run_game,
)
from .reductions import minpi_obligatory_advice, minpi_obligatory_algorithm

BUILD_BUDGET = int(os.environ.get("ADVICE_LAB_BUILD_BUDGET", 1000))

PARAM_FLAGS = ("sigma", "gamma", "c", "n", "k", "kappa1", "kappa2", "n_prime", "x")


def _number(text: str):
    """Exact where possible: ints and fractions stay exact, 'inf' is allowed."""
    text = text.strip()
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _numbers(text: str) -> list:
    return [_number(t) for t in text.split(",") if t.strip()]


def _jsonable(v):
    if isinstance(v, Fraction):
        return float(v) if v.denominator != 1 else v.numerator
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _dump(doc) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, separators=(",", ":"))


# -- bounds -------------------------------------------------------------------


def _bound_rows(formula: str, params: dict) -> list[dict]:
    fid = FORMULA_ALIASES.get(formula, formula)
    if fid not in FORMULAS:
        raise InputError(f"unknown formula {formula!r}")
    fn = FORMULAS[fid]
    sig = inspect.signature(fn)
    kwargs, note = {}, ""
    for name, prm in sig.parameters.items():
        if params.get(name) is not None:
            kwargs[name] = params[name]
        elif name == "n":
            # without n the row is a per-position rate
            kwargs["n"], note = 1, "per position (n=1)"
        elif prm.default is inspect.Parameter.empty:
            raise InputError(f"formula {fid} needs --{name.replace('_', '-')}")
    out = fn(**kwargs)
    reports = out if isinstance(out, tuple) else (out,)
    rows = []
    for r in reports:
        if isinstance(r, BoundReport):
            row = r.row()
            row["o_term"] = r.o_term
            row["note"] = "; ".join(t for t in (r.note, note) if t)
            row["applicable"] = r.applicable
        else:
            row = {"formula_id": fid, "params": kwargs, "value_bits": r, "o_term": "", "note": note,
                   "applicable": True}
            if isinstance(r, Fraction):
                row["exact"] = str(r)
        row["error"] = ""
        rows.append(row)
    return rows


def cmd_bounds(args) -> int:
    grid = {name: getattr(args, name) or [None] for name in PARAM_FLAGS}
    formulas = list(FORMULAS) if args.formula == ["all"] else args.formula
    rows, failed = [], False
    for formula in formulas:
        for combo in _product(grid):
            try:
                rows.extend(_bound_rows(formula, combo))
            except AdviceLabError as e:
                failed = True
                given = {k: v for k, v in combo.items() if v is not None}
                rows.append({"formula_id": formula, "params": given, "value_bits": None, "o_term": "",
                             "note": "", "applicable": False, "error": str(e)})
    _write(args.out, _format_rows(rows, args.format))
    return 2 if failed else 0


def _product(grid: dict):
    names = list(grid)
    def rec(i, acc):
        if i == len(names):
            yield dict(acc)
            return
        for v in grid[names[i]]:
            acc[names[i]] = v
            yield from rec(i + 1, acc)
    yield from rec(0, {})


def _format_rows(rows, fmt) -> str:
    if fmt == "json":
        return _dump(rows) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["formula_id", "params", "value_bits", "o_term", "applicable", "note", "error"])
    for r in rows:
        v = r["value_bits"]
        w.writerow([r["formula_id"], _dump(r["params"]), "" if v is None else repr(float(v)),
                    r["o_term"], r["applicable"], r["note"], r["error"]])
    return buf.getvalue()


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- fixtures -----------------------------------------------------------------


def _sidecar_path(instance: str, given: str | None) -> Path:
    return Path(given) if given else Path(instance + ".json")


def cmd_construct(args) -> int:
    string = [int(t) for t in args.string.split(",")] if args.string else None
    fx = build_fixture(args.kind, seed=args.seed, n=args.n, sigma=args.sigma, k=args.k, alpha=args.alpha,
                       kappa1=args.kappa1, kappa2=args.kappa2, n_prime=args.n_prime, prop=args.property,
                       string=string, budget=args.budget)
    certs = fx.sidecar["certificates"]
    unverified = [name for name, c in certs.items() if not c.get("verified", True)]
    if unverified:
        raise SoundnessError(f"certificates not verified within budget: {', '.join(unverified)}")
    comment = f"{fx.sidecar['construction']} seed={args.seed}"
    Path(args.out).write_text(dumps_instance(fx.instance, comment))
    _sidecar_path(args.out, args.sidecar).write_text(_dump(fx.sidecar) + "\n")
    print(f"wrote {args.out} ({fx.instance.n} vertices) and {_sidecar_path(args.out, args.sidecar)}")
    return 0


def cmd_verify(args) -> int:
    inst = loads_instance(Path(args.instance).read_text())
    side_path = _sidecar_path(args.instance, args.sidecar)
    try:
        side = json.loads(side_path.read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"{side_path}: {e.msg}", e.lineno) from None
    try:
        claims = verify_fixture(inst, side)
    except (KeyError, TypeError) as e:
        raise ParseError(f"{side_path}: malformed sidecar ({e!r})") from None
    for claim, ok in claims:
        print(f"{'ok  ' if ok else 'FAIL'} {claim}")
    require(claims)
    return 0


# -- simulate -----------------------------------------------------------------


def _algorithm(name: str, prop, k_max):
    if name == "reject-all":
        return RejectAll()
    if name == "accept-all":
        return AcceptAll()
    if name == "greedy":
        return GreedyAccept(prop)
    if name == "bitmap":
        return BitmapAdvice()
    if name == "advice-preemptive":
        return AdviceDrivenPreemptive(prop)
    if name == "obligatory-index":
        return minpi_obligatory_algorithm(prop, k_max)
    raise InputError(f"unknown algorithm {name!r}")


def cmd_simulate(args) -> int:
    inst = loads_instance(Path(args.instance).read_text())
    prop = get_property(args.property)
    objective = MAX if prop.hereditary else MIN
    alg = _algorithm(args.alg, prop, args.k_max)
    if args.advice is not None:
        tape = args.advice.strip()
    elif args.alg in ("bitmap", "advice-preemptive"):
        tape = bitmap_oracle(inst, prop)
    elif args.alg == "obligatory-index":
        tape = minpi_obligatory_advice(inst, prop, args.k_max)
    else:
        tape = ""
    t = run_game(inst, alg, prop, args.mode, tape, objective)
    _write(args.out, t.to_json() + "\n")
    g = inst.presented_graph()
    if objective == MAX:
        opt = len(opt_max_pi(g, prop))
    else:
        best = opt_min_pi(g, prop)
        opt = math.inf if best is None else len(best)
    if opt in (0, math.inf):
        ratio = "undefined"
    else:
        ratio = competitive_ratio(t, opt, objective)
    print(f"objective={_jsonable(t.objective)} opt={_jsonable(opt)} ratio={_jsonable(ratio)} bits_read={t.bits_read}",
          file=sys.stderr)
    return 0


# -- oracle -------------------------------------------------------------------


def cmd_oracle(args) -> int:
    fam = xa.InstanceFamily.all_strings(args.game, args.n, args.sigma or 2)
    if args.curve:
        grid = args.c or list(xa.DEFAULT_GRID)
        doc = [{"c": c, "bits": b} for c, b in xa.bits_vs_ratio_curve(fam, grid, order=args.order)]
        _write(args.out, _dump(doc) + "\n")
        return 0
    c = args.c[0] if args.c else 1
    res = xa.min_advice_bits(fam, c, order=args.order)
    xa.verify_cover(fam, res)
    _write(args.out, res.to_json() + "\n")
    print(f"m={res.m} bits={res.bits} optimal={res.optimal}", file=sys.stderr)
    return 0 if res.optimal else 4


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="advice-lab", description=" ".join(__doc__.split("\n\n")[0].split()))
    ap.add_argument("--seed", type=int, default=0, help="single source of randomness")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="evaluate closed-form advice bounds")
    b.add_argument("--formula", action="append", required=True,
                   help=f"one of {', '.join(FORMULAS)} (aliases {', '.join(FORMULA_ALIASES)}) or 'all'")
    for name in PARAM_FLAGS:
        b.add_argument("--" + name.replace("_", "-"), dest=name, type=_numbers,
                       help="number or comma-separated list")
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("construct", help="build a reduction fixture and its sidecar")
    c.add_argument("--kind", required=True, choices=KINDS + tuple(KIND_ALIASES))
    c.add_argument("--n", type=int)
    c.add_argument("--sigma", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--alpha", type=float)
    c.add_argument("--kappa1", type=float, default=1.5)
    c.add_argument("--kappa2", type=float, default=1.0)
    c.add_argument("--n-prime", dest="n_prime", type=int)
    c.add_argument("--property", choices=sorted(PROPERTIES))
    c.add_argument("--string", help="comma-separated source string; drawn from --seed if absent")
    c.add_argument("--budget", type=int, default=BUILD_BUDGET)
    c.add_argument("--out", default="fixture.graph")
    c.add_argument("--sidecar")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="re-check every sidecar claim from scratch")
    v.add_argument("instance", nargs="?", default="fixture.graph")
    v.add_argument("--sidecar")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="play one online game and write its transcript")
    s.add_argument("--instance", required=True)
    s.add_argument("--alg", required=True,
                   choices=("reject-all", "accept-all", "greedy", "bitmap", "advice-preemptive", "obligatory-index"))
    s.add_argument("--property", default="independent-set", choices=sorted(PROPERTIES))
    s.add_argument("--mode", choices=(PLAIN, PREEMPTIVE), default=PLAIN)
    s.add_argument("--advice", help="explicit advice bits; otherwise the algorithm's oracle writes them")
    s.add_argument("--k-max", dest="k_max", type=int)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_simulate)

    o = sub.add_parser("oracle", help="exact minimum advice over all strings of length n")
    o.add_argument("--game", required=True, choices=(xa.MAXASG_KNOWN, xa.MAXASG_BLIND, xa.SGKH, xa.ANTI))
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--sigma", type=int)
    o.add_argument("--c", type=_numbers)
    o.add_argument("--order", choices=("conflicts", "given", "reverse"), default="conflicts")
    o.add_argument("--curve", action="store_true", help="emit bits over a ratio grid instead")
    o.add_argument("--out", default="-")
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AdviceLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
