"""Command-line verifier and calculator.

Exit codes: 0 pass, 1 assertion failure, 2 usage or parse error, 3 cap exhaustion.
JSON arguments may be literal JSON, a file path, or '-' for standard input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import biext, campaigns, gf, mgrp, ore
from .campaigns import CAP_ERRORS, SCHEMA, RunConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def load_json(arg):
    if arg == "-":
        text = sys.stdin.read()
    elif arg.lstrip()[:1] in ("{", "["):
        text = arg
    elif os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        raise UsageError(f"{arg!r} is neither JSON nor an existing file")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None


def parse_hom(obj):
    """An Ore element or matrix from its JSON form."""
    if not isinstance(obj, dict):
        raise UsageError("expected a JSON object")
    if "rows" in obj:
        return ore.matrix_from_json(obj)
    return ore.ore_from_json(obj)


def parse_subgroup(obj, f):
    """Generators as digit lists, or {"m": N, "elements": [...]}."""
    if isinstance(obj, dict):
        elems = obj.get("elements", [])
        N = obj.get("m")
    else:
        elems = obj
        N = None
    if not isinstance(elems, list):
        raise UsageError("subgroup generators must be a list")
    if not elems:
        return []
    lens = {len(e) for e in elems}
    if len(lens) != 1:
        raise UsageError("subgroup generators have different lengths")
    N = int(N) if N is not None else lens.pop()
    K = gf.make_field(f.ctx.p, N, cap=max(gf.DEFAULT_DEGREE_CAP, N))
    return [K(e) for e in elems]


# commands ----------------------------------------------------------------------------


def cmd_example(args):
    rep = campaigns.run_example(args.p)
    return rep, campaigns.exit_code(rep)


def _cfg(args):
    try:
        return RunConfig(p=args.p, m=args.m, n=args.n, d=args.d, trials=args.trials,
                         seed=args.seed, max_ext=args.max_ext, enum_cap=args.enum_cap,
                         iso_cap=args.iso_cap, pairs_cap=args.pairs_cap).validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify_theorem1(args):
    rep = campaigns.run_theorem1(_cfg(args), jobs=args.jobs)
    return rep, campaigns.exit_code(rep)


def cmd_verify_gauss(args):
    rep = campaigns.run_gauss(_cfg(args), jobs=args.jobs)
    return rep, campaigns.exit_code(rep)


def cmd_kernel(args):
    F = parse_hom(load_json(args.f))
    model = biext.metric_of(F, args.max_ext)
    if model.connected:
        out = biext.report(model)
    else:
        A = model.metric
        out = biext.report(model, mgrp.witt_class(A), mgrp.gauss_sum(A))
    return {"schema": SCHEMA, "command": "kernel", **out}, EXIT_OK


def cmd_descend(args):
    f = parse_hom(load_json(args.f))
    if not isinstance(f, ore.OrePoly):
        raise UsageError("descend works with a single Ore element")
    L = parse_subgroup(load_json(args.L), f)
    f2 = biext.descend(f, L, args.max_ext)
    out = {"schema": SCHEMA, "command": "descend", "f": f2.to_json(),
           "subgroup_order": f.ctx.p ** len(L)}
    if not f.is_zero():
        out["kernel_size_before"] = f.ctx.p ** ore.kernel_size_exponent(f)
        out["kernel_size_after"] = f.ctx.p ** ore.kernel_size_exponent(f2)
    return out, EXIT_OK


def cmd_pullback(args):
    F = parse_hom(load_json(args.F))
    Phi = parse_hom(load_json(args.Phi))
    F2 = biext.pullback(F, Phi)
    out = {"schema": SCHEMA, "command": "pullback", "f": F2.to_json()}
    if isinstance(F2, ore.OrePoly) and not F2.is_zero():
        out["kernel_size"] = F2.ctx.p ** ore.kernel_size_exponent(F2)
    elif isinstance(F2, ore.OreMatrix):
        out["kernel_size"] = F2.kernel_size
    return out, EXIT_OK


def _metric(arg):
    obj = load_json(arg)
    try:
        return mgrp.MetricGroup.from_json(obj)
    except (KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"malformed metric group: {exc}") from None


def cmd_witt(args):
    A = _metric(args.mg)
    v = mgrp.validate(A)
    if not v.metric:
        raise UsageError("not a metric group: " + "; ".join(v.diagnostics))
    K = mgrp.anisotropic_kernel(A)
    c = mgrp.witt_class(A)
    out = {"schema": SCHEMA, "command": "witt", "witt_class": str(c),
           "anisotropic_kernel": K.to_json()}
    try:
        out["exponent_p_class"] = mgrp.classify_exponent_p(A)
    except mgrp.CapError:
        raise
    except mgrp.MetricError:
        out["exponent_p_class"] = None
    return out, EXIT_OK


def cmd_gauss(args):
    A = _metric(args.mg)
    gs = mgrp.gauss_sum(A)
    out = {"schema": SCHEMA, "command": "gauss", "order": A.size, "gauss_sum": gs.to_json(),
           "value": int(gs) if gs.is_integer() else None}
    return out, EXIT_OK


# parser --------------------------------------------------------------------------------


def _common(parser):
    parser.add_argument("--p", type=int, default=3, help="characteristic (prime)")
    parser.add_argument("--m", type=int, default=1, help="coefficient field degree")
    parser.add_argument("--n", type=int, default=2, help="max tau-degree")
    parser.add_argument("--d", type=int, default=1, help="dimension")
    parser.add_argument("--trials", type=int, default=25)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-ext", type=int, default=biext.DEFAULT_MAX_EXT,
                        help="field extension cap (multiples of m)")
    parser.add_argument("--enum-cap", type=int, default=mgrp.DEFAULT_ENUM_CAP)
    parser.add_argument("--iso-cap", type=int, default=mgrp.DEFAULT_ISO_CAP)
    parser.add_argument("--pairs-cap", type=int, default=biext.DEFAULT_PAIRS_CAP,
                        help="budget for all-pairs checks")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for campaigns")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--table", dest="fmt", action="store_const", const="table")
    parser.add_argument("--output", help="also write the report to this file")
    parser.set_defaults(fmt="json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="skewbiext",
        description="Metric groups of skew-symmetric biextensions: verifier and calculator.")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("example", cmd_example, [], "run f = tau - tau^-1 end to end"),
        ("verify-theorem1", cmd_verify_theorem1, [], "seeded parity campaign"),
        ("verify-gauss", cmd_verify_gauss, [], "seeded Gauss-sum campaign"),
        ("kernel", cmd_kernel, ["f"], "metric group of a skew element or matrix"),
        ("descend", cmd_descend, ["f", "L"], "descend along an isotropic subgroup"),
        ("pullback", cmd_pullback, ["F", "Phi"], "pull back along an isogeny"),
        ("witt", cmd_witt, ["mg"], "Witt class of a metric group"),
        ("gauss", cmd_gauss, ["mg"], "Gauss sum of a metric group"),
    ]
    for name, fn, positional, help_ in specs:
        sp = sub.add_parser(name, help=help_)
        for pos in positional:
            sp.add_argument(pos, help="JSON literal, file path, or '-'")
        _common(sp)
        sp.set_defaults(func=fn)
    return parser


def _table(rep):
    lines = []
    if "records" in rep:
        lines.append(f"{'trial':>5} {'seed':>8} {'|A|':>8} {'witt':<10} {'gauss':>8} status")
        for i, r in enumerate(rep["records"]):
            gs = r.get("gauss_sum")
            gs_s = str(gs["coeffs"][0]) if gs and gs["conductor"] == 1 else ("-" if not gs else "cyc")
            lines.append(f"{r.get('trial', i):>5} {r.get('seed', '-'):>8} "
                         f"{r.get('kernel_size', '-'):>8} {r.get('witt_class', '-'):<10} "
                         f"{gs_s:>8} {r['status']}")
        s = rep["summary"]
        lines.append(f"summary: {s['pass']} pass, {s['fail']} fail, {s['cap']} cap of {s['trials']}")
    else:
        for k, v in rep.items():
            if not isinstance(v, (dict, list)):
                lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep, code = args.func(args)
    except CAP_ERRORS as exc:
        print(f"cap exhausted: {exc}", file=sys.stderr)
        return EXIT_CAP
    except biext.DescentInternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(rep, indent=2, default=_default) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text if args.fmt == "json" else _table(rep))
    return code


if __name__ == "__main__":
    sys.exit(main())
