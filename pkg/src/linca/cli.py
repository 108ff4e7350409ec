"""Command-line interface.

Subcommands: render, green, propb, xp, subst (expand/cell/verify/scc/
assert), obstruct.  Exit codes: 0 success or verdict-true, 1 verdict-false,
2 usage error, 3 internal budget exceeded.  Identical invocations produce
byte-identical outputs; randomized checks take --seed (default 0).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .automata import builtin_names, load_ca, mirror
from .green import OracleBudgetExceeded, green_row
from .propb import BSpec, check_b
from .obstruct import DirectionExtractionError, replay_final_argument, search_pi
from .subst import (builtin_system_names, cell, check_assertion_i,
                    check_assertion_ii, check_assertion_iii, expand,
                    load_system, nontrivial_sccs, transition_graph,
                    verify_against_green)
from .xp import (render_sample, render_spacetime, sample_to_csv,
                 sample_to_json, sample_xp)

__all__ = ["main"]


def _out_path(path):
    """Resolve an output path against LINCA_OUT_DIR for relative names."""
    base = os.environ.get("LINCA_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text, out):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(_out_path(out), "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc, out):
    _emit(json.dumps(doc, sort_keys=True), out)


def _cmd_render(args):
    f = load_ca(args.ca)
    render_spacetime(f, args.rows, _out_path(args.out), mirror=args.mirror)
    return 0


def _cmd_green(args):
    f = load_ca(args.ca)
    ys = range(args.y + 1) if args.all else [args.y]
    lines = []
    for y in ys:
        row = green_row(f, y)
        cells = [{"x": x, "matrix": row.at(x).a.tolist()}
                 for x in sorted(row.cells)]
        lines.append(json.dumps({"y": y, "cells": cells}, sort_keys=True))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_propb(args):
    a = load_ca(args.ca)
    spec = BSpec(args.x, args.y, args.l, args.r)
    holds = check_b(a, spec)
    _emit_json({"ca": args.ca, "x": spec.x, "y": spec.y, "l": spec.l,
                "r": spec.r, "holds": holds}, args.out)
    return 0 if holds else 1


def _cmd_xp(args):
    f = load_ca(args.ca)
    s = sample_xp(f, args.p, args.n, args.k, y_max=args.y_max)
    if args.format == "json":
        _emit(sample_to_json(s), args.out)
    elif args.format == "csv":
        _emit(sample_to_csv(s), args.out)
    else:
        if not args.out:
            raise ValueError("--format pgm requires --out")
        render_sample(s, _out_path(args.out), mirror=args.mirror)
    return 0


def _cmd_subst_expand(args):
    s = load_system(args.system)
    g = expand(s, args.depth)
    lines = []
    for y, row in enumerate(g.rows):
        cells = {str(x): s.state_name(st) for x, st in sorted(row.items())}
        lines.append(json.dumps({"y": y, "cells": cells}, sort_keys=True))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_subst_cell(args):
    s = load_system(args.system)
    st = cell(s, args.x, args.y, args.depth)
    _emit_json({"x": args.x, "y": args.y, "depth": args.depth,
                "state": s.state_name(st)}, args.out)
    return 0


def _cmd_subst_verify(args):
    s = load_system(args.system)
    f = load_ca(args.ca)
    ok, where = verify_against_green(s, f, args.depth)
    _emit_json({"system": args.system, "ca": args.ca, "depth": args.depth,
                "ok": ok, "first_mismatch": list(where) if where else None},
               args.out)
    return 0 if ok else 1


def _cmd_subst_scc(args):
    s = load_system(args.system)
    g = transition_graph(s)
    comps = nontrivial_sccs(g)
    doc = {"system": args.system,
           "states": sorted(s.state_name(v) for v in g.vertices()),
           "nontrivial_sccs": sorted(
               sorted(s.state_name(v) for v in comp) for comp in comps)}
    _emit_json(doc, args.out)
    return 0


def _cmd_subst_assert(args):
    s = load_system(args.system)
    checks = {"i": check_assertion_i, "ii": check_assertion_ii,
              "iii": check_assertion_iii}
    fn = checks[args.which]
    ok = fn(s) if args.n_max is None else fn(s, n_max=args.n_max)
    _emit_json({"system": args.system, "assertion": args.which, "ok": ok},
               args.out)
    return 0 if ok else 1


def _run_induction_checks():
    """Assertions (i)-(iii) for both builtin substitution systems; their
    truth is what upgrades a finite-sample verdict to induction-backed."""
    for name in ("gamma", "omega"):
        s = load_system(name)
        if not (check_assertion_i(s) and check_assertion_ii(s)
                and check_assertion_iii(s)):
            return False
    return True


def _cmd_obstruct(args):
    f = load_ca(args.f)
    g = load_ca(args.g)
    if args.mirror_g:
        g = mirror(g)
    s_f = sample_xp(f, args.p, args.n, args.k, y_max=args.y_max)
    s_g = sample_xp(g, args.p, args.n, args.k, y_max=args.y_max)
    if args.search:
        found = search_pi(s_f, s_g, denom_bound=args.denom_bound,
                          tol=args.tol)
        doc = {"pair": [args.f, args.g], "search": True,
               "denom_bound": args.denom_bound, "tol": args.tol,
               "maps": [{"alpha": str(m.alpha), "beta": str(m.beta),
                         "gamma": str(m.gamma)} for m in found]}
        _emit_json(doc, args.out)
        return 0 if found else 1
    backed = None
    if not args.skip_induction:
        names = {args.f, args.g}
        if names <= {"gamma", "gamma_inv"}:
            backed = _run_induction_checks()
    g_label = f"mirror({args.g})" if args.mirror_g else args.g
    verdict = replay_final_argument(s_f, s_g, tol=args.tol,
                                    induction_backed=backed,
                                    pair=(args.f, g_label))
    _emit_json(verdict, args.out)
    return 0 if verdict["obstruction"] or verdict["containment"] else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="linca",
        description="Exact-arithmetic analyses of linear cellular automata "
                    "over Z_p.",
        epilog="Builtin CA: " + ", ".join(builtin_names())
               + ".  Builtin substitution systems: "
               + ", ".join(builtin_system_names()) + ".")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized checks (default 0)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("render", help="space-time diagram as a PGM image")
    sp.add_argument("--ca", required=True)
    sp.add_argument("--rows", type=int, required=True)
    sp.add_argument("--mirror", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=_cmd_render)

    sp = sub.add_parser("green", help="Green function rows as JSON lines")
    sp.add_argument("--ca", required=True)
    sp.add_argument("--y", type=int, required=True)
    sp.add_argument("--all", action="store_true",
                    help="emit all rows 0..y instead of row y only")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_green)

    sp = sub.add_parser("propb",
                        help="check the isolation property B(x,y,l,r)")
    sp.add_argument("--ca", required=True)
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--y", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_propb)

    sp = sub.add_parser("xp", help="finite-scale characteristic-set sample")
    sp.add_argument("--ca", required=True)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--y-max", type=int, default=None)
    sp.add_argument("--format", choices=("json", "csv", "pgm"),
                    default="json")
    sp.add_argument("--mirror", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_xp)

    sp = sub.add_parser("subst", help="2x2 substitution-system analyses")
    ssub = sp.add_subparsers(dest="subst_command", required=True)

    q = ssub.add_parser("expand", help="expand to depth, JSON lines per row")
    q.add_argument("--system", required=True)
    q.add_argument("--depth", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_subst_expand)

    q = ssub.add_parser("cell", help="single cell along the digit path")
    q.add_argument("--system", required=True)
    q.add_argument("--x", type=int, required=True)
    q.add_argument("--y", type=int, required=True)
    q.add_argument("--depth", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_subst_cell)

    q = ssub.add_parser("verify",
                        help="compare expansion against Green rows")
    q.add_argument("--system", required=True)
    q.add_argument("--ca", required=True)
    q.add_argument("--depth", type=int, default=5)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_subst_verify)

    q = ssub.add_parser("scc", help="transition-graph SCC structure")
    q.add_argument("--system", required=True)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_subst_scc)

    q = ssub.add_parser("assert", help="run one structural assertion")
    q.add_argument("--system", required=True)
    q.add_argument("--which", choices=("i", "ii", "iii"), required=True)
    q.add_argument("--n-max", type=int, default=None)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_subst_assert)

    sp = sub.add_parser("obstruct",
                        help="simulation-obstruction verdict for a CA pair")
    sp.add_argument("--f", required=True, help="simulated CA")
    sp.add_argument("--g", required=True, help="simulator CA")
    sp.add_argument("--mirror-g", action="store_true",
                    help="mirror the simulator before sampling")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--y-max", type=int, default=None)
    sp.add_argument("--tol", type=int, default=2)
    sp.add_argument("--search", action="store_true",
                    help="exhaustive small-rational map search instead of "
                         "the two-line replay")
    sp.add_argument("--denom-bound", type=int, default=8)
    sp.add_argument("--skip-induction", action="store_true",
                    help="skip the substitution-system induction checks "
                         "(verdict stays heuristic)")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_obstruct)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except OracleBudgetExceeded as e:
        print(f"error: budget exceeded: {e}", file=sys.stderr)
        return 3
    except DirectionExtractionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
