"""Command-line front end.

Every subcommand prints deterministic text (or sorted JSON with ``--json``).
Exit codes: 0 ok, 2 usage, 3 truncation, 4 unsupported manifold, 5 integrity
or a failed theorem check.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .assignments import enumerate_assignments, parse_assignment
from .errors import IntegrityError, PlumbSeriesError, UsageError
from .lattice import build_lattice
from .laurent import canonical_text, to_json
from .oracles import brieskorn_series, lens_series, star_framing
from .plumbing import NeumannMove, PlumbingTree, reducedness
from .series import (
    Tau,
    Truncation,
    leading_shift,
    make_tau,
    specialize_t1,
    y_closed_with_certificate,
    y_knot,
)
from .spinc import SpinCRep, delta, delta_hat, parse_rep, spinc_classes
from .theorems import (
    compare,
    describe_diff,
    gluing_lhs,
    gluing_rhs,
    split_data,
    split_rep,
    splitting_rhs,
    transport,
)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _tree(path: str) -> PlumbingTree:
    return PlumbingTree.from_json(_read_json(path))


def _emit(args, text: str, data: dict | None = None):
    if getattr(args, "json", False) and data is not None:
        print(json.dumps(data, sort_keys=True))
    else:
        print(text)


def _spinc(arg: str | None, tree: PlumbingTree, lattice, relative: bool = False) -> SpinCRep:
    if arg is None:
        base = delta_hat(tree, lattice) if relative else delta(tree, lattice)
        return SpinCRep(tree, lattice, base, relative)
    if arg.lstrip("-").isdigit() and not relative:
        classes = spinc_classes(tree, lattice)
        k = int(arg)
        if not 0 <= k < len(classes):
            raise UsageError(f"Spin^c index {k} out of range (0..{len(classes) - 1})")
        return classes[k]
    return SpinCRep(tree, lattice, parse_rep(arg, tree, lattice), relative)


def _xi(arg: str | None, tree: PlumbingTree, lattice, check_reduced: bool = True):
    if arg is None:
        arg = "identity"
    if arg.isdigit():
        options = enumerate_assignments(tree, lattice, check_reduced=check_reduced)
        k = int(arg)
        if not 0 <= k < len(options):
            raise UsageError(f"assignment index {k} out of range (0..{len(options) - 1})")
        return options[k]
    return parse_assignment(arg, tree, lattice)


def _truncation(args, tree: PlumbingTree | None = None, tau: Tau | None = None) -> Truncation:
    q_max = None
    if args.qmax is not None:
        q_max = Fraction(args.qmax)
        if tree is not None and tau is not None:
            q_max += leading_shift(tree, tau)
    return Truncation(q_max=q_max, t_height_min=args.t_min, kostant_depth=args.depth,
                      workers=args.workers, check_reduced=not args.no_reduced_check)


def _series_output(args, series, extra: dict):
    shown = specialize_t1(series) if args.t1 else series
    data = {"series": to_json(shown), "text": canonical_text(shown), **extra}
    _emit(args, canonical_text(shown), data)


# -- subcommands ----------------------------------------------------------------

def cmd_series(args) -> int:
    tree = _tree(args.tree)
    lattice = build_lattice(args.lattice)
    tau = Tau(lattice, _spinc(args.spinc, tree, lattice), _xi(args.xi, tree, lattice, not args.no_reduced_check))
    series, cert = y_closed_with_certificate(tree, tau, _truncation(args, tree, tau))
    _series_output(args, series, {"certificate": cert.to_json(), "spinc": tau.a.to_json(), "xi": tau.xi.names()})
    return 0


def cmd_knot_series(args) -> int:
    tree = _tree(args.tree)
    if tree.root is None:
        raise UsageError("knot-series needs a tree with a root")
    lattice = build_lattice(args.lattice)
    tau = Tau(lattice, _spinc(args.spinc, tree, lattice, relative=True),
              _xi(args.xi, tree, lattice, not args.no_reduced_check))
    tr = _truncation(args)
    series = y_knot(tree, tau, tr)
    _emit(args, canonical_text(series), {"series": to_json(series), "text": canonical_text(series)})
    return 0


def cmd_spinc_list(args) -> int:
    tree = _tree(args.tree)
    lattice = build_lattice(args.lattice)
    classes = spinc_classes(tree, lattice)
    if args.json:
        print(json.dumps([c.to_json() for c in classes], sort_keys=True))
    else:
        for k, c in enumerate(classes):
            print(k, ";".join(",".join(map(str, v)) for v in c.a))
    return 0


def cmd_xi_list(args) -> int:
    tree = _tree(args.tree)
    lattice = build_lattice(args.lattice)
    options = enumerate_assignments(tree, lattice, budget=args.budget)
    if args.json:
        print(json.dumps([x.names() for x in options]))
    else:
        for k, x in enumerate(options):
            print(k, ",".join(x.names()))
    return 0


def _move(args) -> NeumannMove:
    params = ()
    if args.params:
        m1, *moved = (int(x) for x in args.params.split(","))
        params = (m1, tuple(moved))
    at = tuple(int(x.lstrip("v")) for x in args.at.split(","))
    return NeumannMove(args.move, args.contract, at, params)


def _tau_from_json(data, tree: PlumbingTree, lattice) -> Tau:
    xi = data.get("xi", "identity")
    if isinstance(xi, list):
        xi = ",".join(xi)
    return Tau(lattice, SpinCRep(tree, lattice, tuple(tuple(v) for v in data["a"])), parse_assignment(xi, tree, lattice))


def _tau_json(tau: Tau) -> dict:
    return {"lattice": tau.lattice.name, "a": tau.a.to_json(), "xi": tau.xi.names()}


def cmd_move_apply(args) -> int:
    from .plumbing import apply_move
    tree = _tree(args.tree)
    move = _move(args)
    if args.transport is None:
        out = apply_move(tree, move)
        print(json.dumps(out.to_json(), sort_keys=True))
        return 0
    data = _read_json(args.transport)
    lattice = build_lattice(data.get("lattice", args.lattice))
    new_tree, new_tau = transport(tree, _tau_from_json(data, tree, lattice), move)
    print(json.dumps({"tree": new_tree.to_json(), "tau": _tau_json(new_tau)}, sort_keys=True))
    return 0


def cmd_reduce(args) -> int:
    report = reducedness(_tree(args.tree), args.budget)
    print(json.dumps(report.to_json(), sort_keys=True))
    return 0


def _verdict(args, cmp, rank: int, extra: dict) -> int:
    _emit(args, describe_diff(cmp, rank), {**cmp.to_json(), **extra})
    return IntegrityError.exit_code if cmp.verdict == "unequal" else 0


def cmd_check_glue(args) -> int:
    from .plumbing import glue_trees
    tp, tm = _tree(args.left), _tree(args.right)
    lattice = build_lattice(args.lattice)
    glued = glue_trees(tp, tm)
    a = _spinc(args.spinc, glued, lattice)
    xi = _xi(args.xi, glued, lattice, not args.no_reduced_check)
    tau = Tau(lattice, a, xi)
    tr = _truncation(args, glued, tau)
    if tr.q_max is None:
        raise UsageError("check glue needs --qmax")
    tr = Truncation(q_max=tr.q_max, kostant_depth=tr.kostant_depth, gamma_height=args.gamma_cap,
                    workers=tr.workers, check_reduced=tr.check_reduced)
    lhs = gluing_lhs(tp, tm, a, xi, tr)
    ap, am = split_rep(a, tp, tm)
    report = gluing_rhs(tp, tm, ap, am, xi, tr, mutate_gamma_zero=args.mutate)
    cmp = compare(lhs, report.series)
    return _verdict(args, cmp, lattice.rank, {"gamma_box": [list(b) for b in report.gamma_box],
                                "lhs": canonical_text(lhs), "rhs": canonical_text(report.series)})


def cmd_check_split(args) -> int:
    from .plumbing import split_layout
    t1, t2 = _tree(args.left), _tree(args.right)
    lattice = build_lattice(args.lattice)
    lay = split_layout(t1, args.v1, t2, args.v2, args.e)
    a = _spinc(args.spinc, lay.tree, lattice)
    xi = _xi(args.xi, lay.tree, lattice, not args.no_reduced_check)
    if args.t_min is None:
        raise UsageError("check split needs --t-min")
    data = split_data(t1, args.v1, t2, args.v2, args.e, Tau(lattice, a, xi))
    from .series import y_closed
    lhs = y_closed(data.tree, data.tau, Truncation(t_height_min=args.t_min, kostant_depth=args.depth,
                                                   workers=args.workers, check_reduced=False))
    rhs = splitting_rhs(data, args.t_min, drop_r_factor=args.mutate, kostant_depth=args.depth)
    cmp = compare(lhs, rhs)
    return _verdict(args, cmp, lattice.rank, {"lhs": canonical_text(lhs), "rhs": canonical_text(rhs)})


def cmd_check_invariance(args) -> int:
    from .series import y_closed
    tree = _tree(args.tree)
    lattice = build_lattice(args.lattice)
    tau = Tau(lattice, _spinc(args.spinc, tree, lattice), _xi(args.xi, tree, lattice))
    script = _read_json(args.moves)
    moves = [NeumannMove.from_json(m) for m in (script if isinstance(script, list) else [script])]
    start = y_closed(tree, tau, _truncation(args, tree, tau))
    cur_tree, cur_tau = tree, tau
    worst = 0
    steps = []
    for move in moves:
        cur_tree, cur_tau = transport(cur_tree, cur_tau, move)
        after = y_closed(cur_tree, cur_tau, _truncation(args, cur_tree, cur_tau))
        cmp = compare(start, after)
        steps.append({"move": move.to_json(), **cmp.to_json()})
        if not args.json:
            print(f"{move.label} at {list(move.at)}: {describe_diff(cmp, lattice.rank)}")
        if cmp.verdict == "unequal":
            worst = IntegrityError.exit_code
    if args.json:
        print(json.dumps(steps, sort_keys=True))
    return worst


def cmd_oracle_lens(args) -> int:
    s = lens_series(args.p, args.label)
    _emit(args, canonical_text(s), {"series": to_json(s), "text": canonical_text(s)})
    return 0


def _tree_from_matrix(b) -> PlumbingTree:
    n = len(b)
    return PlumbingTree(tuple((i, b[i][i]) for i in range(n)),
                        tuple((i, j) for i in range(n) for j in range(i + 1, n) if b[i][j]))


def _parse_weights(text: str):
    # center,leg1,leg2,leg3 with chains written as w/w/w from the center outwards
    parts = text.split(",")
    try:
        center = int(parts[0])
        legs = [[int(w) for w in p.split("/")] for p in parts[1:]]
    except ValueError:
        raise UsageError(f"cannot parse weights {text!r}") from None
    return [center, *legs]


def cmd_oracle_brieskorn(args) -> int:
    weights = _parse_weights(args.weights)
    lattice = build_lattice(args.lattice)
    b = star_framing(weights)
    tree = _tree_from_matrix(b)
    spec = args.xi or "identity"
    if spec in ("identity", "1", "id"):
        xi = [lattice.identity_element] * 4
    else:
        xi = [lattice.by_name(x) for x in spec.split(",")]
    q_max = Fraction(args.qmax) + leading_shift(tree, make_tau(tree, lattice, delta(tree, lattice)))
    s = brieskorn_series(weights, lattice, xi, q_max)
    if args.t1:
        s = specialize_t1(s)
    _emit(args, canonical_text(s), {"series": to_json(s), "text": canonical_text(s)})
    return 0


# -- parser ---------------------------------------------------------------------

def _common(p, window: bool = True):
    p.add_argument("--lattice", default="A1")
    p.add_argument("--json", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-reduced-check", action="store_true")
    if window:
        p.add_argument("--qmax", help="q cutoff relative to the fractional q-shift")
        p.add_argument("--t-min", type=int, dest="t_min")
        p.add_argument("--depth", type=int, help="Kostant depth (derived from the window if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plumbseries")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", help="closed (q,t)-series of a plumbed manifold")
    p.add_argument("tree")
    p.add_argument("--spinc")
    p.add_argument("--xi")
    p.add_argument("--t1", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("knot-series", help="(q,t,z)-series of a knot complement")
    p.add_argument("tree")
    p.add_argument("--spinc")
    p.add_argument("--xi")
    _common(p)
    p.set_defaults(func=cmd_knot_series)

    sp = sub.add_parser("spinc").add_subparsers(dest="action", required=True)
    p = sp.add_parser("list")
    p.add_argument("tree")
    _common(p, window=False)
    p.set_defaults(func=cmd_spinc_list)

    xp = sub.add_parser("xi").add_subparsers(dest="action", required=True)
    p = xp.add_parser("list")
    p.add_argument("tree")
    p.add_argument("--budget", type=int, default=6)
    _common(p, window=False)
    p.set_defaults(func=cmd_xi_list)

    mp = sub.add_parser("move").add_subparsers(dest="action", required=True)
    p = mp.add_parser("apply")
    p.add_argument("tree")
    p.add_argument("--move", required=True, choices=["A+", "A-", "B+", "B-", "C"])
    p.add_argument("--at", required=True, help="comma-separated vertex ids")
    p.add_argument("--contract", action="store_true")
    p.add_argument("--params", help="C expansion: m1,moved1,moved2,...")
    p.add_argument("--transport", help="tau JSON to carry across the move")
    _common(p, window=False)
    p.set_defaults(func=cmd_move_apply)

    p = sub.add_parser("reduce")
    p.add_argument("tree")
    p.add_argument("--budget", type=int, default=6)
    p.set_defaults(func=cmd_reduce)

    cp = sub.add_parser("check").add_subparsers(dest="action", required=True)
    p = cp.add_parser("glue")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--spinc")
    p.add_argument("--xi")
    p.add_argument("--gamma-cap", type=int, dest="gamma_cap")
    p.add_argument("--mutate", action="store_true", help="keep only gamma = 0")
    _common(p)
    p.set_defaults(func=cmd_check_glue)

    p = cp.add_parser("split")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--v1", type=int, required=True)
    p.add_argument("--v2", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--spinc")
    p.add_argument("--xi")
    p.add_argument("--mutate", action="store_true", help="drop the alpha factor")
    _common(p)
    p.set_defaults(func=cmd_check_split)

    p = cp.add_parser("invariance")
    p.add_argument("tree")
    p.add_argument("--moves", required=True)
    p.add_argument("--spinc")
    p.add_argument("--xi")
    _common(p)
    p.set_defaults(func=cmd_check_invariance)

    op = sub.add_parser("oracle").add_subparsers(dest="action", required=True)
    p = op.add_parser("lens")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--label", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle_lens)

    p = op.add_parser("brieskorn")
    p.add_argument("--weights", required=True, help="center,leg1,leg2,leg3; chains as w/w/w")
    p.add_argument("--xi", help="identity or four names (center and leaves)")
    p.add_argument("--qmax", required=True)
    p.add_argument("--lattice", default="A1")
    p.add_argument("--t1", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle_brieskorn)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # values such as "-1,-2,-3,-7" would otherwise be read as options
    for k in range(len(argv) - 1):
        if argv[k] in ("--weights", "--spinc", "--qmax") and argv[k + 1].startswith("-"):
            argv[k] = f"{argv[k]}={argv[k + 1]}"
            argv[k + 1] = ""
    args = build_parser().parse_args([x for x in argv if x != ""])
    try:
        return args.func(args)
    except PlumbSeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return UsageError.exit_code


if __name__ == "__main__":
    sys.exit(main())
