"""netforge command line.

Exit codes: 0 success, 1 negative result (verification failed, no net
exists), 2 usage or malformed input, 3 greedy run stalled, 4 overflow or
resource budget exhausted.  Data goes to stdout (or ``--out``), diagnostics
to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import netfile
from .discrepancy import (
    bound_0m2,
    extreme_discrepancy,
    fraction_json,
    star_discrepancy_witness,
)
from .errors import BudgetExceeded, MalformedInput, NetforgeError, WidthOverflowError
from .greedy import Lexicographic, SeededUniform, greedy_run, stall_search
from .points import place
from .recursive import PermutationFamily, hammersley, recursive_run
from .verify import budget_from_env, is_net, search_with_stats, strength

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_STALLED = 3
EXIT_RESOURCE = 4


class UsageError(Exception):
    pass


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _family(spec: str, b: int, m: int, seed: int) -> PermutationFamily:
    if spec == "identity":
        return PermutationFamily.identity(b, m)
    if spec == "random":
        return PermutationFamily.random(b, m, seed)
    try:
        with open(spec, encoding="utf-8") as fh:
            family = PermutationFamily.from_json(fh.read())
    except OSError as exc:
        raise MalformedInput(f"cannot read permutation file {spec}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"permutation file is not JSON: {exc}") from None
    if family.base != b or family.m != m:
        raise MalformedInput(f"permutation file is for b={family.base}, m={family.m}")
    return family


def _placement(spec: str, m: int):
    """Parse ``corner``, ``center`` or ``random:G`` into ``(mode, exponent)``."""
    if spec == "corner":
        return "corner", None
    if spec == "center":
        return "center", m + 1
    if spec.startswith("random:"):
        try:
            g = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad placement {spec!r}") from None
        if g <= m:
            raise UsageError(f"random placement needs G > m, got G={g}, m={m}")
        return "random", g
    raise UsageError(f"unknown placement {spec!r}")


def cmd_construct(args) -> int:
    b, m, s = args.base, args.m, args.s
    mode, exponent = _placement(args.placement, m)
    provenance = {"algorithm": args.algorithm}
    if args.algorithm in ("recursive", "hammersley") and s != 2:
        raise UsageError(f"{args.algorithm} builds planar nets only (got --s {s})")
    if args.algorithm == "hammersley":
        points = hammersley(b, m)
    elif args.algorithm == "recursive":
        family = _family(args.perms, b, m, args.seed)
        points = recursive_run(b, m, family)
        provenance["permutations"] = family.to_json()["levels"]
        if args.perms == "random":
            provenance["seed"] = args.seed
    else:
        policy = SeededUniform(args.seed) if args.policy == "random" else Lexicographic()
        provenance["policy"] = policy.describe()
        if args.policy == "random":
            provenance["seed"] = args.seed
        outcome = greedy_run(b, m, s, policy)
        if not outcome.complete:
            report = {
                "status": "stalled",
                "b": b,
                "m": m,
                "s": s,
                "steps": outcome.steps,
                "chosen": [list(box.corner) for box in outcome.boxes],
                "available": 0,
            }
            sys.stderr.write(netfile.canonical_json(report))
            return EXIT_STALLED
        points = outcome.points()
    if mode != "corner":
        points = place(points, mode, exponent, seed=args.seed)
        provenance["placement"] = args.placement
    _write(netfile.emit(netfile.NetFile(points, m, provenance)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    nf = netfile.read(args.infile)
    if not 0 <= args.t <= nf.m:
        raise UsageError(f"--t must be in [0, {nf.m}]")
    report = is_net(nf.points, args.t, nf.m)
    doc = report.to_json()
    first = report.first_violation
    doc["first_violation"] = None if first is None else dict(first[0].to_json(), count=first[1])
    doc["strength"] = strength(nf.points)
    _write(netfile.canonical_json(doc), args.out)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_analyze(args) -> int:
    nf = netfile.read(args.infile)
    if nf.points.dim != 2:
        raise UsageError("analyze supports planar point sets only")
    star, box = star_discrepancy_witness(nf.points)
    bound = bound_0m2(nf.points.base, nf.m)
    doc = {
        "star": fraction_json(star),
        "bound": fraction_json(bound),
        "within_bound": star <= min(1, bound),
    }
    if args.extreme:
        doc["extreme"] = fraction_json(extreme_discrepancy(nf.points))
    if args.figure:
        from .plotting import render_report_figure

        render_report_figure(nf.points, nf.m, args.figure, star=star, box=box)
    _write(netfile.canonical_json(doc), args.out)
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plotting import render_svg

    nf = netfile.read(args.infile)
    if nf.points.dim < 2:
        raise MalformedInput("plot needs at least two coordinates")
    _write(render_svg(nf.points, nf.m, grid=args.grid, boxes=args.boxes), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    budget = args.budget if args.budget is not None else budget_from_env()
    if args.stall:
        prefix = stall_search(args.base, args.m, args.s, args.depth, budget=budget)
        doc = {"b": args.base, "m": args.m, "s": args.s, "depth": args.depth}
        if prefix is None:
            doc["prefix"] = None
            _write(netfile.canonical_json(doc), args.out)
            return EXIT_NEGATIVE
        doc["prefix"] = [list(c) for c in prefix]
        doc["length"] = len(prefix)
        _write(netfile.canonical_json(doc), args.out)
        return EXIT_OK
    result = search_with_stats(args.base, args.m, args.s, budget)
    sys.stderr.write(f"searched {result.nodes} nodes\n")
    if result.witness is None:
        doc = {"b": args.base, "m": args.m, "s": args.s, "result": "none", "nodes": result.nodes}
        _write(netfile.canonical_json(doc), args.out)
        return EXIT_NEGATIVE
    nf = netfile.NetFile(result.witness, args.m, {"algorithm": "search"})
    _write(netfile.emit(nf), args.out)
    return EXIT_OK


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _base(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("base must be >= 2")
    return value


def _nonneg(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netforge", description="Construct, verify and analyze (0,m,s)-nets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a net and write it as NetFileV1 JSON")
    p.add_argument("--algorithm", required=True, choices=["greedy", "recursive", "hammersley"])
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--m", type=_nonneg, required=True)
    p.add_argument("--s", type=_positive, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=["lex", "random"], default="lex")
    p.add_argument("--perms", default="identity", help="identity, random, or a permutation-family JSON file")
    p.add_argument("--placement", default="corner", help="corner, center or random:G")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check the (t,m,s)-net property")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--t", type=_nonneg, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="exact discrepancy and the (0,m,2) bound")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--extreme", action="store_true")
    p.add_argument("--figure", help="also render a matplotlib figure to this path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plot", help="render the point set as SVG")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--grid", action="store_true")
    p.add_argument("--boxes", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("search", help="exhaustive net search, or greedy stall search with --stall")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--m", type=_nonneg, required=True)
    p.add_argument("--s", type=_positive, required=True)
    p.add_argument("--budget", type=_positive)
    p.add_argument("--stall", action="store_true")
    p.add_argument("--depth", type=_positive, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"netforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WidthOverflowError, BudgetExceeded) as exc:
        print(f"netforge: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (MalformedInput, ValueError) as exc:
        print(f"netforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NetforgeError as exc:
        print(f"netforge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
