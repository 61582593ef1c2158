"""Command-line entry point: ``langshift {evolve,preimage,walk,verify,render}``.

Exit codes: 0 ok, 2 parse error, 3 failed precondition, 4 budget exhausted,
5 refuted claim.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager

from . import analysis as an
from .errors import BudgetExhausted, InvalidParams, NonQuiescentBackground, PatternFormatError
from .lattice import EmbeddedConfig, TorusGrid, all3_window, evolve, step
from .patterns import Pattern, format_patterns, parse_pattern_text
from .preimage import PreimageQuery, motif_containment, preimages, scan_preimages
from .rule import Params, all_params

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_BUDGET, EXIT_REFUTED = 0, 2, 3, 4, 5


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _load(args) -> tuple[Pattern, int | None]:
    if getattr(args, "literal", None):
        return Pattern.literal(args.literal), None
    if args.input is None:
        raise PatternFormatError("no input pattern (give a file or --literal)")
    with open(args.input) as fh:
        return parse_pattern_text(fh.read())


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_common(sp, params_required=True):
    sp.add_argument("--params", type=Params.parse, required=params_required,
                    metavar="PZ,PE", help="thresholds, each 0..9")
    sp.add_argument("--out", default=None, help="output path (default stdout)")


def _add_input(sp):
    sp.add_argument("input", nargs="?", help="pattern file")
    sp.add_argument("--literal", help="inline pattern, rows separated by '/'")


def cmd_evolve(args) -> int:
    pattern, header_bg = _load(args)
    p = args.params
    if args.mode == "torus":
        c = TorusGrid(pattern.array)
        steps = args.steps if args.steps is not None else 2 * pattern.rows * pattern.cols
    else:
        bg = args.background if args.background is not None else (header_bg or 0)
        c = EmbeddedConfig.centered(pattern, bg, p)
        steps = args.steps if args.steps is not None else 100
    trace = evolve(c, p, steps)
    with _output(args.out) as out:
        if args.trace:
            cur = c
            for t in range(trace.steps + 1):
                if t:
                    cur = step(cur, p)
                out.write(f"step {t}\n")
                if isinstance(cur, EmbeddedConfig):
                    out.write(f"background {cur.background} origin {cur.origin[0]},{cur.origin[1]}\n")
                    out.write(cur.support.to_text())
                else:
                    out.write(Pattern.from_array(cur.cells).to_text())
        fixed = trace.fixed_at is not None
        t = trace.fixed_at if fixed else trace.steps
        out.write(f"fixed={str(fixed).lower()} steps={t}\n")
        if isinstance(c, EmbeddedConfig):
            arrivals = []
            cur = c
            k = 0
            for s in range(trace.steps + 1):
                if s:
                    cur = step(cur, p)
                while all3_window(cur, k) and k <= steps + max(pattern.shape):
                    arrivals.append(f"{k}:{s}")
                    k += 1
            out.write("all3_arrivals=" + (",".join(arrivals) or "none") + "\n")
    return EXIT_OK if fixed else EXIT_BUDGET


def _motifs(literals) -> list[Pattern]:
    out: list[Pattern] = []
    for lit in literals or ():
        for m in Pattern.literal(lit).symmetries():
            if m not in out:
                out.append(m)
    return out


def cmd_preimage(args) -> int:
    target, _ = _load(args)
    q = PreimageQuery(target, args.params)
    motifs = _motifs(args.check_motif)
    code = EXIT_OK
    with _output(args.out) as out:
        if args.count_only:
            scan = scan_preimages(q, motifs, budget=args.max_nodes)
            out.write(f"count={scan.count} complete={str(scan.complete).lower()} nodes={scan.explored_nodes}\n")
            complete = scan.complete
            if motifs:
                holds = scan.motif_free == 0
                out.write(f"motif-check={'pass' if holds else 'fail'} motif_free={scan.motif_free}"
                          f"{'' if complete else ' (partial)'}\n")
                if scan.witness is not None:
                    out.write("witness\n" + scan.witness.to_text())
        else:
            res = preimages(q, budget=args.max_nodes, threads=args.threads)
            for chunk in format_patterns(res):
                out.write(chunk)
            out.write(res.summary() + "\n")
            complete = res.complete
            if motifs:
                if complete:
                    holds = motif_containment(res, motifs)
                else:
                    holds = all(any(p.contains(m) for m in motifs) for p in res)
                out.write(f"motif-check={'pass' if holds else 'fail'}{'' if complete else ' (partial)'}\n")
        if motifs and not holds:
            code = EXIT_REFUTED
    if not complete:
        return EXIT_BUDGET
    return code


def cmd_walk(args) -> int:
    start, _ = _load(args)
    try:
        tree = an.basin_walk(start, args.params, args.depth, args.seed, budget=args.max_nodes,
                             expand_budget=args.expand_nodes,
                             motifs=args.check_motif or ("33", "333"), threads=args.threads)
        code = EXIT_OK
    except BudgetExhausted as exc:
        tree, code = exc.partial, EXIT_BUDGET
    with _output(args.out) as out:
        out.write(tree.to_text())
    return code


PROPS = ("P1", "P2", "P3", "P4", "P5a", "P5b", "P6", "FP")


def _reports(prop: str, params: Params | None, args):
    seed = args.seed
    if prop == "P1":
        yield an.check_all_fixed_at_99(args.samples or 1000, 16, seed, params or (9, 9))
    elif prop == "P2":
        grid = [params] if params else [p for p in all_params() if (p.pz, p.pe) != (9, 9)]
        for p in grid:
            yield an.check_non_surjectivity(p, budget=args.max_nodes)
    elif prop == "P3":
        grid = [params] if params else [Params(*t) for t in ((0, 0), (1, 1), (2, 2), (5, 5), (9, 9))]
        for p in grid:
            yield an.check_no_strict_periodicity(p, args.samples or 500, 12, seed)
    elif prop == "P4":
        grid = [params] if params else all_params()
        for p in grid:
            yield an.check_blocking_word(p, args.samples or 20, args.steps or 50, seed)
    elif prop in ("P5a", "P5b"):
        default, lits = ((2, 2), ("33", "3/3")) if prop == "P5a" else ((3, 3), ("333", "3/3/3"))
        for lit in lits:
            yield an.check_basin_growth(Pattern.literal(lit), params or default, 10, prop=prop)
    elif prop == "P6":
        grid = [params] if params else [Params(*t) for t in ((4, 4), (9, 1), (1, 9), (5, 5))]
        for p in grid:
            for u in (Pattern.uniform(2, 2, 3), Pattern.uniform(3, 3, 3)):
                yield an.check_no_cylinder_in_basin(u, p, args.steps or 100)
    elif prop == "FP":
        grid = [params] if params else [Params(*t) for t in ((1, 1), (2, 2), (4, 4), (9, 9))]
        for p in grid:
            for b in (0, 1, 2):
                yield an.check_uniform_fixed_point_basin(b, Pattern.uniform(2, 2, 3), p)


def cmd_verify(args) -> int:
    props = PROPS if args.prop == "all" else (args.prop,)
    refuted = False
    with _output(args.out) as out:
        for prop in props:
            for rep in _reports(prop, args.params, args):
                out.write(rep.to_text())
                refuted |= rep.verdict == an.REFUTED
    return EXIT_REFUTED if refuted else EXIT_OK


_GLYPH = {0: ".", 1: "-", 2: "+", 3: "#"}


def cmd_render(args) -> int:
    pattern, header_bg = _load(args)
    if args.params is None:
        frames = [(0, pattern.array)]
    else:
        bg = args.background if args.background is not None else (header_bg or 0)
        c = EmbeddedConfig.centered(pattern, bg, args.params)
        frames = []
        for t in range(args.steps + 1):
            if t:
                c = step(c, args.params)
            frames.append((t, c.support.array))
    with _output(args.out) as out:
        out.write("legend: 0 . | 1 - | 2 + | 3 #\n")
        for t, a in frames:
            out.write(f"t={t} {a.shape[0]}x{a.shape[1]}\n")
            for row in a:
                out.write("".join(_GLYPH[int(v)] for v in row) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="langshift", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("evolve", help="iterate the global map")
    _add_input(sp)
    _add_common(sp)
    sp.add_argument("--mode", choices=("torus", "embedded"), default="embedded")
    sp.add_argument("--background", type=int, choices=range(4))
    sp.add_argument("--steps", type=int)
    sp.add_argument("--trace", action="store_true", help="write every step")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("preimage", help="enumerate preimages of a pattern")
    _add_input(sp)
    _add_common(sp)
    sp.add_argument("--max-nodes", type=_positive, default=10**8)
    sp.add_argument("--threads", type=_positive, default=1)
    sp.add_argument("--check-motif", action="append", metavar="LITERAL",
                    help="require every preimage to contain this motif up to rotation/reflection")
    sp.add_argument("--count-only", action="store_true", help="count without listing patterns")
    sp.set_defaults(func=cmd_preimage)

    sp = sub.add_parser("walk", help="randomised iterated-preimage walk")
    _add_input(sp)
    _add_common(sp)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--max-nodes", type=_positive, default=10**8)
    sp.add_argument("--expand-nodes", type=_positive, default=10**6)
    sp.add_argument("--threads", type=_positive, default=1)
    sp.add_argument("--check-motif", action="append", metavar="LITERAL")
    sp.set_defaults(func=cmd_walk)

    sp = sub.add_parser("verify", help="run the proposition checkers")
    _add_common(sp, params_required=False)
    sp.add_argument("--prop", choices=PROPS + ("all",), default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=_positive)
    sp.add_argument("--steps", type=_positive)
    sp.add_argument("--max-nodes", type=_positive, default=10**9)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("render", help="text rendering of a pattern or its evolution")
    _add_input(sp)
    _add_common(sp, params_required=False)
    sp.add_argument("--background", type=int, choices=range(4))
    sp.add_argument("--steps", type=int, default=0)
    sp.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (PatternFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NonQuiescentBackground, InvalidParams, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
