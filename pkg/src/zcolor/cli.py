"""Command-line entry point: ``zcolor <command> ...``.

Exit codes: 0 success, 1 negative verdict, 2 unreadable input,
3 precondition failure, 4 move budget exhausted, 5 reduction stuck,
6 internal invariant or trace verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .coloring import (ColoringError, NotColorableError, diffs, dump_coloring, is_simple, kernel_colorings,
                       nontrivial_coloring, palette, parse_coloring, validate)
from .diagram import DiagramError, Workspace, dump_diagram, linking_graph_connected, parse_diagram
from .generators import GeneratorError, braid_closure, pretzel, random_braid_closure, scramble, twist_composite
from .oracle import EXHAUSTED, bounded_palette_search, verify_trace
from .reduction import (DEFAULT_BUDGET, BudgetExceeded, InvariantError, PreconditionError, StuckError,
                        diagram_id, make_simple)

OK, NEGATIVE, PARSE, PRECONDITION, BUDGET, STUCK, INVARIANT = range(7)
TRACE_FORMAT = "zcolor-trace/1"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(PARSE, f"cannot read {path}: {exc.strerror}") from None


def read_diagram(path: str):
    try:
        return parse_diagram(_read_text(path))
    except DiagramError as exc:
        raise CliError(PARSE, f"{path}: {exc}") from None


def read_coloring(path: str):
    try:
        return parse_coloring(_read_text(path))
    except ColoringError as exc:
        raise CliError(PARSE, f"{path}: {exc}") from None


def budget_from(args) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("ZCOLOR_BUDGET")
    if env:
        try:
            val = int(env)
        except ValueError:
            raise CliError(PARSE, f"ZCOLOR_BUDGET must be an integer, got {env!r}") from None
        if val < 0:
            raise CliError(PARSE, "ZCOLOR_BUDGET must be nonnegative")
        return val
    return DEFAULT_BUDGET


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------------------
# commands; each returns (exit code, JSON payload, text lines)


def do_check(path: str, _args):
    d = read_diagram(path)
    basis = kernel_colorings(d)
    try:
        nontrivial_coloring(d)
        colorable = True
    except NotColorableError:
        colorable = False
    payload = {"file": path, "colorable": colorable, "nullity": len(basis)}
    text = f"{path}: {'Z-colorable' if colorable else 'not Z-colorable'} (nullity {len(basis)})"
    return (OK if colorable else NEGATIVE), payload, [text]


def cmd_color(args):
    d = read_diagram(args.file)
    if args.all_basis:
        basis = kernel_colorings(d)
        out = _dumps({"basis": [{str(a): v[a] for a in sorted(v)} for v in basis]})
    else:
        try:
            out = dump_coloring(nontrivial_coloring(d))
        except NotColorableError as exc:
            raise CliError(PRECONDITION, str(exc)) from None
    if args.output:
        _write(Path(args.output), out)
        return OK, {"file": args.file, "written": args.output}, [f"wrote {args.output}"]
    return OK, json.loads(out), [out.rstrip("\n")]


def _input_coloring(d, coloring_path):
    if coloring_path:
        g = read_coloring(coloring_path)
        try:
            ok = validate(d, g)
        except ColoringError as exc:
            raise CliError(PRECONDITION, str(exc)) from None
        if not ok:
            raise CliError(PRECONDITION, "coloring violates the crossing equation")
        return g
    try:
        return nontrivial_coloring(d)
    except NotColorableError as exc:
        raise CliError(PRECONDITION, str(exc)) from None


def _run_make_simple(d, g, budget):
    import warnings
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return make_simple(d, g, budget=budget)
    except PreconditionError as exc:
        raise CliError(PRECONDITION, str(exc)) from None
    except BudgetExceeded as exc:
        raise CliError(BUDGET, str(exc)) from None
    except StuckError as exc:
        raise CliError(STUCK, str(exc)) from None
    except (InvariantError, AssertionError) as exc:
        raise CliError(INVARIANT, f"internal invariant violated: {exc}") from None


def trace_document(d_in, g_in, d_out, g_out, trace) -> dict:
    return {
        "format": TRACE_FORMAT,
        "input": {"diagram_id": diagram_id(d_in), "colors": {str(a): g_in[a] for a in sorted(g_in)}},
        "output": {"diagram_id": diagram_id(d_out), "colors": {str(a): g_out[a] for a in sorted(g_out)}},
        "moves": trace,
    }


def do_reduce(path: str, args):
    d = read_diagram(path)
    g = _input_coloring(d, args.coloring)
    d2, g2, rep = _run_make_simple(d, g, budget_from(args))
    if not args.no_verify:
        verdict = verify_trace(d, g, rep.trace, d2, g2)
        if not verdict:
            raise CliError(INVARIANT, f"trace failed verification at step {verdict.step}: {verdict.message}")
    stem = Path(path).name.removesuffix(".json")
    out_dir = Path(args.out_dir)
    many = len(args.files) > 1
    paths = {
        "diagram": Path(args.out) if args.out and not many else out_dir / f"{stem}.simple.json",
        "coloring": Path(args.out_coloring) if args.out_coloring and not many else out_dir / f"{stem}.simple.coloring.json",
        "trace": Path(args.trace) if args.trace and not many else out_dir / f"{stem}.trace.json",
        "report": Path(args.report) if args.report and not many else out_dir / f"{stem}.report.json",
    }
    base = paths["report"].with_suffix("")
    paths["diffs"] = base.with_name(base.name + ".diffs.tsv")
    _write(paths["diagram"], dump_diagram(d2))
    _write(paths["coloring"], dump_coloring(g2))
    _write(paths["trace"], _dumps(trace_document(d, g, d2, g2, rep.trace)))
    report = rep.to_json()
    report["input_file"] = Path(path).name
    report["trace_file"] = paths["trace"].name
    report["splittable_warning"] = not linking_graph_connected(d)
    report["palette"] = {"input": palette(g)[1], "output": palette(g2)[1]}
    _write(paths["report"], _dumps(report))
    rows = ["phase\tcrossing\tdiff"]
    rows += [f"input\t{c}\t{v}" for c, v in sorted(rep.input_profile.diffs.items())]
    rows += [f"output\t{c}\t{v}" for c, v in sorted(rep.output_profile.diffs.items())]
    _write(paths["diffs"], "\n".join(rows) + "\n")
    if not args.no_figures:
        from . import figures
        paths["diff_figure"] = base.with_name(base.name + ".diffs.png")
        paths["measure_figure"] = base.with_name(base.name + ".measure.png")
        figures.diff_histogram(rep.input_profile.diffs, rep.output_profile.diffs, paths["diff_figure"])
        figures.measure_history(rep.measure_history, paths["measure_figure"])
    verdict_simple = is_simple(d2, g2)
    payload = {"file": path, "steps": rep.steps, "simple": bool(verdict_simple), "d": verdict_simple.d,
               "crossings": [len(d.crossings), len(d2.crossings)],
               "written": {k: str(v) for k, v in sorted(paths.items())}}
    text = (f"{path}: simple coloring with common diff {verdict_simple.d} after {rep.steps} moves "
            f"({len(d.crossings)} -> {len(d2.crossings)} crossings); report {paths['report']}")
    return OK, payload, [text]


def cmd_verify_trace(args):
    d_in = read_diagram(args.input)
    d_out = read_diagram(args.output)
    try:
        doc = json.loads(_read_text(args.trace))
        moves = doc["moves"] if isinstance(doc, dict) else doc
        if not isinstance(moves, list):
            raise TypeError("moves must be a list")
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(PARSE, f"{args.trace}: malformed trace: {exc}") from None
    if args.in_coloring:
        g_in = read_coloring(args.in_coloring)
    else:
        g_in = _colors_from(doc, "input", args.trace)
    if args.out_coloring:
        g_out = read_coloring(args.out_coloring)
    else:
        g_out = _colors_from(doc, "output", args.trace)
    verdict = verify_trace(d_in, g_in, moves, d_out, g_out)
    if verdict:
        return OK, verdict.to_json(), [f"trace verified: {verdict.steps_checked} moves replayed"]
    where = "final state" if verdict.step is None else f"step {verdict.step}"
    return INVARIANT, verdict.to_json(), [f"trace FAILED at {where} ({verdict.invariant}): {verdict.message}"]


def _colors_from(doc, key, path):
    try:
        return {int(a): v for a, v in doc[key]["colors"].items()}
    except (KeyError, TypeError, AttributeError, ValueError):
        raise CliError(PARSE, f"{path}: no {key} coloring in trace; pass --{'in' if key == 'input' else 'out'}-coloring") from None


def _transport(d, basis, trace):
    """Push each basis coloring through the trace; moves map colorings bijectively."""
    out = []
    for v in basis:
        ws = Workspace(d, v)
        for rec in trace:
            ws.apply(rec)
        out.append(ws.freeze()[1])
    return out


def cmd_mincol_upper(args):
    d = read_diagram(args.file)
    g = _input_coloring(d, args.coloring)
    d2, g2, rep = _run_make_simple(d, g, budget_from(args))
    basis = _transport(d, kernel_colorings(d), rep.trace)
    found = bounded_palette_search(d2, 4, args.bound, basis=basis)
    payload = {"file": args.file, "input_palette": palette(g)[1], "simple_palette": palette(g2)[1],
               "common_diff": is_simple(d2, g2).d, "moves": rep.steps, "bound": args.bound,
               "four_color_search": EXHAUSTED if found == EXHAUSTED else palette(found)[1]}
    lines = [f"input coloring palette: {payload['input_palette']}",
             f"simple coloring palette: {payload['simple_palette']} (common diff {payload['common_diff']}, "
             f"{rep.steps} moves)"]
    if found == EXHAUSTED:
        lines.append(f"4-color search with coefficients in [-{args.bound}, {args.bound}]: exhausted (bounded search)")
    else:
        lines.append(f"4-color search: found a coloring with {palette(found)[1]} colors")
    return OK, payload, lines


def _parse_twist_entry(tok: str):
    try:
        pair, t = tok.split(":")
        i, j = (int(x) for x in pair.split(","))
        return ((i, j), int(t))
    except ValueError:
        raise CliError(PARSE, f"twist entries look like 'i,j:t', got {tok!r}") from None


def cmd_gen(args):
    try:
        if args.family == "pretzel":
            d = pretzel(args.twists)
        elif args.family == "twist":
            d = twist_composite([_parse_twist_entry(t) for t in args.entries])
        elif args.word is not None:
            d = braid_closure(args.strands, args.word)
        else:
            d = random_braid_closure(args.seed, args.strands, args.length)
    except GeneratorError as exc:
        raise CliError(PRECONDITION, str(exc)) from None
    lines = []
    if args.scramble is not None:
        if not args.coloring_out:
            raise CliError(PRECONDITION, "--scramble needs --coloring-out for the matching coloring")
        try:
            g = nontrivial_coloring(d)
        except NotColorableError as exc:
            raise CliError(PRECONDITION, str(exc)) from None
        d, g, _ = scramble(d, g, args.scramble, args.pushes)
        _write(Path(args.coloring_out), dump_coloring(g))
        lines.append(f"wrote {args.coloring_out}")
    text = dump_diagram(d)
    if args.output:
        _write(Path(args.output), text)
        lines.insert(0, f"wrote {args.output}")
        return OK, {"written": args.output, "crossings": len(d.crossings)}, lines
    return OK, json.loads(text), [text.rstrip("\n")] + lines


# ---------------------------------------------------------------------------


def _guarded(fn, path, args):
    try:
        return fn(path, args)
    except CliError as exc:
        return exc.code, {"file": path, "error": str(exc)}, [f"error: {exc}"]


def _batch(fn, args):
    """Run ``fn`` per input file, optionally in worker processes; results keep input order."""
    if args.jobs > 1 and len(args.files) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_guarded, [fn] * len(args.files), args.files, [args] * len(args.files)))
    else:
        results = [_guarded(fn, p, args) for p in args.files]
    code = max(r[0] for r in results)
    if len(results) == 1:
        return results[0]
    return code, {"results": [r[1] for r in results]}, [ln for r in results for ln in r[2]]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zcolor", description="Integer colorings of link diagrams.")
    p.add_argument("--json", action="store_true", help="machine-readable JSON on stdout")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for multi-file commands")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="is the diagram Z-colorable?")
    c.add_argument("files", nargs="+")

    c = sub.add_parser("color", help="write a canonical nontrivial coloring")
    c.add_argument("file")
    c.add_argument("--all-basis", action="store_true", help="write the whole kernel basis instead")
    c.add_argument("-o", "--output")

    c = sub.add_parser("reduce", help="rewrite until the coloring is simple")
    c.add_argument("files", nargs="+")
    c.add_argument("--coloring")
    c.add_argument("--budget", type=int)
    c.add_argument("--trace")
    c.add_argument("--report")
    c.add_argument("--out", help="output diagram path")
    c.add_argument("--out-coloring")
    c.add_argument("--out-dir", default=".")
    c.add_argument("--no-figures", action="store_true")
    c.add_argument("--no-verify", action="store_true", help="skip replaying the trace")

    c = sub.add_parser("verify-trace", help="replay a move trace and check every step")
    c.add_argument("input")
    c.add_argument("trace")
    c.add_argument("output")
    c.add_argument("--in-coloring")
    c.add_argument("--out-coloring")

    c = sub.add_parser("mincol-upper", help="reduce, then look for a 4-color coloring")
    c.add_argument("file")
    c.add_argument("--coloring")
    c.add_argument("--bound", type=int, default=2)
    c.add_argument("--budget", type=int)

    c = sub.add_parser("gen", help="emit a generated diagram")
    fam = c.add_subparsers(dest="family", required=True)
    f = fam.add_parser("pretzel")
    f.add_argument("twists", nargs="+", type=int)
    f.add_argument("-o", "--output")
    f = fam.add_parser("twist")
    f.add_argument("entries", nargs="+", help="entries 'i,j:t' (t full twists between strands i and j)")
    f.add_argument("-o", "--output")
    f = fam.add_parser("braid")
    f.add_argument("--strands", type=int, required=True)
    f.add_argument("--word", type=int, nargs="*")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--length", type=int, default=0)
    f.add_argument("-o", "--output")
    for f in fam.choices.values():
        f.add_argument("--scramble", type=int, metavar="SEED",
                       help="apply seeded colored R2 pushes to the canonical coloring")
        f.add_argument("--pushes", type=int, default=14)
        f.add_argument("--coloring-out", help="where the scrambled coloring goes")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return PARSE if exc.code else OK
    try:
        if args.command == "check":
            code, payload, lines = _batch(do_check, args)
        elif args.command == "reduce":
            code, payload, lines = _batch(do_reduce, args)
        else:
            fn = {"color": cmd_color, "verify-trace": cmd_verify_trace,
                  "mincol-upper": cmd_mincol_upper, "gen": cmd_gen}[args.command]
            code, payload, lines = fn(args)
    except CliError as exc:
        code, payload, lines = exc.code, {"error": str(exc)}, [f"error: {exc}"]
    if args.json:
        payload = dict(payload)
        payload["exit_code"] = code
        sys.stdout.write(_dumps(payload))
    else:
        stream = sys.stdout if code in (OK, NEGATIVE) else sys.stderr
        for ln in lines:
            print(ln, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
