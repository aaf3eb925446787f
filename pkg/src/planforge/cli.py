"""Command-line front end: compile, solve, validate, export, gen, serve.

Exit codes: 0 success / valid plan; 2 unparseable input; 3 model or
compilation error; 4 invalid or malformed plan; 5 node/time cap exhausted.
Data goes to stdout or the requested files, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import formats
from .compilers.arrays import UndefinednessMode
from .domains import gen_npuzzle, gen_plotting, gen_rushhour
from .errors import (
    CompilationError,
    FormatError,
    ModelError,
    OutOfRangeError,
    PddlError,
    PlanError,
    SearchLimitExceeded,
)
from .model import Problem
from .pddl import export as pddl_export
from .pddl_lint import lint as pddl_lint
from .pipeline import compile as pipeline_compile
from .pipeline import map_plan_back
from .search import SearchStats, solve as search_solve, validate as search_validate

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_COMPILE = 3
EXIT_INVALID = 4
EXIT_TIMEOUT = 5

TIMEOUT_ENV = "PLANFORGE_TIMEOUT_SECS"


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ModelError, CompilationError, OutOfRangeError, PddlError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    except PlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SearchLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planforge",
        description="Model planning problems with arrays, Count, and integer action "
                    "parameters; compile, solve, validate, and export them.")
    sub = parser.add_subparsers(required=True)

    c = sub.add_parser("compile", help="lower a problem to a plain grounded problem")
    c.add_argument("input", help="problem JSON file, gen-spec JSON file, or '-' for stdin")
    c.add_argument("-o", "--output", help="compiled problem JSON path (default: stdout)")
    _mode_flag(c)
    c.add_argument("--emit-intermediates", action="store_true",
                   help="write one snapshot per pass next to the output file")
    c.add_argument("--force-all-passes", action="store_true",
                   help="run every pass even when its feature is absent")
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("solve", help="compile a problem and search for a plan")
    s.add_argument("input")
    s.add_argument("--strategy", choices=("breadth_first", "astar_goalcount"),
                   default="breadth_first")
    s.add_argument("--max-nodes", type=int, default=None)
    s.add_argument("--max-seconds", type=float, default=_default_timeout())
    s.add_argument("-o", "--output", help="also write the plan as JSON to this path")
    _mode_flag(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a plan against the (high-level) problem")
    v.add_argument("input")
    v.add_argument("plan", help="plan file: text (name(arg=value, ...)) or JSON")
    _mode_flag(v)
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("export", help="compile and write PDDL domain/problem files")
    e.add_argument("input")
    e.add_argument("-o", "--output", required=True,
                   help="output prefix; writes <prefix>.domain.pddl and <prefix>.problem.pddl")
    _mode_flag(e)
    e.add_argument("--no-check", action="store_true",
                   help="skip the bundled PDDL grammar check")
    e.set_defaults(func=cmd_export)

    g = sub.add_parser("gen", help="generate a benchmark problem")
    gsub = g.add_subparsers(required=True)
    gp = gsub.add_parser("plotting")
    gp.add_argument("--grid", required=True,
                    help="JSON file: nested array of colour names ('N' = empty)")
    gp.add_argument("--colours", required=True, help="comma-separated colour names")
    gp.add_argument("--max-remaining", type=int, required=True)
    gp.add_argument("-o", "--output")
    gp.set_defaults(func=cmd_gen_plotting)
    gr = gsub.add_parser("rushhour")
    gr.add_argument("--grid", help="36-character grid string")
    gr.add_argument("--grid-file", help="file with one 36-character grid per line")
    gr.add_argument("--line", type=int, default=1, help="1-based line in --grid-file")
    gr.add_argument("-o", "--output")
    gr.set_defaults(func=cmd_gen_rushhour)
    gn = gsub.add_parser("npuzzle")
    gn.add_argument("--tiles", required=True, help="JSON file: k x k integer matrix")
    gn.add_argument("-o", "--output")
    gn.set_defaults(func=cmd_gen_npuzzle)

    r = sub.add_parser("serve", help="run the HTTP service")
    r.add_argument("--host", default="127.0.0.1")
    r.add_argument("--port", type=int, default=8000)
    r.set_defaults(func=cmd_serve)
    return parser


def _mode_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--undefined-mode", choices=("restrictive", "permissive"),
                   default="restrictive",
                   help="policy for out-of-range array accesses (default: restrictive)")


def _default_timeout() -> float | None:
    raw = os.environ.get(TIMEOUT_ENV)
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        print(f"warning: ignoring bad {TIMEOUT_ENV}={raw!r}", file=sys.stderr)
        return None


def _mode(args) -> UndefinednessMode:
    return UndefinednessMode(args.undefined_mode)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None


def _load_problem(path: str) -> Problem:
    text = _read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from None
    if isinstance(data, dict) and "generator" in data:
        return _generate(data)
    return formats.problem_from_dict(data)


def _generate(spec: dict) -> Problem:
    kind = spec.get("generator")
    try:
        if kind == "npuzzle":
            tiles = spec["tiles"]
            return gen_npuzzle(len(tiles), tiles,
                               require_solvable=spec.get("require_solvable", True))
        if kind == "rushhour":
            return gen_rushhour(spec["grid"])
        if kind == "plotting":
            grid = spec["grid"]
            return gen_plotting(len(grid), len(grid[0]) if grid else 0,
                                list(spec["colours"]), grid, int(spec["max_remaining"]))
    except KeyError as exc:
        raise FormatError(f"gen spec missing key {exc}") from None
    raise FormatError(f"unknown generator {kind!r}")


def _write_or_print(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_compile(args) -> int:
    problem = _load_problem(args.input)
    result = pipeline_compile(problem, _mode(args), force_all=args.force_all_passes)
    for note in result.notes:
        print(note, file=sys.stderr)
    print(f"passes run: {', '.join(result.passes) if result.passes else 'none'}",
          file=sys.stderr)
    _write_or_print(formats.save_problem(result.compiled), args.output)
    if args.emit_intermediates:
        if not args.output or args.output == "-":
            raise FormatError("--emit-intermediates needs -o/--output")
        stem = Path(args.output)
        for pass_name, snapshot in result.snapshots:
            path = stem.with_name(f"{stem.stem}.{pass_name}{stem.suffix or '.json'}")
            path.write_text(formats.save_problem(snapshot))
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = _load_problem(args.input)
    result = pipeline_compile(problem, _mode(args))
    stats = SearchStats()
    plan = search_solve(result.compiled, strategy=args.strategy,
                        max_nodes=args.max_nodes, max_seconds=args.max_seconds,
                        stats=stats)
    print(f"expanded {stats.expanded} nodes, generated {stats.generated}, "
          f"{stats.seconds:.3f}s", file=sys.stderr)
    if plan is None:
        print("no plan exists", file=sys.stderr)
        return EXIT_INVALID
    source_plan = map_plan_back(result, plan)
    sys.stdout.write(formats.format_plan_text(source_plan))
    if args.output:
        Path(args.output).write_text(formats.dumps(formats.plan_to_dict(source_plan)))
    return EXIT_OK


def cmd_validate(args) -> int:
    problem = _load_problem(args.input)
    text = _read_text(args.plan)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        plan = formats.plan_from_dict(json.loads(text))
    else:
        plan = formats.parse_plan_text(text)
    report = search_validate(problem, plan, _mode(args))
    for note in report.notes:
        print(note, file=sys.stderr)
    print(str(report))
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_export(args) -> int:
    problem = _load_problem(args.input)
    result = pipeline_compile(problem, _mode(args))
    domain_text, problem_text = pddl_export(result.compiled)
    domain_path = Path(f"{args.output}.domain.pddl")
    problem_path = Path(f"{args.output}.problem.pddl")
    domain_path.write_text(domain_text)
    problem_path.write_text(problem_text)
    print(f"wrote {domain_path} and {problem_path}", file=sys.stderr)
    if not args.no_check:
        errors = pddl_lint(domain_text, problem_text)
        if errors:
            for err in errors:
                print(f"pddl check: {err}", file=sys.stderr)
            raise PddlError("exported PDDL failed the bundled grammar check")
    return EXIT_OK


def cmd_gen_plotting(args) -> int:
    grid = json.loads(_read_text(args.grid))
    if not isinstance(grid, list) or not grid or not all(isinstance(r, list) for r in grid):
        raise FormatError("plotting grid file must hold a nested JSON array")
    colours = [c.strip() for c in args.colours.split(",") if c.strip()]
    problem = gen_plotting(len(grid), len(grid[0]), colours, grid, args.max_remaining)
    _write_or_print(formats.save_problem(problem), args.output)
    return EXIT_OK


def cmd_gen_rushhour(args) -> int:
    if bool(args.grid) == bool(args.grid_file):
        raise FormatError("pass exactly one of --grid or --grid-file")
    grid = args.grid
    if args.grid_file:
        lines = [ln.strip() for ln in _read_text(args.grid_file).splitlines() if ln.strip()]
        if not 1 <= args.line <= len(lines):
            raise FormatError(f"--line {args.line} out of range; file has {len(lines)} grids")
        grid = lines[args.line - 1]
    problem = gen_rushhour(grid)
    _write_or_print(formats.save_problem(problem), args.output)
    return EXIT_OK


def cmd_gen_npuzzle(args) -> int:
    tiles = json.loads(_read_text(args.tiles))
    if not isinstance(tiles, list) or not tiles:
        raise FormatError("tiles file must hold a k x k JSON integer matrix")
    problem = gen_npuzzle(len(tiles), tiles)
    _write_or_print(formats.save_problem(problem), args.output)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
