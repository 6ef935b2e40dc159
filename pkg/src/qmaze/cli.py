"""Command-line front end: generate mazes, run solves and sweeps, check
circuits against their references, and report resource costs.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
All randomness derives from the single --seed value: maze generation uses
child stream (seed, 0[, run]) and the search loop uses (seed, 1[, run]),
so identical configs reproduce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import adaptive, codec, engine, fitness, resources, verify
from .adaptive import Policy, SearchConfig, Strictness, run_adaptive
from .fitness import Formula, make_spec
from .maze import Maze, MazeFormatError, SimMode, generate_maze, parse_maze, serialize_maze


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


def _child_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(tuple(parts)).generate_state(1)[0])


# ---------------------------------------------------------------------------
# Config file handling (flat key = value lines)

_CONFIG_SCHEMA = {
    "maze": str,
    "m": int,
    "n": int,
    "seed": int,
    "epsilon": float,
    "cutoff0": int,
    "rounds": int,
    "samples": int,
    "mode": str,
    "formula": str,
    "policy": str,
    "strictness": str,
    "out": str,
    "format": str,
}


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; unknown keys are errors, not warnings."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value', got '{raw}'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_SCHEMA:
            raise UsageError(f"config line {lineno}: unknown key '{key}'")
        if key in values:
            raise UsageError(f"config line {lineno}: duplicate key '{key}'")
        try:
            values[key] = _CONFIG_SCHEMA[key](val)
        except ValueError:
            raise UsageError(
                f"config line {lineno}: bad value '{val}' for '{key}'"
            ) from None
    return values


def _enum_value(enum_cls, value: str, flag: str):
    for member in enum_cls:
        if member.value == value:
            return member
    choices = ", ".join(m.value for m in enum_cls)
    raise UsageError(f"{flag} must be one of: {choices}")


# ---------------------------------------------------------------------------
# Output rendering

TRACE_COLUMNS = "round,cutoff,k,theta,r,outcome_index,outcome_fitness,new_cutoff"


def trace_to_csv(trace: adaptive.CutoffTrace) -> str:
    lines = [TRACE_COLUMNS]
    for rec in trace.rounds:
        lines.append(
            f"{rec.t},{rec.cutoff},{rec.k},{rec.theta!r},{rec.rounds},"
            f"{rec.outcome_index},{rec.outcome_fitness},{rec.new_cutoff}"
        )
    return "\n".join(lines) + "\n"


def trace_to_json(trace: adaptive.CutoffTrace, n: int, f_max: int) -> str:
    best = None
    if trace.best_index is not None:
        dirs = codec.decode_index(trace.best_index, n)
        best = {
            "index": trace.best_index,
            "bits": codec.path_bits(trace.best_index, n),
            "letters": codec.path_letters(dirs),
            "fitness": trace.best_fitness,
        }
    doc = {
        "status": trace.status.value,
        "f_max": f_max,
        "optimal": trace.best_fitness == f_max,
        "best": best,
        "rounds": [
            {
                "round": r.t,
                "cutoff": r.cutoff,
                "k": r.k,
                "theta": r.theta,
                "r": r.rounds,
                "outcome_index": r.outcome_index,
                "outcome_fitness": r.outcome_fitness,
                "new_cutoff": r.new_cutoff,
            }
            for r in trace.rounds
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write_out(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_generate(args) -> int:
    if args.m < 2:
        raise UsageError("m must be >= 2")
    start = tuple(args.start) if args.start else None
    goal = tuple(args.goal) if args.goal else None
    maze = generate_maze(args.m, args.seed, start=start, goal=goal)
    text = serialize_maze(maze)
    _write_out(text, args.out)
    return 0


def _load_solve_settings(args) -> dict:
    settings = {
        "maze": None, "m": None, "n": None, "seed": 0, "epsilon": 0.05,
        "cutoff0": 0, "rounds": 32, "samples": 3, "mode": "wall-aware",
        "formula": "maintext", "policy": "known-k", "strictness": "ge-at-max",
        "out": None, "format": "csv",
    }
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        settings.update(parse_config(text))
    for key in settings:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    if settings["n"] is None:
        raise UsageError("path length --n is required")
    if settings["maze"] is None and settings["m"] is None:
        raise UsageError("either --maze FILE or --m SIZE is required")
    return settings


def _solve_once(settings: dict) -> tuple[Maze, fitness.FitnessLandscape, adaptive.CutoffTrace]:
    if settings["maze"]:
        try:
            maze = parse_maze(Path(settings["maze"]).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read maze: {exc}") from None
    else:
        maze = generate_maze(settings["m"], _child_seed(settings["seed"], 0))
    spec = make_spec(
        maze.size,
        _enum_value(Formula, settings["formula"], "--formula"),
        _enum_value(SimMode, settings["mode"], "--mode"),
    )
    n = settings["n"]
    if n < 0 or n > codec.MAX_PATH_LENGTH:
        raise UsageError(f"--n must lie in 0..{codec.MAX_PATH_LENGTH}")
    scape = fitness.landscape(maze, n, spec)
    config = SearchConfig(
        initial_cutoff=settings["cutoff0"],
        epsilon=settings["epsilon"],
        max_rounds=settings["rounds"],
        policy=_enum_value(Policy, settings["policy"], "--policy"),
        strictness=_enum_value(Strictness, settings["strictness"], "--strictness"),
        samples=settings["samples"],
        seed=_child_seed(settings["seed"], 1),
    )
    return maze, scape, run_adaptive(scape, config)


def _summary_lines(trace: adaptive.CutoffTrace, scape, n: int) -> list[str]:
    lines = [f"status: {trace.status.value}", f"rounds used: {len(trace.rounds)}"]
    if trace.best_index is not None:
        dirs = codec.decode_index(trace.best_index, n)
        lines.append(
            f"best path: {codec.path_letters(dirs)} "
            f"(|{codec.path_bits(trace.best_index, n)}>) fitness {trace.best_fitness}"
        )
        lines.append(f"optimal: {'yes' if trace.best_fitness == scape.f_max else 'no'}"
                     f" (f_max {scape.f_max})")
    return lines


def cmd_solve(args) -> int:
    settings = _load_solve_settings(args)
    _, scape, trace = _solve_once(settings)
    n = settings["n"]
    for line in _summary_lines(trace, scape, n):
        print(line)
    if settings["format"] == "json":
        _write_out(trace_to_json(trace, n, scape.f_max), settings["out"])
    elif settings["format"] == "csv":
        _write_out(trace_to_csv(trace), settings["out"])
    else:
        raise UsageError("--format must be csv or json")
    return 0


def cmd_sweep(args) -> int:
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    rows = []
    successes = 0
    for run in range(args.runs):
        maze = generate_maze(args.m, _child_seed(args.seed, 0, run))
        spec = make_spec(
            args.m,
            _enum_value(Formula, args.formula, "--formula"),
            _enum_value(SimMode, args.mode, "--mode"),
        )
        scape = fitness.landscape(maze, args.n, spec)
        config = SearchConfig(
            initial_cutoff=args.cutoff0,
            epsilon=args.epsilon,
            max_rounds=args.rounds,
            policy=_enum_value(Policy, args.policy, "--policy"),
            samples=args.samples,
            seed=_child_seed(args.seed, 1, run),
        )
        trace = run_adaptive(scape, config)
        success = trace.best_fitness == scape.f_max
        successes += int(success)
        rows.append(
            {
                "run": run,
                "status": trace.status.value,
                "rounds_used": len(trace.rounds),
                "best_fitness": trace.best_fitness,
                "f_max": scape.f_max,
                "success": success,
            }
        )
    fraction = successes / args.runs
    print(f"success fraction: {fraction!r} ({successes}/{args.runs})")
    if args.format == "json":
        doc = {"runs": rows, "success_fraction": fraction}
        _write_out(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
    else:
        lines = ["run,status,rounds_used,best_fitness,f_max,success"]
        for r in rows:
            lines.append(
                f"{r['run']},{r['status']},{r['rounds_used']},{r['best_fitness']},"
                f"{r['f_max']},{int(r['success'])}"
            )
        _write_out("\n".join(lines) + "\n", args.out)
    return 0


def cmd_dynamics(args) -> int:
    n, k = args.n, args.k
    if n < 1 or n > codec.MAX_PATH_LENGTH:
        raise UsageError(f"--n must lie in 1..{codec.MAX_PATH_LENGTH}")
    total = codec.path_count(n)
    if not 1 <= k <= total:
        raise UsageError(f"--k must lie in 1..{total}")
    geometry = engine.GroverGeometry(num_states=total, num_marked=k)
    r_max = args.rmax if args.rmax is not None else 3 * max(1, engine.optimal_rounds(geometry))
    marked = np.arange(k)
    state = engine.prepare_uniform(n)
    lines = ["r,predicted,simulated"]
    for r in range(r_max + 1):
        predicted = geometry.success_probability(r)
        simulated = state.marked_probability(marked)
        lines.append(f"{r},{predicted!r},{simulated!r}")
        state = engine.grover_iterate(state, marked, 1)
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    if not 1 <= args.nmax <= 4:
        raise UsageError("--nmax must lie in 1..4")
    if not 2 <= args.mmax <= 6:
        raise UsageError("--mmax must lie in 2..6")
    if not 1 <= args.widthmax <= 8:
        raise UsageError("--widthmax must lie in 1..8")
    results = verify.run_all(args.nmax, args.mmax, args.widthmax)
    failed = False
    for res in results:
        if res.passed:
            print(f"PASS {res.name} ({res.checked} cases)")
        else:
            failed = True
            print(f"FAIL {res.name}: {res.counterexample}")
    return 1 if failed else 0


def cmd_resources(args) -> int:
    if args.n < 1 or args.n > codec.MAX_PATH_LENGTH:
        raise UsageError(f"--n must lie in 1..{codec.MAX_PATH_LENGTH}")
    if args.m < 2:
        raise UsageError("--m must be >= 2")
    pred = resources.predict(args.n, args.m)
    act = resources.measured(args.n, args.m)
    fit_points = [(i, args.m) for i in range(1, max(3, args.n) + 1)]
    claims = resources.check_asymptotics(fit_points)
    if args.format == "json":
        doc = {
            "predicted": pred.as_dict(),
            "measured": act.as_dict(),
            "fits": {
                name: {
                    "slope": c.slope,
                    "intercept": c.intercept,
                    "residual_ratio": c.residual_ratio,
                    "passed": c.passed,
                }
                for name, c in claims.items()
            },
        }
        _write_out(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
        return 0
    lines = [f"resources for n={args.n}, m={args.m} (cutoff {pred.cutoff})", ""]
    lines.append(f"{'register':<12}{'predicted':>10}{'actual':>10}")
    for name in pred.register_widths:
        lines.append(
            f"{name:<12}{pred.register_widths[name]:>10}{act.register_widths.get(name, 0):>10}"
        )
    lines.append(f"{'ancilla':<12}{pred.ancilla:>10}{act.ancilla:>10}")
    lines.append(f"{'total':<12}{pred.total_qubits:>10}{act.total_qubits:>10}")
    lines.append("")
    lines.append(f"{'stage toffoli':<22}{'predicted':>10}{'actual':>10}")
    for name in pred.stages:
        lines.append(
            f"{name:<22}{pred.stages[name].toffoli:>10}{act.stages[name].toffoli:>10}"
        )
    lines.append(f"measured oracle depth: {act.depth} (prediction bound {pred.depth})")
    lines.append("")
    for name, c in claims.items():
        lines.append(
            f"fit {name}: slope {c.slope:.3f} intercept {c.intercept:.3f} "
            f"residual {c.residual_ratio:.4f} -> {'PASS' if c.passed else 'FAIL'}"
        )
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmaze",
        description="Amplitude-amplification maze solver and circuit checker",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a perfect maze file")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", type=int, nargs=2, metavar=("I", "J"))
    p.add_argument("--goal", type=int, nargs=2, metavar=("I", "J"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run the adaptive search on one maze")
    p.add_argument("--config", help="flat key=value settings file")
    p.add_argument("--maze", help="maze file (otherwise generated from --m)")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--cutoff0", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--mode", choices=[m.value for m in SimMode])
    p.add_argument("--formula", choices=[f.value for f in Formula])
    p.add_argument("--policy", choices=[pol.value for pol in Policy])
    p.add_argument("--strictness", choices=[s.value for s in Strictness])
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="many seeded solves, success statistics")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--cutoff0", type=int, default=0)
    p.add_argument("--rounds", type=int, default=32)
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--mode", choices=[m.value for m in SimMode], default="wall-aware")
    p.add_argument("--formula", choices=[f.value for f in Formula], default="maintext")
    p.add_argument("--policy", choices=[pol.value for pol in Policy], default="known-k")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dynamics", help="predicted vs simulated success per round count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rmax", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("verify", help="exhaustive circuit-vs-reference suites")
    p.add_argument("--nmax", type=int, default=3)
    p.add_argument("--mmax", type=int, default=4)
    p.add_argument("--widthmax", type=int, default=6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("resources", help="predicted vs measured circuit costs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_resources)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MazeFormatError as exc:
        print(f"error: bad maze file: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
