"""Command line front end.

Subcommands cover the full pipeline: task validation and compilation,
oracle solving, plan replay, suite regeneration, external planner runs,
the scaling sweep, the interactive play server, and a micro-benchmark of
the applicability kernel backends.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import kernels
from .codegen import ENCODINGS, compile_task
from .errors import VoxelplanError
from .planio import bind_plan, parse_plan, serialize_plan
from .search import SearchLimits, bfs_solve
from .simulator import Simulator
from .suite import FAMILIES, SCALES, VARIANTS, build_task, generate_suite, manifest_table, stats_for
from .task import parse_task, serialize_task, validate_task
from .world import build_initial_world


def _load_spec(path: str):
    text = Path(path).read_text()
    spec = parse_task(text)
    report = validate_task(spec)
    if not report.valid:
        for violation in report.violations:
            print(f"invalid: {violation}", file=sys.stderr)
        raise SystemExit(2)
    return spec


def cmd_validate(args: argparse.Namespace) -> int:
    spec = parse_task(Path(args.task).read_text())
    report = validate_task(spec)
    if report.valid:
        print(f"{spec.name}: valid")
        return 0
    for violation in report.violations:
        print(f"{spec.name}: {violation}")
    return 1


def cmd_compile(args: argparse.Namespace) -> int:
    spec = _load_spec(args.task)
    compiled = compile_task(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    wanted = ENCODINGS if args.encoding == "both" else (args.encoding,)
    for fname, text in sorted(compiled.file_texts().items()):
        if not any(f"-{enc}-" in fname for enc in wanted):
            continue
        (out / fname).write_text(text)
        print(out / fname)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    spec = _load_spec(args.task)
    stats = stats_for(spec, compile_task(spec))
    doc = {
        "task": spec.name,
        "observation_range": list(spec.observation_range),
        "initial_objects": stats.objects,
        "init_predicates_prop": stats.prop_predicates,
        "init_predicates_num": stats.num_predicates,
        "goal_predicates": stats.goal_predicates,
    }
    print(json.dumps(doc, indent=2))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    spec = _load_spec(args.task)
    world = build_initial_world(spec)
    limits = SearchLimits(max_states=args.max_states, max_depth=args.max_depth)
    result = bfs_solve(world, spec.goal, limits)
    if not result.solved:
        why = "limit hit" if result.limit_hit else "exhausted"
        print(f"no plan ({why}; expanded {result.expanded})", file=sys.stderr)
        return 1
    text = serialize_plan(result.plan)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(
        f"; solved {spec.name}: {len(result.plan)} steps, "
        f"{result.expanded} expanded",
        file=sys.stderr,
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    spec = _load_spec(args.task)
    world = build_initial_world(spec)
    plan = bind_plan(parse_plan(Path(args.plan).read_text()), world.types)
    result = Simulator(world, spec.goal).run_plan(plan)
    if result.failing_index is not None:
        print(
            f"step {result.failing_index}/{result.plan_length} rejected: "
            f"{result.failing_reason}"
        )
        return 1
    print(
        f"{result.plan_length} steps applied, goal "
        f"{'satisfied' if result.goal_satisfied else 'not satisfied'}"
    )
    return 0 if result.goal_satisfied else 1


def cmd_gen_suite(args: argparse.Namespace) -> int:
    manifest = generate_suite(args.out, seed=args.seed, scale=args.scale)
    print(manifest_table(manifest, "markdown"), end="")
    print(f"wrote {len(manifest.rows)} tasks under {args.out}", file=sys.stderr)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    adapters = dict(bench_mod.BUILTIN_ADAPTERS)
    if args.config:
        adapters.update(bench_mod.load_adapters(args.config))
    unknown = [name for name in args.planner if name not in adapters]
    if unknown:
        known = ", ".join(sorted(adapters))
        print(f"unknown planner {unknown[0]!r} (known: {known})", file=sys.stderr)
        return 2
    records = bench_mod.run_suite(
        [adapters[name] for name in args.planner],
        args.suite,
        timeout=args.timeout,
        repetitions=args.reps,
        workers=args.workers,
    )
    fmt = "csv" if args.out and args.out.endswith(".csv") else "markdown"
    report = bench_mod.emit_report(records, fmt)
    if args.out:
        Path(args.out).write_text(report)
        print(f"wrote {args.out} ({len(records)} records)", file=sys.stderr)
    else:
        print(report, end="")
    return 0


def cmd_scaling(args: argparse.Namespace) -> int:
    adapter = None
    if args.planner:
        adapters = dict(bench_mod.BUILTIN_ADAPTERS)
        if args.config:
            adapters.update(bench_mod.load_adapters(args.config))
        if args.planner not in adapters:
            print(f"unknown planner {args.planner!r}", file=sys.stderr)
            return 2
        adapter = adapters[args.planner]
    records = bench_mod.scaling_experiment(
        family=args.family,
        adapter=adapter,
        timeout=args.timeout,
        out_dir=args.out,
    )
    header = "range,side,objects,init_atoms,prop_bytes,num_bytes,outcome,total_s"
    print(header)
    for r in records:
        outcome = r.bench.outcome if r.bench else ""
        total = f"{r.bench.total_seconds:.2f}" if r.bench else ""
        print(
            "{}x{}x{},{},{},{},{},{},{},{}".format(
                *r.observation_range,
                r.side,
                r.objects,
                r.init_atoms,
                r.prop_problem_bytes,
                r.num_problem_bytes,
                outcome,
                total,
            )
        )
    if len(records) >= 2:
        exponent = bench_mod.fit_scaling_exponent(records)
        print(f"prop problem bytes ~ side^{exponent:.2f}", file=sys.stderr)
    return 0


def cmd_play(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    task_yaml = Path(args.task).read_text() if args.task else None
    if task_yaml is not None:
        _load_spec(args.task)
    app = create_app(default_task_yaml=task_yaml, ui_dir=args.ui)
    print(f"listening on http://{args.host}:{args.port}", flush=True)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _kernel_worlds() -> list:
    worlds = []
    for family in ("move", "climb", "build_wall"):
        task = build_task(family, "easy")
        world = build_initial_world(task.spec)
        worlds.append(world)
        sim = Simulator(world, task.spec.goal)
        for action in task.witness[: len(task.witness) // 2]:
            stepped = world.clone()
            sim.step(stepped, action)
            world = stepped
        worlds.append(world)
    return worlds


def cmd_kernel_bench(args: argparse.Namespace) -> int:
    worlds = _kernel_worlds()
    modes = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    out = np.empty((4, kernels.N_FLAGS), dtype=np.int32)
    results: dict[str, tuple[float, list[np.ndarray]]] = {}
    for mode in modes:
        os.environ[kernels.ENV_VAR] = mode
        for world in worlds:
            kernels.applicability_flags(world, out)  # warm the JIT cache
        start = time.perf_counter()
        for _ in range(args.iterations):
            for world in worlds:
                kernels.applicability_flags(world, out)
        elapsed = time.perf_counter() - start
        flags = [kernels.applicability_flags(world).copy() for world in worlds]
        results[mode] = (elapsed, flags)
    os.environ.pop(kernels.ENV_VAR, None)

    calls = args.iterations * len(worlds)
    base = results["numpy"][0]
    for mode in modes:
        elapsed = results[mode][0]
        print(
            f"{mode:6s} {elapsed:8.3f} s total  {1e6 * elapsed / calls:8.2f} us/call"
            + (f"  {base / elapsed:5.1f}x" if mode != "numpy" else "")
        )
    if not kernels.HAVE_NUMBA:
        print("numba not importable; numpy path only")
        return 0
    for a, b in zip(results["numpy"][1], results["numba"][1]):
        if not np.array_equal(a, b):
            print("MISMATCH between numpy and numba flag matrices", file=sys.stderr)
            return 1
    print(f"backends agree on {len(worlds)} worlds")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="voxelplan", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a task file against the schema rules")
    p.add_argument("task")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("compile", help="emit PDDL domain/problem files for a task")
    p.add_argument("task")
    p.add_argument("--out", default=".")
    p.add_argument("--encoding", choices=(*ENCODINGS, "both"), default="both")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("stats", help="print object/predicate/goal counts as JSON")
    p.add_argument("task")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("solve", help="breadth-first oracle; writes a canonical .plan")
    p.add_argument("task")
    p.add_argument("--out", default=None, help="plan file (default: stdout)")
    p.add_argument("--max-states", type=int, default=2_000_000)
    p.add_argument("--max-depth", type=int, default=None)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("simulate", help="replay a plan file and check the goal")
    p.add_argument("task")
    p.add_argument("plan")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("gen-suite", help="regenerate the task suite and manifest")
    p.add_argument("--out", default="suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", choices=SCALES, default="desk")
    p.set_defaults(fn=cmd_gen_suite)

    p = sub.add_parser("bench", help="run external planners over a suite directory")
    p.add_argument("--suite", required=True)
    p.add_argument("--planner", action="append", required=True, help="repeatable")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--config", default=None, help="TOML/JSON adapter definitions")
    p.add_argument("--out", default=None, help=".md or .csv report path")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("scaling", help="grow one family's observation range and measure")
    p.add_argument("--family", choices=FAMILIES, default="move")
    p.add_argument("--planner", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--out", default=None, help="directory for staged PDDL files")
    p.set_defaults(fn=cmd_scaling)

    p = sub.add_parser("play", help="serve the interactive session API")
    p.add_argument("--task", default=None, help="default task file for new sessions")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui", default=None, help="static directory mounted at /ui")
    p.set_defaults(fn=cmd_play)

    p = sub.add_parser("kernel-bench", help="time the applicability kernel backends")
    p.add_argument("--iterations", type=int, default=2000)
    p.set_defaults(fn=cmd_kernel_bench)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except VoxelplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
