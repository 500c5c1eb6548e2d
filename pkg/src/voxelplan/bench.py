"""External-planner benchmark harness.

Runs planner subprocesses over a generated suite directory with hard
timeouts, extracts per-phase timings from their output, and verifies every
emitted plan against the simulator before an outcome may be reported as
solved. Also drives the observation-range scaling sweep that measures how
instance sizes grow with world side length.
"""

from __future__ import annotations

import json
import math
import os
import re
import resource
import shlex
import shutil
import signal
import statistics
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .codegen import NUMERIC, PROP, compile_task, slugify
from .errors import ConfigError, PlanParseError
from .pddl import state_from_problem
from .planio import parse_plan
from .simulator import Simulator
from .suite import build_task
from .task import TaskSpec, parse_task, validate_task
from .world import build_initial_world

SOLVED = "solved"
TIMEOUT = "timeout"
PREPROCESS_FAILURE = "preprocess-failure"
SEARCH_FAILURE = "search-failure"

DEFAULT_SCALING_STEPS = ((13, 9, 13), (17, 9, 17), (21, 9, 21), (25, 9, 25))


@dataclass(frozen=True)
class PlannerAdapter:
    """How to invoke one planner and read its output.

    The command is an argv template; every run must reference the domain,
    problem, and plan output paths. Phase regexes capture one float each;
    time_scale converts captured values to seconds.
    """

    name: str
    command: tuple[str, ...]
    encoding: str = NUMERIC
    preprocess_regex: str = ""
    search_regex: str = ""
    time_scale: float = 1.0

    def __post_init__(self) -> None:
        joined = " ".join(self.command)
        for placeholder in ("{domain}", "{problem}", "{plan_out}"):
            if placeholder not in joined:
                raise ConfigError(f"adapter {self.name!r} command lacks {placeholder}")
        if self.encoding not in (NUMERIC, PROP):
            raise ConfigError(f"adapter {self.name!r} has unknown encoding {self.encoding!r}")

    def executable(self) -> str:
        """Command head, honoring the VOXELPLAN_PLANNER_<NAME> override."""
        env_key = "VOXELPLAN_PLANNER_" + re.sub(r"[^A-Z0-9]+", "_", self.name.upper())
        return os.environ.get(env_key, self.command[0])


# Shipped adapters for the two planners the experiments run. Both resolve
# through launcher scripts on PATH and are exercised by stubs in the tests.
FAST_DOWNWARD = PlannerAdapter(
    name="fast-downward",
    command=(
        "fast-downward.py",
        "--alias",
        "lama-first",
        "--plan-file",
        "{plan_out}",
        "{domain}",
        "{problem}",
    ),
    encoding=PROP,
    preprocess_regex=r"Done!\s*\[([0-9.]+)s CPU",
    search_regex=r"Search time:\s*([0-9.]+)s",
)
ENHSP = PlannerAdapter(
    name="enhsp",
    command=("enhsp", "-o", "{domain}", "-f", "{problem}", "-sp", "{plan_out}"),
    encoding=NUMERIC,
    preprocess_regex=r"Grounding Time:\s*([0-9.]+)",
    search_regex=r"Planning Time \(msec\):\s*([0-9.]+)",
    time_scale=0.001,
)
BUILTIN_ADAPTERS = {a.name: a for a in (FAST_DOWNWARD, ENHSP)}


@dataclass(frozen=True)
class BenchRecord:
    """One planner invocation; solved always implies verified."""

    task: str
    planner: str
    rep: int
    outcome: str
    total_seconds: float
    preprocess_seconds: float | None = None
    search_seconds: float | None = None
    phases_extracted: bool = True
    plan_length: int | None = None
    verified: bool = False
    peak_memory_kb: int | None = None
    detail: str = ""


def load_adapters(path: str | Path) -> dict[str, PlannerAdapter]:
    """Adapter definitions from a TOML or JSON config file."""
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix == ".toml":
        doc = tomllib.loads(raw.decode())
    elif path.suffix == ".json":
        doc = json.loads(raw)
    else:
        raise ConfigError(f"adapter config must be .toml or .json, got {path.name}")
    adapters = {}
    for entry in doc.get("adapters", []):
        try:
            command = entry["command"]
            if isinstance(command, str):
                command = shlex.split(command)
            adapter = PlannerAdapter(
                name=entry["name"],
                command=tuple(command),
                encoding=entry.get("encoding", NUMERIC),
                preprocess_regex=entry.get("preprocess_regex", ""),
                search_regex=entry.get("search_regex", ""),
                time_scale=float(entry.get("time_scale", 1.0)),
            )
        except KeyError as exc:
            raise ConfigError(f"adapter entry missing key {exc}") from None
        adapters[adapter.name] = adapter
    return adapters


def _extract_phase(pattern: str, output: str, scale: float) -> float | None:
    if not pattern:
        return None
    match = re.search(pattern, output)
    if match is None:
        return None
    return float(match.group(1)) * scale


def _find_plan_file(plan_out: Path) -> Path | None:
    """The requested file, or the highest numbered variant a portfolio wrote."""

    def rank(path: Path) -> int:
        tail = path.name.rpartition(".")[2]
        return int(tail) if tail.isdigit() else -1

    numbered = sorted(plan_out.parent.glob(plan_out.name + ".*"), key=rank, reverse=True)
    for candidate in numbered + [plan_out]:
        if candidate.is_file():
            return candidate
    return None


def _task_for_problem(problem: Path) -> TaskSpec:
    sibling = problem.parent / "task.yaml"
    if not sibling.is_file():
        raise ConfigError(f"no task.yaml next to {problem} for plan verification")
    return parse_task(sibling.read_text())


def run_planner(
    adapter: PlannerAdapter,
    domain: str | Path,
    problem: str | Path,
    timeout: float,
    task: TaskSpec | None = None,
    rep: int = 1,
) -> BenchRecord:
    """One subprocess run: launch, hard-kill at budget, verify any plan."""
    domain = Path(domain).resolve()
    problem = Path(problem).resolve()
    if task is None:
        task = _task_for_problem(problem)
    executable = adapter.executable()
    if shutil.which(executable) is None and not Path(executable).is_file():
        raise ConfigError(f"planner executable {executable!r} not found")

    task_id = task.name
    with tempfile.TemporaryDirectory(prefix="bench-") as workdir:
        plan_out = Path(workdir) / "plan.out"
        argv = [executable] + [
            part.format(domain=domain, problem=problem, plan_out=plan_out)
            for part in adapter.command[1:]
        ]
        before_rss = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss
        start = time.monotonic()
        proc = subprocess.Popen(
            argv,
            cwd=workdir,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
            start_new_session=True,
        )
        try:
            output, _ = proc.communicate(timeout=timeout)
            timed_out = False
        except subprocess.TimeoutExpired:
            timed_out = True
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except ProcessLookupError:
                pass
            output, _ = proc.communicate()
        elapsed = time.monotonic() - start
        after_rss = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss
        peak = after_rss if after_rss > before_rss else None

        output = output or ""
        preprocess = _extract_phase(adapter.preprocess_regex, output, adapter.time_scale)
        search = _extract_phase(adapter.search_regex, output, adapter.time_scale)

        def record(outcome: str, **kwargs) -> BenchRecord:
            return BenchRecord(
                task=task_id,
                planner=adapter.name,
                rep=rep,
                outcome=outcome,
                total_seconds=elapsed,
                preprocess_seconds=preprocess,
                search_seconds=search,
                peak_memory_kb=peak,
                **kwargs,
            )

        if timed_out:
            return record(TIMEOUT, detail=f"killed at {timeout}s budget")

        plan_file = _find_plan_file(plan_out)
        if plan_file is None:
            # No plan: a completed preprocess phase makes this a search failure.
            outcome = SEARCH_FAILURE if preprocess is not None else PREPROCESS_FAILURE
            return record(outcome, detail=f"exit code {proc.returncode}, no plan file")

        try:
            plan = parse_plan(plan_file.read_text())
        except PlanParseError as exc:
            return record(SEARCH_FAILURE, detail=f"unparseable plan: {exc}")
        world = build_initial_world(task)
        result = Simulator(world, task.goal).run_plan(plan)
        if not result.ok:
            reason = result.failing_reason or "goal unsatisfied"
            return record(
                SEARCH_FAILURE,
                plan_length=len(plan),
                detail=f"plan failed verification: {reason}",
            )
        return record(
            SOLVED,
            plan_length=len(plan),
            verified=True,
            phases_extracted=preprocess is not None and search is not None,
        )


@dataclass(frozen=True)
class SuiteEntry:
    task_id: str
    directory: Path
    spec: TaskSpec

    def pddl_pair(self, encoding: str) -> tuple[Path, Path]:
        slug = slugify(self.spec.name)
        return (
            self.directory / f"{slug}-{encoding}-domain.pddl",
            self.directory / f"{slug}-{encoding}-problem.pddl",
        )


def discover_suite(suite_dir: str | Path) -> list[SuiteEntry]:
    """All task directories under a generated suite, in stable order."""
    root = Path(suite_dir)
    if not root.is_dir():
        raise ConfigError(f"suite directory {root} does not exist")
    entries = []
    for yaml_path in sorted(root.glob("*/*/task.yaml")):
        spec = parse_task(yaml_path.read_text())
        entries.append(SuiteEntry(task_id=spec.name, directory=yaml_path.parent, spec=spec))
    return entries


def run_suite(
    adapters: list[PlannerAdapter],
    suite_dir: str | Path,
    timeout: float,
    repetitions: int = 1,
    workers: int = 1,
) -> list[BenchRecord]:
    """Full sweep; per-run failures become records, never exceptions."""
    if repetitions < 1:
        raise ConfigError("repetitions must be at least 1")
    entries = discover_suite(suite_dir)
    jobs = [
        (entry, adapter, rep)
        for entry in entries
        for adapter in adapters
        for rep in range(1, repetitions + 1)
    ]

    def run_one(job) -> BenchRecord:
        entry, adapter, rep = job
        domain, problem = entry.pddl_pair(adapter.encoding)
        try:
            return run_planner(adapter, domain, problem, timeout, task=entry.spec, rep=rep)
        except (ConfigError, OSError) as exc:
            return BenchRecord(
                task=entry.task_id,
                planner=adapter.name,
                rep=rep,
                outcome=PREPROCESS_FAILURE,
                total_seconds=0.0,
                phases_extracted=False,
                detail=str(exc),
            )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        records = list(pool.map(run_one, jobs))
    return sorted(records, key=lambda r: (r.task, r.planner, r.rep))


@dataclass(frozen=True)
class ScalingRecord:
    observation_range: tuple[int, int, int]
    side: int
    objects: int  # declared objects in the propositional problem
    init_atoms: int
    prop_problem_bytes: int
    num_problem_bytes: int
    bench: BenchRecord | None = None


def scaling_experiment(
    family: str = "move",
    steps: tuple[tuple[int, int, int], ...] = DEFAULT_SCALING_STEPS,
    adapter: PlannerAdapter | None = None,
    timeout: float = 60.0,
    out_dir: str | Path | None = None,
) -> list[ScalingRecord]:
    """Regenerate one Easy task at growing ranges; stop when preprocess dies."""
    base = build_task(family, "easy").spec
    stage_root = Path(out_dir) if out_dir is not None else None
    if adapter is not None and stage_root is None:
        stage_root = Path(tempfile.mkdtemp(prefix="scaling-"))
    records: list[ScalingRecord] = []
    for step in steps:
        spec = replace(base, observation_range=step)
        report = validate_task(spec)
        if not report.valid:
            raise ConfigError(f"scaling step {step} invalid: {report.violations[0]}")
        compiled = compile_task(spec)
        texts = compiled.file_texts()
        slug = slugify(spec.name)
        state = state_from_problem(compiled.problem(PROP))
        bench = None
        if adapter is not None:
            stage = stage_root / "{}x{}x{}".format(*step)
            stage.mkdir(parents=True, exist_ok=True)
            for fname, text in texts.items():
                (stage / fname).write_text(text)
            domain, problem = (
                stage / f"{slug}-{adapter.encoding}-domain.pddl",
                stage / f"{slug}-{adapter.encoding}-problem.pddl",
            )
            bench = run_planner(adapter, domain, problem, timeout, task=spec)
        records.append(
            ScalingRecord(
                observation_range=step,
                side=step[0],
                objects=len(compiled.problem(PROP).objects),
                init_atoms=len(state.atoms) + len(state.fluents),
                prop_problem_bytes=len(texts[f"{slug}-prop-problem.pddl"].encode()),
                num_problem_bytes=len(texts[f"{slug}-numeric-problem.pddl"].encode()),
                bench=bench,
            )
        )
        if bench is not None and bench.outcome == PREPROCESS_FAILURE:
            break
    return records


def fit_scaling_exponent(records: list[ScalingRecord]) -> float:
    """Least-squares slope of ln(prop problem bytes) against ln(side)."""
    if len(records) < 2:
        raise ConfigError("need at least two scaling records to fit")
    xs = [math.log(r.side) for r in records]
    ys = [math.log(r.prop_problem_bytes) for r in records]
    mean_x = statistics.fmean(xs)
    mean_y = statistics.fmean(ys)
    num = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    den = sum((x - mean_x) ** 2 for x in xs)
    return num / den


@dataclass(frozen=True)
class _Cell:
    """Aggregated (task, planner) values for one phase column."""

    outcome: str
    values: tuple[float, ...] = ()

    def render(self) -> str:
        if self.outcome == PREPROCESS_FAILURE:
            return "---"
        if self.outcome == TIMEOUT:
            return ">budget"
        if self.outcome == SEARCH_FAILURE:
            return "fail"
        if not self.values:
            return "?"
        mean = statistics.fmean(self.values)
        if len(self.values) == 1:
            return f"{mean:.2f}"
        sd = statistics.stdev(self.values)
        return f"{mean:.2f}±{sd:.2f}"


def _aggregate(records: list[BenchRecord], phase: str) -> _Cell:
    outcomes = {r.outcome for r in records}
    if PREPROCESS_FAILURE in outcomes:
        return _Cell(PREPROCESS_FAILURE)
    if outcomes == {TIMEOUT}:
        return _Cell(TIMEOUT)
    solved = [r for r in records if r.outcome == SOLVED]
    if not solved:
        return _Cell(SEARCH_FAILURE)
    values = tuple(
        v for r in solved if (v := getattr(r, phase)) is not None
    )
    return _Cell(SOLVED, values)


_PHASES = (
    ("preprocess", "preprocess_seconds"),
    ("search", "search_seconds"),
    ("total", "total_seconds"),
)


def emit_report(records: list[BenchRecord], fmt: str = "markdown") -> str:
    """Per-task rows, per-planner phase columns, deterministic ordering."""
    tasks = sorted({r.task for r in records})
    planners = sorted({r.planner for r in records})
    grouped: dict[tuple[str, str], list[BenchRecord]] = {}
    for record in records:
        grouped.setdefault((record.task, record.planner), []).append(record)

    headers = ["Task"] + [f"{p} {label}" for p in planners for label, _ in _PHASES]
    rows = []
    for task in tasks:
        row = [task]
        for planner in planners:
            cell_records = grouped.get((task, planner), [])
            for _, attr in _PHASES:
                if not cell_records:
                    row.append("?")
                else:
                    row.append(_aggregate(cell_records, attr).render())
        rows.append(row)

    if fmt == "markdown":
        lines = [
            "| " + " | ".join(headers) + " |",
            "|" + "|".join(" --- " for _ in headers) + "|",
        ]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        out = [",".join(headers)]
        out += [",".join(row) for row in rows]
        return "\n".join(out) + "\n"
    raise ConfigError(f"unknown report format {fmt!r}")
