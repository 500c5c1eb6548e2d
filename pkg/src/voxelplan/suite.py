"""Task suite generation: fifteen task families at three difficulty levels.

Every family ships a hand-designed layout with a witness plan. Generation
replays the witness on the built world, so a task is only ever written to
disk if it is provably solvable. Easy variants carry no distractions and
are additionally solved with the breadth-first oracle to record an optimal
plan length; medium variants add scattered obstacle blocks and hard
variants add a dense irrelevant structure on top. Clutter is sampled from
a task-local rng, so regeneration with the same seed is byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, replace
from pathlib import Path

from .actions import Action, parse_action_name
from .codegen import NUMERIC, PROP, CompiledTask, compile_task
from .errors import GenError
from .geometry import Position, WorldBounds
from .pddl import state_from_problem
from .search import SearchLimits, bfs_solve
from .simulator import Simulator
from .task import (
    BlockSpec,
    GoalSpec,
    InventoryEntry,
    ItemSpec,
    TaskSpec,
    compute_bounds,
    serialize_task,
    validate_task,
)
from .world import build_initial_world

FAMILIES = (
    "move",
    "pickup_diamond",
    "gather_wood",
    "place_wood",
    "pickup_and_place",
    "gather_multi_wood",
    "climb",
    "cut_tree",
    "build_bridge",
    "build_cross",
    "build_wall",
    "build_well",
    "build_shape",
    "collect_and_build_shape",
    "build_cabin",
)
VARIANTS = ("easy", "medium", "hard")
SCALES = ("desk", "full")

CLUTTER_TYPE = "stone"
_SCATTER_COUNT = {"easy": 0, "medium": 12, "hard": 45}
_STRUCTURE_SIZE = (5, 3)  # hard variants: stone wall, cells wide x cells tall

_DEFAULT_EASY = (13, 9, 13)
_EASY_OVERRIDES = {"cut_tree": (21, 31, 21), "build_cabin": (21, 11, 21)}
_DESK_RANGE = {"medium": (15, 11, 15), "hard": (21, 15, 21)}
_FULL_RANGE = {"medium": (21, 15, 21), "hard": (71, 31, 71)}
_FULL_OVERRIDES = {
    ("cut_tree", "medium"): (41, 31, 41),
    ("cut_tree", "hard"): (65, 31, 65),
    ("build_cabin", "medium"): (41, 11, 41),
    ("build_cabin", "hard"): (65, 11, 65),
}

_ORACLE_LIMITS = SearchLimits(max_states=2_000_000, max_depth=16)


def observation_range(family: str, variant: str, scale: str) -> tuple[int, int, int]:
    """Easy ranges are shared; medium and hard shrink at desk scale."""
    if variant == "easy":
        return _EASY_OVERRIDES.get(family, _DEFAULT_EASY)
    if scale == "desk":
        return _DESK_RANGE[variant]
    return _FULL_OVERRIDES.get((family, variant), _FULL_RANGE[variant])


@dataclass(frozen=True)
class TaskStats:
    """Size figures for one compiled task."""

    objects: int
    prop_predicates: int
    num_predicates: int
    goal_predicates: int


@dataclass(frozen=True)
class ManifestRow:
    family: str
    variant: str
    observation_range: tuple[int, int, int]
    stats: TaskStats
    oracle_length: int | None


@dataclass(frozen=True)
class SuiteManifest:
    seed: int
    scale: str
    rows: tuple[ManifestRow, ...]


@dataclass(frozen=True)
class Layout:
    """One task's hand-designed content, before clutter."""

    goal: GoalSpec
    witness: tuple[str, ...]
    blocks: tuple[BlockSpec, ...] = ()
    items: tuple[ItemSpec, ...] = ()
    inventory: tuple[InventoryEntry, ...] = ()
    ground_y: int = 3
    blocked_rows: tuple[int, ...] = ()  # z rows where clutter has no footing


@dataclass(frozen=True)
class GeneratedTask:
    family: str
    variant: str
    spec: TaskSpec
    compiled: CompiledTask
    witness: tuple[Action, ...]
    oracle_plan: tuple[Action, ...] | None


def _p(x: int, y: int, z: int) -> Position:
    return Position(x, y, z)


def _blocks(type_name: str, cells) -> tuple[BlockSpec, ...]:
    return tuple(BlockSpec(c, type_name) for c in cells)


def _leg(direction: str, count: int, pickup: str | None = None) -> list[str]:
    """A straight run of moves; a pickup fuses into the final step."""
    steps = [f"move-{direction}"] * count
    if pickup is not None and steps:
        steps[-1] = f"move_and_pickup-{pickup}-{direction}"
    return steps


def _ring(center: Position) -> list[Position]:
    """The eight cells around a center at the same height."""
    return [
        center.offset(dx=dx, dz=dz)
        for dz in (-1, 0, 1)
        for dx in (-1, 0, 1)
        if (dx, dz) != (0, 0)
    ]


def _box(x0: int, x1: int, y0: int, y1: int, z0: int, z1: int) -> list[Position]:
    return [
        _p(x, y, z)
        for z in range(z0, z1 + 1)
        for y in range(y0, y1 + 1)
        for x in range(x0, x1 + 1)
    ]


def _move_family(variant: str, bounds: WorldBounds) -> Layout:
    goal_cell = {"easy": _p(0, 4, -5), "medium": _p(4, 4, -7), "hard": _p(10, 4, -10)}[variant]
    witness = _leg("east", goal_cell.x) + _leg("north", -goal_cell.z)
    return Layout(goal=GoalSpec(agent_at=goal_cell), witness=tuple(witness))


def _fetch_item(variant: str, spots, item_type: str) -> Layout:
    """Shared shape of the single-item pickup families."""
    cell = spots[variant]
    witness = _leg("east", cell.x) + _leg("north", -cell.z, pickup=item_type)
    return Layout(
        goal=GoalSpec(inventory=(InventoryEntry(item_type, 1),)),
        witness=tuple(witness),
        items=(ItemSpec(cell, item_type, 1),),
    )


def _pickup_diamond(variant: str, bounds: WorldBounds) -> Layout:
    spots = {"easy": _p(0, 4, -6), "medium": _p(2, 4, -5), "hard": _p(8, 4, -9)}
    return _fetch_item(variant, spots, "diamond")


def _gather_wood(variant: str, bounds: WorldBounds) -> Layout:
    spots = {"easy": _p(0, 4, -3), "medium": _p(0, 4, -4), "hard": _p(1, 4, -4)}
    return _fetch_item(variant, spots, "log")


def _place_wood(variant: str, bounds: WorldBounds) -> Layout:
    target = {"easy": _p(0, 4, -3), "medium": _p(3, 4, -7), "hard": _p(8, 4, -10)}[variant]
    stand = target.offset(dz=1)
    witness = _leg("east", stand.x) + _leg("north", -stand.z) + ["place-log-north"]
    return Layout(
        goal=GoalSpec(agent_at=stand, blocks=(BlockSpec(target, "log"),)),
        witness=tuple(witness),
        inventory=(InventoryEntry("log", 1),),
    )


def _pickup_and_place(variant: str, bounds: WorldBounds) -> Layout:
    item_cell, target = {
        "easy": (_p(1, 4, 0), _p(1, 4, -2)),
        "medium": (_p(2, 4, 0), _p(0, 4, -5)),
        "hard": (_p(4, 4, 0), _p(0, 4, -10)),
    }[variant]
    witness = _leg("east", item_cell.x, pickup="planks")
    witness += _leg("west", item_cell.x - target.x)
    witness += _leg("north", -target.z - 1) + ["place-planks-north"]
    return Layout(
        goal=GoalSpec(blocks=(BlockSpec(target, "planks"),)),
        witness=tuple(witness),
        items=(ItemSpec(item_cell, "planks", 1),),
    )


def _gather_multi_wood(variant: str, bounds: WorldBounds) -> Layout:
    cells = {
        "easy": (_p(0, 4, -2), _p(0, 4, -4), _p(1, 4, -4)),
        "medium": (_p(0, 4, -3), _p(3, 4, -3), _p(3, 4, -7)),
        "hard": (_p(2, 4, -2), _p(6, 4, -6), _p(10, 4, -10)),
    }[variant]
    witness: list[str] = []
    at = _p(0, 4, 0)
    for cell in cells:
        seg = _leg("east", cell.x - at.x) + _leg("north", at.z - cell.z)
        seg[-1] = seg[-1].replace("move-", "move_and_pickup-log-", 1)
        witness += seg
        at = cell
    return Layout(
        goal=GoalSpec(inventory=(InventoryEntry("log", 3),)),
        witness=tuple(witness),
        items=tuple(ItemSpec(c, "log", 1) for c in cells),
    )


def _climb(variant: str, bounds: WorldBounds) -> Layout:
    approach, steps = {"easy": (2, 2), "medium": (3, 3), "hard": (4, 5)}[variant]
    cells: list[Position] = []
    for i in range(1, steps + 1):
        cells += [_p(0, 4 + h, -(approach + i)) for h in range(i)]
    target_z = -(approach + steps + 1)
    cells += [_p(0, 4 + h, target_z) for h in range(steps)]
    goal_cell = _p(0, 4 + steps, target_z)
    witness = _leg("north", approach) + ["jumpup-north"] * steps + ["place-cobblestone-north"]
    return Layout(
        goal=GoalSpec(blocks=(BlockSpec(goal_cell, "cobblestone"),)),
        witness=tuple(witness),
        blocks=_blocks("cobblestone", cells),
        inventory=(InventoryEntry("cobblestone", 1),),
    )


def _cut_tree(variant: str, bounds: WorldBounds) -> Layout:
    tz = {"easy": -2, "medium": -7, "hard": -9}[variant]
    trunk = _blocks("log", [_p(0, 4, tz), _p(0, 5, tz)])
    step = _blocks("cobblestone", [_p(0, 4, tz + 1)])
    canopy = _blocks("leaves", [_p(0, 6, tz), _p(1, 6, tz), _p(-1, 6, tz), _p(0, 7, tz)])
    witness = _leg("north", -(tz + 2)) + [
        "jumpup-north",
        "break-log-north",
        "jumpdown-south",
        "break-cobblestone-north",
        "move-north",
        "break-log-north",
    ]
    return Layout(
        goal=GoalSpec(inventory=(InventoryEntry("log", 2),)),
        witness=tuple(witness),
        blocks=trunk + step + canopy,
    )


def _build_bridge(variant: str, bounds: WorldBounds) -> Layout:
    channel, deck_columns, missing = {
        "easy": ((-4, -3), (0,), _p(0, 3, -3)),
        "medium": ((-5, -4), (0, 1), _p(1, 3, -4)),
        "hard": ((-7, -6, -5), (0, 2), _p(0, 3, -5)),
    }[variant]
    surface = [
        _p(x, 3, z)
        for z in range(bounds.min.z, bounds.max.z + 1)
        if z not in channel
        for x in range(bounds.min.x, bounds.max.x + 1)
    ]
    deck = [_p(x, 3, z) for x in deck_columns for z in channel]
    goal = GoalSpec(blocks=_blocks("log", deck))
    placed = [c for c in deck if c != missing]
    stand_x = missing.x + 1
    witness = (
        _leg("east", stand_x)
        + _leg("north", -(max(channel) + 1))
        + ["jumpdown-north", "place-log-west"]
    )
    return Layout(
        goal=goal,
        witness=tuple(witness),
        blocks=_blocks("grass_block", surface) + _blocks("log", placed),
        inventory=(InventoryEntry("log", 1),),
        ground_y=2,
        blocked_rows=channel,
    )


def _collect_then_place(
    shape_cells,
    missing: Position,
    shape_type: str,
    source: Position | None,
) -> tuple[tuple[BlockSpec, ...], list[str]]:
    """Pre-place all but one shape cell; fetch the last block if sourced."""
    placed = [c for c in shape_cells if c != missing]
    blocks = _blocks(shape_type, placed)
    witness: list[str] = []
    if source is not None:
        blocks += _blocks(shape_type, [source])
        witness += _leg("west", -source.x - 1) + [f"break-{shape_type}-west"]
        witness += _leg("east", missing.x - source.x - 1)
    else:
        witness += _leg("east", missing.x)
    witness += _leg("north", -missing.z - 1) + [f"place-{shape_type}-north"]
    return blocks, witness


def _build_cross(variant: str, bounds: WorldBounds) -> Layout:
    center = {"easy": _p(0, 4, -4), "medium": _p(2, 4, -5), "hard": _p(6, 4, -8)}[variant]
    cells = [
        center,
        center.offset(dz=1),
        center.offset(dz=-1),
        center.offset(dx=1),
        center.offset(dx=-1),
    ]
    missing = center.offset(dz=1)
    if variant == "easy":
        blocks = _blocks("planks", [c for c in cells if c != missing] + [_p(1, 4, 0)])
        witness = ["break-planks-east"] + _leg("north", -missing.z - 1) + ["place-planks-north"]
    else:
        source = {"medium": _p(-2, 4, 0), "hard": _p(-3, 4, 0)}[variant]
        blocks, witness = _collect_then_place(cells, missing, "planks", source)
    return Layout(goal=GoalSpec(blocks=_blocks("planks", cells)), witness=tuple(witness), blocks=blocks)


def _build_wall(variant: str, bounds: WorldBounds) -> Layout:
    x0, z = {"easy": (-1, -3), "medium": (1, -6), "hard": (2, -9)}[variant]
    cells = _box(x0, x0 + 2, 4, 6, z, z)
    missing = _p(x0 + 1, 4, z)
    if variant == "easy":
        blocks = _blocks("cobblestone", [c for c in cells if c != missing] + [_p(1, 4, 0)])
        witness = ["break-cobblestone-east"] + _leg("north", -z - 1) + ["place-cobblestone-north"]
    else:
        source = {"medium": _p(-2, 4, 0), "hard": _p(-4, 4, 0)}[variant]
        blocks, witness = _collect_then_place(cells, missing, "cobblestone", source)
    return Layout(
        goal=GoalSpec(blocks=_blocks("cobblestone", cells)), witness=tuple(witness), blocks=blocks
    )


def _build_well(variant: str, bounds: WorldBounds) -> Layout:
    center = {"easy": _p(0, 4, -3), "medium": _p(2, 4, -5), "hard": _p(5, 4, -8)}[variant]
    cells = _ring(center)
    near = center.offset(dz=1)
    missing = (near, _p(near.x - 1, 4, near.z))
    placed = [c for c in cells if c not in missing]
    witness = (
        _leg("east", near.x)
        + _leg("north", -near.z - 1)
        + ["place-cobblestone-north", "move-west", "place-cobblestone-north"]
    )
    return Layout(
        goal=GoalSpec(blocks=_blocks("cobblestone", cells)),
        witness=tuple(witness),
        blocks=_blocks("cobblestone", placed),
        inventory=(InventoryEntry("cobblestone", 2),),
    )


def _shape_cells(variant: str) -> tuple[list[Position], Position]:
    if variant == "easy":
        cells = [_p(x, 4, -3) for x in range(-2, 3)]
        return cells, _p(0, 4, -3)
    if variant == "medium":
        return _box(2, 4, 4, 4, -6, -4), _p(3, 4, -4)
    return _box(4, 6, 4, 6, -8, -6), _p(5, 4, -6)


def _build_shape(variant: str, bounds: WorldBounds) -> Layout:
    cells, missing = _shape_cells(variant)
    placed = [c for c in cells if c != missing]
    witness = _leg("east", missing.x) + _leg("north", -missing.z - 1) + ["place-planks-north"]
    return Layout(
        goal=GoalSpec(blocks=_blocks("planks", cells)),
        witness=tuple(witness),
        blocks=_blocks("planks", placed),
        inventory=(InventoryEntry("planks", 1),),
    )


def _collect_and_build_shape(variant: str, bounds: WorldBounds) -> Layout:
    cells, missing = _shape_cells(variant)
    if variant == "easy":
        cells = [c.offset(dz=-1) for c in cells]
        missing = missing.offset(dz=-1)
        blocks = _blocks("planks", [c for c in cells if c != missing] + [_p(1, 4, 0)])
        witness = ["break-planks-east"] + _leg("north", -missing.z - 1) + ["place-planks-north"]
    elif variant == "medium":
        cells = cells + [_p(-2, 4, -5), _p(-2, 4, -4)]
        blocks, witness = _collect_then_place(cells, missing, "planks", _p(-2, 4, 0))
    else:
        blocks, witness = _collect_then_place(cells, missing, "planks", _p(-3, 4, 0))
    return Layout(goal=GoalSpec(blocks=_blocks("planks", cells)), witness=tuple(witness), blocks=blocks)


def _build_cabin(variant: str, bounds: WorldBounds) -> Layout:
    cz = {"easy": -5, "medium": -4, "hard": -5}[variant]
    x0, x1, z0, z1 = -3, 3, cz - 3, cz + 3
    door = {_p(0, 4, z1), _p(0, 5, z1)}
    windows = {_p(-2, 5, z1), _p(2, 5, z1), _p(x0, 5, cz)}
    walls = [
        _p(x, y, z)
        for z in range(z0, z1 + 1)
        for y in (4, 5, 6)
        for x in range(x0, x1 + 1)
        if (x in (x0, x1) or z in (z0, z1)) and _p(x, y, z) not in door | windows
    ]
    roof = _box(x0, x1, 7, 7, z0, z1)
    cells = walls + roof
    missing = _p(1, 4, z1)
    placed = [c for c in cells if c != missing]
    witness = ["move-east"] + _leg("north", -z1 - 1) + ["place-log-north"]
    return Layout(
        goal=GoalSpec(blocks=_blocks("log", cells)),
        witness=tuple(witness),
        blocks=_blocks("log", placed),
        inventory=(InventoryEntry("log", 1),),
    )


_BUILDERS = {
    "move": _move_family,
    "pickup_diamond": _pickup_diamond,
    "gather_wood": _gather_wood,
    "place_wood": _place_wood,
    "pickup_and_place": _pickup_and_place,
    "gather_multi_wood": _gather_multi_wood,
    "climb": _climb,
    "cut_tree": _cut_tree,
    "build_bridge": _build_bridge,
    "build_cross": _build_cross,
    "build_wall": _build_wall,
    "build_well": _build_well,
    "build_shape": _build_shape,
    "collect_and_build_shape": _collect_and_build_shape,
    "build_cabin": _build_cabin,
}


def _witness_footprint(world, goal: GoalSpec, plan: tuple[Action, ...], label: str) -> set[Position]:
    """Cells the witness needs free, proven by replaying it."""
    sim = Simulator(world, goal)
    current = world.clone()
    cells = {current.agent, current.agent.offset(dy=1)}
    for i, action in enumerate(plan, start=1):
        if action.template.startswith("jumpup"):
            cells.add(current.agent.offset(dy=2))
        outcome = sim.step(current, action)
        if not outcome.ok:
            raise GenError(f"{label}: witness step {i} ({action.name}) rejected: {outcome.reason}")
        cells.add(current.agent)
        cells.add(current.agent.offset(dy=1))
    return cells


def _protected_cells(layout: Layout, footprint: set[Position]) -> set[Position]:
    protected = set(footprint)
    protected.update(i.position for i in layout.items)
    protected.update(b.position for b in layout.goal.blocks)
    if layout.goal.agent_at is not None:
        protected.add(layout.goal.agent_at)
        protected.add(layout.goal.agent_at.offset(dy=1))
    return protected


def _scatter(
    rng: random.Random,
    count: int,
    y: int,
    bounds: WorldBounds,
    layout: Layout,
    protected: set[Position],
    occupied: set[Position],
) -> list[Position]:
    out: list[Position] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 500 * max(count, 1):
            raise GenError("no room left for scattered clutter")
        x = rng.randrange(bounds.min.x, bounds.max.x + 1)
        z = rng.randrange(bounds.min.z, bounds.max.z + 1)
        cell = _p(x, y, z)
        if z in layout.blocked_rows or cell in protected or cell in occupied:
            continue
        occupied.add(cell)
        out.append(cell)
    return out


def _structure(
    y: int,
    bounds: WorldBounds,
    layout: Layout,
    protected: set[Position],
    occupied: set[Position],
) -> list[Position]:
    """A stone wall slab dropped in the first corner that has room."""
    width, height = _STRUCTURE_SIZE
    anchors = [
        (x, z)
        for z in (bounds.max.z - 2, bounds.min.z + 2)
        for x in range(bounds.min.x + 1, bounds.max.x - width)
    ]
    for ax, az in anchors:
        if az in layout.blocked_rows:
            continue
        cells = [_p(ax + i, y + j, az) for i in range(width) for j in range(height)]
        if any(c in protected or c in occupied for c in cells):
            continue
        occupied.update(cells)
        return cells
    raise GenError("no room left for the clutter structure")


def _with_clutter(
    spec: TaskSpec,
    layout: Layout,
    variant: str,
    rng: random.Random,
    protected: set[Position],
) -> TaskSpec:
    count = _SCATTER_COUNT[variant]
    if count == 0:
        return spec
    bounds = compute_bounds(spec)
    y = spec.agent_start.y  # obstructions sit at walking height
    occupied = {b.position for b in spec.blocks} | {i.position for i in spec.items}
    cells: list[Position] = []
    if variant == "hard":
        cells += _structure(y, bounds, layout, protected, occupied)
    cells += _scatter(rng, count, y, bounds, layout, protected, occupied)
    return replace(spec, blocks=spec.blocks + _blocks(CLUTTER_TYPE, cells))


def build_task(family: str, variant: str, scale: str = "desk", seed: int = 0) -> GeneratedTask:
    """Build, clutter, and prove one task; raises GenError on any failure."""
    if family not in _BUILDERS:
        raise GenError(f"unknown family {family!r}")
    if variant not in VARIANTS:
        raise GenError(f"unknown variant {variant!r}")
    if scale not in SCALES:
        raise GenError(f"unknown scale {scale!r}")
    label = f"{family}/{variant}"
    rng = random.Random(f"{seed}:{family}:{variant}")

    obs = observation_range(family, variant, scale)
    shell = TaskSpec(name=f"{family}-{variant}", observation_range=obs)
    layout = _BUILDERS[family](variant, compute_bounds(shell))
    spec = TaskSpec(
        name=f"{family}-{variant}",
        blocks=layout.blocks,
        items=layout.items,
        inventory=layout.inventory,
        goal=layout.goal,
        observation_range=obs,
        ground_y=layout.ground_y,
    )
    report = validate_task(spec)
    if not report.valid:
        raise GenError(f"{label}: {report.violations[0]}")

    witness = tuple(parse_action_name(name) for name in layout.witness)
    footprint = _witness_footprint(build_initial_world(spec), spec.goal, witness, label)
    spec = _with_clutter(spec, layout, variant, rng, _protected_cells(layout, footprint))

    report = validate_task(spec)
    if not report.valid:
        raise GenError(f"{label}: after clutter: {report.violations[0]}")
    world = build_initial_world(spec)
    outcome = Simulator(world, spec.goal).run_plan(list(witness))
    if not outcome.ok:
        raise GenError(
            f"{label}: cluttered witness failed at step {outcome.failing_index}: "
            f"{outcome.failing_reason or 'goal unsatisfied'}"
        )

    oracle_plan = None
    if variant == "easy":
        result = bfs_solve(world, spec.goal, _ORACLE_LIMITS)
        if not result.solved:
            raise GenError(f"{label}: oracle found no plan (limit {result.limit_hit})")
        if not Simulator(world, spec.goal).run_plan(result.plan).ok:
            raise GenError(f"{label}: oracle plan failed verification")
        oracle_plan = tuple(result.plan)

    return GeneratedTask(
        family=family,
        variant=variant,
        spec=spec,
        compiled=compile_task(spec),
        witness=witness,
        oracle_plan=oracle_plan,
    )


def stats_for(spec: TaskSpec, compiled: CompiledTask) -> TaskStats:
    counts = {}
    for enc in (PROP, NUMERIC):
        state = state_from_problem(compiled.problem(enc))
        counts[enc] = len(state.atoms) + len(state.fluents)
    return TaskStats(
        objects=len(spec.blocks) + len(spec.items),
        prop_predicates=counts[PROP],
        num_predicates=counts[NUMERIC],
        goal_predicates=spec.goal.conjunct_count(),
    )


def task_stats(task: GeneratedTask) -> TaskStats:
    return stats_for(task.spec, task.compiled)


def generate_suite(out_dir: str | Path, seed: int = 0, scale: str = "desk") -> SuiteManifest:
    """Write the 45-task suite under out_dir and return its manifest."""
    out = Path(out_dir)
    rows = []
    for family in FAMILIES:
        for variant in VARIANTS:
            task = build_task(family, variant, scale, seed)
            task_dir = out / family / variant
            task_dir.mkdir(parents=True, exist_ok=True)
            (task_dir / "task.yaml").write_text(serialize_task(task.spec))
            for fname, text in sorted(task.compiled.file_texts().items()):
                (task_dir / fname).write_text(text)
            rows.append(
                ManifestRow(
                    family=family,
                    variant=variant,
                    observation_range=task.spec.observation_range,
                    stats=task_stats(task),
                    oracle_length=None if task.oracle_plan is None else len(task.oracle_plan),
                )
            )
    manifest = SuiteManifest(seed=seed, scale=scale, rows=tuple(rows))
    (out / "manifest.json").write_text(manifest_json(manifest))
    (out / "manifest.md").write_text(manifest_table(manifest, "markdown"))
    (out / "manifest.csv").write_text(manifest_table(manifest, "csv"))
    return manifest


def manifest_json(manifest: SuiteManifest) -> str:
    doc = {
        "seed": manifest.seed,
        "scale": manifest.scale,
        "tasks": [
            {
                "family": r.family,
                "variant": r.variant,
                "observation_range": list(r.observation_range),
                "initial_objects": r.stats.objects,
                "prop_predicates": r.stats.prop_predicates,
                "num_predicates": r.stats.num_predicates,
                "goal_predicates": r.stats.goal_predicates,
                "oracle_plan_length": r.oracle_length,
            }
            for r in manifest.rows
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_manifest(path: str | Path) -> SuiteManifest:
    doc = json.loads(Path(path).read_text())
    rows = tuple(
        ManifestRow(
            family=t["family"],
            variant=t["variant"],
            observation_range=tuple(t["observation_range"]),
            stats=TaskStats(
                objects=t["initial_objects"],
                prop_predicates=t["prop_predicates"],
                num_predicates=t["num_predicates"],
                goal_predicates=t["goal_predicates"],
            ),
            oracle_length=t["oracle_plan_length"],
        )
        for t in doc["tasks"]
    )
    return SuiteManifest(seed=doc["seed"], scale=doc["scale"], rows=rows)


_COLUMNS = (
    "Task",
    "Variant",
    "Observation Range",
    "Initial Objects",
    "Initial Predicates",
    "Goal Pred.",
    "Oracle Sol. Length",
)


def _row_values(row: ManifestRow) -> tuple[str, ...]:
    rng = "({}, {}, {})".format(*row.observation_range)
    preds = f"{row.stats.prop_predicates}/{row.stats.num_predicates}"
    oracle = "-" if row.oracle_length is None else str(row.oracle_length)
    return (
        row.family,
        row.variant.capitalize(),
        rng,
        str(row.stats.objects),
        preds,
        str(row.stats.goal_predicates),
        oracle,
    )


def manifest_table(manifest: SuiteManifest, fmt: str = "markdown") -> str:
    """Render manifest rows as a markdown or csv table."""
    if fmt == "markdown":
        lines = [
            "| " + " | ".join(_COLUMNS) + " |",
            "|" + "|".join(" --- " for _ in _COLUMNS) + "|",
        ]
        lines += ["| " + " | ".join(_row_values(r)) + " |" for r in manifest.rows]
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for row in manifest.rows:
            writer.writerow(_row_values(row))
        return buf.getvalue()
    raise ValueError(f"unknown manifest format {fmt!r}")
