"""Concrete voxel world: dense block/item grids, agent pose, inventory, stats."""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .blocktypes import DEFAULT_REGISTRY, BlockTypeRegistry, TypeTable, build_type_table
from .errors import BuildError
from .geometry import Position, WorldBounds
from .task import GoalSpec, TaskSpec, compute_bounds

GROUND_TYPE = "grass_block"
MAX_STACK = 64


@dataclass(frozen=True)
class CellContent:
    kind: str  # empty | block | item
    type: str | None = None
    count: int | None = None


EMPTY_CELL = CellContent("empty")


@dataclass(frozen=True)
class TaskStats:
    initial_objects: int
    init_predicates_prop: int
    init_predicates_num: int
    goal_predicates: int


class WorldState:
    """A mutable-by-simulator value type over dense int16 grids.

    blocks/items hold 1-based type ids (0 = empty); item_counts holds stack
    sizes. Grids are indexed [ix, iy, iz] with ix = x - bounds.min.x etc.
    """

    __slots__ = (
        "bounds",
        "types",
        "blocks",
        "items",
        "item_counts",
        "agent",
        "alive",
        "inventory",
        "spec_objects",
    )

    def __init__(
        self,
        bounds: WorldBounds,
        types: TypeTable,
        blocks: np.ndarray,
        items: np.ndarray,
        item_counts: np.ndarray,
        agent: Position,
        alive: bool,
        inventory: np.ndarray,
        spec_objects: int,
    ):
        self.bounds = bounds
        self.types = types
        self.blocks = blocks
        self.items = items
        self.item_counts = item_counts
        self.agent = agent
        self.alive = alive
        self.inventory = inventory
        self.spec_objects = spec_objects

    # -- indexing ---------------------------------------------------------

    def index_of(self, pos: Position) -> tuple[int, int, int]:
        b = self.bounds.min
        return (pos.x - b.x, pos.y - b.y, pos.z - b.z)

    def position_of(self, ix: int, iy: int, iz: int) -> Position:
        b = self.bounds.min
        return Position(ix + b.x, iy + b.y, iz + b.z)

    def in_bounds(self, pos: Position) -> bool:
        return self.bounds.contains(pos)

    # -- cell access ------------------------------------------------------

    def block_id_at(self, pos: Position) -> int:
        if not self.in_bounds(pos):
            return 0
        return int(self.blocks[self.index_of(pos)])

    def block_at(self, pos: Position) -> str | None:
        tid = self.block_id_at(pos)
        return self.types.name_of(tid) if tid else None

    def item_at(self, pos: Position) -> tuple[str, int] | None:
        if not self.in_bounds(pos):
            return None
        idx = self.index_of(pos)
        tid = int(self.items[idx])
        if not tid:
            return None
        return self.types.name_of(tid), int(self.item_counts[idx])

    def inventory_count(self, type_name: str) -> int:
        return int(self.inventory[self.types.type_id(type_name)])

    def inventory_map(self) -> dict[str, int]:
        return {name: int(self.inventory[i + 1]) for i, name in enumerate(self.types.names)}

    # -- value semantics ---------------------------------------------------

    def clone(self) -> "WorldState":
        return WorldState(
            self.bounds,
            self.types,
            self.blocks.copy(),
            self.items.copy(),
            self.item_counts.copy(),
            self.agent,
            self.alive,
            self.inventory.copy(),
            self.spec_objects,
        )

    def canonical(self) -> tuple:
        """Hashable full-state identity (bounds and types fixed per task)."""
        return (
            self.agent,
            self.alive,
            self.inventory.tobytes(),
            self.blocks.tobytes(),
            self.items.tobytes(),
            self.item_counts.tobytes(),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WorldState):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def iter_blocks(self) -> list[tuple[Position, str]]:
        """Present blocks as (position, type), sorted by position."""
        out = []
        for ix, iy, iz in zip(*np.nonzero(self.blocks)):
            pos = self.position_of(int(ix), int(iy), int(iz))
            out.append((pos, self.types.name_of(int(self.blocks[ix, iy, iz]))))
        out.sort(key=lambda e: e[0])
        return out

    def iter_items(self) -> list[tuple[Position, str, int]]:
        out = []
        for ix, iy, iz in zip(*np.nonzero(self.items)):
            pos = self.position_of(int(ix), int(iy), int(iz))
            out.append(
                (
                    pos,
                    self.types.name_of(int(self.items[ix, iy, iz])),
                    int(self.item_counts[ix, iy, iz]),
                )
            )
        out.sort(key=lambda e: e[0])
        return out

    def digest(self) -> str:
        """Stable hex digest over sorted block/item/agent/inventory tuples."""
        h = hashlib.blake2b(digest_size=16)
        for pos, name in self.iter_blocks():
            h.update(struct.pack("<iii", *pos))
            h.update(name.encode())
        h.update(b"|items|")
        for pos, name, count in self.iter_items():
            h.update(struct.pack("<iiii", *pos, count))
            h.update(name.encode())
        h.update(b"|agent|")
        h.update(struct.pack("<iii?", *self.agent, self.alive))
        h.update(self.inventory.tobytes())
        return h.hexdigest()

    def to_snapshot(self) -> dict:
        """Canonical JSON-able snapshot consumed by the play UI and harness."""
        return {
            "bounds": {
                "min": {"x": self.bounds.min.x, "y": self.bounds.min.y, "z": self.bounds.min.z},
                "max": {"x": self.bounds.max.x, "y": self.bounds.max.y, "z": self.bounds.max.z},
            },
            "agent": {"x": self.agent.x, "y": self.agent.y, "z": self.agent.z, "alive": self.alive},
            "inventory": self.inventory_map(),
            "blocks": [
                {"x": p.x, "y": p.y, "z": p.z, "type": t} for p, t in self.iter_blocks()
            ],
            "items": [
                {"x": p.x, "y": p.y, "z": p.z, "type": t, "count": c}
                for p, t, c in self.iter_items()
            ],
        }

    # -- aggregates --------------------------------------------------------

    def type_totals(self) -> dict[str, int]:
        """Per type: present block units + world item units + inventory units."""
        totals = {}
        for i, name in enumerate(self.types.names):
            tid = i + 1
            blocks = int(np.count_nonzero(self.blocks == tid))
            items = int(self.item_counts[self.items == tid].sum())
            totals[name] = blocks + items + int(self.inventory[tid])
        return totals

    def placeable_units(self, type_name: str) -> int:
        """Units of a type currently held or lying around (potential blocks)."""
        tid = self.types.type_id(type_name)
        return int(self.inventory[tid]) + int(self.item_counts[self.items == tid].sum())


def type_table_for(spec: TaskSpec, registry: BlockTypeRegistry = DEFAULT_REGISTRY) -> TypeTable:
    """The fixed type universe a task works with (world, inventory, goal)."""
    bounds = compute_bounds(spec)
    block_names: set[str] = set()
    if bounds.min.y <= spec.ground_y <= bounds.max.y:
        block_names.add(GROUND_TYPE)
    block_names.update(b.type for b in spec.blocks)
    block_names.update(b.type for b in spec.goal.blocks)
    item_names = {i.type for i in spec.items}
    extra: set[str] = set()
    carried = {e.type for e in spec.inventory} | {e.type for e in spec.goal.inventory}
    for name in carried | item_names:
        if registry.known(name) and registry.info(name).placeable:
            block_names.add(name)
        else:
            extra.add(name)
    return build_type_table(block_names, item_names, extra - item_names, registry)


def build_initial_world(spec: TaskSpec, registry: BlockTypeRegistry = DEFAULT_REGISTRY) -> WorldState:
    """Materialize a validated TaskSpec: ground layer, blocks, items, agent."""
    bounds = compute_bounds(spec)
    types = type_table_for(spec, registry)
    ex, ey, ez = bounds.extents
    blocks = np.zeros((ex, ey, ez), dtype=np.int16)
    items = np.zeros((ex, ey, ez), dtype=np.int16)
    item_counts = np.zeros((ex, ey, ez), dtype=np.int16)

    if bounds.min.y <= spec.ground_y <= bounds.max.y:
        blocks[:, spec.ground_y - bounds.min.y, :] = types.type_id(GROUND_TYPE)

    for block in spec.blocks:
        if not bounds.contains(block.position):
            raise BuildError(f"block at {block.position} outside bounds")
        ix, iy, iz = (
            block.position.x - bounds.min.x,
            block.position.y - bounds.min.y,
            block.position.z - bounds.min.z,
        )
        if blocks[ix, iy, iz] and block.position.y != spec.ground_y:
            raise BuildError(f"duplicate block at {block.position}")
        blocks[ix, iy, iz] = types.type_id(block.type)

    for item in spec.items:
        if not bounds.contains(item.position):
            raise BuildError(f"item at {item.position} outside bounds")
        ix, iy, iz = (
            item.position.x - bounds.min.x,
            item.position.y - bounds.min.y,
            item.position.z - bounds.min.z,
        )
        if blocks[ix, iy, iz]:
            raise BuildError(f"item at {item.position} coincides with a block")
        if items[ix, iy, iz]:
            raise BuildError(f"duplicate item at {item.position}")
        items[ix, iy, iz] = types.type_id(item.type)
        item_counts[ix, iy, iz] = item.quantity

    inventory = np.zeros(len(types) + 1, dtype=np.int16)
    for entry in spec.inventory:
        tid = types.type_id(entry.type)
        total = int(inventory[tid]) + entry.quantity
        if total > MAX_STACK:
            raise BuildError(f"inventory for {entry.type} exceeds {MAX_STACK}")
        inventory[tid] = total

    world = WorldState(
        bounds=bounds,
        types=types,
        blocks=blocks,
        items=items,
        item_counts=item_counts,
        agent=spec.agent_start,
        alive=True,
        inventory=inventory,
        spec_objects=len(spec.blocks) + len(spec.items),
    )

    feet, head = spec.agent_start, spec.agent_start.offset(dy=1)
    if not (bounds.contains(feet) and bounds.contains(head)):
        raise BuildError("agent start outside bounds")
    if world.block_id_at(feet) or world.block_id_at(head):
        raise BuildError("agent start cell occupied by a block")
    if not world.block_id_at(feet.offset(dy=-1)):
        raise BuildError("agent start unsupported (no block below)")
    return world


def query(world: WorldState, pos: Position) -> CellContent:
    """Cell content; positions outside bounds report empty."""
    block = world.block_at(pos)
    if block is not None:
        return CellContent("block", block)
    item = world.item_at(pos)
    if item is not None:
        return CellContent("item", item[0], item[1])
    return EMPTY_CELL


def position_pool_size(bounds: WorldBounds) -> int:
    """Number of position objects the propositional encoding declares."""
    return max(bounds.extents)


def world_stats(world: WorldState, goal: GoalSpec) -> TaskStats:
    """Table-style statistics, computed from first principles (not the printer)."""
    n_types = len(world.types)
    n_blocks = len(world.iter_blocks())
    n_items = len(world.iter_items())
    reserves = sum(world.placeable_units(t) for t in world.types.block_types)

    # numeric: agent alive + xyz + one counter per type; blocks: present + xyz;
    # reserves: xyz only; items: present + xyz + stack count.
    init_num = (4 + n_types) + 4 * n_blocks + 3 * reserves + 5 * n_items

    # propositional: agent alive + at-* + one has-n fact per type; per present
    # block/item: presence + at-*; successor chains for positions and counts;
    # count-geq facts per goal inventory threshold.
    pool = position_pool_size(world.bounds)
    geq_facts = sum(MAX_STACK + 1 - e.quantity for e in goal.inventory)
    init_prop = (4 + n_types) + 4 * n_blocks + 4 * n_items + (pool - 1) + MAX_STACK + geq_facts

    return TaskStats(
        initial_objects=world.spec_objects,
        init_predicates_prop=init_prop,
        init_predicates_num=init_num,
        goal_predicates=goal.conjunct_count(),
    )
