"""Task specification: YAML parsing, validation, bounds, canonical serialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .blocktypes import DEFAULT_REGISTRY, BlockTypeRegistry
from .errors import ConfigError, RangeError, SchemaError, TaskParseError
from .geometry import Position, WorldBounds

DEFAULT_OBSERVATION_RANGE = (13, 9, 13)
DEFAULT_AGENT_START = Position(0, 4, 0)
DEFAULT_GROUND_Y = 3

MAX_STACK = 64


@dataclass(frozen=True)
class BlockSpec:
    position: Position
    type: str


@dataclass(frozen=True)
class ItemSpec:
    position: Position
    type: str
    quantity: int


@dataclass(frozen=True)
class InventoryEntry:
    type: str
    quantity: int


@dataclass(frozen=True)
class GoalSpec:
    """Conjunctive goal: optional agent cell, typed block cells, inventory minima."""

    agent_at: Position | None = None
    blocks: tuple[BlockSpec, ...] = ()
    inventory: tuple[InventoryEntry, ...] = ()

    def is_empty(self) -> bool:
        return self.agent_at is None and not self.blocks and not self.inventory

    def conjunct_count(self) -> int:
        return (1 if self.agent_at is not None else 0) + len(self.blocks) + len(self.inventory)


@dataclass(frozen=True)
class TaskSpec:
    name: str
    blocks: tuple[BlockSpec, ...] = ()
    items: tuple[ItemSpec, ...] = ()
    inventory: tuple[InventoryEntry, ...] = ()
    goal: GoalSpec = field(default_factory=GoalSpec)
    observation_range: tuple[int, int, int] = DEFAULT_OBSERVATION_RANGE
    agent_start: Position = DEFAULT_AGENT_START
    ground_y: int = DEFAULT_GROUND_Y


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


_TOP_KEYS = {"name", "blocks", "items", "inventory", "goal", "extensions"}
_GOAL_KEYS = {"agent", "blocks", "inventory"}
_EXTENSION_KEYS = {"observation_range", "agent_start", "ground_y"}


def _as_int(value: object, what: str) -> int:
    """Coerce an int or a quoted numeral; anything else is a schema error."""
    if isinstance(value, bool):
        raise SchemaError(f"{what}: expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            raise SchemaError(f"{what}: expected an integer, got {value!r}") from None
    raise SchemaError(f"{what}: expected an integer, got {type(value).__name__}")


def _as_mapping(value: object, what: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"{what}: expected a mapping")
    return value


def _as_list(value: object, what: str) -> list:
    if value is None:
        return []
    if not isinstance(value, list):
        raise SchemaError(f"{what}: expected a list")
    return value


def _parse_position(node: object, what: str) -> Position:
    mapping = _as_mapping(node, what)
    extra = set(mapping) - {"x", "y", "z"}
    if extra:
        raise SchemaError(f"{what}: unexpected keys {sorted(extra)}")
    missing = {"x", "y", "z"} - set(mapping)
    if missing:
        raise SchemaError(f"{what}: missing keys {sorted(missing)}")
    return Position(*(_as_int(mapping[axis], f"{what}.{axis}") for axis in ("x", "y", "z")))


def _parse_quantity(node: object, what: str, low: int, high: int) -> int:
    value = _as_int(node, what)
    if not low <= value <= high:
        raise RangeError(f"{what}: quantity {value} outside {low}..{high}")
    return value


def _parse_type_name(node: object, what: str) -> str:
    if not isinstance(node, str) or not node:
        raise SchemaError(f"{what}: expected a type name")
    return node


def _parse_blocks(node: object, what: str) -> tuple[BlockSpec, ...]:
    out = []
    for i, entry in enumerate(_as_list(node, what)):
        mapping = _as_mapping(entry, f"{what}[{i}]")
        extra = set(mapping) - {"position", "type"}
        if extra:
            raise SchemaError(f"{what}[{i}]: unexpected keys {sorted(extra)}")
        out.append(
            BlockSpec(
                position=_parse_position(mapping.get("position"), f"{what}[{i}].position"),
                type=_parse_type_name(mapping.get("type"), f"{what}[{i}].type"),
            )
        )
    return tuple(out)


def parse_task(yaml_text: str) -> TaskSpec:
    """Parse a YAML task document; numeric leaves may be ints or quoted numerals."""
    try:
        doc = yaml.safe_load(yaml_text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise TaskParseError(f"malformed YAML: {exc.problem}", line=line) from exc
    except yaml.YAMLError as exc:
        raise TaskParseError(f"malformed YAML: {exc}") from exc
    if doc is None:
        doc = {}
    mapping = _as_mapping(doc, "task")
    unknown = set(mapping) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown top-level key {sorted(unknown)[0]!r}")

    name = mapping.get("name", "task")
    if not isinstance(name, str):
        raise SchemaError("name: expected text")

    blocks = _parse_blocks(mapping.get("blocks"), "blocks")

    items = []
    for i, entry in enumerate(_as_list(mapping.get("items"), "items")):
        m = _as_mapping(entry, f"items[{i}]")
        extra = set(m) - {"position", "quantity", "type"}
        if extra:
            raise SchemaError(f"items[{i}]: unexpected keys {sorted(extra)}")
        items.append(
            ItemSpec(
                position=_parse_position(m.get("position"), f"items[{i}].position"),
                type=_parse_type_name(m.get("type"), f"items[{i}].type"),
                quantity=_parse_quantity(m.get("quantity", 1), f"items[{i}].quantity", 1, MAX_STACK),
            )
        )

    inventory = []
    for i, entry in enumerate(_as_list(mapping.get("inventory"), "inventory")):
        m = _as_mapping(entry, f"inventory[{i}]")
        extra = set(m) - {"type", "quantity"}
        if extra:
            raise SchemaError(f"inventory[{i}]: unexpected keys {sorted(extra)}")
        inventory.append(
            InventoryEntry(
                type=_parse_type_name(m.get("type"), f"inventory[{i}].type"),
                quantity=_parse_quantity(m.get("quantity", 0), f"inventory[{i}].quantity", 0, MAX_STACK),
            )
        )

    goal = _parse_goal(mapping.get("goal"))

    observation_range = DEFAULT_OBSERVATION_RANGE
    agent_start = DEFAULT_AGENT_START
    ground_y = DEFAULT_GROUND_Y
    if "extensions" in mapping and mapping["extensions"] is not None:
        ext = _as_mapping(mapping["extensions"], "extensions")
        unknown = set(ext) - _EXTENSION_KEYS
        if unknown:
            raise SchemaError(f"extensions: unexpected keys {sorted(unknown)}")
        if "observation_range" in ext:
            raw = _as_list(ext["observation_range"], "extensions.observation_range")
            if len(raw) != 3:
                raise SchemaError("extensions.observation_range: expected three extents")
            observation_range = tuple(
                _as_int(v, f"extensions.observation_range[{i}]") for i, v in enumerate(raw)
            )
        if "agent_start" in ext:
            agent_start = _parse_position(ext["agent_start"], "extensions.agent_start")
        if "ground_y" in ext:
            ground_y = _as_int(ext["ground_y"], "extensions.ground_y")

    return TaskSpec(
        name=name,
        blocks=blocks,
        items=tuple(items),
        inventory=tuple(inventory),
        goal=goal,
        observation_range=observation_range,
        agent_start=agent_start,
        ground_y=ground_y,
    )


def _parse_goal(node: object) -> GoalSpec:
    if node is None:
        return GoalSpec()
    mapping = _as_mapping(node, "goal")
    unknown = set(mapping) - _GOAL_KEYS
    if unknown:
        raise SchemaError(f"goal: unexpected keys {sorted(unknown)}")

    agent_at = None
    agent_entries = _as_list(mapping.get("agent"), "goal.agent")
    if len(agent_entries) > 1:
        raise SchemaError("goal.agent: at most one agent goal cell")
    if agent_entries:
        m = _as_mapping(agent_entries[0], "goal.agent[0]")
        extra = set(m) - {"position"}
        if extra:
            raise SchemaError(f"goal.agent[0]: unexpected keys {sorted(extra)}")
        agent_at = _parse_position(m.get("position"), "goal.agent[0].position")

    blocks = _parse_blocks(mapping.get("blocks"), "goal.blocks")

    inventory = []
    for i, entry in enumerate(_as_list(mapping.get("inventory"), "goal.inventory")):
        m = _as_mapping(entry, f"goal.inventory[{i}]")
        extra = set(m) - {"type", "quantity"}
        if extra:
            raise SchemaError(f"goal.inventory[{i}]: unexpected keys {sorted(extra)}")
        inventory.append(
            InventoryEntry(
                type=_parse_type_name(m.get("type"), f"goal.inventory[{i}].type"),
                quantity=_parse_quantity(
                    m.get("quantity", 1), f"goal.inventory[{i}].quantity", 1, MAX_STACK
                ),
            )
        )

    return GoalSpec(agent_at=agent_at, blocks=blocks, inventory=tuple(inventory))


def compute_bounds(spec: TaskSpec) -> WorldBounds:
    """Axis-aligned bounds centred on agent_start, extents = observation_range."""
    for extent in spec.observation_range:
        if extent <= 0 or extent % 2 == 0:
            raise ConfigError(f"observation-range extents must be odd positive, got {extent}")
    half = [(e - 1) // 2 for e in spec.observation_range]
    a = spec.agent_start
    return WorldBounds(
        min=Position(a.x - half[0], a.y - half[1], a.z - half[2]),
        max=Position(a.x + half[0], a.y + half[1], a.z + half[2]),
    )


def validate_task(spec: TaskSpec, registry: BlockTypeRegistry = DEFAULT_REGISTRY) -> ValidationReport:
    """Collect violations; an empty report means build_initial_world will succeed."""
    report = ValidationReport()
    try:
        bounds = compute_bounds(spec)
    except ConfigError as exc:
        report.violations.append(str(exc))
        return report

    seen_blocks: dict[Position, str] = {}
    for block in spec.blocks:
        if not bounds.contains(block.position):
            report.violations.append(f"block position {block.position} outside observation range")
        if block.position in seen_blocks:
            report.violations.append(f"duplicate block position {block.position}")
        seen_blocks[block.position] = block.type
        if not registry.known(block.type):
            report.violations.append(f"unknown type name {block.type!r}")

    has_ground = bounds.min.y <= spec.ground_y <= bounds.max.y

    seen_items = set()
    for item in spec.items:
        if not bounds.contains(item.position):
            report.violations.append(f"item position {item.position} outside observation range")
        elif item.position in seen_blocks or (has_ground and item.position.y == spec.ground_y):
            report.violations.append(f"item at {item.position} coincides with a block")
        if item.position in seen_items:
            report.violations.append(f"duplicate item position {item.position}")
        seen_items.add(item.position)
        if not registry.known(item.type):
            report.violations.append(f"unknown type name {item.type!r}")

    carried: dict[str, int] = {}
    for entry in spec.inventory:
        if not registry.known(entry.type):
            report.violations.append(f"unknown type name {entry.type!r}")
        carried[entry.type] = carried.get(entry.type, 0) + entry.quantity
    for type_name, total in sorted(carried.items()):
        if total > MAX_STACK:
            report.violations.append(f"inventory for {type_name} exceeds {MAX_STACK}")

    for goal_block in spec.goal.blocks:
        if not bounds.contains(goal_block.position):
            report.violations.append("goal position outside observation range")
        if not registry.known(goal_block.type):
            report.violations.append(f"unknown type name {goal_block.type!r}")
    goal_positions = [b.position for b in spec.goal.blocks]
    for pos in sorted(set(p for p in goal_positions if goal_positions.count(p) > 1)):
        report.violations.append(f"duplicate goal block position {pos}")
    if spec.goal.agent_at is not None and not bounds.contains(spec.goal.agent_at):
        report.violations.append("goal position outside observation range")
    for entry in spec.goal.inventory:
        if not registry.known(entry.type):
            report.violations.append(f"unknown type name {entry.type!r}")
    goal_inv_types = [e.type for e in spec.goal.inventory]
    for name in sorted(set(t for t in goal_inv_types if goal_inv_types.count(t) > 1)):
        report.violations.append(f"duplicate goal inventory type {name!r}")

    if spec.goal.is_empty():
        report.violations.append("goal is empty")

    # Agent placement: feet and head inside bounds, cells unblocked, support below.
    feet = spec.agent_start
    head = feet.offset(dy=1)
    if not (bounds.contains(feet) and bounds.contains(head)):
        report.violations.append("agent start outside observation range")
    else:
        for cell in (feet, head):
            if cell in seen_blocks or (has_ground and cell.y == spec.ground_y):
                report.violations.append(f"agent start cell {cell} occupied by a block")
        below = feet.offset(dy=-1)
        supported = bounds.contains(below) and (
            below in seen_blocks or (has_ground and below.y == spec.ground_y)
        )
        if not supported:
            report.violations.append("agent start unsupported (no block below)")

    return report


def _position_node(pos: Position) -> dict:
    return {"x": pos.x, "y": pos.y, "z": pos.z}


def serialize_task(spec: TaskSpec) -> str:
    """Canonical YAML emission; parse_task(serialize_task(s)) == s."""
    doc: dict = {"name": spec.name}
    if spec.blocks:
        doc["blocks"] = [{"position": _position_node(b.position), "type": b.type} for b in spec.blocks]
    if spec.items:
        doc["items"] = [
            {"position": _position_node(i.position), "quantity": i.quantity, "type": i.type}
            for i in spec.items
        ]
    if spec.inventory:
        doc["inventory"] = [{"type": e.type, "quantity": e.quantity} for e in spec.inventory]
    goal_node: dict = {}
    if spec.goal.agent_at is not None:
        goal_node["agent"] = [{"position": _position_node(spec.goal.agent_at)}]
    if spec.goal.blocks:
        goal_node["blocks"] = [
            {"position": _position_node(b.position), "type": b.type} for b in spec.goal.blocks
        ]
    if spec.goal.inventory:
        goal_node["inventory"] = [{"type": e.type, "quantity": e.quantity} for e in spec.goal.inventory]
    if goal_node:
        doc["goal"] = goal_node
    doc["extensions"] = {
        "observation_range": list(spec.observation_range),
        "agent_start": _position_node(spec.agent_start),
        "ground_y": spec.ground_y,
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)
