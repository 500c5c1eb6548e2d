"""Voxel task compiler: one world plus goal, two planning encodings.

The numeric encoding keeps coordinates and inventories as fluents. The
propositional encoding rewrites every number into successor-chained
position and count objects drawn from a shared pool sized by the largest
world extent. Both encodings declare identical object names so states can
be decoded back to worlds and compared cell by cell.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from .actions import (
    BREAK,
    CHECK_GOAL,
    JUMP_DOWN,
    JUMP_DOWN_PICKUP,
    JUMP_UP,
    JUMP_UP_PICKUP,
    MOVE,
    MOVE_PICKUP,
    PLACE,
    Action,
    catalog,
)
from .blocktypes import DEFAULT_REGISTRY, BlockTypeRegistry, TypeTable
from .errors import ContractError, GenError
from .geometry import Position, WorldBounds, direction_delta
from .task import MAX_STACK, GoalSpec, TaskSpec
from .world import WorldState, build_initial_world, position_pool_size

import numpy as np

from .pddl import (
    AddEffect,
    And,
    Atom,
    Compare,
    Const,
    DecreaseEffect,
    DelEffect,
    Exists,
    Expr,
    Fluent,
    FluentInit,
    IncreaseEffect,
    Not,
    Or,
    PddlAction,
    PddlDomain,
    PddlProblem,
    PredicateDecl,
    Prod,
    Sum,
    Term,
    print_domain,
    print_problem,
)

NUMERIC = "numeric"
PROP = "prop"
ENCODINGS = (NUMERIC, PROP)

AGENT_NAME = "ag0"

NUM_REQUIREMENTS = (
    ":typing",
    ":negative-preconditions",
    ":existential-preconditions",
    ":numeric-fluents",
)
PROP_REQUIREMENTS = (
    ":typing",
    ":negative-preconditions",
    ":existential-preconditions",
)

_AT = {"x": "at-x", "y": "at-y", "z": "at-z"}


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9-]+", "-", name.lower()).strip("-")
    return slug or "task"


# -- shared coordinate codec ---------------------------------------------


@dataclass(frozen=True)
class CoordinateCodec:
    """Maps world coordinates onto the propositional position pool.

    x and z are bottom-aligned (index 0 = minimum coordinate). y is
    top-aligned so the highest world level always lands on the last pool
    index; that makes the jump headroom limit structural, with no guard
    predicate needed.
    """

    offsets: tuple[int, int, int]
    pool: int

    @classmethod
    def for_bounds(cls, bounds: WorldBounds) -> "CoordinateCodec":
        pool = position_pool_size(bounds)
        ey = bounds.extents[1]
        lo = bounds.min
        return cls((-lo.x, -lo.y + (pool - ey), -lo.z), pool)

    def index(self, axis: int, value: int) -> int:
        idx = value + self.offsets[axis]
        if not 0 <= idx < self.pool:
            raise GenError(f"coordinate {value} on axis {axis} falls outside the pool")
        return idx

    def encode(self, axis: int, value: int) -> str:
        return f"position{self.index(axis, value)}"

    def decode(self, axis: int, name: str) -> int:
        if not name.startswith("position"):
            raise ContractError(f"{name!r} is not a position object")
        return int(name[len("position") :]) - self.offsets[axis]

    def position_objects(self) -> tuple[str, ...]:
        return tuple(f"position{k}" for k in range(self.pool))


def count_object(n: int) -> str:
    if not 0 <= n <= MAX_STACK:
        raise GenError(f"count {n} exceeds the {MAX_STACK} stack limit")
    return f"count{n}"


# -- object naming --------------------------------------------------------


@dataclass(frozen=True)
class ObjectInfo:
    """One problem object, shared verbatim by both encodings."""

    name: str
    pddl_type: str
    kind: str  # "agent" | "block" | "reserve" | "item"
    type_name: str | None = None
    position: Position | None = None
    quantity: int = 0


def object_rows(world: WorldState) -> tuple[ObjectInfo, ...]:
    """Deterministic object table: agent, placed blocks, reserves, items.

    Reserve blocks are absent block objects, one per placeable unit the
    agent could ever hold of each type; place consumes whichever is free.
    """
    rows = [ObjectInfo(AGENT_NAME, "agent", "agent")]
    for k, (pos, t) in enumerate(world.iter_blocks()):
        rows.append(ObjectInfo(f"b{k}", f"{t}-block", "block", t, pos))
    r = 0
    for t in world.types.block_types:
        for _ in range(world.placeable_units(t)):
            rows.append(ObjectInfo(f"r{r}", f"{t}-block", "reserve", t))
            r += 1
    for k, (pos, t, q) in enumerate(world.iter_items()):
        rows.append(ObjectInfo(f"i{k}", f"{t}-item", "item", t, pos, q))
    return tuple(rows)


# -- numeric expression helpers -------------------------------------------

_ALIVE = Atom("agent-alive", ("?ag",))


def _coord(var: str, axis: str) -> Fluent:
    return Fluent(axis, (var,))


def _shift(var: str, axis: str, k: int) -> Term:
    if k == 0:
        return _coord(var, axis)
    return Sum((_coord(var, axis), Const(k)))


def _eq(lhs: Term, rhs: Term) -> Compare:
    return Compare("=", lhs, rhs)


def _num_block_at(var: str, tx: Term, ty, tz: Term, type_name: str = "block") -> Exists:
    """Exists a present block at the given coordinate terms.

    ty may be a single term or a tuple of alternatives (rendered as or).
    """
    if isinstance(ty, tuple):
        y_expr: Expr = Or(tuple(_eq(_coord(var, "y"), t) for t in ty))
    else:
        y_expr = _eq(_coord(var, "y"), ty)
    return Exists(
        ((var, type_name),),
        And(
            (
                Atom("block-present", (var,)),
                _eq(_coord(var, "x"), tx),
                y_expr,
                _eq(_coord(var, "z"), tz),
            )
        ),
    )


def _num_item_at(var: str, tx: Term, ty: Term, tz: Term) -> Exists:
    return Exists(
        ((var, "item"),),
        And(
            (
                Atom("item-present", (var,)),
                _eq(_coord(var, "x"), tx),
                _eq(_coord(var, "y"), ty),
                _eq(_coord(var, "z"), tz),
            )
        ),
    )


def _num_move_effects(dx: int, dy: int, dz: int) -> tuple:
    effs = []
    for axis, d in (("x", dx), ("y", dy), ("z", dz)):
        if d > 0:
            effs.append(IncreaseEffect(_coord("?ag", axis), Const(d)))
        elif d < 0:
            effs.append(DecreaseEffect(_coord("?ag", axis), Const(-d)))
    return tuple(effs)


def _num_counter(t: str) -> Fluent:
    return Fluent(f"agent-num-{t}", ("?ag",))


def _num_item_conjuncts(dx: int, dy: int, dz: int, t: str) -> tuple:
    """Pickup target: the bound item sits at the destination feet cell."""
    return (
        Atom("item-present", ("?i",)),
        _eq(_coord("?i", "x"), _shift("?ag", "x", dx)),
        _eq(_coord("?i", "y"), _shift("?ag", "y", dy)),
        _eq(_coord("?i", "z"), _shift("?ag", "z", dz)),
        Compare("<=", Sum((_num_counter(t), Fluent("item-count", ("?i",)))), Const(MAX_STACK)),
    )


def _num_move(a: Action) -> PddlAction:
    dx, dz = direction_delta(a.direction)
    support = _num_block_at(
        "?b", _shift("?ag", "x", dx), _shift("?ag", "y", -1), _shift("?ag", "z", dz)
    )
    blocked = Not(
        _num_block_at(
            "?b",
            _shift("?ag", "x", dx),
            (_shift("?ag", "y", 1), _coord("?ag", "y")),
            _shift("?ag", "z", dz),
        )
    )
    no_item = Not(_num_item_at("?i", _shift("?ag", "x", dx), _coord("?ag", "y"), _shift("?ag", "z", dz)))
    pre = And((_ALIVE, support, And((blocked, no_item))))
    return PddlAction(a.name, (("?ag", "agent"),), pre, _num_move_effects(dx, 0, dz))


def _num_move_pickup(a: Action) -> PddlAction:
    dx, dz = direction_delta(a.direction)
    support = _num_block_at(
        "?b", _shift("?ag", "x", dx), _shift("?ag", "y", -1), _shift("?ag", "z", dz)
    )
    blocked = Not(
        _num_block_at(
            "?b",
            _shift("?ag", "x", dx),
            (_shift("?ag", "y", 1), _coord("?ag", "y")),
            _shift("?ag", "z", dz),
        )
    )
    pre = And((_ALIVE, support, blocked) + _num_item_conjuncts(dx, 0, dz, a.subject))
    effects = _num_move_effects(dx, 0, dz) + (
        DelEffect(Atom("item-present", ("?i",))),
        IncreaseEffect(_num_counter(a.subject), Fluent("item-count", ("?i",))),
    )
    params = (("?ag", "agent"), ("?i", f"{a.subject}-item"))
    return PddlAction(a.name, params, pre, effects)


def _jump_up_core(dx: int, dz: int, max_y: int) -> tuple:
    """Shared jumpup conjuncts: headroom guard, step support, clearances."""
    guard = Compare("<=", _coord("?ag", "y"), Const(max_y - 2))
    support = _num_block_at(
        "?b", _shift("?ag", "x", dx), _coord("?ag", "y"), _shift("?ag", "z", dz)
    )
    over_head = Not(
        _num_block_at("?b", _coord("?ag", "x"), _shift("?ag", "y", 2), _coord("?ag", "z"))
    )
    blocked = Not(
        _num_block_at(
            "?b",
            _shift("?ag", "x", dx),
            (_shift("?ag", "y", 1), _shift("?ag", "y", 2)),
            _shift("?ag", "z", dz),
        )
    )
    return guard, support, over_head, blocked


def _num_jump_up(a: Action, max_y: int) -> PddlAction:
    dx, dz = direction_delta(a.direction)
    guard, support, over_head, blocked = _jump_up_core(dx, dz, max_y)
    no_item = Not(
        _num_item_at("?i", _shift("?ag", "x", dx), _shift("?ag", "y", 1), _shift("?ag", "z", dz))
    )
    pre = And((_ALIVE, guard, support, And((over_head, blocked, no_item))))
    return PddlAction(a.name, (("?ag", "agent"),), pre, _num_move_effects(dx, 1, dz))


def _num_jump_up_pickup(a: Action, max_y: int) -> PddlAction:
    dx, dz = direction_delta(a.direction)
    guard, support, over_head, blocked = _jump_up_core(dx, dz, max_y)
    pre = And(
        (_ALIVE, guard, support, And((over_head, blocked)))
        + _num_item_conjuncts(dx, 1, dz, a.subject)
    )
    effects = _num_move_effects(dx, 1, dz) + (
        DelEffect(Atom("item-present", ("?i",))),
        IncreaseEffect(_num_counter(a.subject), Fluent("item-count", ("?i",))),
    )
    params = (("?ag", "agent"), ("?i", f"{a.subject}-item"))
    return PddlAction(a.name, params, pre, effects)


def _jump_down_core(dx: int, dz: int) -> tuple:
    support = _num_block_at(
        "?b", _shift("?ag", "x", dx), _shift("?ag", "y", -2), _shift("?ag", "z", dz)
    )
    blocked = Not(
        _num_block_at(
            "?b",
            _shift("?ag", "x", dx),
            (_coord("?ag", "y"), _shift("?ag", "y", -1)),
            _shift("?ag", "z", dz),
        )
    )
    return support, blocked


def _num_jump_down(a: Action) -> PddlAction:
    dx, dz = direction_delta(a.direction)
    support, blocked = _jump_down_core(dx, dz)
    no_item = Not(
        _num_item_at("?i", _shift("?ag", "x", dx), _shift("?ag", "y", -1), _shift("?ag", "z", dz))
    )
    pre = And((_ALIVE, support, And((blocked, no_item))))
    return PddlAction(a.name, (("?ag", "agent"),), pre, _num_move_effects(dx, -1, dz))


def _num_jump_down_pickup(a: Action) -> PddlAction:
    dx, dz = direction_delta(a.direction)
    support, blocked = _jump_down_core(dx, dz)
    pre = And((_ALIVE, support, blocked) + _num_item_conjuncts(dx, -1, dz, a.subject))
    effects = _num_move_effects(dx, -1, dz) + (
        DelEffect(Atom("item-present", ("?i",))),
        IncreaseEffect(_num_counter(a.subject), Fluent("item-count", ("?i",))),
    )
    params = (("?ag", "agent"), ("?i", f"{a.subject}-item"))
    return PddlAction(a.name, params, pre, effects)


def _num_break(a: Action) -> PddlAction:
    dx, dz = direction_delta(a.direction)
    t = a.subject
    no_item = Not(
        _num_item_at("?i", _shift("?ag", "x", dx), _shift("?ag", "y", 1), _shift("?ag", "z", dz))
    )
    pre = And(
        (
            _ALIVE,
            _eq(_coord("?b", "x"), _shift("?ag", "x", dx)),
            _eq(_coord("?b", "y"), _coord("?ag", "y")),
            _eq(_coord("?b", "z"), _shift("?ag", "z", dz)),
            Atom("block-present", ("?b",)),
            no_item,
            Compare("<=", _num_counter(t), Const(MAX_STACK - 1)),
        )
    )
    effects = (
        DelEffect(Atom("block-present", ("?b",))),
        IncreaseEffect(_num_counter(t), Const(1)),
    )
    return PddlAction(a.name, (("?ag", "agent"), ("?b", f"{t}-block")), pre, effects)


def _num_place(a: Action) -> PddlAction:
    dx, dz = direction_delta(a.direction)
    t = a.subject
    support = _num_block_at(
        "?s", _shift("?ag", "x", dx), _shift("?ag", "y", -1), _shift("?ag", "z", dz)
    )
    occupied = Not(
        _num_block_at("?o", _shift("?ag", "x", dx), _coord("?ag", "y"), _shift("?ag", "z", dz))
    )
    no_item = Not(
        _num_item_at("?i", _shift("?ag", "x", dx), _coord("?ag", "y"), _shift("?ag", "z", dz))
    )
    pre = And(
        (
            _ALIVE,
            Not(Atom("block-present", ("?b",))),
            Compare(">=", _num_counter(t), Const(1)),
            support,
            occupied,
            no_item,
        )
    )
    # Reserve coordinates are stale, so each axis is set by subtracting the
    # difference from its current value; amounts read the pre state.
    targets = {
        "x": _shift("?ag", "x", dx),
        "y": _coord("?ag", "y"),
        "z": _shift("?ag", "z", dz),
    }
    effects = [AddEffect(Atom("block-present", ("?b",))), DecreaseEffect(_num_counter(t), Const(1))]
    for axis in ("x", "y", "z"):
        old = _coord("?b", axis)
        effects.append(DecreaseEffect(old, Sum((old, Prod((Const(-1), targets[axis]))))))
    return PddlAction(a.name, (("?ag", "agent"), ("?b", f"{t}-block")), pre, tuple(effects))


def _num_checkgoal(goal: GoalSpec) -> PddlAction:
    conjs: list[Expr] = [_ALIVE]
    if goal.agent_at is not None:
        for axis, v in zip(("x", "y", "z"), goal.agent_at):
            conjs.append(_eq(_coord("?ag", axis), Const(v)))
    for spec in goal.blocks:
        conjs.append(
            _num_block_at(
                "?b",
                Const(spec.position.x),
                Const(spec.position.y),
                Const(spec.position.z),
                f"{spec.type}-block",
            )
        )
    for entry in goal.inventory:
        conjs.append(Compare(">=", _num_counter(entry.type), Const(entry.quantity)))
    effects = (AddEffect(Atom("goal-achieved", ("?ag",))),)
    return PddlAction(CHECK_GOAL, (("?ag", "agent"),), And(tuple(conjs)), effects)


# -- propositional helpers -------------------------------------------------


def _seq_pos(lo: str, hi: str) -> Atom:
    """are-seq-pos lo hi reads: hi is the successor of lo."""
    return Atom("are-seq-pos", (lo, hi))


def _seq_count(lo: str, hi: str) -> Atom:
    return Atom("are-seq-count", (lo, hi))


def _at(var: str, axis: str, pos_var: str) -> Atom:
    return Atom(_AT[axis], (var, pos_var))


def _prop_block_at(var, xv, yv, zv, type_name: str = "block") -> Exists:
    if isinstance(yv, tuple):
        y_expr: Expr = Or(tuple(_at(var, "y", v) for v in yv))
    else:
        y_expr = _at(var, "y", yv)
    return Exists(
        ((var, type_name),),
        And((Atom("block-present", (var,)), _at(var, "x", xv), y_expr, _at(var, "z", zv))),
    )


def _prop_item_at(var: str, xv: str, yv: str, zv: str) -> Exists:
    return Exists(
        ((var, "item"),),
        And((Atom("item-present", (var,)), _at(var, "x", xv), _at(var, "y", yv), _at(var, "z", zv))),
    )


def _has_n(t: str, count_var: str) -> Atom:
    return Atom(f"agent-has-n-{t}", ("?ag", count_var))


@dataclass(frozen=True)
class _MoveVars:
    """Variable layout for one horizontal direction."""

    params: tuple[str, ...]  # position params in declaration order, y excluded
    x_here: str
    x_there: str
    z_here: str
    z_there: str
    seq: Atom  # successor fact for the moving axis


def _movement_vars(direction: str) -> _MoveVars:
    dx, dz = direction_delta(direction)
    if dz:
        start, end = "?z_start", "?z_end"
        seq = _seq_pos(end, start) if dz < 0 else _seq_pos(start, end)
        return _MoveVars(("?x", start, end), "?x", "?x", start, end, seq)
    start, end = "?x_start", "?x_end"
    seq = _seq_pos(end, start) if dx < 0 else _seq_pos(start, end)
    return _MoveVars((start, end, "?z"), start, end, "?z", "?z", seq)


def _pose(mv: _MoveVars, feet: str) -> tuple:
    return (
        Atom("agent-alive", ("?ag",)),
        _at("?ag", "x", mv.x_here),
        _at("?ag", "y", feet),
        _at("?ag", "z", mv.z_here),
    )


def _move_param_list(direction: str, y_vars: tuple[str, ...]) -> tuple[str, ...]:
    """Parameter order: x group, y group, z group."""
    mv = _movement_vars(direction)
    if direction in ("north", "south"):
        return ("?x",) + y_vars + (mv.z_here, mv.z_there)
    return (mv.x_here, mv.x_there) + y_vars + ("?z",)


def _typed(names: tuple[str, ...], type_name: str) -> tuple[tuple[str, str], ...]:
    return tuple((n, type_name) for n in names)


def _prop_axis_effects(mv: _MoveVars) -> tuple:
    if mv.z_here != mv.z_there:
        return (
            DelEffect(Atom("at-z", ("?ag", mv.z_here))),
            AddEffect(Atom("at-z", ("?ag", mv.z_there))),
        )
    return (
        DelEffect(Atom("at-x", ("?ag", mv.x_here))),
        AddEffect(Atom("at-x", ("?ag", mv.x_there))),
    )


def _prop_y_effects(old: str, new: str) -> tuple:
    return (
        DelEffect(Atom("at-y", ("?ag", old))),
        AddEffect(Atom("at-y", ("?ag", new))),
    )


def _prop_pickup_conjuncts(t: str, xv: str, yv: str, zv: str) -> tuple:
    return (
        Atom("item-present", ("?i",)),
        _at("?i", "x", xv),
        _at("?i", "y", yv),
        _at("?i", "z", zv),
        _seq_count("?n_start", "?n_end"),
        _has_n(t, "?n_start"),
    )


def _prop_pickup_effects(t: str, xv: str, yv: str, zv: str) -> tuple:
    return (
        DelEffect(Atom("item-present", ("?i",))),
        DelEffect(Atom("at-x", ("?i", xv))),
        DelEffect(Atom("at-y", ("?i", yv))),
        DelEffect(Atom("at-z", ("?i", zv))),
        DelEffect(_has_n(t, "?n_start")),
        AddEffect(_has_n(t, "?n_end")),
    )


def _prop_move(a: Action) -> PddlAction:
    mv = _movement_vars(a.direction)
    y_vars = ("?y_up", "?y_down", "?y_2_down")
    params = (("?ag", "agent"),) + _typed(_move_param_list(a.direction, y_vars), "position")
    conjs = _pose(mv, "?y_down") + (
        mv.seq,
        _seq_pos("?y_down", "?y_up"),
        _seq_pos("?y_2_down", "?y_down"),
        _prop_block_at("?b", mv.x_there, "?y_2_down", mv.z_there),
        Not(_prop_block_at("?b", mv.x_there, ("?y_up", "?y_down"), mv.z_there)),
        Not(_prop_item_at("?i", mv.x_there, "?y_down", mv.z_there)),
    )
    return PddlAction(a.name, params, And(conjs), _prop_axis_effects(mv))


def _prop_move_pickup(a: Action) -> PddlAction:
    mv = _movement_vars(a.direction)
    t = a.subject
    y_vars = ("?y_up", "?y_down", "?y_2_down")
    params = (
        (("?ag", "agent"), ("?i", f"{t}-item"))
        + _typed(_move_param_list(a.direction, y_vars), "position")
        + _typed(("?n_start", "?n_end"), "count")
    )
    conjs = (
        _pose(mv, "?y_down")
        + (
            mv.seq,
            _seq_pos("?y_down", "?y_up"),
            _seq_pos("?y_2_down", "?y_down"),
            _prop_block_at("?b", mv.x_there, "?y_2_down", mv.z_there),
            Not(_prop_block_at("?b", mv.x_there, ("?y_up", "?y_down"), mv.z_there)),
        )
        + _prop_pickup_conjuncts(t, mv.x_there, "?y_down", mv.z_there)
    )
    effects = _prop_axis_effects(mv) + _prop_pickup_effects(t, mv.x_there, "?y_down", mv.z_there)
    return PddlAction(a.name, params, And(conjs), effects)


def _prop_jump_up(a: Action) -> PddlAction:
    mv = _movement_vars(a.direction)
    y_vars = ("?y", "?y_up", "?y_2_up")
    params = (("?ag", "agent"),) + _typed(_move_param_list(a.direction, y_vars), "position")
    conjs = _pose(mv, "?y") + (
        mv.seq,
        _seq_pos("?y", "?y_up"),
        _seq_pos("?y_up", "?y_2_up"),
        _prop_block_at("?b", mv.x_there, "?y", mv.z_there),
        Not(_prop_block_at("?b", mv.x_here, "?y_2_up", mv.z_here)),
        Not(_prop_block_at("?b", mv.x_there, ("?y_up", "?y_2_up"), mv.z_there)),
        Not(_prop_item_at("?i", mv.x_there, "?y_up", mv.z_there)),
    )
    effects = _prop_y_effects("?y", "?y_up") + _prop_axis_effects(mv)
    return PddlAction(a.name, params, And(conjs), effects)


def _prop_jump_up_pickup(a: Action) -> PddlAction:
    mv = _movement_vars(a.direction)
    t = a.subject
    y_vars = ("?y", "?y_up", "?y_2_up")
    params = (
        (("?ag", "agent"), ("?i", f"{t}-item"))
        + _typed(_move_param_list(a.direction, y_vars), "position")
        + _typed(("?n_start", "?n_end"), "count")
    )
    conjs = (
        _pose(mv, "?y")
        + (
            mv.seq,
            _seq_pos("?y", "?y_up"),
            _seq_pos("?y_up", "?y_2_up"),
            _prop_block_at("?b", mv.x_there, "?y", mv.z_there),
            Not(_prop_block_at("?b", mv.x_here, "?y_2_up", mv.z_here)),
            Not(_prop_block_at("?b", mv.x_there, ("?y_up", "?y_2_up"), mv.z_there)),
        )
        + _prop_pickup_conjuncts(t, mv.x_there, "?y_up", mv.z_there)
    )
    effects = (
        _prop_y_effects("?y", "?y_up")
        + _prop_axis_effects(mv)
        + _prop_pickup_effects(t, mv.x_there, "?y_up", mv.z_there)
    )
    return PddlAction(a.name, params, And(conjs), effects)


def _prop_jump_down(a: Action) -> PddlAction:
    mv = _movement_vars(a.direction)
    y_vars = ("?y", "?y_down", "?y_2_down")
    params = (("?ag", "agent"),) + _typed(_move_param_list(a.direction, y_vars), "position")
    conjs = _pose(mv, "?y") + (
        mv.seq,
        _seq_pos("?y_down", "?y"),
        _seq_pos("?y_2_down", "?y_down"),
        _prop_block_at("?b", mv.x_there, "?y_2_down", mv.z_there),
        Not(_prop_block_at("?b", mv.x_there, ("?y", "?y_down"), mv.z_there)),
        Not(_prop_item_at("?i", mv.x_there, "?y_down", mv.z_there)),
    )
    effects = _prop_y_effects("?y", "?y_down") + _prop_axis_effects(mv)
    return PddlAction(a.name, params, And(conjs), effects)


def _prop_jump_down_pickup(a: Action) -> PddlAction:
    mv = _movement_vars(a.direction)
    t = a.subject
    y_vars = ("?y", "?y_down", "?y_2_down")
    params = (
        (("?ag", "agent"), ("?i", f"{t}-item"))
        + _typed(_move_param_list(a.direction, y_vars), "position")
        + _typed(("?n_start", "?n_end"), "count")
    )
    conjs = (
        _pose(mv, "?y")
        + (
            mv.seq,
            _seq_pos("?y_down", "?y"),
            _seq_pos("?y_2_down", "?y_down"),
            _prop_block_at("?b", mv.x_there, "?y_2_down", mv.z_there),
            Not(_prop_block_at("?b", mv.x_there, ("?y", "?y_down"), mv.z_there)),
        )
        + _prop_pickup_conjuncts(t, mv.x_there, "?y_down", mv.z_there)
    )
    effects = (
        _prop_y_effects("?y", "?y_down")
        + _prop_axis_effects(mv)
        + _prop_pickup_effects(t, mv.x_there, "?y_down", mv.z_there)
    )
    return PddlAction(a.name, params, And(conjs), effects)


def _front_vars(direction: str) -> tuple[str, str, str, Atom, tuple[str, ...]]:
    """(x of block, z of block, front var, seq fact, position param order)."""
    if direction == "north":
        return "?x", "?z_front", "?z_front", _seq_pos("?z_front", "?z"), ("?x", "?z", "?z_front")
    if direction == "south":
        return "?x", "?z_front", "?z_front", _seq_pos("?z", "?z_front"), ("?x", "?z", "?z_front")
    if direction == "east":
        return "?x_front", "?z", "?x_front", _seq_pos("?x", "?x_front"), ("?x", "?x_front", "?z")
    return "?x_front", "?z", "?x_front", _seq_pos("?x_front", "?x"), ("?x", "?x_front", "?z")


def _prop_break(a: Action) -> PddlAction:
    t = a.subject
    bx, bz, _front, seq, order = _front_vars(a.direction)
    pos_params = (order[0],) + ("?y", "?y_up") + order[1:] if a.direction in ("north", "south") else (
        order[0],
        order[1],
        "?y",
        "?y_up",
        order[2],
    )
    params = (
        (("?ag", "agent"), ("?b", f"{t}-block"))
        + _typed(pos_params, "position")
        + _typed(("?n_start", "?n_end"), "count")
    )
    conjs = (
        Atom("agent-alive", ("?ag",)),
        _at("?ag", "x", "?x"),
        _at("?ag", "y", "?y"),
        _at("?ag", "z", "?z"),
        _at("?b", "x", bx),
        _at("?b", "y", "?y"),
        _at("?b", "z", bz),
        seq,
        _seq_pos("?y", "?y_up"),
        Atom("block-present", ("?b",)),
        Not(_prop_item_at("?i", bx, "?y_up", bz)),
        _seq_count("?n_start", "?n_end"),
        _has_n(t, "?n_start"),
    )
    effects = (
        DelEffect(Atom("block-present", ("?b",))),
        DelEffect(_at("?b", "x", bx)),
        DelEffect(_at("?b", "y", "?y")),
        DelEffect(_at("?b", "z", bz)),
        DelEffect(_has_n(t, "?n_start")),
        AddEffect(_has_n(t, "?n_end")),
    )
    return PddlAction(a.name, params, And(conjs), effects)


def _prop_place(a: Action) -> PddlAction:
    t = a.subject
    bx, bz, _front, seq, order = _front_vars(a.direction)
    pos_params = (order[0],) + ("?y", "?y_down") + order[1:] if a.direction in ("north", "south") else (
        order[0],
        order[1],
        "?y",
        "?y_down",
        order[2],
    )
    params = (
        (("?ag", "agent"), ("?b", f"{t}-block"))
        + _typed(pos_params, "position")
        + _typed(("?n_start", "?n_end"), "count")
    )
    conjs = (
        Atom("agent-alive", ("?ag",)),
        _at("?ag", "x", "?x"),
        _at("?ag", "y", "?y"),
        _at("?ag", "z", "?z"),
        seq,
        _seq_pos("?y_down", "?y"),
        Not(Atom("block-present", ("?b",))),
        _has_n(t, "?n_start"),
        _seq_count("?n_end", "?n_start"),
        _prop_block_at("?s", bx, "?y_down", bz),
        Not(_prop_block_at("?o", bx, "?y", bz)),
        Not(_prop_item_at("?i", bx, "?y", bz)),
    )
    effects = (
        AddEffect(Atom("block-present", ("?b",))),
        AddEffect(_at("?b", "x", bx)),
        AddEffect(_at("?b", "y", "?y")),
        AddEffect(_at("?b", "z", bz)),
        DelEffect(_has_n(t, "?n_start")),
        AddEffect(_has_n(t, "?n_end")),
    )
    return PddlAction(a.name, params, And(conjs), effects)


def _prop_checkgoal(goal: GoalSpec, codec: CoordinateCodec) -> PddlAction:
    conjs: list[Expr] = [Atom("agent-alive", ("?ag",))]
    if goal.agent_at is not None:
        for axis_idx, axis in enumerate(("x", "y", "z")):
            conjs.append(_at("?ag", axis, codec.encode(axis_idx, goal.agent_at[axis_idx])))
    for spec in goal.blocks:
        conjs.append(
            _prop_block_at(
                "?b",
                codec.encode(0, spec.position.x),
                codec.encode(1, spec.position.y),
                codec.encode(2, spec.position.z),
                f"{spec.type}-block",
            )
        )
    for entry in goal.inventory:
        conjs.append(
            Exists(
                (("?n", "count"),),
                And((_has_n(entry.type, "?n"), Atom("count-geq", ("?n", count_object(entry.quantity))))),
            )
        )
    effects = (AddEffect(Atom("goal-achieved", ("?ag",))),)
    return PddlAction(CHECK_GOAL, (("?ag", "agent"),), And(tuple(conjs)), effects)


# -- domain assembly -------------------------------------------------------


def _type_rows(types: TypeTable, encoding: str) -> tuple[tuple[str, str], ...]:
    rows = [
        ("locatable", "object"),
        ("agent", "locatable"),
        ("block", "locatable"),
        ("item", "locatable"),
    ]
    rows += [(f"{t}-block", "block") for t in types.block_types]
    rows += [(f"{t}-item", "item") for t in types.item_types]
    if encoding == PROP:
        rows += [("position", "object"), ("count", "object")]
    return tuple(rows)


def _predicates(types: TypeTable, encoding: str) -> tuple[PredicateDecl, ...]:
    decls = [
        PredicateDecl("agent-alive", (("?ag", "agent"),)),
        PredicateDecl("block-present", (("?b", "block"),)),
        PredicateDecl("item-present", (("?i", "item"),)),
        PredicateDecl("goal-achieved", (("?ag", "agent"),)),
    ]
    if encoding == PROP:
        for axis in ("x", "y", "z"):
            decls.append(PredicateDecl(_AT[axis], (("?l", "locatable"), ("?p", "position"))))
        decls.append(PredicateDecl("are-seq-pos", (("?a", "position"), ("?b", "position"))))
        decls.append(PredicateDecl("are-seq-count", (("?a", "count"), ("?b", "count"))))
        decls.append(PredicateDecl("count-geq", (("?a", "count"), ("?b", "count"))))
        for t in types.names:
            decls.append(PredicateDecl(f"agent-has-n-{t}", (("?ag", "agent"), ("?n", "count"))))
    return tuple(decls)


def _functions(types: TypeTable, encoding: str) -> tuple[PredicateDecl, ...]:
    if encoding == PROP:
        return ()
    decls = [PredicateDecl(axis, (("?l", "locatable"),)) for axis in ("x", "y", "z")]
    decls += [PredicateDecl(f"agent-num-{t}", (("?ag", "agent"),)) for t in types.names]
    decls.append(PredicateDecl("item-count", (("?i", "item"),)))
    return tuple(decls)


def gen_domain(world: WorldState, goal: GoalSpec, encoding: str, name: str) -> PddlDomain:
    """Every catalog action as a schema, plus the goal's checkgoal."""
    if encoding not in ENCODINGS:
        raise GenError(f"unknown encoding {encoding!r}")
    if goal.is_empty():
        raise GenError("cannot compile an empty goal")
    types = world.types
    max_y = world.bounds.max.y
    codec = CoordinateCodec.for_bounds(world.bounds)
    if encoding == PROP:
        for _pos, _t, q in world.iter_items():
            if q != 1:
                raise GenError("propositional tasks require quantity-1 item stacks")

    actions = []
    for sig in catalog(types):
        if sig.template == CHECK_GOAL:
            if encoding == NUMERIC:
                actions.append(_num_checkgoal(goal))
            else:
                actions.append(_prop_checkgoal(goal, codec))
        elif encoding == NUMERIC:
            builder = {
                MOVE: _num_move,
                MOVE_PICKUP: _num_move_pickup,
                JUMP_DOWN: _num_jump_down,
                JUMP_DOWN_PICKUP: _num_jump_down_pickup,
                PLACE: _num_place,
                BREAK: _num_break,
            }
            if sig.template == JUMP_UP:
                actions.append(_num_jump_up(sig, max_y))
            elif sig.template == JUMP_UP_PICKUP:
                actions.append(_num_jump_up_pickup(sig, max_y))
            else:
                actions.append(builder[sig.template](sig))
        else:
            builder = {
                MOVE: _prop_move,
                MOVE_PICKUP: _prop_move_pickup,
                JUMP_UP: _prop_jump_up,
                JUMP_UP_PICKUP: _prop_jump_up_pickup,
                JUMP_DOWN: _prop_jump_down,
                JUMP_DOWN_PICKUP: _prop_jump_down_pickup,
                PLACE: _prop_place,
                BREAK: _prop_break,
            }
            actions.append(builder[sig.template](sig))

    requirements = NUM_REQUIREMENTS if encoding == NUMERIC else PROP_REQUIREMENTS
    return PddlDomain(
        name=name,
        requirements=requirements,
        types=_type_rows(types, encoding),
        predicates=_predicates(types, encoding),
        functions=_functions(types, encoding),
        actions=tuple(actions),
    )


# -- problem assembly ------------------------------------------------------


def gen_problem(
    world: WorldState, goal: GoalSpec, encoding: str, name: str, domain_name: str
) -> PddlProblem:
    if encoding not in ENCODINGS:
        raise GenError(f"unknown encoding {encoding!r}")
    types = world.types
    rows = object_rows(world)
    codec = CoordinateCodec.for_bounds(world.bounds)

    objects = [(r.name, r.pddl_type) for r in rows]
    init: list = []
    comments: tuple[str, ...] = ()

    if encoding == NUMERIC:
        init.append(Atom("agent-alive", (AGENT_NAME,)))
        for axis_idx, axis in enumerate(("x", "y", "z")):
            init.append(FluentInit(Fluent(axis, (AGENT_NAME,)), world.agent[axis_idx]))
        for t in types.names:
            init.append(
                FluentInit(Fluent(f"agent-num-{t}", (AGENT_NAME,)), world.inventory_count(t))
            )
        for r in rows:
            if r.kind == "block":
                init.append(Atom("block-present", (r.name,)))
                for axis_idx, axis in enumerate(("x", "y", "z")):
                    init.append(FluentInit(Fluent(axis, (r.name,)), r.position[axis_idx]))
            elif r.kind == "reserve":
                for axis in ("x", "y", "z"):
                    init.append(FluentInit(Fluent(axis, (r.name,)), 0))
            elif r.kind == "item":
                init.append(Atom("item-present", (r.name,)))
                for axis_idx, axis in enumerate(("x", "y", "z")):
                    init.append(FluentInit(Fluent(axis, (r.name,)), r.position[axis_idx]))
                init.append(FluentInit(Fluent("item-count", (r.name,)), r.quantity))
    else:
        objects += [(p, "position") for p in codec.position_objects()]
        objects += [(count_object(n), "count") for n in range(MAX_STACK + 1)]
        ox, oy, oz = codec.offsets
        comments = (f"position offsets: x {ox} y {oy} z {oz}",)

        init.append(Atom("agent-alive", (AGENT_NAME,)))
        for axis_idx, axis in enumerate(("x", "y", "z")):
            init.append(Atom(_AT[axis], (AGENT_NAME, codec.encode(axis_idx, world.agent[axis_idx]))))
        for t in types.names:
            init.append(
                Atom(f"agent-has-n-{t}", (AGENT_NAME, count_object(world.inventory_count(t))))
            )
        for r in rows:
            if r.kind == "block":
                init.append(Atom("block-present", (r.name,)))
                for axis_idx, axis in enumerate(("x", "y", "z")):
                    init.append(Atom(_AT[axis], (r.name, codec.encode(axis_idx, r.position[axis_idx]))))
            elif r.kind == "item":
                if r.quantity != 1:
                    raise GenError("propositional tasks require quantity-1 item stacks")
                init.append(Atom("item-present", (r.name,)))
                for axis_idx, axis in enumerate(("x", "y", "z")):
                    init.append(Atom(_AT[axis], (r.name, codec.encode(axis_idx, r.position[axis_idx]))))
        for k in range(codec.pool - 1):
            init.append(_seq_pos(f"position{k}", f"position{k + 1}"))
        for n in range(MAX_STACK):
            init.append(_seq_count(count_object(n), count_object(n + 1)))
        for entry in goal.inventory:
            for n in range(entry.quantity, MAX_STACK + 1):
                init.append(Atom("count-geq", (count_object(n), count_object(entry.quantity))))

    return PddlProblem(
        name=name,
        domain=domain_name,
        objects=tuple(objects),
        init=tuple(init),
        goal=Atom("goal-achieved", (AGENT_NAME,)),
        comments=comments,
    )


# -- decoding ---------------------------------------------------------------


@dataclass(frozen=True)
class DecodeInfo:
    """Everything needed to turn a ground state back into a world."""

    encoding: str
    bounds: WorldBounds
    types: TypeTable
    codec: CoordinateCodec
    objects: tuple[ObjectInfo, ...]
    spec_objects: int

    @cached_property
    def typed_rows(self) -> tuple[tuple[tuple[str, int], ...], tuple[tuple[str, int], ...]]:
        """(name, type id) rows for block-kind and item-kind objects."""
        blocks, items = [], []
        for r in self.objects:
            if r.kind in ("block", "reserve"):
                blocks.append((r.name, self.types.type_id(r.type_name)))
            elif r.kind == "item":
                items.append((r.name, self.types.type_id(r.type_name)))
        return tuple(blocks), tuple(items)

    @cached_property
    def axis_values(self) -> tuple[dict[str, int], dict[str, int], dict[str, int]]:
        """Per-axis map from position object name to world coordinate."""
        xs, ys, zs = (
            {f"position{k}": k - self.codec.offsets[axis] for k in range(self.codec.pool)}
            for axis in range(3)
        )
        return xs, ys, zs


_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def _scan_numeric(state) -> tuple[dict, dict, dict]:
    """One pass over the fluents: coordinates, stack counts, inventory."""
    coords: dict[str, list] = {}
    stacks: dict[str, int] = {}
    counters: dict[str, int] = {}
    for key, value in state.fluents.items():
        head = key[0]
        axis = _AXIS_INDEX.get(head)
        if axis is not None and len(key) == 2:
            coords.setdefault(key[1], [None, None, None])[axis] = value
        elif head == "item-count":
            stacks[key[1]] = value
        elif head.startswith("agent-num-"):
            counters[head[len("agent-num-") :]] = value
    return coords, stacks, counters


def _scan_prop(state, info: DecodeInfo) -> tuple[dict, set, dict, bool]:
    """One pass over the atoms: coordinates, present objects, inventory."""
    xs, ys, zs = info.axis_values
    coords: dict[str, list] = {}
    present: set[str] = set()
    counters: dict[str, int] = {}
    alive = False
    for atom in state.atoms:
        head = atom[0]
        if head == "at-x":
            axis, table = 0, xs
        elif head == "at-y":
            axis, table = 1, ys
        elif head == "at-z":
            axis, table = 2, zs
        elif head == "block-present" or head == "item-present":
            present.add(atom[1])
            continue
        elif head == "agent-alive":
            alive = True
            continue
        elif head.startswith("agent-has-n-") and atom[1] == AGENT_NAME:
            t = head[len("agent-has-n-") :]
            if t in counters:
                raise ContractError(f"agent has conflicting {t} count facts")
            counters[t] = int(atom[2][len("count") :])
            continue
        else:
            continue
        value = table.get(atom[2])
        if value is None:
            raise ContractError(f"{atom[2]!r} is not a position object")
        entry = coords.setdefault(atom[1], [None, None, None])
        if entry[axis] is not None:
            raise ContractError(f"object {atom[1]} has duplicate {head} facts")
        entry[axis] = value
    return coords, present, counters, alive


def _triple(coords: dict[str, list], name: str) -> Position:
    entry = coords.get(name)
    if entry is None or None in entry:
        raise ContractError(f"object {name} lacks a full coordinate triple")
    return Position(entry[0], entry[1], entry[2])


def decode_world(state, info: DecodeInfo) -> WorldState:
    """Rebuild the world a ground state denotes; raises ContractError on
    structurally impossible states (coordinate clashes, missing facts)."""
    bounds = info.bounds
    ex, ey, ez = bounds.extents
    blocks = np.zeros((ex, ey, ez), dtype=np.int16)
    items = np.zeros((ex, ey, ez), dtype=np.int16)
    item_counts = np.zeros((ex, ey, ez), dtype=np.int16)
    inventory = np.zeros(len(info.types) + 1, dtype=np.int16)
    block_rows, item_rows = info.typed_rows

    numeric = info.encoding == NUMERIC
    if numeric:
        coords, stacks, counters = _scan_numeric(state)
        alive = ("agent-alive", AGENT_NAME) in state.atoms
        present = {a[1] for a in state.atoms if a[0] in ("block-present", "item-present")}
    else:
        coords, present, counters, alive = _scan_prop(state, info)

    agent = _triple(coords, AGENT_NAME)
    mn = bounds.min
    for name, tid in block_rows:
        if name not in present:
            continue
        pos = _triple(coords, name)
        if not bounds.contains(pos):
            raise ContractError(f"block {name} decoded outside the world at {pos}")
        idx = (pos.x - mn.x, pos.y - mn.y, pos.z - mn.z)
        if blocks[idx]:
            raise ContractError(f"two present blocks decode to {pos}")
        blocks[idx] = tid
    for name, tid in item_rows:
        if name not in present:
            continue
        pos = _triple(coords, name)
        if not bounds.contains(pos):
            raise ContractError(f"item {name} decoded outside the world at {pos}")
        idx = (pos.x - mn.x, pos.y - mn.y, pos.z - mn.z)
        if items[idx]:
            raise ContractError(f"two present items decode to {pos}")
        items[idx] = tid
        if numeric:
            count = stacks.get(name)
            if count is None:
                raise ContractError(f"item {name} has no stack count")
        else:
            count = 1
        item_counts[idx] = count

    # Deletion of the coordinate facts is part of the break and pickup
    # effects, so a lingering triple on an absent object marks a bad state.
    if not numeric and len(coords) > len(present) + 1:
        for name in coords:
            if name != AGENT_NAME and name not in present:
                raise ContractError(f"absent object {name} still has coordinate facts")

    for t in info.types.names:
        value = counters.get(t)
        if value is None:
            raise ContractError(f"agent is missing the {t} counter")
        inventory[info.types.type_id(t)] = value

    return WorldState(
        bounds=bounds,
        types=info.types,
        blocks=blocks,
        items=items,
        item_counts=item_counts,
        agent=agent,
        alive=alive,
        inventory=inventory,
        spec_objects=info.spec_objects,
    )


# -- one-call compilation ----------------------------------------------------


@dataclass(frozen=True)
class CompiledTask:
    name: str
    world: WorldState
    goal: GoalSpec
    domains: dict
    problems: dict
    infos: dict

    def domain(self, encoding: str) -> PddlDomain:
        return self.domains[encoding]

    def problem(self, encoding: str) -> PddlProblem:
        return self.problems[encoding]

    def info(self, encoding: str) -> DecodeInfo:
        return self.infos[encoding]

    def file_texts(self) -> dict[str, str]:
        out = {}
        for enc in ENCODINGS:
            out[f"{self.name}-{enc}-domain.pddl"] = print_domain(self.domains[enc])
            out[f"{self.name}-{enc}-problem.pddl"] = print_problem(self.problems[enc])
        return out


def compile_task(spec: TaskSpec, registry: BlockTypeRegistry = DEFAULT_REGISTRY) -> CompiledTask:
    """Build the world and emit both encodings; assumes a validated spec."""
    world = build_initial_world(spec, registry)
    return compile_world(world, spec.goal, slugify(spec.name))


def compile_world(world: WorldState, goal: GoalSpec, name: str) -> CompiledTask:
    codec = CoordinateCodec.for_bounds(world.bounds)
    rows = object_rows(world)
    domains = {}
    problems = {}
    infos = {}
    for enc in ENCODINGS:
        domain_name = f"{name}-{enc}"
        domains[enc] = gen_domain(world, goal, enc, domain_name)
        problems[enc] = gen_problem(world, goal, enc, f"{domain_name}-problem", domain_name)
        infos[enc] = DecodeInfo(
            encoding=enc,
            bounds=world.bounds,
            types=world.types,
            codec=codec,
            objects=rows,
            spec_objects=world.spec_objects,
        )
    return CompiledTask(name, world, goal, domains, problems, infos)
