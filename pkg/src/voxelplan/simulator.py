"""Checked action application over WorldState: the semantic ground truth.

Every action the PDDL encodings describe is implemented here directly on
the voxel grids. `check_action` explains rejections with stable reason
ids (the play service forwards them verbatim); `enumerate_applicable`
answers the same question for the whole catalog through the flag kernel.
The two must always agree, and the test suite holds them to that.
"""

from __future__ import annotations

from dataclasses import dataclass

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
from .errors import ContractError
from .geometry import DIRECTIONS, direction_delta
from .kernels import (
    F_BREAK_OK,
    F_DOWN_ITEM_COUNT,
    F_DOWN_ITEM_TID,
    F_DOWN_OK,
    F_FRONT_BLOCK_TID,
    F_MOVE_ITEM_COUNT,
    F_MOVE_ITEM_TID,
    F_MOVE_OK,
    F_PLACE_OK,
    F_UP_ITEM_COUNT,
    F_UP_ITEM_TID,
    F_UP_OK,
    applicability_flags,
)
from .task import GoalSpec
from .world import MAX_STACK, WorldState

R_DEAD = "dead-agent"
R_OUT_OF_RANGE = "out-of-range"
R_NO_SUPPORT = "no-support"
R_NO_HEADROOM = "no-headroom"
R_BLOCKED_BODY = "blocked-body"
R_BLOCKED_HEAD = "blocked-head"
R_ITEM_IN_PATH = "item-in-path"
R_NO_ITEM = "no-item"
R_INVENTORY_FULL = "inventory-full"
R_INVENTORY_EMPTY = "inventory-empty"
R_NO_BLOCK = "no-block"
R_ITEM_ON_TOP = "item-on-top"
R_OCCUPIED = "occupied"
R_GOAL_UNSATISFIED = "goal-unsatisfied"

REASON_IDS = frozenset(
    {
        R_DEAD,
        R_OUT_OF_RANGE,
        R_NO_SUPPORT,
        R_NO_HEADROOM,
        R_BLOCKED_BODY,
        R_BLOCKED_HEAD,
        R_ITEM_IN_PATH,
        R_NO_ITEM,
        R_INVENTORY_FULL,
        R_INVENTORY_EMPTY,
        R_NO_BLOCK,
        R_ITEM_ON_TOP,
        R_OCCUPIED,
        R_GOAL_UNSATISFIED,
    }
)

_DIR_INDEX = {name: i for i, name in enumerate(DIRECTIONS)}
_DY = {MOVE: 0, MOVE_PICKUP: 0, JUMP_UP: 1, JUMP_UP_PICKUP: 1, JUMP_DOWN: -1, JUMP_DOWN_PICKUP: -1}
_PICKUPS = frozenset((MOVE_PICKUP, JUMP_UP_PICKUP, JUMP_DOWN_PICKUP))


@dataclass(frozen=True)
class StepOutcome:
    action: Action
    ok: bool
    reason: str | None = None


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of replaying a plan from a fixed start state.

    failing_index is 1-based; None when every step applied. A plan counts
    as verified only when it runs to the end and the goal holds there.
    """

    plan_length: int
    failing_index: int | None
    failing_reason: str | None
    goal_satisfied: bool
    final_digest: str

    @property
    def ok(self) -> bool:
        return self.failing_index is None and self.goal_satisfied


def goal_satisfied(world: WorldState, goal: GoalSpec) -> bool:
    if not world.alive:
        return False
    if goal.agent_at is not None and world.agent != goal.agent_at:
        return False
    for spec in goal.blocks:
        if world.block_at(spec.position) != spec.type:
            return False
    for entry in goal.inventory:
        if world.inventory_count(entry.type) < entry.quantity:
            return False
    return True


def check_action(world: WorldState, action: Action, goal: GoalSpec) -> str | None:
    """Reason id why the action does not apply, or None when it does."""
    if not world.alive:
        return R_DEAD
    t = action.template

    if t == CHECK_GOAL:
        return None if goal_satisfied(world, goal) else R_GOAL_UNSATISFIED

    dx, dz = direction_delta(action.direction)
    feet = world.agent

    if t in _DY:
        dest = feet.offset(dx=dx, dy=_DY[t], dz=dz)
        dest_head = dest.offset(dy=1)
        if not (world.in_bounds(dest) and world.in_bounds(dest_head)):
            return R_OUT_OF_RANGE
        if not world.block_id_at(dest.offset(dy=-1)):
            return R_NO_SUPPORT
        if t in (JUMP_UP, JUMP_UP_PICKUP) and world.block_id_at(feet.offset(dy=2)):
            return R_NO_HEADROOM
        if world.block_id_at(dest):
            return R_BLOCKED_BODY
        if world.block_id_at(dest_head):
            return R_BLOCKED_HEAD
        stack = world.item_at(dest)
        if t in _PICKUPS:
            if stack is None or stack[0] != action.subject:
                return R_NO_ITEM
            if world.inventory_count(action.subject) + stack[1] > MAX_STACK:
                return R_INVENTORY_FULL
        elif stack is not None:
            return R_ITEM_IN_PATH
        return None

    front = feet.offset(dx=dx, dz=dz)
    if not world.in_bounds(front):
        return R_OUT_OF_RANGE

    if t == BREAK:
        if world.block_at(front) != action.subject:
            return R_NO_BLOCK
        if world.item_at(front.offset(dy=1)) is not None:
            return R_ITEM_ON_TOP
        if world.inventory_count(action.subject) >= MAX_STACK:
            return R_INVENTORY_FULL
        return None

    if t == PLACE:
        if world.block_id_at(front):
            return R_OCCUPIED
        if world.item_at(front) is not None:
            return R_ITEM_IN_PATH
        if not world.block_id_at(front.offset(dy=-1)):
            return R_NO_SUPPORT
        if world.inventory_count(action.subject) < 1:
            return R_INVENTORY_EMPTY
        return None

    raise ContractError(f"unknown action template {t!r}")


def apply_action(world: WorldState, action: Action) -> None:
    """Mutate the world by an action already known to be applicable."""
    t = action.template
    if t == CHECK_GOAL:
        return

    dx, dz = direction_delta(action.direction)
    if t in _DY:
        dest = world.agent.offset(dx=dx, dy=_DY[t], dz=dz)
        if t in _PICKUPS:
            idx = world.index_of(dest)
            tid = int(world.items[idx])
            world.inventory[tid] += world.item_counts[idx]
            world.items[idx] = 0
            world.item_counts[idx] = 0
        world.agent = dest
        return

    idx = world.index_of(world.agent.offset(dx=dx, dz=dz))
    tid = world.types.type_id(action.subject)
    if t == BREAK:
        world.blocks[idx] = 0
        world.inventory[tid] += 1
    else:
        world.blocks[idx] = tid
        world.inventory[tid] -= 1


def step(world: WorldState, action: Action, goal: GoalSpec) -> StepOutcome:
    """Check, then apply in place. The world is untouched on rejection."""
    reason = check_action(world, action, goal)
    if reason is not None:
        return StepOutcome(action, False, reason)
    apply_action(world, action)
    return StepOutcome(action, True)


def enumerate_applicable(
    world: WorldState,
    goal: GoalSpec,
    actions: tuple[Action, ...] | None = None,
) -> list[Action]:
    """Applicable catalog actions in catalog order, via the flag kernel."""
    if not world.alive:
        return []
    if actions is None:
        actions = catalog(world.types)
    flags = applicability_flags(world)
    inv = world.inventory
    types = world.types

    out = []
    for action in actions:
        t = action.template
        if t == CHECK_GOAL:
            if goal_satisfied(world, goal):
                out.append(action)
            continue
        row = flags[_DIR_INDEX[action.direction]]
        if t == MOVE:
            ok = row[F_MOVE_OK] and row[F_MOVE_ITEM_TID] == 0
        elif t == MOVE_PICKUP:
            tid = types.type_id(action.subject)
            ok = (
                row[F_MOVE_OK]
                and row[F_MOVE_ITEM_TID] == tid
                and inv[tid] + row[F_MOVE_ITEM_COUNT] <= MAX_STACK
            )
        elif t == JUMP_UP:
            ok = row[F_UP_OK] and row[F_UP_ITEM_TID] == 0
        elif t == JUMP_UP_PICKUP:
            tid = types.type_id(action.subject)
            ok = (
                row[F_UP_OK]
                and row[F_UP_ITEM_TID] == tid
                and inv[tid] + row[F_UP_ITEM_COUNT] <= MAX_STACK
            )
        elif t == JUMP_DOWN:
            ok = row[F_DOWN_OK] and row[F_DOWN_ITEM_TID] == 0
        elif t == JUMP_DOWN_PICKUP:
            tid = types.type_id(action.subject)
            ok = (
                row[F_DOWN_OK]
                and row[F_DOWN_ITEM_TID] == tid
                and inv[tid] + row[F_DOWN_ITEM_COUNT] <= MAX_STACK
            )
        elif t == BREAK:
            tid = types.type_id(action.subject)
            ok = row[F_BREAK_OK] and row[F_FRONT_BLOCK_TID] == tid and inv[tid] < MAX_STACK
        else:
            tid = types.type_id(action.subject)
            ok = row[F_PLACE_OK] and inv[tid] >= 1
        if ok:
            out.append(action)
    return out


class Simulator:
    """Catalog, applicability, stepping, and plan replay for one task."""

    def __init__(self, world: WorldState, goal: GoalSpec):
        self.initial = world.clone()
        self.goal = goal
        self.actions = catalog(world.types)

    def applicable(self, world: WorldState) -> list[Action]:
        return enumerate_applicable(world, self.goal, self.actions)

    def check(self, world: WorldState, action: Action) -> str | None:
        return check_action(world, action, self.goal)

    def step(self, world: WorldState, action: Action) -> StepOutcome:
        return step(world, action, self.goal)

    def successor(self, world: WorldState, action: Action) -> WorldState:
        """A fresh world one checked step ahead; rejection is a caller bug."""
        nxt = world.clone()
        outcome = step(nxt, action, self.goal)
        if not outcome.ok:
            raise ContractError(f"{action.name} not applicable: {outcome.reason}")
        return nxt

    def expand(self, world: WorldState) -> list[tuple[Action, WorldState]]:
        """(action, successor) for every applicable action except checkgoal."""
        out = []
        for action in self.applicable(world):
            if action.template == CHECK_GOAL:
                continue
            nxt = world.clone()
            apply_action(nxt, action)
            out.append((action, nxt))
        return out

    def goal_satisfied(self, world: WorldState) -> bool:
        return goal_satisfied(world, self.goal)

    def run_plan(self, plan: list[Action], start: WorldState | None = None) -> VerificationResult:
        world = (start or self.initial).clone()
        for i, action in enumerate(plan, start=1):
            outcome = step(world, action, self.goal)
            if not outcome.ok:
                return VerificationResult(
                    plan_length=len(plan),
                    failing_index=i,
                    failing_reason=outcome.reason,
                    goal_satisfied=goal_satisfied(world, self.goal),
                    final_digest=world.digest(),
                )
        return VerificationResult(
            plan_length=len(plan),
            failing_index=None,
            failing_reason=None,
            goal_satisfied=goal_satisfied(world, self.goal),
            final_digest=world.digest(),
        )
