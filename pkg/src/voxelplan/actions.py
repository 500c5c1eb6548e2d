"""The shared action catalog: every consumer enumerates the same moves.

An Action is a (template, direction, subject) triple; its canonical text
name is what plans, PDDL schemas, and the play protocol all use. The
catalog for a task is fully determined by its type table.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blocktypes import TypeTable
from .errors import BindingError
from .geometry import DIRECTIONS

MOVE = "move"
MOVE_PICKUP = "move_and_pickup"
JUMP_UP = "jumpup"
JUMP_UP_PICKUP = "jumpup_and_pickup"
JUMP_DOWN = "jumpdown"
JUMP_DOWN_PICKUP = "jumpdown_and_pickup"
PLACE = "place"
BREAK = "break"
CHECK_GOAL = "checkgoal"

TEMPLATES: tuple[str, ...] = (
    MOVE,
    MOVE_PICKUP,
    JUMP_UP,
    JUMP_UP_PICKUP,
    JUMP_DOWN,
    JUMP_DOWN_PICKUP,
    PLACE,
    BREAK,
    CHECK_GOAL,
)

# Templates that move the agent one cell horizontally (pickups included).
MOVEMENT_TEMPLATES = frozenset(
    (MOVE, MOVE_PICKUP, JUMP_UP, JUMP_UP_PICKUP, JUMP_DOWN, JUMP_DOWN_PICKUP)
)
# Templates whose subject is an item type / a block type.
ITEM_TEMPLATES = frozenset((MOVE_PICKUP, JUMP_UP_PICKUP, JUMP_DOWN_PICKUP))
BLOCK_TEMPLATES = frozenset((PLACE, BREAK))


@dataclass(frozen=True)
class Action:
    """One catalog entry; subject is the item/block type for typed templates."""

    template: str
    direction: str | None = None
    subject: str | None = None

    @property
    def name(self) -> str:
        parts = [self.template]
        if self.subject is not None:
            parts.append(self.subject)
        if self.direction is not None:
            parts.append(self.direction)
        return "-".join(parts)

    def sort_key(self) -> tuple[str, str, str]:
        return (self.template, self.direction or "", self.subject or "")

    def __str__(self) -> str:
        return self.name


CHECKGOAL_ACTION = Action(CHECK_GOAL)


def catalog(types: TypeTable) -> tuple[Action, ...]:
    """Every action the task's type table admits, in canonical order."""
    out = [CHECKGOAL_ACTION]
    for d in DIRECTIONS:
        out.append(Action(MOVE, d))
        out.append(Action(JUMP_UP, d))
        out.append(Action(JUMP_DOWN, d))
        for t in types.item_types:
            out.append(Action(MOVE_PICKUP, d, t))
            out.append(Action(JUMP_UP_PICKUP, d, t))
            out.append(Action(JUMP_DOWN_PICKUP, d, t))
        for t in types.block_types:
            out.append(Action(PLACE, d, t))
            out.append(Action(BREAK, d, t))
    out.sort(key=Action.sort_key)
    return tuple(out)


def parse_action_name(name: str) -> Action:
    """Invert Action.name; raises BindingError on anything off-grammar."""
    if name == CHECK_GOAL:
        return CHECKGOAL_ACTION
    head, sep, direction = name.rpartition("-")
    if not sep or direction not in DIRECTIONS:
        raise BindingError(f"action name {name!r} has no direction suffix")
    if head in TEMPLATES:
        template, subject = head, None
    else:
        for template in TEMPLATES:
            if head.startswith(template + "-"):
                subject = head[len(template) + 1 :]
                break
        else:
            raise BindingError(f"unknown action template in {name!r}")
    if template == CHECK_GOAL:
        raise BindingError(f"{CHECK_GOAL} takes no direction: {name!r}")
    if template in ITEM_TEMPLATES or template in BLOCK_TEMPLATES:
        if not subject:
            raise BindingError(f"action {name!r} is missing its type")
    elif subject:
        raise BindingError(f"action template {template!r} takes no type")
    return Action(template, direction, subject)


def validate_against_types(action: Action, types: TypeTable) -> Action:
    """Check the subject belongs to the right type class for this table."""
    if action.template in ITEM_TEMPLATES and action.subject not in types.item_types:
        raise BindingError(f"{action.name}: {action.subject!r} is not an item type here")
    if action.template in BLOCK_TEMPLATES and action.subject not in types.block_types:
        raise BindingError(f"{action.name}: {action.subject!r} is not a block type here")
    return action
