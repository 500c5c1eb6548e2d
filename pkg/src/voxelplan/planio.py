"""Plan text in and out.

One tolerant reader covers the common planner output shapes:

    (move-north)                    canonical, what serialize_plan writes
    (move-north ag0)                grounded arguments, erased on parse
    0.0: (move-north)               timestamped lines
    ; cost = 5 (unit cost)          comment lines and trailing comments

Arguments are dropped because every catalog action is fully determined by
its name; the agent is the only binding that matters and there is one.
"""

from __future__ import annotations

import re

from .actions import Action, parse_action_name, validate_against_types
from .blocktypes import TypeTable
from .errors import BindingError, PlanParseError

_TIME_PREFIX = re.compile(r"^\d+(?:\.\d+)?\s*:\s*")
_ACTION_LINE = re.compile(r"^\(\s*([^\s()]+)((?:\s+[^\s()]+)*)\s*\)$")


def parse_plan(text: str) -> list[Action]:
    """Parse plan text into catalog actions; errors carry the line number."""
    plan: list[Action] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        line = _TIME_PREFIX.sub("", line)
        match = _ACTION_LINE.match(line)
        if match is None:
            raise PlanParseError(f"not an action line: {raw.strip()!r}", line=lineno)
        try:
            plan.append(parse_action_name(match.group(1)))
        except BindingError as exc:
            raise PlanParseError(str(exc), line=lineno) from exc
    return plan


def serialize_plan(plan: list[Action]) -> str:
    """Canonical plan text: one bare-name action per line."""
    return "".join(f"({action.name})\n" for action in plan)


def bind_plan(plan: list[Action], types: TypeTable) -> list[Action]:
    """Check every action's subject against a task's type universe."""
    for i, action in enumerate(plan, start=1):
        try:
            validate_against_types(action, types)
        except BindingError as exc:
            raise BindingError(f"step {i}: {exc}") from exc
    return plan
