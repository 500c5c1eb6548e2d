"""Breadth-first plan search over simulator states.

The search is the solvability oracle: unit costs, canonical expansion
order, so the returned plan is shortest and deterministic. States are
keyed by a digest of their delta against the initial world, which stays
small because search touches few cells.
"""

from __future__ import annotations

import hashlib
import struct
from collections import deque
from dataclasses import dataclass

import numpy as np

from .actions import Action
from .simulator import Simulator, goal_satisfied
from .task import GoalSpec
from .world import WorldState


@dataclass(frozen=True)
class SearchLimits:
    max_states: int = 2_000_000  # expansions before giving up
    max_depth: int | None = None


@dataclass
class SearchResult:
    plan: list[Action] | None
    expanded: int
    generated: int
    limit_hit: str | None = None

    @property
    def solved(self) -> bool:
        return self.plan is not None


def _delta_key(world: WorldState, base: WorldState) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(struct.pack("<iii?", *world.agent, world.alive))
    h.update(world.inventory.tobytes())
    for arr, ref in (
        (world.blocks, base.blocks),
        (world.items, base.items),
        (world.item_counts, base.item_counts),
    ):
        changed = np.flatnonzero(arr != ref)
        h.update(changed.astype(np.int32).tobytes())
        h.update(arr.reshape(-1)[changed].tobytes())
    return h.digest()


def bfs_solve(world: WorldState, goal: GoalSpec, limits: SearchLimits | None = None) -> SearchResult:
    limits = limits or SearchLimits()
    sim = Simulator(world, goal)
    base = sim.initial
    if goal_satisfied(base, goal):
        return SearchResult(plan=[], expanded=0, generated=1)

    start_key = _delta_key(base, base)
    parents: dict[bytes, tuple[bytes, Action] | None] = {start_key: None}
    frontier: deque[tuple[WorldState, bytes, int]] = deque([(base, start_key, 0)])
    expanded = 0
    generated = 1
    depth_capped = False

    while frontier:
        state, key, depth = frontier.popleft()
        if limits.max_depth is not None and depth >= limits.max_depth:
            depth_capped = True
            continue
        if expanded >= limits.max_states:
            return SearchResult(None, expanded, generated, limit_hit="max_states")
        expanded += 1
        for action, nxt in sim.expand(state):
            nxt_key = _delta_key(nxt, base)
            if nxt_key in parents:
                continue
            parents[nxt_key] = (key, action)
            generated += 1
            if goal_satisfied(nxt, goal):
                return SearchResult(_reconstruct(parents, nxt_key), expanded, generated)
            frontier.append((nxt, nxt_key, depth + 1))

    limit = "max_depth" if depth_capped else None
    return SearchResult(None, expanded, generated, limit_hit=limit)


def _reconstruct(parents: dict, key: bytes) -> list[Action]:
    plan: list[Action] = []
    entry = parents[key]
    while entry is not None:
        key, action = entry
        plan.append(action)
        entry = parents[key]
    plan.reverse()
    return plan
