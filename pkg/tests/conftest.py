"""Shared fixtures: a reference task document and a seeded world generator."""

from __future__ import annotations

import random

import pytest

from voxelplan.geometry import Position
from voxelplan.task import BlockSpec, GoalSpec, InventoryEntry, ItemSpec, TaskSpec

# Quoted numerals on purpose: the parser must accept both quoted and bare ints.
SAMPLE_TASK_YAML = """\
name: sample
blocks:
  - position:
      x: '0'
      y: '4'
      z: '1'
    type: obsidian
items:
  - position:
      x: '1'
      y: '5'
      z: '5'
    quantity: '1'
    type: diamond
inventory:
  - type: log
    quantity: '64'
  - type: obsidian
    quantity: '64'
goal:
  agent:
    - position:
        x: '6'
        y: '4'
        z: '-5'
  blocks:
    - position:
        x: '0'
        y: '4'
        z: '-2'
      type: log
  inventory:
    - type: log
      quantity: '1'
"""


@pytest.fixture
def sample_yaml() -> str:
    return SAMPLE_TASK_YAML


@pytest.fixture
def sample_spec():
    from voxelplan.task import parse_task

    return parse_task(SAMPLE_TASK_YAML)


SMALL_BLOCK_CHOICES = ("log", "cobblestone", "planks")
SMALL_ITEM_CHOICES = ("diamond", "stick")


def random_small_spec(seed: int) -> TaskSpec:
    """A seed-determined 5x5x5 task: scattered blocks, an item or two.

    Single-unit stacks only, so every generated task admits both PDDL
    encodings. Randomized suites (simulator soak, cross-checks) share this
    generator so their worlds stay reproducible.
    """
    rng = random.Random(f"small-world:{seed}")
    columns = [(x, z) for x in range(-2, 3) for z in range(-2, 3) if (x, z) != (0, 0)]
    rng.shuffle(columns)

    blocks = []
    for _ in range(rng.randint(2, 6)):
        x, z = columns.pop()
        blocks.append(BlockSpec(Position(x, rng.choice((4, 4, 5)), z), rng.choice(SMALL_BLOCK_CHOICES)))

    items = []
    for _ in range(rng.randint(0, 2)):
        x, z = columns.pop()
        items.append(ItemSpec(Position(x, 4, z), rng.choice(SMALL_ITEM_CHOICES), 1))

    inventory = []
    if rng.random() < 0.8:
        inventory.append(InventoryEntry(rng.choice(SMALL_BLOCK_CHOICES), rng.randint(1, 3)))

    if inventory:
        goal = GoalSpec(inventory=(InventoryEntry(inventory[0].type, 1),))
    elif items:
        goal = GoalSpec(inventory=(InventoryEntry(items[0].type, 1),))
    else:
        goal = GoalSpec(agent_at=Position(0, 4, 0))

    return TaskSpec(
        name=f"random-small-{seed}",
        blocks=tuple(blocks),
        items=tuple(items),
        inventory=tuple(inventory),
        goal=goal,
        observation_range=(5, 5, 5),
        agent_start=Position(0, 4, 0),
    )
