"""World materialization, queries, stats, digests, snapshots."""

from __future__ import annotations

import pytest

from voxelplan.errors import BuildError
from voxelplan.geometry import Position
from voxelplan.task import BlockSpec, GoalSpec, InventoryEntry, ItemSpec, TaskSpec, parse_task
from voxelplan.world import (
    build_initial_world,
    position_pool_size,
    query,
    type_table_for,
    world_stats,
)


def tiny_spec(**kwargs) -> TaskSpec:
    defaults = dict(
        name="tiny",
        observation_range=(3, 5, 3),
        agent_start=Position(0, 4, 0),
        ground_y=3,
        goal=GoalSpec(agent_at=Position(1, 4, 1)),
    )
    defaults.update(kwargs)
    return TaskSpec(**defaults)


def test_ground_only_world():
    world = build_initial_world(tiny_spec())
    blocks = world.iter_blocks()
    assert len(blocks) == 9
    assert all(t == "grass_block" and p.y == 3 for p, t in blocks)
    assert world.agent == Position(0, 4, 0)
    assert world.alive


def test_sample_world_contents(sample_yaml):
    world = build_initial_world(parse_task(sample_yaml))
    assert query(world, Position(0, 4, 1)).kind == "block"
    assert query(world, Position(0, 4, 1)).type == "obsidian"
    item = query(world, Position(1, 5, 5))
    assert (item.kind, item.type, item.count) == ("item", "diamond", 1)
    assert query(world, Position(0, 3, 0)).type == "grass_block"
    assert query(world, Position(999, 4, 0)).kind == "empty"


def test_ground_override_single_block():
    spec = tiny_spec(blocks=(BlockSpec(Position(0, 3, 0), "log"),))
    world = build_initial_world(spec)
    assert query(world, Position(0, 3, 0)).type == "log"
    assert sum(1 for p, _ in world.iter_blocks() if p == Position(0, 3, 0)) == 1


def test_build_rejects_out_of_bounds_block():
    spec = tiny_spec(blocks=(BlockSpec(Position(50, 4, 0), "log"),))
    with pytest.raises(BuildError):
        build_initial_world(spec)


def test_build_rejects_unsupported_agent():
    spec = tiny_spec(agent_start=Position(0, 6, 0))
    with pytest.raises(BuildError):
        build_initial_world(spec)


def test_type_table_for_sample(sample_spec):
    table = type_table_for(sample_spec)
    assert table.names == ("diamond", "grass_block", "log", "obsidian")
    assert table.block_types == ("grass_block", "log", "obsidian")
    assert table.item_types == ("diamond",)


def test_type_totals_conservation_baseline(sample_spec):
    world = build_initial_world(sample_spec)
    totals = world.type_totals()
    assert totals["diamond"] == 1
    assert totals["obsidian"] == 64 + 1  # inventory + the placed block
    assert totals["log"] == 64
    assert totals["grass_block"] == 13 * 13


def test_digest_changes_with_state(sample_spec):
    world = build_initial_world(sample_spec)
    twin = world.clone()
    assert world.digest() == twin.digest()
    assert world == twin
    twin.agent = Position(0, 4, -1)
    assert world.digest() != twin.digest()
    assert world != twin


def test_snapshot_shape():
    world = build_initial_world(tiny_spec(items=(ItemSpec(Position(1, 4, 1), "diamond", 2),)))
    snap = world.to_snapshot()
    assert set(snap) == {"bounds", "agent", "inventory", "blocks", "items"}
    assert snap["agent"]["alive"] is True
    assert snap["items"] == [{"x": 1, "y": 4, "z": 1, "type": "diamond", "count": 2}]
    positions = [(b["x"], b["y"], b["z"]) for b in snap["blocks"]]
    assert positions == sorted(positions)


def test_world_stats_formulas():
    spec = tiny_spec(
        blocks=(BlockSpec(Position(1, 4, 1), "log"),),
        items=(ItemSpec(Position(-1, 4, 0), "diamond", 1),),
        inventory=(InventoryEntry("planks", 2),),
        goal=GoalSpec(inventory=(InventoryEntry("diamond", 1),)),
    )
    world = build_initial_world(spec)
    stats = world_stats(world, spec.goal)
    assert stats.initial_objects == 2
    assert stats.goal_predicates == 1
    n_types = len(world.types)  # diamond, grass_block, log, planks
    assert n_types == 4
    blocks = 9 + 1
    # reserves: placeable loose/held units: planks 2; log block is placed (no
    # reserve); diamond is not placeable.
    reserves = 2
    assert stats.init_predicates_num == (4 + n_types) + 4 * blocks + 3 * reserves + 5 * 1
    pool = position_pool_size(world.bounds)
    assert pool == 5
    assert stats.init_predicates_prop == (4 + n_types) + 4 * blocks + 4 * 1 + (pool - 1) + 64 + 64


def test_stats_goal_counts(sample_spec):
    world = build_initial_world(sample_spec)
    stats = world_stats(world, sample_spec.goal)
    assert stats.goal_predicates == 3
    assert stats.initial_objects == 2
