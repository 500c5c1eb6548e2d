"""Equivalence walks: clean passes, fault detection, caps."""

from __future__ import annotations

from dataclasses import replace

import pytest

from conftest import random_small_spec
from voxelplan.codegen import NUMERIC, PROP, compile_task
from voxelplan.crosscheck import (
    MAX_MISMATCHES,
    check_encoding_bisimulation,
    check_sim_vs_pddl,
)
from voxelplan.geometry import Position
from voxelplan.pddl import AddEffect, And, DecreaseEffect, IncreaseEffect, Not, flatten_and
from voxelplan.task import BlockSpec, GoalSpec, TaskSpec


def _compiled(**kwargs):
    defaults = dict(
        name="probe",
        observation_range=(5, 5, 5),
        agent_start=Position(0, 4, 0),
        goal=GoalSpec(agent_at=Position(0, 4, -2)),
    )
    defaults.update(kwargs)
    return compile_task(TaskSpec(**defaults))


def _tamper(compiled, encoding, action_name, fn):
    """Swap one schema of one encoding for a broken variant."""
    dom = compiled.domain(encoding)
    actions = tuple(fn(a) if a.name == action_name else a for a in dom.actions)
    compiled.domains[encoding] = replace(dom, actions=actions)


def _drop_x_updates(action):
    effects = tuple(
        e
        for e in action.effects
        if not (isinstance(e, (IncreaseEffect, DecreaseEffect)) and e.fluent.name == "x")
    )
    return replace(action, effects=effects)


def _drop_at_x_add(action):
    effects = tuple(
        e for e in action.effects if not (isinstance(e, AddEffect) and e.atom.name == "at-x")
    )
    return replace(action, effects=effects)


def _drop_negations(action):
    conjuncts = tuple(c for c in flatten_and(action.precondition) if not isinstance(c, Not))
    return replace(action, precondition=And(conjuncts))


class TestCleanWalks:
    @pytest.mark.parametrize("enc", [NUMERIC, PROP])
    def test_flat_world_agrees(self, enc):
        report = check_sim_vs_pddl(_compiled(), enc, depth=3)
        assert report.passed
        assert not report.truncated
        assert report.states > 1

    def test_encodings_bisimulate(self):
        report = check_encoding_bisimulation(_compiled(), depth=3)
        assert report.passed

    @pytest.mark.parametrize("seed", range(2))
    def test_random_worlds_agree(self, seed):
        compiled = compile_task(random_small_spec(seed))
        for enc in (NUMERIC, PROP):
            assert check_sim_vs_pddl(compiled, enc, depth=2, max_states=150).passed
        assert check_encoding_bisimulation(compiled, depth=2, max_states=150).passed

    def test_walks_are_deterministic(self):
        compiled = compile_task(random_small_spec(0))
        first = check_sim_vs_pddl(compiled, PROP, depth=2, max_states=100)
        second = check_sim_vs_pddl(compiled, PROP, depth=2, max_states=100)
        assert (first.states, first.mismatches) == (second.states, second.mismatches)


class TestFaultDetection:
    def test_lost_numeric_update_is_a_successor_mismatch(self):
        compiled = _compiled()
        _tamper(compiled, NUMERIC, "move-east", _drop_x_updates)
        report = check_sim_vs_pddl(compiled, NUMERIC, depth=1)
        assert not report.passed
        assert report.mismatches[0].kind == "successor"
        assert "move-east" in report.mismatches[0].detail

    def test_tampered_encoding_breaks_bisimulation(self):
        compiled = _compiled()
        _tamper(compiled, NUMERIC, "move-east", _drop_x_updates)
        report = check_encoding_bisimulation(compiled, depth=1)
        assert not report.passed

    def test_undecodable_successor_is_reported_not_raised(self):
        compiled = _compiled()
        _tamper(compiled, PROP, "move-east", _drop_at_x_add)
        report = check_sim_vs_pddl(compiled, PROP, depth=1)
        assert not report.passed
        assert any(m.kind == "decode" for m in report.mismatches)

    def test_over_permissive_precondition_is_an_applicable_mismatch(self):
        compiled = _compiled(blocks=(BlockSpec(Position(0, 4, -1), "log"),))
        _tamper(compiled, NUMERIC, "move-north", _drop_negations)
        report = check_sim_vs_pddl(compiled, NUMERIC, depth=1)
        assert not report.passed
        first = report.mismatches[0]
        assert first.kind == "applicable-set"
        assert "move-north" in first.detail

    def test_mismatch_flood_is_capped(self):
        # A long north-south corridor keeps the walk advancing while the two
        # tampered branches add mismatches at every visited state.
        compiled = _compiled(observation_range=(5, 5, 13))
        _tamper(compiled, NUMERIC, "move-east", _drop_x_updates)
        _tamper(compiled, NUMERIC, "move-west", _drop_x_updates)
        report = check_sim_vs_pddl(compiled, NUMERIC, depth=5)
        assert len(report.mismatches) == MAX_MISMATCHES
        assert report.truncated


class TestCaps:
    def test_state_cap_truncates_cleanly(self):
        report = check_sim_vs_pddl(_compiled(), NUMERIC, depth=3, max_states=1)
        assert report.passed
        assert report.truncated
        assert report.states == 1

    def test_bisim_state_cap(self):
        report = check_encoding_bisimulation(_compiled(), depth=3, max_states=1)
        assert report.passed
        assert report.truncated
