"""Compiler tests: frozen reference actions, init-fact counts, codecs."""

from __future__ import annotations

import re

import pytest

from voxelplan.actions import catalog
from voxelplan.codegen import (
    NUMERIC,
    PROP,
    CompiledTask,
    CoordinateCodec,
    compile_task,
    decode_world,
    gen_domain,
    object_rows,
    slugify,
)
from voxelplan.errors import ContractError, GenError
from voxelplan.geometry import Position, WorldBounds
from voxelplan.pddl import GroundState, flatten_and, print_domain, state_from_problem
from voxelplan.pddl.printer import effect_to_str, expr_to_str
from voxelplan.task import parse_task
from voxelplan.world import build_initial_world, world_stats

# A 5x9x5 cube with the agent dead centre: every position offset is zero,
# so emitted literals equal raw world coordinates.
CUBE_TASK = """\
name: cube-probe
goal:
  blocks:
    - position: {x: 0, y: 4, z: 2}
      type: planks
extensions:
  observation_range: [5, 9, 5]
  agent_start: {x: 2, y: 4, z: 2}
"""

# Frozen reference emissions. Layout is incidental; the token stream is not.
REFERENCE_MOVE_NORTH = """\
(:action move-north
 :parameters (?ag - agent)
 :precondition (and (agent-alive ?ag)
  (exists (?b - block) (and  (block-present ?b) (= (x ?b) (x ?ag))
  (= (y ?b) (+ (y ?ag) -1)) (= (z ?b)  (+ (z ?ag) -1)))) (and
  (not (exists (?b - block) (and  (block-present ?b) (= (x ?b) (x ?ag))
  (or (= (y ?b) (+ (y ?ag) 1)) (= (y ?b) (y ?ag))) (= (z ?b) (+ (z ?ag) -1)))))
  (not (exists (?i - item) (and (item-present ?i) (= (x ?i) (x ?ag)) (= (y ?i) (y ?ag)) (= (z ?i) (+ (z ?ag) -1)))))))
 :effect (and (decrease (z ?ag) 1))
)
"""

REFERENCE_CHECKGOAL = """\
(:action checkgoal
 :parameters (?ag - agent)
 :precondition (and (agent-alive ?ag)
  (exists (?b - planks-block)
  (and (block-present ?b) (= (x ?b) 0)
  (= (y ?b) 4)(= (z ?b) 2))))
 :effect (and (goal-achieved ?ag))
)
"""

REFERENCE_BREAK_PARAMS = (
    ("?ag", "agent"),
    ("?b", "grass_block-block"),
    ("?x", "position"),
    ("?y", "position"),
    ("?y_up", "position"),
    ("?z", "position"),
    ("?z_front", "position"),
    ("?n_start", "count"),
    ("?n_end", "count"),
)

REFERENCE_BREAK_CONJUNCTS = {
    "(agent-alive ?ag)",
    "(at-x ?ag ?x)",
    "(at-y ?ag ?y)",
    "(at-z ?ag ?z)",
    "(at-x ?b ?x)",
    "(at-y ?b ?y)",
    "(at-z ?b ?z_front)",
    "(are-seq ?z_front ?z)",
    "(are-seq ?y ?y_up)",
    "(block-present ?b)",
    "(not (exists (?i - item) (and (item-present ?i) (at-x ?i ?x) (at-y ?i ?y_up) (at-z ?i ?z_front))))",
    "(are-seq ?n_start ?n_end)",
    "(agent-has-n-grass_block ?ag ?n_start)",
}

REFERENCE_BREAK_EFFECTS = {
    "(not (block-present ?b))",
    "(not (at-x ?b ?x))",
    "(not (at-y ?b ?y))",
    "(not (at-z ?b ?z_front))",
    "(not (agent-has-n-grass_block ?ag ?n_start))",
    "(agent-has-n-grass_block ?ag ?n_end)",
}


def _tokens(text: str) -> list[str]:
    return re.findall(r"[()]|[^\s()]+", text)


def _action_text(domain_text: str, name: str) -> str:
    m = re.search(r"\(:action " + re.escape(name) + r"\n.*?\n  \)", domain_text, re.S)
    assert m, f"action {name} not emitted"
    return m.group(0)


def _normalize_seq(text: str) -> str:
    return text.replace("are-seq-pos", "are-seq").replace("are-seq-count", "are-seq")


@pytest.fixture(scope="module")
def cube() -> CompiledTask:
    return compile_task(parse_task(CUBE_TASK))


@pytest.fixture()
def sample_compiled(sample_spec) -> CompiledTask:
    return compile_task(sample_spec)


class TestReferenceActions:
    def test_numeric_move_north_token_stream(self, cube):
        emitted = _action_text(print_domain(cube.domain(NUMERIC)), "move-north")
        assert _tokens(emitted) == _tokens(REFERENCE_MOVE_NORTH)

    def test_numeric_checkgoal_token_stream(self, cube):
        emitted = _action_text(print_domain(cube.domain(NUMERIC)), "checkgoal")
        assert _tokens(emitted) == _tokens(REFERENCE_CHECKGOAL)

    def test_prop_break_parameter_list(self, cube):
        action = cube.domain(PROP).action("break-grass_block-north")
        assert action.parameters == REFERENCE_BREAK_PARAMS

    def test_prop_break_conjunct_set(self, cube):
        action = cube.domain(PROP).action("break-grass_block-north")
        got = {_normalize_seq(expr_to_str(c)) for c in flatten_and(action.precondition)}
        assert got == REFERENCE_BREAK_CONJUNCTS

    def test_prop_break_effect_set(self, cube):
        action = cube.domain(PROP).action("break-grass_block-north")
        got = {_normalize_seq(effect_to_str(e)) for e in action.effects}
        assert got == REFERENCE_BREAK_EFFECTS

    def test_prop_checkgoal_uses_zero_offset_positions(self, cube):
        emitted = _action_text(print_domain(cube.domain(PROP)), "checkgoal")
        for token in ("position0", "position4", "position2"):
            assert token in emitted


class TestCatalog:
    def test_two_block_one_item_type_catalog_is_41(self):
        spec = parse_task(
            "name: catalog-probe\n"
            "blocks:\n"
            "  - position: {x: 0, y: 4, z: 1}\n"
            "    type: obsidian\n"
            "items:\n"
            "  - position: {x: 0, y: 4, z: 2}\n"
            "    type: diamond\n"
            "    quantity: 1\n"
            "goal:\n"
            "  inventory:\n"
            "    - type: diamond\n"
            "      quantity: 1\n"
        )
        world = build_initial_world(spec)
        assert world.types.block_types == ("grass_block", "obsidian")
        assert world.types.item_types == ("diamond",)
        acts = catalog(world.types)
        assert len(acts) == 41
        ct = compile_task(spec)
        for enc in (NUMERIC, PROP):
            names = [a.name for a in ct.domain(enc).actions]
            assert names == [a.name for a in acts]

    def test_catalog_order_is_sorted(self, cube):
        names = [a.name for a in cube.domain(NUMERIC).actions]
        keys = [(a.template, a.direction or "", a.subject or "") for a in catalog(cube.world.types)]
        assert keys == sorted(keys)
        assert names[0].startswith("break-")
        assert "checkgoal" in names


class TestProblemFacts:
    @pytest.mark.parametrize("enc", [NUMERIC, PROP])
    def test_init_count_matches_stats(self, sample_compiled, enc):
        stats = world_stats(sample_compiled.world, sample_compiled.goal)
        expect = stats.init_predicates_num if enc == NUMERIC else stats.init_predicates_prop
        assert len(sample_compiled.problem(enc).init) == expect

    @pytest.mark.parametrize("enc", [NUMERIC, PROP])
    def test_cube_init_count_matches_stats(self, cube, enc):
        stats = world_stats(cube.world, cube.goal)
        expect = stats.init_predicates_num if enc == NUMERIC else stats.init_predicates_prop
        assert len(cube.problem(enc).init) == expect

    def test_numeric_inventory_counter_init(self, sample_compiled):
        text = sample_compiled.file_texts()[f"{sample_compiled.name}-numeric-problem.pddl"]
        assert "(= (agent-num-log ag0) 64)" in text

    def test_prop_problem_carries_offset_comment(self, sample_compiled):
        text = sample_compiled.file_texts()[f"{sample_compiled.name}-prop-problem.pddl"]
        assert ";; position offsets: x 6 y 4 z 6" in text

    def test_count_geq_facts_per_threshold(self, sample_compiled):
        # goal asks for log >= 1: count1..count64 each exceed it.
        facts = [
            f
            for f in sample_compiled.problem(PROP).init
            if getattr(f, "name", "") == "count-geq"
        ]
        assert len(facts) == 64
        assert all(f.args[1] == "count1" for f in facts)

    def test_requirements(self, cube):
        assert ":numeric-fluents" in cube.domain(NUMERIC).requirements
        assert ":numeric-fluents" not in cube.domain(PROP).requirements
        for enc in (NUMERIC, PROP):
            reqs = cube.domain(enc).requirements
            assert ":typing" in reqs and ":negative-preconditions" in reqs
            assert ":existential-preconditions" in reqs

    def test_regeneration_is_byte_identical(self, sample_spec):
        first = compile_task(sample_spec).file_texts()
        second = compile_task(sample_spec).file_texts()
        assert first == second


class TestCodec:
    def test_xz_bottom_aligned(self):
        bounds = WorldBounds(Position(-6, 0, -6), Position(6, 8, 6))
        codec = CoordinateCodec.for_bounds(bounds)
        assert codec.encode(2, -5) == "position1"
        assert codec.encode(0, -6) == "position0"

    def test_y_top_aligned(self):
        # pool 13, y extent 9: indices 4..12 so the top level hits the pool end.
        bounds = WorldBounds(Position(-6, 0, -6), Position(6, 8, 6))
        codec = CoordinateCodec.for_bounds(bounds)
        assert codec.encode(1, 0) == "position4"
        assert codec.encode(1, 8) == "position12"

    def test_out_of_range_rejected(self):
        bounds = WorldBounds(Position(-6, 0, -6), Position(6, 8, 6))
        codec = CoordinateCodec.for_bounds(bounds)
        with pytest.raises(GenError):
            codec.encode(0, 7)

    @pytest.mark.parametrize("axis,value", [(0, -6), (0, 6), (1, 0), (1, 8), (2, 3)])
    def test_roundtrip(self, axis, value):
        codec = CoordinateCodec.for_bounds(WorldBounds(Position(-6, 0, -6), Position(6, 8, 6)))
        assert codec.decode(axis, codec.encode(axis, value)) == value


class TestObjects:
    def test_object_rows_are_deterministic(self, sample_compiled):
        rows = object_rows(sample_compiled.world)
        assert rows[0].name == "ag0"
        kinds = [r.kind for r in rows]
        assert kinds == sorted(kinds, key=["agent", "block", "reserve", "item"].index)
        # 64 log + 64 obsidian carried units become reserve blocks.
        assert sum(1 for r in rows if r.kind == "reserve") == 128

    def test_both_encodings_share_object_names(self, sample_compiled):
        num = [n for n, _t in sample_compiled.problem(NUMERIC).objects]
        prop = [n for n, _t in sample_compiled.problem(PROP).objects]
        assert prop[: len(num)] == num
        assert any(n.startswith("position") for n in prop)
        assert "count64" in prop


class TestDecode:
    @pytest.mark.parametrize("enc", [NUMERIC, PROP])
    def test_initial_state_roundtrips(self, sample_compiled, enc):
        state = state_from_problem(sample_compiled.problem(enc))
        back = decode_world(state, sample_compiled.info(enc))
        assert back == sample_compiled.world
        assert back.digest() == sample_compiled.world.digest()

    def test_duplicate_coordinate_fact_rejected(self, cube):
        state = state_from_problem(cube.problem(PROP))
        state.atoms.add(("at-x", "ag0", "position0"))
        with pytest.raises(ContractError):
            decode_world(state, cube.info(PROP))

    def test_missing_counter_rejected(self, cube):
        state = state_from_problem(cube.problem(NUMERIC))
        del state.fluents[("agent-num-planks", "ag0")]
        with pytest.raises(ContractError):
            decode_world(state, cube.info(NUMERIC))

    def test_stray_state_without_agent_rejected(self, cube):
        with pytest.raises(ContractError):
            decode_world(GroundState(set(), {}), cube.info(NUMERIC))


class TestGuards:
    def test_multi_stack_item_rejected_propositionally(self):
        spec = parse_task(
            "name: stack-probe\n"
            "items:\n"
            "  - position: {x: 0, y: 4, z: 2}\n"
            "    type: log\n"
            "    quantity: 2\n"
            "goal:\n"
            "  inventory:\n"
            "    - type: log\n"
            "      quantity: 2\n"
        )
        world = build_initial_world(spec)
        with pytest.raises(GenError):
            gen_domain(world, spec.goal, PROP, "stack-probe-prop")
        # the numeric side has no such restriction
        gen_domain(world, spec.goal, NUMERIC, "stack-probe-numeric")

    def test_empty_goal_rejected(self, cube):
        with pytest.raises(GenError):
            gen_domain(cube.world, type(cube.goal)(), NUMERIC, "empty")

    def test_unknown_encoding_rejected(self, cube):
        with pytest.raises(GenError):
            gen_domain(cube.world, cube.goal, "sas", "bad")


@pytest.mark.parametrize(
    "raw,expect",
    [("Move Easy", "move-easy"), ("a_b c", "a-b-c"), ("--x--", "x"), ("///", "task")],
)
def test_slugify(raw, expect):
    assert slugify(raw) == expect
