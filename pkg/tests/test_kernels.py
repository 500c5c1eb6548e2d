"""Flag kernel: numba/numpy parity, mode selection, column semantics."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import random_small_spec
from voxelplan import kernels
from voxelplan.errors import ConfigError
from voxelplan.geometry import DIRECTIONS, Position
from voxelplan.kernels import (
    F_BREAK_OK,
    F_FRONT_BLOCK_TID,
    F_MOVE_OK,
    F_PLACE_OK,
    F_UP_OK,
    applicability_flags,
    kernel_mode,
)
from voxelplan.simulator import Simulator
from voxelplan.task import BlockSpec, GoalSpec, TaskSpec
from voxelplan.world import build_initial_world

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not importable")


def _flat_world():
    return build_initial_world(
        TaskSpec(
            name="flat",
            observation_range=(5, 5, 5),
            agent_start=Position(0, 4, 0),
            goal=GoalSpec(agent_at=Position(0, 4, -1)),
        )
    )


class TestModeSelection:
    def test_default_prefers_numba_when_available(self, monkeypatch):
        monkeypatch.delenv(kernels.ENV_VAR, raising=False)
        assert kernel_mode() == ("numba" if kernels.HAVE_NUMBA else "numpy")

    def test_env_forces_numpy(self, monkeypatch):
        monkeypatch.setenv(kernels.ENV_VAR, "numpy")
        assert kernel_mode() == "numpy"

    def test_bad_value_rejected(self, monkeypatch):
        monkeypatch.setenv(kernels.ENV_VAR, "fortran")
        with pytest.raises(ConfigError):
            kernel_mode()

    def test_numba_forced_but_missing(self, monkeypatch):
        monkeypatch.setenv(kernels.ENV_VAR, "numba")
        monkeypatch.setattr(kernels, "HAVE_NUMBA", False)
        with pytest.raises(ConfigError):
            kernel_mode()

    def test_missing_numba_defaults_to_numpy(self, monkeypatch):
        monkeypatch.delenv(kernels.ENV_VAR, raising=False)
        monkeypatch.setattr(kernels, "HAVE_NUMBA", False)
        assert kernel_mode() == "numpy"


class TestColumns:
    def test_flat_world_rows(self, monkeypatch):
        monkeypatch.setenv(kernels.ENV_VAR, "numpy")
        flags = applicability_flags(_flat_world())
        assert flags.shape == (4, kernels.N_FLAGS)
        for row in flags:
            assert row[F_MOVE_OK] == 1
            assert row[F_UP_OK] == 0
            assert row[F_BREAK_OK] == 0
            assert row[F_PLACE_OK] == 1

    def test_front_block_column_reports_type_id(self, monkeypatch):
        monkeypatch.setenv(kernels.ENV_VAR, "numpy")
        world = build_initial_world(
            TaskSpec(
                name="front",
                blocks=(BlockSpec(Position(0, 4, 1), "obsidian"),),
                observation_range=(5, 5, 5),
                agent_start=Position(0, 4, 0),
                goal=GoalSpec(agent_at=Position(0, 4, -1)),
            )
        )
        south = applicability_flags(world)[DIRECTIONS.index("south")]
        assert south[F_FRONT_BLOCK_TID] == world.types.type_id("obsidian")
        assert south[F_MOVE_OK] == 0
        assert south[F_UP_OK] == 1
        assert south[F_BREAK_OK] == 1
        assert south[F_PLACE_OK] == 0


@needs_numba
class TestParity:
    @pytest.mark.parametrize("seed", range(8))
    def test_numba_and_numpy_agree_along_walks(self, seed, monkeypatch):
        import random

        spec = random_small_spec(seed)
        world = build_initial_world(spec)
        sim = Simulator(world, spec.goal)
        rng = random.Random(f"parity:{seed}")
        for _ in range(30):
            monkeypatch.setenv(kernels.ENV_VAR, "numba")
            jit_flags = applicability_flags(world).copy()
            monkeypatch.setenv(kernels.ENV_VAR, "numpy")
            py_flags = applicability_flags(world)
            assert np.array_equal(jit_flags, py_flags)
            moves = [a for a in sim.applicable(world) if a.template != "checkgoal"]
            if not moves:
                break
            world = sim.successor(world, rng.choice(moves))
