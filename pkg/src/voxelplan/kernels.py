"""Hot applicability kernel: per-direction action flags from the agent's
neighborhood.

The same source function runs either compiled by numba or as plain Python
over numpy scalars. `VOXELPLAN_KERNEL=numba|numpy` forces one; the default
is numba when importable. Both paths must return identical arrays; the
test suite and the `kernel-bench` command compare them.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigError

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


ENV_VAR = "VOXELPLAN_KERNEL"

# Flag matrix layout: one row per direction (north, south, east, west),
# twelve int32 columns. *_ok columns fold support, clearance, and bounds;
# *_tid/*_count columns carry the item or block found at the relevant cell
# so callers can finish type and inventory checks without grid reads.
N_FLAGS = 12
F_MOVE_OK = 0
F_MOVE_ITEM_TID = 1
F_MOVE_ITEM_COUNT = 2
F_UP_OK = 3
F_UP_ITEM_TID = 4
F_UP_ITEM_COUNT = 5
F_DOWN_OK = 6
F_DOWN_ITEM_TID = 7
F_DOWN_ITEM_COUNT = 8
F_BREAK_OK = 9
F_FRONT_BLOCK_TID = 10
F_PLACE_OK = 11

_DX = (0, 0, 1, -1)
_DZ = (-1, 1, 0, 0)


def _direction_flags(blocks, items, item_counts, ax, ay, az, out):
    nx, ny, nz = blocks.shape[0], blocks.shape[1], blocks.shape[2]

    for d in range(4):
        fx = ax + _DX[d]
        fz = az + _DZ[d]
        in_col = fx >= 0 and fx < nx and fz >= 0 and fz < nz

        below = in_col and ay - 1 >= 0 and blocks[fx, ay - 1, fz] != 0
        front = in_col and blocks[fx, ay, fz] != 0
        head = in_col and ay + 1 < ny and blocks[fx, ay + 1, fz] != 0
        over = in_col and ay + 2 < ny and blocks[fx, ay + 2, fz] != 0
        deep = in_col and ay - 2 >= 0 and blocks[fx, ay - 2, fz] != 0
        own_over = ay + 2 < ny and blocks[ax, ay + 2, az] != 0

        move_item = 0
        move_count = 0
        if in_col and items[fx, ay, fz] != 0:
            move_item = int(items[fx, ay, fz])
            move_count = int(item_counts[fx, ay, fz])
        up_item = 0
        up_count = 0
        if in_col and ay + 1 < ny and items[fx, ay + 1, fz] != 0:
            up_item = int(items[fx, ay + 1, fz])
            up_count = int(item_counts[fx, ay + 1, fz])
        down_item = 0
        down_count = 0
        if in_col and ay - 1 >= 0 and items[fx, ay - 1, fz] != 0:
            down_item = int(items[fx, ay - 1, fz])
            down_count = int(item_counts[fx, ay - 1, fz])

        move_ok = below and not front and not head and ay + 1 < ny
        up_ok = front and ay + 2 < ny and not own_over and not head and not over
        down_ok = deep and not below and not front
        break_ok = front and up_item == 0
        place_ok = in_col and not front and move_item == 0 and below

        out[d, F_MOVE_OK] = 1 if move_ok else 0
        out[d, F_MOVE_ITEM_TID] = move_item
        out[d, F_MOVE_ITEM_COUNT] = move_count
        out[d, F_UP_OK] = 1 if up_ok else 0
        out[d, F_UP_ITEM_TID] = up_item
        out[d, F_UP_ITEM_COUNT] = up_count
        out[d, F_DOWN_OK] = 1 if down_ok else 0
        out[d, F_DOWN_ITEM_TID] = down_item
        out[d, F_DOWN_ITEM_COUNT] = down_count
        out[d, F_BREAK_OK] = 1 if break_ok else 0
        out[d, F_FRONT_BLOCK_TID] = int(blocks[fx, ay, fz]) if in_col else 0
        out[d, F_PLACE_OK] = 1 if place_ok else 0

    return out


_direction_flags_jit = njit(cache=True)(_direction_flags) if HAVE_NUMBA else None


def kernel_mode() -> str:
    """The active kernel implementation name ('numba' or 'numpy')."""
    mode = os.environ.get(ENV_VAR, "").strip().lower()
    if mode == "":
        return "numba" if HAVE_NUMBA else "numpy"
    if mode not in ("numba", "numpy"):
        raise ConfigError(f"{ENV_VAR} must be 'numba' or 'numpy', got {mode!r}")
    if mode == "numba" and not HAVE_NUMBA:
        raise ConfigError(f"{ENV_VAR}=numba but numba is not importable")
    return mode


def applicability_flags(world, out: np.ndarray | None = None) -> np.ndarray:
    """(4, 12) int32 flag matrix for the world's agent, one row per direction."""
    if out is None:
        out = np.empty((4, N_FLAGS), dtype=np.int32)
    ax, ay, az = world.index_of(world.agent)
    fn = _direction_flags_jit if kernel_mode() == "numba" else _direction_flags
    return fn(world.blocks, world.items, world.item_counts, ax, ay, az, out)
