"""Positions, directions, and axis-aligned world bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple


class Position(NamedTuple):
    """A voxel cell: x east-positive, y up-positive, z south-positive."""

    x: int
    y: int
    z: int

    def offset(self, dx: int = 0, dy: int = 0, dz: int = 0) -> "Position":
        return Position(self.x + dx, self.y + dy, self.z + dz)

    def __str__(self) -> str:
        return f"({self.x},{self.y},{self.z})"


# Horizontal step per direction, in declaration order. North is -z; the
# other three follow by right-handed symmetry.
DIRECTIONS: tuple[str, ...] = ("north", "south", "east", "west")
DIRECTION_DELTAS: dict[str, tuple[int, int]] = {
    "north": (0, -1),
    "south": (0, 1),
    "east": (1, 0),
    "west": (-1, 0),
}


def direction_delta(direction: str) -> tuple[int, int]:
    """(dx, dz) for a cardinal direction name."""
    try:
        return DIRECTION_DELTAS[direction]
    except KeyError:
        raise ValueError(f"unknown direction {direction!r}") from None


@dataclass(frozen=True)
class WorldBounds:
    """Inclusive axis-aligned box of valid cells."""

    min: Position
    max: Position

    def __post_init__(self) -> None:
        if not (self.min.x <= self.max.x and self.min.y <= self.max.y and self.min.z <= self.max.z):
            raise ValueError(f"bounds min {self.min} exceeds max {self.max}")

    @property
    def extents(self) -> tuple[int, int, int]:
        return (
            self.max.x - self.min.x + 1,
            self.max.y - self.min.y + 1,
            self.max.z - self.min.z + 1,
        )

    def contains(self, pos: Position) -> bool:
        return (
            self.min.x <= pos.x <= self.max.x
            and self.min.y <= pos.y <= self.max.y
            and self.min.z <= pos.z <= self.max.z
        )

    def cell_count(self) -> int:
        ex, ey, ez = self.extents
        return ex * ey * ez

    def iter_cells(self) -> Iterator[Position]:
        for x in range(self.min.x, self.max.x + 1):
            for y in range(self.min.y, self.max.y + 1):
                for z in range(self.min.z, self.max.z + 1):
                    yield Position(x, y, z)
