"""Registry of known block/item type names and per-task type tables."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TypeInfo:
    name: str
    placeable: bool
    collectible: bool


# Closed registry for a run. Placeable types can exist as world blocks and be
# placed/broken; collectible-only types occur as items or inventory entries.
_DEFAULT_TYPES = [
    TypeInfo("grass_block", True, True),
    TypeInfo("dirt", True, True),
    TypeInfo("stone", True, True),
    TypeInfo("cobblestone", True, True),
    TypeInfo("log", True, True),
    TypeInfo("planks", True, True),
    TypeInfo("leaves", True, True),
    TypeInfo("obsidian", True, True),
    TypeInfo("bricks", True, True),
    TypeInfo("sand", True, True),
    TypeInfo("gravel", True, True),
    TypeInfo("diamond", False, True),
    TypeInfo("flower", False, True),
    TypeInfo("stick", False, True),
    TypeInfo("coal", False, True),
]


class BlockTypeRegistry:
    """Ordered, closed set of type names with placeable/collectible flags."""

    def __init__(self, types: list[TypeInfo] | None = None):
        self._types: dict[str, TypeInfo] = {}
        for info in types if types is not None else _DEFAULT_TYPES:
            if info.name in self._types:
                raise ValueError(f"duplicate type name {info.name!r}")
            self._types[info.name] = info

    def known(self, name: str) -> bool:
        return name in self._types

    def info(self, name: str) -> TypeInfo:
        return self._types[name]

    def names(self) -> list[str]:
        return list(self._types)


DEFAULT_REGISTRY = BlockTypeRegistry()


@dataclass(frozen=True)
class TypeTable:
    """The fixed, ordered set of types a single task works with.

    block_types drive place/break operators; item_types drive pickup
    operators. Both orderings are alphabetical so every consumer (codegen,
    simulator, kernels) enumerates identically. Type ids are 1-based; 0 is
    the empty cell everywhere.
    """

    names: tuple[str, ...]
    block_types: tuple[str, ...]
    item_types: tuple[str, ...]
    registry: BlockTypeRegistry = field(compare=False, default=DEFAULT_REGISTRY, repr=False)

    def type_id(self, name: str) -> int:
        return self.names.index(name) + 1

    def name_of(self, type_id: int) -> str:
        return self.names[type_id - 1]

    def __len__(self) -> int:
        return len(self.names)


def build_type_table(
    block_names: set[str],
    item_names: set[str],
    extra_names: set[str] = frozenset(),
    registry: BlockTypeRegistry = DEFAULT_REGISTRY,
) -> TypeTable:
    """Fix a task's type universe from the names it mentions.

    block_names: every type that can occur as a world block (spec blocks,
    goal blocks, placeable inventory/item types, the ground).
    item_names: every type that occurs as a world item stack.
    extra_names: inventory-only types (tracked by counters, no operators).
    """
    for name in sorted(block_names | item_names | set(extra_names)):
        if not registry.known(name):
            raise ValueError(f"unknown type name {name!r}")
    all_names = tuple(sorted(block_names | item_names | set(extra_names)))
    blocks = tuple(sorted(n for n in block_names if registry.info(n).placeable))
    items = tuple(sorted(item_names))
    return TypeTable(names=all_names, block_types=blocks, item_types=items, registry=registry)
