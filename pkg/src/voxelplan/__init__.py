"""Voxel-world planning toolkit: YAML task specs -> PDDL, simulation, search, play."""

__version__ = "0.1.0"
