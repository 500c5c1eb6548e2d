"""Exception types shared across the package."""

from __future__ import annotations


class VoxelplanError(Exception):
    """Base class for all package errors."""


class TaskParseError(VoxelplanError):
    """Malformed task YAML; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SchemaError(TaskParseError):
    """Structurally valid YAML that does not fit the task schema."""


class RangeError(TaskParseError):
    """A numeric field outside its allowed range."""


class ConfigError(VoxelplanError):
    """Bad configuration value (extents, adapter definitions, paths)."""


class BuildError(VoxelplanError):
    """World construction failed (out-of-bounds block, unsupported agent)."""


class EmitError(VoxelplanError):
    """PDDL printing hit an unresolvable symbol."""


class GenError(VoxelplanError):
    """PDDL generation cannot represent the task (codec range, stack size)."""


class GroundingLimitError(VoxelplanError):
    """Cartesian grounding exceeded the caller's binding cap."""


class EvalError(VoxelplanError):
    """Ground evaluation over an ill-formed expression (unbound variable)."""


class ContractError(VoxelplanError):
    """An operation was called outside its stated precondition."""


class PlanParseError(VoxelplanError):
    """Unparseable planner output; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class BindingError(VoxelplanError):
    """A plan action name or argument does not bind to the task's catalog."""
