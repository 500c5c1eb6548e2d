"""Syntax tree for the emitted PDDL subset.

Variables are strings starting with '?'; anything else in an argument
position is an object constant. All nodes are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Not:
    expr: "Expr"


@dataclass(frozen=True)
class And:
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Exists:
    params: tuple[tuple[str, str], ...]  # (?var, type)
    body: "Expr"


@dataclass(frozen=True)
class Fluent:
    name: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Sum:
    terms: tuple["Term", ...]


@dataclass(frozen=True)
class Prod:
    terms: tuple["Term", ...]


@dataclass(frozen=True)
class Compare:
    op: str  # '=', '>=', '<='
    lhs: "Term"
    rhs: "Term"

    def __post_init__(self) -> None:
        if self.op not in ("=", ">=", "<="):
            raise ValueError(f"unsupported comparison {self.op!r}")


Term = Union[Fluent, Const, Sum, Prod]
Expr = Union[Atom, Not, And, Or, Exists, Compare]


@dataclass(frozen=True)
class AddEffect:
    atom: Atom


@dataclass(frozen=True)
class DelEffect:
    atom: Atom


@dataclass(frozen=True)
class IncreaseEffect:
    fluent: Fluent
    amount: Term


@dataclass(frozen=True)
class DecreaseEffect:
    fluent: Fluent
    amount: Term


Effect = Union[AddEffect, DelEffect, IncreaseEffect, DecreaseEffect]


@dataclass(frozen=True)
class PddlAction:
    name: str
    parameters: tuple[tuple[str, str], ...]  # (?var, type)
    precondition: Expr
    effects: tuple[Effect, ...]


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class PddlDomain:
    name: str
    requirements: tuple[str, ...]
    types: tuple[tuple[str, str], ...]  # (type, parent) in declaration order
    predicates: tuple[PredicateDecl, ...]
    functions: tuple[PredicateDecl, ...]  # empty for the propositional encoding
    actions: tuple[PddlAction, ...]

    def action(self, name: str) -> PddlAction:
        for act in self.actions:
            if act.name == name:
                return act
        raise KeyError(name)


@dataclass(frozen=True)
class FluentInit:
    fluent: Fluent  # ground
    value: int


InitFact = Union[Atom, FluentInit]


@dataclass(frozen=True)
class PddlProblem:
    name: str
    domain: str
    objects: tuple[tuple[str, str], ...]  # (name, type)
    init: tuple[InitFact, ...]
    goal: Expr
    comments: tuple[str, ...] = field(default=())


def flatten_and(expr: Expr) -> tuple[Expr, ...]:
    """Top-level conjunct list of an expression (non-recursive beyond And)."""
    if isinstance(expr, And):
        out: list[Expr] = []
        for item in expr.items:
            out.extend(flatten_and(item))
        return tuple(out)
    return (expr,)


def free_vars(node: object) -> frozenset[str]:
    """Variables occurring free in an expression, term, or effect."""
    if isinstance(node, Atom):
        return frozenset(a for a in node.args if a.startswith("?"))
    if isinstance(node, Not):
        return free_vars(node.expr)
    if isinstance(node, (And, Or)):
        out: frozenset[str] = frozenset()
        for item in node.items:
            out |= free_vars(item)
        return out
    if isinstance(node, Exists):
        bound = {v for v, _ in node.params}
        return free_vars(node.body) - bound
    if isinstance(node, Compare):
        return free_vars(node.lhs) | free_vars(node.rhs)
    if isinstance(node, Fluent):
        return frozenset(a for a in node.args if a.startswith("?"))
    if isinstance(node, Const):
        return frozenset()
    if isinstance(node, (Sum, Prod)):
        out = frozenset()
        for term in node.terms:
            out |= free_vars(term)
        return out
    if isinstance(node, (AddEffect, DelEffect)):
        return free_vars(node.atom)
    if isinstance(node, (IncreaseEffect, DecreaseEffect)):
        return free_vars(node.fluent) | free_vars(node.amount)
    raise TypeError(f"not an expression node: {node!r}")
