"""PDDL subset: syntax tree, deterministic printer, ground evaluator."""

from .ast import (
    AddEffect,
    And,
    Atom,
    Compare,
    Const,
    DecreaseEffect,
    DelEffect,
    Exists,
    Expr,
    Fluent,
    FluentInit,
    IncreaseEffect,
    Not,
    Or,
    PddlAction,
    PddlDomain,
    PddlProblem,
    PredicateDecl,
    Prod,
    Sum,
    Term,
    flatten_and,
    free_vars,
)
from .evaluate import (
    EvalContext,
    GroundAction,
    GroundState,
    apply,
    applicable_ground_actions,
    eval_term,
    ground_actions,
    holds,
    iter_bindings,
    state_from_problem,
)
from .printer import print_domain, print_problem

__all__ = [
    "AddEffect",
    "And",
    "Atom",
    "Compare",
    "Const",
    "DecreaseEffect",
    "DelEffect",
    "Exists",
    "Expr",
    "Fluent",
    "FluentInit",
    "IncreaseEffect",
    "Not",
    "Or",
    "PddlAction",
    "PddlDomain",
    "PddlProblem",
    "PredicateDecl",
    "Prod",
    "Sum",
    "Term",
    "flatten_and",
    "free_vars",
    "EvalContext",
    "GroundAction",
    "GroundState",
    "apply",
    "applicable_ground_actions",
    "eval_term",
    "ground_actions",
    "holds",
    "iter_bindings",
    "state_from_problem",
    "print_domain",
    "print_problem",
]
