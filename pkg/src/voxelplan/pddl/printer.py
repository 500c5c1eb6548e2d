"""Deterministic PDDL emission; output is byte-identical for equal input."""

from __future__ import annotations

from ..errors import EmitError
from .ast import (
    AddEffect,
    And,
    Atom,
    Compare,
    Const,
    DecreaseEffect,
    DelEffect,
    Effect,
    Exists,
    Expr,
    Fluent,
    FluentInit,
    IncreaseEffect,
    Not,
    Or,
    PddlDomain,
    PddlProblem,
    Prod,
    Sum,
    Term,
)


def term_to_str(term: Term) -> str:
    if isinstance(term, Fluent):
        if not term.args:
            return f"({term.name})"
        return f"({term.name} {' '.join(term.args)})"
    if isinstance(term, Const):
        return str(term.value)
    if isinstance(term, Sum):
        return f"(+ {' '.join(term_to_str(t) for t in term.terms)})"
    if isinstance(term, Prod):
        return f"(* {' '.join(term_to_str(t) for t in term.terms)})"
    raise EmitError(f"not a numeric term: {term!r}")


def expr_to_str(expr: Expr) -> str:
    if isinstance(expr, Atom):
        if not expr.args:
            return f"({expr.name})"
        return f"({expr.name} {' '.join(expr.args)})"
    if isinstance(expr, Not):
        return f"(not {expr_to_str(expr.expr)})"
    if isinstance(expr, And):
        return f"(and {' '.join(expr_to_str(e) for e in expr.items)})"
    if isinstance(expr, Or):
        return f"(or {' '.join(expr_to_str(e) for e in expr.items)})"
    if isinstance(expr, Exists):
        params = " ".join(f"{v} - {t}" for v, t in expr.params)
        return f"(exists ({params}) {expr_to_str(expr.body)})"
    if isinstance(expr, Compare):
        return f"({expr.op} {term_to_str(expr.lhs)} {term_to_str(expr.rhs)})"
    raise EmitError(f"not an expression: {expr!r}")


def effect_to_str(effect: Effect) -> str:
    if isinstance(effect, AddEffect):
        return expr_to_str(effect.atom)
    if isinstance(effect, DelEffect):
        return f"(not {expr_to_str(effect.atom)})"
    if isinstance(effect, IncreaseEffect):
        return f"(increase {term_to_str(effect.fluent)} {term_to_str(effect.amount)})"
    if isinstance(effect, DecreaseEffect):
        return f"(decrease {term_to_str(effect.fluent)} {term_to_str(effect.amount)})"
    raise EmitError(f"not an effect: {effect!r}")


def _collect_symbols(expr: Expr, preds: set[str], fns: set[str]) -> None:
    if isinstance(expr, Atom):
        preds.add(expr.name)
    elif isinstance(expr, Not):
        _collect_symbols(expr.expr, preds, fns)
    elif isinstance(expr, (And, Or)):
        for item in expr.items:
            _collect_symbols(item, preds, fns)
    elif isinstance(expr, Exists):
        _collect_symbols(expr.body, preds, fns)
    elif isinstance(expr, Compare):
        for term in (expr.lhs, expr.rhs):
            _collect_terms(term, fns)


def _collect_terms(term: Term, fns: set[str]) -> None:
    if isinstance(term, Fluent):
        fns.add(term.name)
    elif isinstance(term, (Sum, Prod)):
        for t in term.terms:
            _collect_terms(t, fns)


def _check_lowercase(name: str) -> str:
    if name != name.lower():
        raise EmitError(f"symbol not lowercase: {name!r}")
    return name


def _wrapped_and(items: tuple, to_str, indent: str) -> str:
    """(and ...) with each top-level member on its own line."""
    if not items:
        return "(and )"
    parts = [to_str(items[0])]
    parts.extend(f"{indent}{to_str(item)}" for item in items[1:])
    joined = "\n".join(parts)
    return f"(and {joined})"


def print_domain(domain: PddlDomain) -> str:
    declared_preds = {p.name for p in domain.predicates}
    declared_fns = {f.name for f in domain.functions}
    declared_types = {"object"} | {t for t, _ in domain.types}
    for t, parent in domain.types:
        if parent not in declared_types:
            raise EmitError(f"type {t!r} has undeclared parent {parent!r}")

    lines = [f"(define (domain {_check_lowercase(domain.name)})"]
    lines.append(f"  (:requirements {' '.join(domain.requirements)})")

    lines.append("  (:types")
    for t, parent in domain.types:
        lines.append(f"    {_check_lowercase(t)} - {parent}")
    lines.append("  )")

    lines.append("  (:predicates")
    for decl in domain.predicates:
        params = " ".join(f"{v} - {t}" for v, t in decl.params)
        lines.append(f"    ({_check_lowercase(decl.name)} {params})" if params else f"    ({decl.name})")
    lines.append("  )")

    if domain.functions:
        lines.append("  (:functions")
        for decl in domain.functions:
            params = " ".join(f"{v} - {t}" for v, t in decl.params)
            lines.append(f"    ({_check_lowercase(decl.name)} {params})" if params else f"    ({decl.name})")
        lines.append("  )")

    for action in domain.actions:
        used_preds: set[str] = set()
        used_fns: set[str] = set()
        _collect_symbols(action.precondition, used_preds, used_fns)
        for eff in action.effects:
            if isinstance(eff, (AddEffect, DelEffect)):
                used_preds.add(eff.atom.name)
            else:
                _collect_terms(eff.fluent, used_fns)
                _collect_terms(eff.amount, used_fns)
        missing = (used_preds - declared_preds) | (used_fns - declared_fns)
        if missing:
            raise EmitError(f"action {action.name}: undeclared symbols {sorted(missing)}")
        for _, t in action.parameters:
            if t not in declared_types:
                raise EmitError(f"action {action.name}: undeclared type {t!r}")

        params = " ".join(f"{v} - {t}" for v, t in action.parameters)
        lines.append(f"  (:action {_check_lowercase(action.name)}")
        lines.append(f"   :parameters ({params})")
        pre = action.precondition
        if isinstance(pre, And):
            lines.append(f"   :precondition {_wrapped_and(pre.items, expr_to_str, '    ')}")
        else:
            lines.append(f"   :precondition {expr_to_str(pre)}")
        lines.append(f"   :effect {_wrapped_and(tuple(action.effects), effect_to_str, '    ')}")
        lines.append("  )")

    lines.append(")")
    return "\n".join(lines) + "\n"


def print_problem(problem: PddlProblem) -> str:
    seen: set[str] = set()
    for name, _ in problem.objects:
        if name in seen:
            raise EmitError(f"duplicate object name {name!r}")
        seen.add(name)

    lines = [f"(define (problem {_check_lowercase(problem.name)})"]
    lines.append(f"  (:domain {problem.domain})")
    for comment in problem.comments:
        lines.append(f"  ;; {comment}")

    lines.append("  (:objects")
    for name, type_name in problem.objects:
        lines.append(f"    {_check_lowercase(name)} - {type_name}")
    lines.append("  )")

    lines.append("  (:init")
    for fact in problem.init:
        if isinstance(fact, Atom):
            for arg in fact.args:
                if arg.startswith("?"):
                    raise EmitError(f"init atom {fact.name} has a variable argument")
                if arg not in seen:
                    raise EmitError(f"init atom {fact.name} names unknown object {arg!r}")
            lines.append(f"    {expr_to_str(fact)}")
        elif isinstance(fact, FluentInit):
            for arg in fact.fluent.args:
                if arg.startswith("?") or arg not in seen:
                    raise EmitError(f"init fluent {fact.fluent.name} names unknown object {arg!r}")
            lines.append(f"    (= {term_to_str(fact.fluent)} {fact.value})")
        else:
            raise EmitError(f"not an init fact: {fact!r}")
    lines.append("  )")

    lines.append(f"  (:goal {expr_to_str(problem.goal)})")
    lines.append(")")
    return "\n".join(lines) + "\n"
