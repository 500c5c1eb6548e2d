"""Ground evaluation of generated domains: holds/apply, grounding, matching.

Two grounding routes exist on purpose. ground_actions is the naive Cartesian
expansion (what external planners' grounding phases blow up on) behind a
binding cap. applicable_ground_actions is a conjunct-guided matcher that
walks an action's parameters in an indexable order, so lifted applicability
stays tractable even for the seven-parameter propositional movement schemas.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass

from ..errors import ContractError, EvalError, GroundingLimitError
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
    Prod,
    Sum,
    Term,
    flatten_and,
    free_vars,
)

_EMPTY: dict[str, str] = {}

_AXIS_ATOMS = ("at-x", "at-y", "at-z")
_AXIS_FLUENTS = ("x", "y", "z")


class GroundState:
    """Closed-world ground state: true atoms + exact integer fluents."""

    __slots__ = ("atoms", "fluents")

    def __init__(self, atoms: set[tuple], fluents: dict[tuple, int]):
        self.atoms = atoms
        self.fluents = fluents

    def copy(self) -> "GroundState":
        return GroundState(set(self.atoms), dict(self.fluents))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroundState):
            return NotImplemented
        return self.atoms == other.atoms and self.fluents == other.fluents

    def __repr__(self) -> str:
        return f"GroundState({len(self.atoms)} atoms, {len(self.fluents)} fluents)"


def state_from_problem(problem: PddlProblem) -> GroundState:
    atoms: set[tuple] = set()
    fluents: dict[tuple, int] = {}
    for fact in problem.init:
        if isinstance(fact, Atom):
            atoms.add((fact.name, *fact.args))
        elif isinstance(fact, FluentInit):
            fluents[(fact.fluent.name, *fact.fluent.args)] = fact.value
        else:
            raise EvalError(f"not an init fact: {fact!r}")
    return GroundState(atoms, fluents)


class ObjectTable:
    """Typed objects with subtype-closed lookup, preserving declaration order."""

    def __init__(self, types: tuple[tuple[str, str], ...], objects: tuple[tuple[str, str], ...]):
        self._parent = dict(types)
        self._objects = objects
        self.type_of = {name: t for name, t in objects}
        self._cache: dict[str, tuple[str, ...]] = {}
        self._sets: dict[str, frozenset[str]] = {}

    def is_subtype(self, type_name: str, ancestor: str) -> bool:
        t = type_name
        while True:
            if t == ancestor:
                return True
            if t not in self._parent:
                return False
            t = self._parent[t]

    def objects_of(self, type_name: str) -> tuple[str, ...]:
        cached = self._cache.get(type_name)
        if cached is None:
            cached = tuple(n for n, t in self._objects if self.is_subtype(t, type_name))
            self._cache[type_name] = cached
        return cached

    def set_of(self, type_name: str) -> frozenset[str]:
        cached = self._sets.get(type_name)
        if cached is None:
            cached = frozenset(self.objects_of(type_name))
            self._sets[type_name] = cached
        return cached


@dataclass(frozen=True)
class GroundAction:
    action: PddlAction
    args: tuple[str, ...]  # aligned with action.parameters

    @property
    def name(self) -> str:
        return self.action.name

    def binding(self) -> dict[str, str]:
        return {v: a for (v, _), a in zip(self.action.parameters, self.args)}

    def text(self) -> str:
        return f"({self.name} {' '.join(self.args)})" if self.args else f"({self.name})"


class EvalContext:
    """One state's evaluation substrate: object table plus lazy atom indexes."""

    def __init__(self, domain: PddlDomain, problem: PddlProblem, state: GroundState | None = None):
        self.domain = domain
        self.problem = problem
        self.state = state if state is not None else state_from_problem(problem)
        self.objects = ObjectTable(domain.types, problem.objects)
        self._pairs: tuple[dict, dict] | None = None
        self._cells: dict[tuple, list[str]] | None = None
        self._unary: dict[tuple[str, str], tuple[str, ...]] = {}

    # -- indexes -----------------------------------------------------------

    def pairs(self) -> tuple[dict, dict]:
        if self._pairs is None:
            first: dict[tuple[str, str], list[str]] = {}
            second: dict[tuple[str, str], list[str]] = {}
            for key in self.state.atoms:
                if len(key) == 3:
                    pred, a, b = key
                    first.setdefault((pred, a), []).append(b)
                    second.setdefault((pred, b), []).append(a)
            self._pairs = (first, second)
        return self._pairs

    def cells(self) -> dict[tuple, list[str]]:
        """Coordinate triple -> objects. Propositional: position-object names;
        numeric: integer coordinates."""
        if self._cells is None:
            cells: dict[tuple, list[str]] = {}
            if self.domain.functions:
                coords: dict[str, list] = {}
                for (fn, *args), value in self.state.fluents.items():
                    if fn in _AXIS_FLUENTS and len(args) == 1:
                        slot = coords.setdefault(args[0], [None, None, None])
                        slot[_AXIS_FLUENTS.index(fn)] = value
            else:
                coords = {}
                for key in self.state.atoms:
                    if len(key) == 3 and key[0] in _AXIS_ATOMS:
                        slot = coords.setdefault(key[1], [None, None, None])
                        slot[_AXIS_ATOMS.index(key[0])] = key[2]
            for obj, triple in coords.items():
                if None not in triple:
                    cells.setdefault(tuple(triple), []).append(obj)
            self._cells = cells
        return self._cells

    def unary(self, pred: str, type_name: str, positive: bool) -> tuple[str, ...]:
        key = (pred, type_name, positive)
        cached = self._unary.get(key)
        if cached is None:
            atoms = self.state.atoms
            cached = tuple(
                o
                for o in self.objects.objects_of(type_name)
                if ((pred, o) in atoms) == positive
            )
            self._unary[key] = cached
        return cached


# -- expression compilation ---------------------------------------------------
#
# Schema preconditions are static while the matcher evaluates them millions
# of times across states, so every expression compiles once into a closure
# over (ctx, binding). An unbound variable surfaces as KeyError; the public
# entry points translate that into EvalError.

_TESTS: dict[Expr, object] = {}
_TERMS: dict[Term, object] = {}


def _arg_getter(arg: str):
    if arg.startswith("?"):
        return lambda ctx, b: b[arg]
    return lambda ctx, b: arg


def _key_fn(name: str, args: tuple[str, ...]):
    """Closure building a ground atom or fluent key under a binding."""
    if len(args) == 1:
        a0 = args[0]
        if a0.startswith("?"):
            return lambda ctx, b: (name, b[a0])
        key = (name, a0)
        return lambda ctx, b: key
    if len(args) == 2:
        a0, a1 = args
        if a0.startswith("?") and a1.startswith("?"):
            return lambda ctx, b: (name, b[a0], b[a1])
        if a0.startswith("?"):
            return lambda ctx, b: (name, b[a0], a1)
        if a1.startswith("?"):
            return lambda ctx, b: (name, a0, b[a1])
        key = (name, a0, a1)
        return lambda ctx, b: key
    getters = tuple(_arg_getter(a) for a in args)
    return lambda ctx, b: (name, *(g(ctx, b) for g in getters))


def _membership(atom: Atom, want: bool):
    kf = _key_fn(atom.name, atom.args)
    if want:
        return lambda ctx, b: kf(ctx, b) in ctx.state.atoms
    return lambda ctx, b: kf(ctx, b) not in ctx.state.atoms


def compile_term(term: Term):
    """Compiled integer evaluator for a term, cached per structure."""
    fn = _TERMS.get(term)
    if fn is None:
        fn = _build_term(term)
        _TERMS[term] = fn
    return fn


def _build_term(term: Term):
    if isinstance(term, Const):
        value = term.value
        return lambda ctx, b: value
    if isinstance(term, Fluent):
        kf = _key_fn(term.name, term.args)

        def read(ctx, b):
            key = kf(ctx, b)
            try:
                return ctx.state.fluents[key]
            except KeyError:
                raise EvalError(f"undefined fluent {key}") from None

        return read
    if isinstance(term, Sum):
        parts = tuple(compile_term(t) for t in term.terms)
        return lambda ctx, b: sum(f(ctx, b) for f in parts)
    if isinstance(term, Prod):
        parts = tuple(compile_term(t) for t in term.terms)

        def prod(ctx, b):
            out = 1
            for f in parts:
                out *= f(ctx, b)
            return out

        return prod
    raise EvalError(f"not a numeric term: {term!r}")


def compile_test(expr: Expr):
    """Compiled truth test for an expression, cached per structure."""
    fn = _TESTS.get(expr)
    if fn is None:
        fn = _build_test(expr)
        _TESTS[expr] = fn
    return fn


def _build_test(expr: Expr):
    if isinstance(expr, Atom):
        return _membership(expr, True)
    if isinstance(expr, Not):
        if isinstance(expr.expr, Atom):
            return _membership(expr.expr, False)
        inner = compile_test(expr.expr)
        return lambda ctx, b: not inner(ctx, b)
    if isinstance(expr, And):
        parts = tuple(compile_test(e) for e in expr.items)

        def conj(ctx, b):
            for f in parts:
                if not f(ctx, b):
                    return False
            return True

        return conj
    if isinstance(expr, Or):
        parts = tuple(compile_test(e) for e in expr.items)

        def disj(ctx, b):
            for f in parts:
                if f(ctx, b):
                    return True
            return False

        return disj
    if isinstance(expr, Compare):
        lhs = compile_term(expr.lhs)
        rhs = compile_term(expr.rhs)
        if expr.op == "=":
            return lambda ctx, b: lhs(ctx, b) == rhs(ctx, b)
        if expr.op == ">=":
            return lambda ctx, b: lhs(ctx, b) >= rhs(ctx, b)
        return lambda ctx, b: lhs(ctx, b) <= rhs(ctx, b)
    if isinstance(expr, Exists):
        params = expr.params
        conjuncts = flatten_and(expr.body)
        plans: dict[frozenset, tuple] = {}

        def exists(ctx, b):
            names = frozenset(b)
            plan = plans.get(names)
            if plan is None:
                plan = _plan_order(params, conjuncts, names)
                plans[names] = plan
            for _ in _matches(plan, ctx, b):
                return True
            return False

        return exists
    raise EvalError(f"not an expression: {expr!r}")


def eval_term(term: Term, ctx: EvalContext, binding: dict[str, str] = _EMPTY) -> int:
    try:
        return compile_term(term)(ctx, binding)
    except KeyError as exc:
        raise EvalError(f"unbound variable {exc.args[0]}") from None


def holds(expr: Expr, ctx: EvalContext, binding: dict[str, str] = _EMPTY) -> bool:
    try:
        return compile_test(expr)(ctx, binding)
    except KeyError as exc:
        raise EvalError(f"unbound variable {exc.args[0]}") from None


# -- matcher ----------------------------------------------------------------


def _strategy_for(var, type_name, conjuncts, available):
    """Pick the cheapest candidate source for one variable.

    available: variables known to be bound before this one. Returns
    (rank, kind, data, guaranteed); higher rank means a narrower source,
    and guaranteed lists conjuncts the source satisfies by construction,
    so the step never re-checks them.
    """
    pins: dict[int, tuple[object, Expr]] = {}
    pair = None
    presence = None
    absence = None
    for c in conjuncts:
        if isinstance(c, Atom):
            if len(c.args) == 1 and c.args[0] == var:
                presence = (c.name, c)
            elif len(c.args) == 2 and var in c.args:
                slot = c.args.index(var)
                other = c.args[1 - slot]
                if not other.startswith("?") or other in available:
                    if c.name in _AXIS_ATOMS and slot == 0:
                        pins[_AXIS_ATOMS.index(c.name)] = (other, c)
                    if pair is None:
                        pair = ((c.name, slot, other), c)
        elif isinstance(c, Compare) and c.op == "=":
            for var_side, other_side in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
                if (
                    isinstance(var_side, Fluent)
                    and var_side.name in _AXIS_FLUENTS
                    and var_side.args == (var,)
                    and free_vars(other_side) <= available
                ):
                    pins[_AXIS_FLUENTS.index(var_side.name)] = (other_side, c)
        elif isinstance(c, Not) and isinstance(c.expr, Atom):
            inner = c.expr
            if len(inner.args) == 1 and inner.args[0] == var:
                absence = (inner.name, c)
    if len(pins) == 3:
        values = tuple(pins[i][0] for i in range(3))
        return (4, "cell", values, tuple(pins[i][1] for i in range(3)))
    if pair is not None:
        return (3, "pair", pair[0], (pair[1],))
    if presence is not None:
        return (2, "present", presence[0], (presence[1],))
    if absence is not None:
        return (2, "absent", absence[0], (absence[1],))
    return (0, "all", None, ())


# Binding plans depend only on schema structure, never on state, so the
# cache is process-wide: one entry per (action schema, outer binding shape).
_PLAN_CACHE: dict[tuple, tuple] = {}


def _plan_order(params, conjuncts, pre_bound: frozenset):
    key = (params, conjuncts, pre_bound)
    cached = _PLAN_CACHE.get(key)
    if cached is not None:
        return cached

    param_vars = {v for v, _ in params}
    prefix = tuple(compile_test(c) for c in conjuncts if not (free_vars(c) & param_vars))
    available = set(pre_bound)
    remaining = list(params)
    steps = []
    while remaining:
        ranked = [
            (_strategy_for(v, t, conjuncts, available), i)
            for i, (v, t) in enumerate(remaining)
        ]
        (strategy, idx) = max(ranked, key=lambda e: (e[0][0], -e[1]))
        var, type_name = remaining.pop(idx)
        available.add(var)
        _rank, kind, data, guaranteed = strategy
        if kind == "cell":
            data = tuple(
                _arg_getter(p) if isinstance(p, str) else compile_term(p) for p in data
            )
        elif kind == "pair":
            pred, slot, other = data
            data = (pred, slot, _arg_getter(other))
        # conjuncts that become fully decidable once this variable is bound
        newly = tuple(
            c
            for c in conjuncts
            if var in free_vars(c)
            and (free_vars(c) & param_vars) <= available
            and c not in guaranteed
        )
        steps.append((var, type_name, (kind, data), tuple(compile_test(c) for c in newly)))
    entry = (prefix, tuple(steps))
    _PLAN_CACHE[key] = entry
    return entry


def _candidates(strategy, type_name, ctx: EvalContext, binding):
    kind, data = strategy
    table = ctx.objects
    if kind == "cell":
        g0, g1, g2 = data
        objs = ctx.cells().get((g0(ctx, binding), g1(ctx, binding), g2(ctx, binding)), ())
        ok = table.set_of(type_name)
        return [o for o in objs if o in ok]
    if kind == "pair":
        pred, slot, get = data
        first, second = ctx.pairs()
        value = get(ctx, binding)
        objs = second.get((pred, value), ()) if slot == 0 else first.get((pred, value), ())
        ok = table.set_of(type_name)
        return [o for o in objs if o in ok]
    if kind == "present":
        return ctx.unary(data, type_name, True)
    if kind == "absent":
        return ctx.unary(data, type_name, False)
    return table.objects_of(type_name)


def _matches(plan, ctx: EvalContext, binding: dict[str, str]):
    """Yield the live binding dict per match; callers copy what they keep."""
    prefix, steps = plan
    try:
        for f in prefix:
            if not f(ctx, binding):
                return
        bound = dict(binding)
        n = len(steps)

        def rec(i: int):
            if i == n:
                yield bound
                return
            var, type_name, strategy, checks = steps[i]
            for cand in _candidates(strategy, type_name, ctx, bound):
                bound[var] = cand
                for f in checks:
                    if not f(ctx, bound):
                        break
                else:
                    yield from rec(i + 1)
            bound.pop(var, None)

        yield from rec(0)
    except KeyError as exc:
        raise EvalError(f"unbound variable {exc.args[0]}") from None


def iter_bindings(params, conjuncts, ctx: EvalContext, binding: dict[str, str] = _EMPTY):
    """All bindings of params satisfying the conjuncts, given outer bindings."""
    plan = _plan_order(tuple(params), tuple(conjuncts), frozenset(binding))
    for live in _matches(plan, ctx, binding):
        yield dict(live)


# -- grounding ---------------------------------------------------------------


def ground_actions(
    domain: PddlDomain, problem: PddlProblem, cap: int = 1_000_000
) -> list[GroundAction]:
    """Naive Cartesian expansion over type-compatible objects, no pruning."""
    table = ObjectTable(domain.types, problem.objects)
    out: list[GroundAction] = []
    for action in domain.actions:
        pools = [table.objects_of(t) for _, t in action.parameters]
        count = 1
        for pool in pools:
            count *= len(pool)
        if len(out) + count > cap:
            raise GroundingLimitError(
                f"grounding {action.name} exceeds the {cap}-binding cap"
            )
        for combo in itertools.product(*pools):
            out.append(GroundAction(action, combo))
    return out


# Match plans and compiled effects per schema, built on first use and evicted
# when the owning domain or action is collected. Keyed by id with a weakref
# guard so lookups stay cheap without pinning dead objects.
_SCHEMA_PLANS: dict[int, tuple] = {}
_SCHEMA_EFFECTS: dict[int, tuple] = {}


def _prepared_schemas(domain: PddlDomain) -> list:
    key = id(domain)
    entry = _SCHEMA_PLANS.get(key)
    if entry is not None and entry[0]() is domain:
        return entry[1]
    prepared = []
    for action in domain.actions:
        conjuncts = flatten_and(action.precondition)
        plan = _plan_order(action.parameters, conjuncts, frozenset())
        prepared.append((action, tuple(v for v, _ in action.parameters), plan))
    ref = weakref.ref(domain, lambda _r, _k=key: _SCHEMA_PLANS.pop(_k, None))
    _SCHEMA_PLANS[key] = (ref, prepared)
    return prepared


def applicable_ground_actions(domain: PddlDomain, ctx: EvalContext) -> list[GroundAction]:
    """Every ground action whose precondition holds in ctx.state."""
    out: list[GroundAction] = []
    for action, names, plan in _prepared_schemas(domain):
        for live in _matches(plan, ctx, _EMPTY):
            out.append(GroundAction(action, tuple(live[v] for v in names)))
    return out


def _compiled_effects(action: PddlAction) -> tuple:
    key = id(action)
    entry = _SCHEMA_EFFECTS.get(key)
    if entry is not None and entry[0]() is action:
        return entry[1]
    dels, adds, updates = [], [], []
    for eff in action.effects:
        if isinstance(eff, DelEffect):
            dels.append(_key_fn(eff.atom.name, eff.atom.args))
        elif isinstance(eff, AddEffect):
            adds.append(_key_fn(eff.atom.name, eff.atom.args))
        elif isinstance(eff, (IncreaseEffect, DecreaseEffect)):
            sign = 1 if isinstance(eff, IncreaseEffect) else -1
            updates.append((_key_fn(eff.fluent.name, eff.fluent.args), compile_term(eff.amount), sign))
        else:
            raise EvalError(f"not an effect: {eff!r}")
    compiled = (tuple(dels), tuple(adds), tuple(updates))
    ref = weakref.ref(action, lambda _r, _k=key: _SCHEMA_EFFECTS.pop(_k, None))
    _SCHEMA_EFFECTS[key] = (ref, compiled)
    return compiled


def apply(gaction: GroundAction, ctx: EvalContext, check: bool = True) -> GroundState:
    """Successor state: deletes, then adds, then exact numeric updates.

    Numeric amounts are evaluated against the pre-state (simultaneous
    semantics), which is what lets place-style effects move a coordinate to
    an absolute target via decrease-by-difference.
    """
    binding = gaction.binding()
    if check and not holds(gaction.action.precondition, ctx, binding):
        raise ContractError(f"{gaction.text()} applied where its precondition is false")
    dels, adds, updates = _compiled_effects(gaction.action)
    state = ctx.state
    atoms = set(state.atoms)
    for kf in dels:
        atoms.discard(kf(ctx, binding))
    for kf in adds:
        atoms.add(kf(ctx, binding))
    fluents = dict(state.fluents)
    for kf, amount, sign in updates:
        key = kf(ctx, binding)
        if key not in fluents:
            raise EvalError(f"effect updates undefined fluent {key}")
        fluents[key] = fluents[key] + sign * amount(ctx, binding)
    return GroundState(atoms, fluents)
