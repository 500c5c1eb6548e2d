"""Equivalence walks between the simulator and the PDDL encodings.

Two checks, both breadth-first over reachable states:

- check_sim_vs_pddl: at every visited state the ground-level applicable
  action names must match the simulator's, and each action's successor,
  decoded back to a world, must equal the simulator's successor.
- check_encoding_bisimulation: the numeric and propositional encodings
  must agree with each other the same way, walking them side by side.

Reserve blocks make ground actions non-unique (any unplaced block object
can be the one placed), so successors are compared as decoded worlds,
deduplicated per action name. A mismatch records where and what; walks
never raise on semantic differences, including states the decoder rejects.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .actions import CHECK_GOAL
from .codegen import NUMERIC, PROP, CompiledTask, decode_world
from .errors import ContractError
from .pddl import EvalContext, GroundState, applicable_ground_actions, apply, state_from_problem
from .simulator import Simulator
from .world import WorldState


@dataclass(frozen=True)
class Mismatch:
    depth: int
    digest: str
    kind: str  # applicable-set | successor | decode
    detail: str


@dataclass
class EquivalenceReport:
    states: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def record(self, depth: int, digest: str, kind: str, detail: str) -> None:
        self.mismatches.append(Mismatch(depth, digest, kind, detail))


MAX_MISMATCHES = 20


def _successor_worlds(
    ctx: EvalContext,
    grounds,
    info,
    report: EquivalenceReport,
    depth: int,
    digest: str,
    label: str,
) -> dict[str, tuple[WorldState, GroundState]]:
    """Per action name: the decoded successor world and one witness state.

    Bindings that differ only in reserve choice must decode identically.
    Names whose bindings disagree, and successors the decoder rejects, are
    recorded on the report and left out of the result.
    """
    out: dict[str, tuple[WorldState, GroundState]] = {}
    bad: set[str] = set()
    for ga in grounds:
        if ga.name == CHECK_GOAL or ga.name in bad:
            continue
        nxt = apply(ga, ctx, check=False)
        try:
            world = decode_world(nxt, info)
        except ContractError as exc:
            report.record(depth, digest, "decode", f"{label} {ga.name}: {exc}")
            bad.add(ga.name)
            out.pop(ga.name, None)
            continue
        seen = out.get(ga.name)
        if seen is None:
            out[ga.name] = (world, nxt)
        elif seen[0] != world:
            report.record(
                depth, digest, "successor", f"{label} {ga.name}: bindings decode to different worlds"
            )
            bad.add(ga.name)
            out.pop(ga.name, None)
    return out


def check_sim_vs_pddl(
    compiled: CompiledTask,
    encoding: str,
    depth: int = 3,
    max_states: int = 1500,
) -> EquivalenceReport:
    """Walk the simulator spine; hold one encoding to it at every state."""
    domain = compiled.domain(encoding)
    problem = compiled.problem(encoding)
    info = compiled.info(encoding)
    sim = Simulator(compiled.world, compiled.goal)
    report = EquivalenceReport()

    start_digest = compiled.world.digest()
    start_state = state_from_problem(problem)
    try:
        start_world = decode_world(start_state, info)
    except ContractError as exc:
        report.record(0, start_digest, "decode", f"initial state: {exc}")
        return report
    if start_world != compiled.world:
        report.record(0, start_digest, "decode", "initial state decodes to a different world")
        return report

    seen = {start_digest}
    queue: deque[tuple[WorldState, GroundState, str, int]] = deque(
        [(compiled.world, start_state, start_digest, 0)]
    )

    while queue:
        if len(report.mismatches) >= MAX_MISMATCHES:
            report.truncated = True
            break
        world, gstate, digest, d = queue.popleft()
        report.states += 1

        ctx = EvalContext(domain, problem, gstate)
        grounds = applicable_ground_actions(domain, ctx)
        pddl_names = {ga.name for ga in grounds}
        sim_names = {a.name for a in sim.applicable(world)}
        if pddl_names != sim_names:
            report.record(
                d,
                digest,
                "applicable-set",
                f"sim-only {sorted(sim_names - pddl_names)} pddl-only {sorted(pddl_names - sim_names)}",
            )
            continue

        successors = _successor_worlds(ctx, grounds, info, report, d, digest, encoding)
        advance = d < depth and len(seen) < max_states
        for action, sim_next in sim.expand(world):
            entry = successors.get(action.name)
            if entry is None:
                continue  # recorded while the successor table was built
            pddl_world, pddl_state = entry
            if pddl_world != sim_next:
                report.record(d, digest, "successor", f"{action.name}: decoded successor differs")
                continue
            if advance:
                key = sim_next.digest()
                if key not in seen:
                    seen.add(key)
                    queue.append((sim_next, pddl_state, key, d + 1))
        if d < depth and len(seen) >= max_states:
            report.truncated = True

    return report


def check_encoding_bisimulation(
    compiled: CompiledTask,
    depth: int = 3,
    max_states: int = 1500,
) -> EquivalenceReport:
    """Walk both encodings side by side, keyed by decoded numeric worlds."""
    report = EquivalenceReport()
    dom = {enc: compiled.domain(enc) for enc in (NUMERIC, PROP)}
    prob = {enc: compiled.problem(enc) for enc in (NUMERIC, PROP)}
    info = {enc: compiled.info(enc) for enc in (NUMERIC, PROP)}

    start_num = state_from_problem(prob[NUMERIC])
    start_prop = state_from_problem(prob[PROP])
    try:
        world_num = decode_world(start_num, info[NUMERIC])
        world_prop = decode_world(start_prop, info[PROP])
    except ContractError as exc:
        report.record(0, "-", "decode", f"initial state: {exc}")
        return report
    start_digest = world_num.digest()
    if world_num != world_prop:
        report.record(0, start_digest, "decode", "initial states decode to different worlds")
        return report

    seen = {start_digest}
    queue: deque[tuple[GroundState, GroundState, str, int]] = deque(
        [(start_num, start_prop, start_digest, 0)]
    )

    while queue:
        if len(report.mismatches) >= MAX_MISMATCHES:
            report.truncated = True
            break
        num_state, prop_state, digest, d = queue.popleft()
        report.states += 1

        num_ctx = EvalContext(dom[NUMERIC], prob[NUMERIC], num_state)
        prop_ctx = EvalContext(dom[PROP], prob[PROP], prop_state)
        num_grounds = applicable_ground_actions(dom[NUMERIC], num_ctx)
        prop_grounds = applicable_ground_actions(dom[PROP], prop_ctx)
        num_names = {ga.name for ga in num_grounds}
        prop_names = {ga.name for ga in prop_grounds}
        if num_names != prop_names:
            report.record(
                d,
                digest,
                "applicable-set",
                f"numeric-only {sorted(num_names - prop_names)} prop-only {sorted(prop_names - num_names)}",
            )
            continue

        num_next = _successor_worlds(num_ctx, num_grounds, info[NUMERIC], report, d, digest, "numeric")
        prop_next = _successor_worlds(prop_ctx, prop_grounds, info[PROP], report, d, digest, "prop")
        advance = d < depth and len(seen) < max_states
        for name in sorted(num_next):
            entry = prop_next.get(name)
            if entry is None:
                continue  # recorded while the successor table was built
            nw, ns = num_next[name]
            pw, ps = entry
            if nw != pw:
                report.record(d, digest, "successor", f"{name}: encodings disagree")
                continue
            if advance:
                key = nw.digest()
                if key not in seen:
                    seen.add(key)
                    queue.append((ns, ps, key, d + 1))
        if d < depth and len(seen) >= max_states:
            report.truncated = True

    return report
