"""Proof graphs: problems, nodes, step application, completion, replay.

A ProofState is single-session mutable state.  Correct attempts only add
nodes or justifications; incorrect attempts change nothing but the
append-only history.  Timestamps always come from the caller so that
replaying a log is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .formulas import Formula, format_formula, parse_formula
from .rules import Rule, check_justification, get_rule, rule_applies
from .semantics import entails

GIVEN = "given"
DERIVED = "derived"
PROVIDED = "provided-unjustified"

FORWARD = "forward"
BACKWARD = "backward"

CORRECT = "correct"
INCORRECT_RULE = "incorrect-rule"
INCORRECT_STATEMENT = "incorrect-statement"

# WE playback clicks are recorded alongside student derivations but are
# the tutor's own steps, so analytics can tell them apart.
KIND_DERIVE = "derive"
KIND_ADVANCE = "advance"


class ProofError(Exception):
    pass


class UnknownNodeError(ProofError):
    pass


class InvalidStepError(ProofError):
    pass


class AlreadyJustifiedError(ProofError):
    pass


class CycleError(ProofError):
    pass


class ReplayMismatchError(ProofError):
    def __init__(self, index, message):
        super().__init__(f"attempt {index}: {message}")
        self.index = index


@dataclass(frozen=True)
class Justification:
    rule_id: str
    parent_ids: tuple[str, ...]


@dataclass
class ProofNode:
    id: str
    statement: Formula
    origin: str  # GIVEN | DERIVED | PROVIDED
    justification: Optional[Justification] = None

    @property
    def justified(self) -> bool:
        return self.origin == GIVEN or self.justification is not None


@dataclass(frozen=True)
class StepAttempt:
    ts: float
    direction: str  # FORWARD | BACKWARD
    target: str  # forward: declared statement text; backward: node id
    rule_id: str
    parent_ids: tuple[str, ...]
    outcome: str
    kind: str = KIND_DERIVE
    node_id: Optional[str] = None  # node created or justified when correct


@dataclass
class SolutionGraph:
    """A fully justified proof for one problem: every non-given node has a
    checked justification, the conclusion is present, edges are acyclic."""

    nodes: dict[str, ProofNode]
    conclusion_id: str

    def derived_ids(self) -> list[str]:
        """Derived node ids in expert order (insertion order, validated to
        be topologically consistent)."""
        return [n.id for n in self.nodes.values() if n.origin != GIVEN]

    def given_ids(self) -> list[str]:
        return [n.id for n in self.nodes.values() if n.origin == GIVEN]

    def statement_of(self, node_id: str) -> Formula:
        return self.nodes[node_id].statement

    def validate(self) -> None:
        seen: set[str] = set()
        statements: set[str] = set()
        for node in self.nodes.values():
            text = format_formula(node.statement)
            if text in statements:
                raise ValueError(f"duplicate statement {text!r} in solution")
            statements.add(text)
            if node.origin == GIVEN:
                if node.justification is not None:
                    raise ValueError(f"given node {node.id} carries a justification")
                seen.add(node.id)
                continue
            just = node.justification
            if just is None:
                raise ValueError(f"non-given node {node.id} lacks a justification")
            for pid in just.parent_ids:
                if pid not in seen:
                    raise ValueError(
                        f"node {node.id} uses parent {pid} before it is available"
                    )
            rule = get_rule(just.rule_id)
            parents = [self.nodes[pid].statement for pid in just.parent_ids]
            if not check_justification(node.statement, rule, parents):
                raise ValueError(
                    f"justification of {node.id} fails: {just.rule_id} on {just.parent_ids}"
                )
            seen.add(node.id)
        if self.conclusion_id not in self.nodes:
            raise ValueError("conclusion node missing from solution")

    def justification_signature(self) -> frozenset[tuple[str, str, frozenset[str]]]:
        """Statement-keyed edge set, stable across node relabelings."""
        out = set()
        for node in self.nodes.values():
            if node.justification is None:
                continue
            parents = frozenset(
                format_formula(self.nodes[p].statement)
                for p in node.justification.parent_ids
            )
            out.add((format_formula(node.statement), node.justification.rule_id, parents))
        return frozenset(out)


@dataclass(frozen=True)
class Problem:
    id: str
    premises: tuple[Formula, ...]
    conclusion: Formula
    level: int
    solution: Optional[SolutionGraph] = None

    def __post_init__(self):
        if not self.premises:
            raise ValueError("premises must be nonempty")
        if self.conclusion in self.premises:
            raise ValueError("conclusion is already a premise")
        if not 1 <= self.level <= 7:
            raise ValueError(f"level must be 1-7, got {self.level}")

    def validate(self) -> None:
        """Full check: solution well-formed and the conclusion actually
        follows from the premises."""
        if self.solution is not None:
            self.solution.validate()
            if not entails(list(self.premises), self.conclusion):
                raise ValueError(f"problem {self.id}: premises do not entail conclusion")
            concl = self.solution.nodes[self.solution.conclusion_id].statement
            if concl != self.conclusion:
                raise ValueError(f"problem {self.id}: solution concludes the wrong statement")

    def initial_state(self, started_at: float = 0.0) -> "ProofState":
        nodes = {}
        for i, premise in enumerate(self.premises, start=1):
            nodes[str(i)] = ProofNode(str(i), premise, GIVEN)
        nodes["C"] = ProofNode("C", self.conclusion, PROVIDED)
        return ProofState(self.id, self.conclusion, nodes, started_at=started_at)


@dataclass
class ProofState:
    problem_id: str
    conclusion: Formula
    nodes: dict[str, ProofNode]
    history: list[StepAttempt] = field(default_factory=list)
    started_at: float = 0.0
    completed_at: Optional[float] = None

    def node(self, node_id: str) -> ProofNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def _next_id(self) -> str:
        numeric = [int(i) for i in self.nodes if i.isdigit()]
        return str(max(numeric, default=0) + 1)

    def ancestors(self, node_id: str) -> set[str]:
        out: set[str] = set()
        stack = [node_id]
        while stack:
            current = self.nodes[stack.pop()]
            if current.justification is None:
                continue
            for pid in current.justification.parent_ids:
                if pid not in out:
                    out.add(pid)
                    stack.append(pid)
        return out

    def grounded_ids(self) -> set[str]:
        """Nodes whose justification chains bottom out at givens."""
        grounded = {n.id for n in self.nodes.values() if n.origin == GIVEN}
        changed = True
        while changed:
            changed = False
            for node in self.nodes.values():
                if node.id in grounded or node.justification is None:
                    continue
                if all(p in grounded for p in node.justification.parent_ids):
                    grounded.add(node.id)
                    changed = True
        return grounded


def _classify(declared: Formula, rule: Rule, parent_statements: list[Formula]) -> str:
    # a parent-count mismatch means the chosen rule cannot apply to the
    # selection at all, which is an incorrect-rule attempt, not an error
    if len(parent_statements) != rule.arity:
        return INCORRECT_RULE
    if check_justification(declared, rule, parent_statements):
        return CORRECT
    if rule_applies(rule, parent_statements):
        return INCORRECT_STATEMENT
    return INCORRECT_RULE


def derive_forward(
    state: ProofState,
    parent_ids: Sequence[str],
    rule: Rule,
    declared: Formula,
    ts: float,
    kind: str = KIND_DERIVE,
) -> StepAttempt:
    """Forward derivation from 1-2 justified parents.  On success the
    declared statement either justifies a matching unjustified node in
    place or is appended under the next sequential id."""
    parents = [state.node(pid) for pid in parent_ids]
    for parent in parents:
        if not parent.justified:
            raise InvalidStepError(f"parent {parent.id} is not justified")
    statements = [p.statement for p in parents]
    outcome = _classify(declared, rule, statements)
    node_id = None
    if outcome == CORRECT:
        justification = Justification(rule.id, tuple(parent_ids))
        existing = next(
            (n for n in state.nodes.values() if not n.justified and n.statement == declared),
            None,
        )
        if existing is not None:
            existing.justification = justification
            node_id = existing.id
        else:
            node_id = state._next_id()
            state.nodes[node_id] = ProofNode(node_id, declared, DERIVED, justification)
    attempt = StepAttempt(
        ts, FORWARD, format_formula(declared), rule.id, tuple(parent_ids), outcome,
        kind=kind, node_id=node_id,
    )
    state.history.append(attempt)
    return attempt


def tutor_justify(
    state: ProofState, statement: Formula, rule_id: str, parent_ids: Sequence[str], ts: float
) -> StepAttempt:
    """A worked-example playback click: the tutor performs one expert step."""
    attempt = derive_forward(
        state, parent_ids, get_rule(rule_id), statement, ts, kind=KIND_ADVANCE
    )
    if attempt.outcome != CORRECT:
        raise InvalidStepError(f"expert step {format_formula(statement)} did not check")
    return attempt


def hypothesize_backward(
    state: ProofState,
    target_id: str,
    rule: Rule,
    parent_ids: Sequence[str],
    ts: float,
) -> StepAttempt:
    """Backward justification of an existing unjustified node."""
    target = state.node(target_id)
    if target.justified:
        raise AlreadyJustifiedError(target_id)
    parents = [state.node(pid) for pid in parent_ids]
    for parent in parents:
        if target_id == parent.id or target_id in state.ancestors(parent.id):
            raise CycleError(f"{target_id} would depend on itself through {parent.id}")
    statements = [p.statement for p in parents]
    outcome = _classify(target.statement, rule, statements)
    node_id = None
    if outcome == CORRECT:
        target.justification = Justification(rule.id, tuple(parent_ids))
        node_id = target_id
    attempt = StepAttempt(
        ts, BACKWARD, target_id, rule.id, tuple(parent_ids), outcome, node_id=node_id
    )
    state.history.append(attempt)
    return attempt


def is_complete(state: ProofState) -> bool:
    """The conclusion statement is present and reachable from the givens
    through justified edges; dangling unjustified nodes off that path do
    not block completion."""
    grounded = state.grounded_ids()
    return any(
        n.statement == state.conclusion and n.id in grounded for n in state.nodes.values()
    )


def duplicate_statements(state: ProofState) -> dict[str, list[str]]:
    """Diagnostic: statements carried by more than one node."""
    groups: dict[str, list[str]] = {}
    for node in state.nodes.values():
        groups.setdefault(format_formula(node.statement), []).append(node.id)
    return {text: ids for text, ids in groups.items() if len(ids) > 1}


def replay_log(problem, attempts: Iterable[StepAttempt], started_at: float = 0.0) -> ProofState:
    """Re-execute a logged attempt sequence against a fresh state.

    Outcomes are recomputed; any divergence from the logged attempt raises
    ReplayMismatchError with the offending index.  `problem` is anything
    with an initial_state(started_at) method (Problem or GppProblem).
    """
    state = problem.initial_state(started_at)
    for index, logged in enumerate(attempts):
        try:
            if logged.kind == KIND_ADVANCE:
                replayed = tutor_justify(
                    state, parse_formula(logged.target), logged.rule_id,
                    logged.parent_ids, logged.ts,
                )
            elif logged.direction == FORWARD:
                replayed = derive_forward(
                    state, logged.parent_ids, get_rule(logged.rule_id),
                    parse_formula(logged.target), logged.ts,
                )
            else:
                replayed = hypothesize_backward(
                    state, logged.target, get_rule(logged.rule_id),
                    logged.parent_ids, logged.ts,
                )
        except ProofError as err:
            raise ReplayMismatchError(index, str(err)) from err
        if replayed != logged:
            raise ReplayMismatchError(index, f"recomputed {replayed} != logged {logged}")
    return state


def solution_from_steps(
    premises: Sequence[Formula],
    steps: Sequence[tuple[str, str, Sequence[str]]],
) -> SolutionGraph:
    """Build a SolutionGraph from (statement_text, rule_id, parent_ids)
    triples.  Givens take ids "1".."n"; steps take "d1", "d2", ...; the
    final step must be the conclusion and takes id "C"."""
    nodes: dict[str, ProofNode] = {}
    for i, premise in enumerate(premises, start=1):
        nodes[str(i)] = ProofNode(str(i), premise, GIVEN)
    for k, (text, rule_id, parent_ids) in enumerate(steps):
        node_id = "C" if k == len(steps) - 1 else f"d{k + 1}"
        nodes[node_id] = ProofNode(
            node_id, parse_formula(text), DERIVED,
            Justification(rule_id, tuple(parent_ids)),
        )
    graph = SolutionGraph(nodes, "C")
    graph.validate()
    return graph
