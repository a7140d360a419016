"""Guided problem construction from solution corpora.

Two stages:

1. mine_subgoals: find co-derivation chunks in a corpus of complete
   solutions to one problem.  Statements that justify one another (directly
   or through one intermediate) in at least `tau` of the corpus land in the
   same chunk; each chunk's sink - the member nothing else in the chunk is
   derived from - is its subgoal.
2. build_gpp: overlay an approved chunk model on the expert solution,
   producing the guided variant: every expert node is shown, but the
   conclusion and the earliest member of each chunk arrive unjustified and
   the student must supply those justifications.

Both stages are deterministic: candidate statements, members, and chunk
order are tie-broken on canonical statement text, never on input order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .formulas import Bin, Formula, format_formula, parse_formula
from .proofs import (
    DERIVED,
    GIVEN,
    PROVIDED,
    Justification,
    Problem,
    ProofNode,
    ProofState,
    SolutionGraph,
)
from .rules import get_rule

ROLE_GIVEN = "given"
ROLE_MEMBER = "member"
ROLE_SUBGOAL = "subgoal"
ROLE_CONCLUSION = "conclusion"


@dataclass(frozen=True)
class MiningConfig:
    tau: float = 0.5
    min_statement_support: float = 0.5

    def __post_init__(self):
        if not 0 < self.tau <= 1:
            raise ValueError("tau must be in (0, 1]")
        if not 0 < self.min_statement_support <= 1:
            raise ValueError("min_statement_support must be in (0, 1]")


@dataclass(frozen=True)
class Chunk:
    index: int  # 1-based position in chunk order
    members: tuple[str, ...]  # canonical statement texts, sorted
    subgoal: str


@dataclass(frozen=True)
class ChunkModel:
    problem_id: str
    tau: float
    corpus_size: int
    chunks: tuple[Chunk, ...]
    approved: bool = False
    warnings: tuple[str, ...] = ()

    def approve(self) -> "ChunkModel":
        return replace(self, approved=True)


def _derivation_map(solution: SolutionGraph) -> dict[str, tuple[str, ...]]:
    """statement text -> parent statement texts, first node per statement."""
    out: dict[str, tuple[str, ...]] = {}
    for node in solution.nodes.values():
        if node.origin == GIVEN:
            continue
        text = format_formula(node.statement)
        if text in out:
            continue
        if node.justification is None:
            out[text] = ()
        else:
            out[text] = tuple(
                format_formula(solution.nodes[p].statement)
                for p in node.justification.parent_ids
            )
    return out


def mine_subgoals(
    problem_id: str,
    corpus: Sequence[SolutionGraph],
    config: MiningConfig = MiningConfig(),
) -> ChunkModel:
    if not corpus:
        raise ValueError("empty corpus")
    n = len(corpus)
    warnings: list[str] = []

    conclusion_texts = {
        format_formula(sol.nodes[sol.conclusion_id].statement) for sol in corpus
    }
    if len(conclusion_texts) != 1:
        raise ValueError(f"corpus mixes conclusions: {sorted(conclusion_texts)}")
    conclusion_text = conclusion_texts.pop()

    maps = [_derivation_map(sol) for sol in corpus]
    support: Counter[str] = Counter()
    for smap in maps:
        for text in smap:
            if text != conclusion_text:
                support[text] += 1
    candidates = sorted(
        text
        for text, count in support.items()
        if count / n >= config.min_statement_support
    )
    candidate_set = set(candidates)

    if not candidates:
        warnings.append("no intermediate statement met support; conclusion-only chunk")
        return ChunkModel(
            problem_id,
            config.tau,
            n,
            (Chunk(1, (conclusion_text,), conclusion_text),),
            warnings=tuple(warnings),
        )

    # co[(s, t)] = number of solutions where s justifies t directly or
    # through exactly one intermediate
    co: Counter[tuple[str, str]] = Counter()
    for smap in maps:
        for target, parents in smap.items():
            if target not in candidate_set:
                continue
            sources = set(parents)
            for mid in parents:
                sources.update(smap.get(mid, ()))
            for source in sources:
                if source in candidate_set and source != target:
                    co[(source, target)] += 1

    strong = {pair for pair, count in co.items() if count / n >= config.tau}
    neighbours: dict[str, set[str]] = {c: set() for c in candidates}
    for source, target in strong:
        neighbours[source].add(target)
        neighbours[target].add(source)

    components: list[list[str]] = []
    assigned: set[str] = set()
    for start in candidates:
        if start in assigned:
            continue
        component = []
        stack = [start]
        assigned.add(start)
        while stack:
            current = stack.pop()
            component.append(current)
            for other in sorted(neighbours[current]):
                if other not in assigned:
                    assigned.add(other)
                    stack.append(other)
        components.append(sorted(component))

    def pick_subgoal(members: list[str]) -> str:
        member_set = set(members)
        sinks = [
            m
            for m in members
            if not any((m, other) in strong for other in member_set if other != m)
        ]
        if not sinks:
            warnings.append(
                f"no sink among {members}; using canonical first member as subgoal"
            )
            return members[0]
        if len(sinks) > 1:
            warnings.append(f"multiple sinks {sinks}; using canonical first")
        return sinks[0]

    subgoals = {tuple(members): pick_subgoal(members) for members in components}

    # order chunks by aggregate co-derivation flow between them
    index_of = {text: i for i, members in enumerate(components) for text in members}
    flow: Counter[tuple[int, int]] = Counter()
    for (source, target), count in co.items():
        a, b = index_of[source], index_of[target]
        if a != b:
            flow[(a, b)] += count
    succ: dict[int, set[int]] = {i: set() for i in range(len(components))}
    indegree = {i: 0 for i in range(len(components))}
    for (a, b), count in sorted(flow.items()):
        reverse = flow.get((b, a), 0)
        if count > reverse or (count == reverse and a < b):
            if count == reverse:
                warnings.append(
                    f"chunk order tie between components {a} and {b}; kept canonical order"
                )
            if b not in succ[a]:
                succ[a].add(b)
                indegree[b] += 1

    order: list[int] = []
    remaining = set(range(len(components)))
    while remaining:
        ready = sorted(
            (i for i in remaining if indegree[i] == 0),
            key=lambda i: subgoals[tuple(components[i])],
        )
        if not ready:
            warnings.append("chunk order cycle broken canonically")
            ready = sorted(remaining, key=lambda i: subgoals[tuple(components[i])])[:1]
        chosen = ready[0]
        order.append(chosen)
        remaining.discard(chosen)
        for b in succ[chosen]:
            if b in remaining:
                indegree[b] -= 1

    chunks = tuple(
        Chunk(pos + 1, tuple(components[i]), subgoals[tuple(components[i])])
        for pos, i in enumerate(order)
    )
    return ChunkModel(problem_id, config.tau, n, chunks, warnings=tuple(warnings))


@dataclass
class GppNode:
    id: str
    statement: Formula
    role: str  # ROLE_GIVEN | ROLE_MEMBER | ROLE_SUBGOAL | ROLE_CONCLUSION
    chunk: Optional[int] = None
    justification: Optional[Justification] = None  # expert edge, relabeled


@dataclass(frozen=True)
class GppChunk:
    index: int
    member_ids: tuple[str, ...]  # expert order; subgoal is the ".C" id
    subgoal_id: str


@dataclass
class GppProblem:
    problem_id: str
    level: int
    premises: tuple[Formula, ...]
    conclusion: Formula
    nodes: dict[str, GppNode]
    chunks: tuple[GppChunk, ...]
    unjustified_ids: tuple[str, ...]

    def initial_state(self, started_at: float = 0.0) -> ProofState:
        open_set = set(self.unjustified_ids)
        nodes: dict[str, ProofNode] = {}
        for gnode in self.nodes.values():
            if gnode.role == ROLE_GIVEN:
                nodes[gnode.id] = ProofNode(gnode.id, gnode.statement, GIVEN)
            elif gnode.id in open_set:
                nodes[gnode.id] = ProofNode(gnode.id, gnode.statement, PROVIDED)
            else:
                nodes[gnode.id] = ProofNode(
                    gnode.id, gnode.statement, DERIVED, gnode.justification
                )
        return ProofState(self.problem_id, self.conclusion, nodes, started_at=started_at)

    def expert_justification(self, node_id: str) -> Justification:
        just = self.nodes[node_id].justification
        if just is None:
            raise ValueError(f"node {node_id} has no expert justification")
        return just


def build_gpp(
    problem: Problem, model: ChunkModel, allow_unapproved: bool = False
) -> GppProblem:
    """Overlay `model` on the problem's expert solution.

    Every expert node appears.  Ids: givens keep "1".."n", chunk i's
    non-subgoal members become "i.1", "i.2", ... in expert order, its
    subgoal becomes "i.C", the conclusion stays "C".  The conclusion and
    each chunk's earliest member are left unjustified.
    """
    if not model.approved and not allow_unapproved:
        raise ValueError(f"chunk model for {model.problem_id} is not approved")
    if problem.solution is None:
        raise ValueError(f"problem {problem.id} has no expert solution")
    if model.problem_id != problem.id:
        raise ValueError(f"chunk model is for {model.problem_id}, not {problem.id}")
    solution = problem.solution

    text_to_id = {
        format_formula(node.statement): node.id for node in solution.nodes.values()
    }
    conclusion_text = format_formula(problem.conclusion)
    # a conclusion-only chunk (degenerate mining result) adds nothing: the
    # conclusion is always present and always unjustified
    chunks = [
        chunk
        for chunk in model.chunks
        if list(chunk.members) != [conclusion_text]
    ]

    chunk_of: dict[str, int] = {}
    for chunk in chunks:
        for text in chunk.members:
            if text not in text_to_id:
                raise ValueError(
                    f"chunk member {text!r} is not in the expert solution of {problem.id}"
                )
            if text == conclusion_text:
                raise ValueError("the conclusion cannot be a member of a chunk")
            chunk_of[text] = chunk.index
    subgoal_texts = {chunk.subgoal for chunk in chunks}

    uncovered = [
        format_formula(solution.nodes[node_id].statement)
        for node_id in solution.derived_ids()
        if node_id != solution.conclusion_id
        and format_formula(solution.nodes[node_id].statement) not in chunk_of
    ]
    if uncovered:
        raise ValueError(
            f"expert statements not covered by any chunk: {uncovered}; "
            "edit the model before building"
        )

    # relabel: expert solution ids -> guided ids
    relabel: dict[str, str] = {gid: gid for gid in solution.given_ids()}
    member_counters: Counter[int] = Counter()
    ordered: list[tuple[str, str]] = []  # (new_id, old_id) in display order
    for node_id in solution.derived_ids():
        if node_id == solution.conclusion_id:
            continue
        text = format_formula(solution.nodes[node_id].statement)
        index = chunk_of[text]
        if text in subgoal_texts:
            new_id = f"{index}.C"
        else:
            member_counters[index] += 1
            new_id = f"{index}.{member_counters[index]}"
        relabel[node_id] = new_id
        ordered.append((new_id, node_id))
    relabel[solution.conclusion_id] = "C"
    ordered.append(("C", solution.conclusion_id))

    nodes: dict[str, GppNode] = {}
    for gid in solution.given_ids():
        nodes[gid] = GppNode(gid, solution.nodes[gid].statement, ROLE_GIVEN)
    for new_id, old_id in ordered:
        node = solution.nodes[old_id]
        text = format_formula(node.statement)
        if new_id == "C":
            role, chunk_index = ROLE_CONCLUSION, None
        elif text in subgoal_texts:
            role, chunk_index = ROLE_SUBGOAL, chunk_of[text]
        else:
            role, chunk_index = ROLE_MEMBER, chunk_of[text]
        justification = Justification(
            node.justification.rule_id,
            tuple(relabel[p] for p in node.justification.parent_ids),
        )
        nodes[new_id] = GppNode(new_id, node.statement, role, chunk_index, justification)

    gpp_chunks = []
    for chunk in chunks:
        member_ids = tuple(
            new_id for new_id, _ in ordered if nodes[new_id].chunk == chunk.index
        )
        gpp_chunks.append(GppChunk(chunk.index, member_ids, f"{chunk.index}.C"))

    unjustified = tuple(chunk.member_ids[0] for chunk in gpp_chunks) + ("C",)
    return GppProblem(
        problem_id=problem.id,
        level=problem.level,
        premises=problem.premises,
        conclusion=problem.conclusion,
        nodes=nodes,
        chunks=tuple(gpp_chunks),
        unjustified_ids=unjustified,
    )


@dataclass(frozen=True)
class Hint:
    order: int
    target_id: str
    rule_id: str
    message: str


def _hint_message(rule_id: str, statement: Formula) -> str:
    rule = get_rule(rule_id)
    return f"Apply {rule.name} here to {rule.action_phrase} {format_formula(statement)}."


def hint_script(gpp: GppProblem) -> tuple[Hint, ...]:
    """Backward hint order: the conclusion first, then each chunk's open
    member from the last chunk back to the first."""
    targets = ["C"] + [
        chunk.member_ids[0] for chunk in sorted(gpp.chunks, key=lambda c: -c.index)
    ]
    hints = []
    for order, target_id in enumerate(targets):
        node = gpp.nodes[target_id]
        just = gpp.expert_justification(target_id)
        hints.append(Hint(order, target_id, just.rule_id, _hint_message(just.rule_id, node.statement)))
    return tuple(hints)


def _prompt_citation(statement: Formula) -> str:
    text = format_formula(statement)
    return f"({text})" if isinstance(statement, Bin) else text


def self_explanation_prompt(gpp: GppProblem) -> str:
    subgoals = [
        _prompt_citation(gpp.nodes[chunk.subgoal_id].statement)
        for chunk in sorted(gpp.chunks, key=lambda c: c.index)
    ]
    if not subgoals:
        return "How did you derive the conclusion?"
    if len(subgoals) == 1:
        return f"How did the subgoal {subgoals[0]} help you derive the conclusion?"
    return f"How did the subgoals {', '.join(subgoals)} help you derive the conclusion?"


# ---------------------------------------------------------------------------
# serialization

def chunk_model_to_dict(model: ChunkModel) -> dict:
    return {
        "problem_id": model.problem_id,
        "tau": model.tau,
        "corpus_size": model.corpus_size,
        "approved": model.approved,
        "warnings": list(model.warnings),
        "chunks": [
            {"index": c.index, "members": list(c.members), "subgoal": c.subgoal}
            for c in model.chunks
        ],
    }


def chunk_model_from_dict(data: dict) -> ChunkModel:
    return ChunkModel(
        problem_id=data["problem_id"],
        tau=data["tau"],
        corpus_size=data["corpus_size"],
        chunks=tuple(
            Chunk(c["index"], tuple(c["members"]), c["subgoal"])
            for c in data["chunks"]
        ),
        approved=data.get("approved", False),
        warnings=tuple(data.get("warnings", ())),
    )


def gpp_to_dict(gpp: GppProblem) -> dict:
    nodes = []
    for node in gpp.nodes.values():
        entry: dict = {
            "id": node.id,
            "statement": format_formula(node.statement),
            "role": node.role,
            "chunk": node.chunk,
        }
        if node.justification is not None:
            entry["justification"] = {
                "rule": node.justification.rule_id,
                "parents": list(node.justification.parent_ids),
            }
        nodes.append(entry)
    return {
        "problem_id": gpp.problem_id,
        "level": gpp.level,
        "premises": [format_formula(p) for p in gpp.premises],
        "conclusion": format_formula(gpp.conclusion),
        "nodes": nodes,
        "chunks": [
            {
                "index": c.index,
                "members": list(c.member_ids),
                "subgoal": c.subgoal_id,
            }
            for c in gpp.chunks
        ],
        "unjustified": list(gpp.unjustified_ids),
    }


def gpp_from_dict(data: dict) -> GppProblem:
    nodes: dict[str, GppNode] = {}
    for entry in data["nodes"]:
        justification = None
        if "justification" in entry:
            justification = Justification(
                entry["justification"]["rule"],
                tuple(entry["justification"]["parents"]),
            )
        nodes[entry["id"]] = GppNode(
            entry["id"],
            parse_formula(entry["statement"]),
            entry["role"],
            entry.get("chunk"),
            justification,
        )
    return GppProblem(
        problem_id=data["problem_id"],
        level=data["level"],
        premises=tuple(parse_formula(p) for p in data["premises"]),
        conclusion=parse_formula(data["conclusion"]),
        nodes=nodes,
        chunks=tuple(
            GppChunk(c["index"], tuple(c["members"]), c["subgoal"])
            for c in data["chunks"]
        ),
        unjustified_ids=tuple(data["unjustified"]),
    )
