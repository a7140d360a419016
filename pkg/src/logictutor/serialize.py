"""JSON (de)serialization for problems, solutions, states, and attempts.

All formulas are stored as their canonical text; parse/format round-trip
is exact, so these files are stable across load/save cycles.
"""

from __future__ import annotations

import json
from typing import Any

from .formulas import format_formula, parse_formula
from .proofs import (
    GIVEN,
    Justification,
    Problem,
    ProofNode,
    ProofState,
    SolutionGraph,
    StepAttempt,
)


def problem_to_dict(problem: Problem) -> dict[str, Any]:
    out: dict[str, Any] = {
        "id": problem.id,
        "level": problem.level,
        "premises": [format_formula(p) for p in problem.premises],
        "conclusion": format_formula(problem.conclusion),
    }
    if problem.solution is not None:
        out["solution"] = solution_to_dict(problem.solution)
    return out


def problem_from_dict(data: dict[str, Any]) -> Problem:
    premises = tuple(parse_formula(p) for p in data["premises"])
    solution = None
    if data.get("solution") is not None:
        solution = solution_from_dict(data["solution"], premises)
    return Problem(
        id=data["id"],
        premises=premises,
        conclusion=parse_formula(data["conclusion"]),
        level=data["level"],
        solution=solution,
    )


def solution_to_dict(solution: SolutionGraph) -> dict[str, Any]:
    steps = []
    for node_id in solution.derived_ids():
        node = solution.nodes[node_id]
        steps.append(
            {
                "id": node.id,
                "statement": format_formula(node.statement),
                "rule": node.justification.rule_id,
                "parents": list(node.justification.parent_ids),
            }
        )
    return {"steps": steps}


def solution_from_dict(data: dict[str, Any], premises: tuple) -> SolutionGraph:
    nodes: dict[str, ProofNode] = {}
    for i, premise in enumerate(premises, start=1):
        nodes[str(i)] = ProofNode(str(i), premise, GIVEN)
    conclusion_id = None
    for step in data["steps"]:
        nodes[step["id"]] = ProofNode(
            step["id"],
            parse_formula(step["statement"]),
            "derived",
            Justification(step["rule"], tuple(step["parents"])),
        )
        conclusion_id = step["id"]
    return SolutionGraph(nodes, conclusion_id)


def attempt_to_dict(attempt: StepAttempt) -> dict[str, Any]:
    return {
        "ts": attempt.ts,
        "direction": attempt.direction,
        "target": attempt.target,
        "rule": attempt.rule_id,
        "parents": list(attempt.parent_ids),
        "outcome": attempt.outcome,
        "kind": attempt.kind,
        "node": attempt.node_id,
    }


def attempt_from_dict(data: dict[str, Any]) -> StepAttempt:
    return StepAttempt(
        ts=data["ts"],
        direction=data["direction"],
        target=data["target"],
        rule_id=data["rule"],
        parent_ids=tuple(data["parents"]),
        outcome=data["outcome"],
        kind=data.get("kind", "derive"),
        node_id=data.get("node"),
    )


def node_to_dict(node: ProofNode) -> dict[str, Any]:
    out: dict[str, Any] = {
        "id": node.id,
        "statement": format_formula(node.statement),
        "origin": node.origin,
        "justified": node.justified,
    }
    if node.justification is not None:
        out["justification"] = {
            "rule": node.justification.rule_id,
            "parents": list(node.justification.parent_ids),
        }
    return out


def state_to_dict(state: ProofState) -> dict[str, Any]:
    return {
        "problem_id": state.problem_id,
        "conclusion": format_formula(state.conclusion),
        "nodes": [node_to_dict(n) for n in state.nodes.values()],
        "history": [attempt_to_dict(a) for a in state.history],
        "started_at": state.started_at,
        "completed_at": state.completed_at,
    }


def canonical_json(data: Any) -> str:
    """Deterministic single-line JSON used for byte-level comparisons
    and JSON Lines records."""
    return json.dumps(data, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def load_json(path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(data: Any, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
