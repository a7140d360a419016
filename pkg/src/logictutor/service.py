"""Tutor sessions: curriculum traversal, condition-based mode draws,
step checking, hints, self-explanations, scoring, and an event-sourced
session log that replays deterministically.

A session walks the curriculum in order.  Level 1 is an unaided pretest
and level 7 an unaided posttest; in between, the last problem of each
training level is an unaided check, and the others draw a mode from the
session RNG: Control students get problem solving or a worked example,
GPP students get problem solving or the guided variant.  All timestamps
come from the caller, so a logged session can be re-run byte for byte.
"""

from __future__ import annotations

import random
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from . import bank
from .formulas import format_formula, parse_formula
from .gpp import (
    ChunkModel,
    GppProblem,
    Hint,
    build_gpp,
    hint_script,
    self_explanation_prompt,
)
from .proofs import (
    BACKWARD,
    CORRECT,
    FORWARD,
    KIND_ADVANCE,
    Problem,
    ProofError,
    ProofState,
    derive_forward,
    hypothesize_backward,
    is_complete,
    tutor_justify,
)
from .rules import UnknownRuleError, get_rule
from .scoring import Baselines, score_problem
from .serialize import attempt_from_dict, attempt_to_dict, node_to_dict

CONTROL = "Control"
GPP_CONDITION = "GPP"
CONDITIONS = (CONTROL, GPP_CONDITION)

MODE_PS = "PS"
MODE_WE = "WE"
MODE_GPP = "GPP"


class ServiceError(Exception):
    pass


class SessionNotFoundError(ServiceError):
    pass


class ConditionError(ServiceError):
    pass


class ModeError(ServiceError):
    pass


class HelpUnavailableError(ServiceError):
    pass


class ExplanationPendingError(ServiceError):
    pass


class IncompleteProofError(ServiceError):
    pass


class SessionCompleteError(ServiceError):
    pass


class ReplayError(ServiceError):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    # probability that a training draw lands on problem solving; the
    # alternative is the condition's signature mode
    ps_probability: float = 0.5

    def __post_init__(self):
        if not 0 <= self.ps_probability <= 1:
            raise ValueError("ps_probability must be in [0, 1]")


@dataclass(frozen=True)
class Slot:
    index: int
    problem_id: str
    level: int
    phase: str  # pretest | training | posttest
    assessment: bool  # unaided level-end check


@dataclass
class Session:
    id: str
    student_id: str
    seed: int
    config: ServiceConfig
    slots: tuple[Slot, ...]
    rng: random.Random
    condition: Optional[str] = None
    slot_index: int = 0
    mode: Optional[str] = None
    state: Optional[ProofState] = None
    gpp: Optional[GppProblem] = None
    hints: tuple[Hint, ...] = ()
    hints_shown: set[int] = field(default_factory=set)
    we_cursor: int = 0
    we_id_map: dict[str, str] = field(default_factory=dict)
    problem_complete: bool = False
    awaiting_explanation: bool = False
    finished: bool = False
    scores: list[dict[str, Any]] = field(default_factory=list)
    events: list[dict[str, Any]] = field(default_factory=list)

    @property
    def slot(self) -> Slot:
        return self.slots[self.slot_index]


def _build_slots(curriculum: bank.Curriculum) -> tuple[Slot, ...]:
    slots = []
    for level in curriculum.levels:
        for position, problem_id in enumerate(level.problem_ids):
            assessment = (
                level.phase == "training" and position == len(level.problem_ids) - 1
            )
            slots.append(
                Slot(len(slots), problem_id, level.level, level.phase, assessment)
            )
    return tuple(slots)


class TutorService:
    """In-memory session store over a problem bank."""

    def __init__(
        self,
        problems: Optional[Sequence[Problem]] = None,
        curriculum: Optional[bank.Curriculum] = None,
        chunk_models: Optional[dict[str, ChunkModel]] = None,
        baselines: Optional[Baselines] = None,
        config: ServiceConfig = ServiceConfig(),
        log_dir: Optional[str | Path] = None,
    ):
        self.problems = {p.id: p for p in (problems or bank.all_problems())}
        self.curriculum = curriculum or bank.default_curriculum()
        self.curriculum.validate()
        self.chunk_models = (
            chunk_models if chunk_models is not None else bank.chunk_models()
        )
        self.baselines = baselines or bank.default_baselines()
        self.config = config
        self.sessions: dict[str, Session] = {}
        self.log_dir = Path(log_dir) if log_dir is not None else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        for pid in self.curriculum.problem_ids():
            if pid not in self.problems:
                raise ValueError(f"curriculum references unknown problem {pid}")

    # -- session lifecycle --------------------------------------------------

    def create_session(
        self,
        student_id: str,
        ts: float,
        seed: Optional[int] = None,
        session_id: Optional[str] = None,
    ) -> Session:
        if seed is None:
            seed = random.getrandbits(32)
        if session_id is None:
            session_id = uuid.uuid4().hex[:12]
        if session_id in self.sessions:
            raise ServiceError(f"session {session_id} already exists")
        session = Session(
            id=session_id,
            student_id=student_id,
            seed=seed,
            config=self.config,
            slots=_build_slots(self.curriculum),
            rng=random.Random(seed),
        )
        self.sessions[session_id] = session
        self._log(
            session,
            ts,
            "session-created",
            session_id=session_id,
            student_id=student_id,
            seed=seed,
            config={"ps_probability": self.config.ps_probability},
        )
        return session

    def get_session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise SessionNotFoundError(session_id) from None

    def assign_condition(self, session_id: str, condition: str, ts: float) -> Session:
        session = self.get_session(session_id)
        if session.condition is not None:
            raise ConditionError("condition already assigned")
        if condition not in CONDITIONS:
            raise ConditionError(f"unknown condition {condition!r}")
        session.condition = condition
        self._log(session, ts, "condition-assigned", condition=condition)
        self._start_slot(session, ts)
        return session

    # -- slot control ---------------------------------------------------------

    def _draw_mode(self, session: Session, slot: Slot) -> str:
        if slot.phase in ("pretest", "posttest") or slot.assessment:
            return MODE_PS
        if session.rng.random() < session.config.ps_probability:
            return MODE_PS
        return MODE_WE if session.condition == CONTROL else MODE_GPP

    def _help_allowed(self, slot: Slot, mode: str) -> bool:
        return mode == MODE_GPP and slot.phase == "training" and not slot.assessment

    def _start_slot(self, session: Session, ts: float) -> None:
        slot = session.slot
        problem = self.problems[slot.problem_id]
        mode = self._draw_mode(session, slot)
        session.mode = mode
        session.hints_shown = set()
        session.we_cursor = 0
        session.we_id_map = {}
        session.problem_complete = False
        session.awaiting_explanation = False
        if mode == MODE_GPP:
            model = self.chunk_models.get(slot.problem_id)
            if model is None:
                raise ServiceError(f"no chunk model for {slot.problem_id}")
            session.gpp = build_gpp(problem, model)
            session.state = session.gpp.initial_state(ts)
            session.hints = hint_script(session.gpp)
        else:
            session.gpp = None
            session.state = problem.initial_state(ts)
            session.hints = ()
            if mode == MODE_WE:
                session.we_id_map = {gid: gid for gid in problem.solution.given_ids()}
        self._log(
            session,
            ts,
            "problem-started",
            slot=slot.index,
            problem_id=slot.problem_id,
            level=slot.level,
            phase=slot.phase,
            mode=mode,
            help=self._help_allowed(slot, mode),
        )

    def _advance_or_finish(self, session: Session, ts: float) -> None:
        if session.slot_index + 1 < len(session.slots):
            session.slot_index += 1
            self._start_slot(session, ts)
        else:
            session.finished = True
            session.state = None
            session.gpp = None
            session.mode = None
            self._log(session, ts, "session-completed")

    def _require_active(self, session: Session) -> None:
        if session.condition is None:
            raise ConditionError("condition not assigned yet")
        if session.finished:
            raise SessionCompleteError("session is complete")
        if session.awaiting_explanation:
            raise ExplanationPendingError("submit the explanation first")
        if session.problem_complete:
            raise ServiceError("problem already completed")

    # -- steps ----------------------------------------------------------------

    def submit_step(self, session_id: str, payload: dict[str, Any], ts: float) -> dict:
        session = self.get_session(session_id)
        self._require_active(session)
        direction = payload.get("direction")
        if direction == "advance":
            attempt = self._we_advance(session, ts)
        elif direction == FORWARD:
            if session.mode == MODE_WE:
                raise ModeError("worked examples advance step by step")
            rule = get_rule(payload["rule"])
            declared = parse_formula(payload["statement"])
            attempt = derive_forward(
                session.state, list(payload.get("parents", [])), rule, declared, ts
            )
        elif direction == BACKWARD:
            if session.mode == MODE_WE:
                raise ModeError("worked examples advance step by step")
            rule = get_rule(payload["rule"])
            attempt = hypothesize_backward(
                session.state,
                payload["target"],
                rule,
                list(payload.get("parents", [])),
                ts,
            )
        else:
            raise ServiceError(f"unknown step direction {direction!r}")
        self._log(
            session,
            ts,
            "step",
            problem_id=session.slot.problem_id,
            attempt=attempt_to_dict(attempt),
        )
        auto_hint = None
        if attempt.outcome != CORRECT:
            auto_hint = self._maybe_auto_hint(session, attempt, ts)
        node = None
        if attempt.node_id is not None:
            node = node_to_dict(session.state.nodes[attempt.node_id])
        return {
            "attempt": attempt_to_dict(attempt),
            "node": node,
            "complete": is_complete(session.state),
            "auto_hint": auto_hint,
        }

    def _we_advance(self, session: Session, ts: float):
        if session.mode != MODE_WE:
            raise ModeError("advance applies only to worked examples")
        problem = self.problems[session.slot.problem_id]
        solution = problem.solution
        order = solution.derived_ids()
        if session.we_cursor >= len(order):
            raise ModeError("the worked example is fully revealed")
        node = solution.nodes[order[session.we_cursor]]
        parents = [session.we_id_map[p] for p in node.justification.parent_ids]
        attempt = tutor_justify(
            session.state, node.statement, node.justification.rule_id, parents, ts
        )
        session.we_id_map[node.id] = attempt.node_id
        session.we_cursor += 1
        return attempt

    # -- hints ----------------------------------------------------------------

    def _hint_view(self, hint: Hint, origin: str) -> dict:
        return {
            "order": hint.order,
            "target": hint.target_id,
            "rule": hint.rule_id,
            "message": hint.message,
            "origin": origin,
        }

    def _show_hint(self, session: Session, hint: Hint, origin: str, ts: float) -> dict:
        session.hints_shown.add(hint.order)
        view = self._hint_view(hint, origin)
        self._log(
            session,
            ts,
            "hint-shown",
            problem_id=session.slot.problem_id,
            **view,
        )
        return view

    def _maybe_auto_hint(self, session: Session, attempt, ts: float) -> Optional[dict]:
        """First miss at a hinted open node pops its hint unprompted."""
        if not self._help_allowed(session.slot, session.mode or ""):
            return None
        if attempt.direction == BACKWARD:
            target_id = attempt.target
        else:
            declared = parse_formula(attempt.target)
            target_id = next(
                (
                    n.id
                    for n in session.state.nodes.values()
                    if not n.justified and n.statement == declared
                ),
                None,
            )
        if target_id is None:
            return None
        hint = next((h for h in session.hints if h.target_id == target_id), None)
        if hint is None or hint.order in session.hints_shown:
            return None
        return self._show_hint(session, hint, "auto", ts)

    def request_hint(self, session_id: str, ts: float) -> Optional[dict]:
        session = self.get_session(session_id)
        self._require_active(session)
        if not self._help_allowed(session.slot, session.mode or ""):
            raise HelpUnavailableError("hints are not available on this problem")
        for hint in session.hints:
            if hint.order not in session.hints_shown:
                return self._show_hint(session, hint, "requested", ts)
        return None

    # -- completion -------------------------------------------------------------

    def complete_problem(self, session_id: str, ts: float) -> dict:
        session = self.get_session(session_id)
        self._require_active(session)
        state = session.state
        if session.mode == MODE_WE:
            problem = self.problems[session.slot.problem_id]
            if session.we_cursor < len(problem.solution.derived_ids()):
                raise IncompleteProofError("the worked example is not fully revealed")
        if not is_complete(state):
            raise IncompleteProofError("the conclusion is not grounded yet")
        baseline = self.baselines.for_problem(session.slot.problem_id)
        elapsed = ts - state.started_at
        if elapsed < 0:
            raise ServiceError("completion timestamp precedes problem start")
        correct = sum(1 for a in state.history if a.outcome == CORRECT)
        score = score_problem(correct, len(state.history), elapsed, baseline)
        record = {
            "slot": session.slot.index,
            "problem_id": session.slot.problem_id,
            "level": session.slot.level,
            "phase": session.slot.phase,
            "mode": session.mode,
            "elapsed": elapsed,
            "value": score.value,
            "accuracy_factor": score.accuracy_factor,
            "step_factor": score.step_factor,
            "time_factor": score.time_factor,
            "correct_attempts": score.correct_attempts,
            "total_attempts": score.total_attempts,
        }
        session.scores.append(record)
        session.problem_complete = True
        state.completed_at = ts
        self._log(session, ts, "problem-completed", **record)
        response: dict[str, Any] = {"score": record, "session_complete": False}
        if session.mode == MODE_GPP:
            session.awaiting_explanation = True
            response["explanation_prompt"] = self_explanation_prompt(session.gpp)
        else:
            self._advance_or_finish(session, ts)
            response["session_complete"] = session.finished
        return response

    def submit_explanation(self, session_id: str, text: str, ts: float) -> dict:
        session = self.get_session(session_id)
        if session.condition is None:
            raise ConditionError("condition not assigned yet")
        if session.finished:
            raise SessionCompleteError("session is complete")
        if not session.awaiting_explanation:
            raise HelpUnavailableError("no explanation is pending")
        if not text.strip():
            raise ServiceError("explanation must not be empty")
        prompt = self_explanation_prompt(session.gpp)
        self._log(
            session,
            ts,
            "explanation-submitted",
            problem_id=session.slot.problem_id,
            prompt=prompt,
            response=text,
        )
        session.awaiting_explanation = False
        self._advance_or_finish(session, ts)
        return {"session_complete": session.finished}

    # -- views ---------------------------------------------------------------

    def problem_view(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        if session.condition is None:
            raise ConditionError("condition not assigned yet")
        if session.finished:
            return {
                "session_complete": True,
                "scores": list(session.scores),
            }
        slot = session.slot
        problem = self.problems[slot.problem_id]
        nodes = []
        for node in session.state.nodes.values():
            view = node_to_dict(node)
            view["role"] = self._node_role(session, node.id)
            nodes.append(view)
        payload: dict[str, Any] = {
            "session_complete": False,
            "slot": slot.index,
            "total_slots": len(session.slots),
            "problem_id": slot.problem_id,
            "level": slot.level,
            "phase": slot.phase,
            "mode": session.mode,
            "premises": [format_formula(p) for p in problem.premises],
            "conclusion": format_formula(problem.conclusion),
            "nodes": nodes,
            "complete": is_complete(session.state),
            "help_allowed": self._help_allowed(slot, session.mode or ""),
            "awaiting_explanation": session.awaiting_explanation,
        }
        if session.awaiting_explanation:
            payload["explanation_prompt"] = self_explanation_prompt(session.gpp)
        if session.mode == MODE_GPP:
            payload["chunks"] = [
                {
                    "index": c.index,
                    "members": list(c.member_ids),
                    "subgoal": c.subgoal_id,
                }
                for c in session.gpp.chunks
            ]
            payload["unjustified"] = [
                n.id for n in session.state.nodes.values() if not n.justified
            ]
        if session.mode == MODE_WE:
            problem = self.problems[slot.problem_id]
            payload["steps_revealed"] = session.we_cursor
            payload["steps_total"] = len(problem.solution.derived_ids())
        return payload

    def _node_role(self, session: Session, node_id: str) -> str:
        if session.gpp is not None and node_id in session.gpp.nodes:
            return session.gpp.nodes[node_id].role
        node = session.state.nodes[node_id]
        if node.origin == "given":
            return "given"
        if node.statement == session.state.conclusion and node_id == "C":
            return "conclusion"
        return "derived"

    def rules_view(self) -> list[dict]:
        from .rules import catalog

        return [
            {"id": r.id, "name": r.name, "arity": r.arity, "kind": r.kind}
            for r in catalog()
        ]

    # -- log ------------------------------------------------------------------

    def _log(self, session: Session, ts: float, event_type: str, **fields) -> None:
        event = {"seq": len(session.events), "ts": ts, "type": event_type}
        event.update(fields)
        session.events.append(event)
        if self.log_dir is not None:
            from .serialize import canonical_json

            path = self.log_dir / f"{session.id}.jsonl"
            with path.open("a", encoding="utf-8") as handle:
                handle.write(canonical_json(event) + "\n")
            self._write_snapshot(session)

    def _write_snapshot(self, session: Session) -> None:
        from .serialize import canonical_json, state_to_dict

        snapshot = {
            "session_id": session.id,
            "student_id": session.student_id,
            "seed": session.seed,
            "condition": session.condition,
            "slot_index": session.slot_index,
            "mode": session.mode,
            "finished": session.finished,
            "awaiting_explanation": session.awaiting_explanation,
            "scores": list(session.scores),
            "events": len(session.events),
            "state": state_to_dict(session.state) if session.state else None,
        }
        path = self.log_dir / f"{session.id}.snapshot.json"
        path.write_text(canonical_json(snapshot) + "\n", encoding="utf-8")

    def session_log(self, session_id: str) -> str:
        session = self.get_session(session_id)
        return events_to_jsonl(session.events)


def events_to_jsonl(events: Sequence[dict]) -> str:
    from .serialize import canonical_json

    return "".join(canonical_json(event) + "\n" for event in events)


def events_from_jsonl(text: str) -> list[dict]:
    import json

    return [json.loads(line) for line in text.splitlines() if line.strip()]


def replay_session_log(
    events: Sequence[dict],
    problems: Optional[Sequence[Problem]] = None,
    curriculum: Optional[bank.Curriculum] = None,
    chunk_models: Optional[dict[str, ChunkModel]] = None,
    baselines: Optional[Baselines] = None,
) -> str:
    """Re-run a session log's inputs through a fresh service and return
    the re-emitted log.  Derived fields (outcomes, draws, scores, hints)
    are recomputed; any divergence raises ReplayError."""
    if not events or events[0].get("type") != "session-created":
        raise ReplayError("log must start with session-created")
    created = events[0]
    service = TutorService(
        problems=problems,
        curriculum=curriculum,
        chunk_models=chunk_models,
        baselines=baselines,
        config=ServiceConfig(**created.get("config", {})),
    )
    session = service.create_session(
        created["student_id"],
        created["ts"],
        seed=created["seed"],
        session_id=created["session_id"],
    )
    for event in events[1:]:
        etype = event["type"]
        try:
            if etype == "condition-assigned":
                service.assign_condition(session.id, event["condition"], event["ts"])
            elif etype == "step":
                attempt = attempt_from_dict(event["attempt"])
                if attempt.kind == KIND_ADVANCE:
                    payload: dict[str, Any] = {"direction": "advance"}
                elif attempt.direction == FORWARD:
                    payload = {
                        "direction": FORWARD,
                        "rule": attempt.rule_id,
                        "statement": attempt.target,
                        "parents": list(attempt.parent_ids),
                    }
                else:
                    payload = {
                        "direction": BACKWARD,
                        "rule": attempt.rule_id,
                        "target": attempt.target,
                        "parents": list(attempt.parent_ids),
                    }
                service.submit_step(session.id, payload, event["ts"])
            elif etype == "hint-shown":
                if event["origin"] == "requested":
                    service.request_hint(session.id, event["ts"])
                # auto hints are re-emitted by the step that triggered them
            elif etype == "explanation-submitted":
                service.submit_explanation(session.id, event["response"], event["ts"])
            elif etype == "problem-completed":
                service.complete_problem(session.id, event["ts"])
            elif etype in ("session-created", "problem-started", "session-completed"):
                pass  # emitted by the service itself
            else:
                raise ReplayError(f"unknown event type {etype!r}")
        except (ServiceError, ProofError, UnknownRuleError, ValueError) as err:
            if isinstance(err, ReplayError):
                raise
            raise ReplayError(f"event {event['seq']}: {err}") from err
    replayed = session.events
    for original, new in zip(events, replayed):
        if original != new:
            raise ReplayError(
                f"event {original.get('seq')}: replayed {new} != logged {original}"
            )
    if len(replayed) != len(events):
        raise ReplayError(
            f"replay produced {len(replayed)} events, log has {len(events)}"
        )
    return events_to_jsonl(replayed)
