"""Synthetic students for exercising the tutor end to end.

A :class:`StudentProfile` plants the behavioural parameters — per-attempt
accuracy, how often justification runs backward, how many throwaway
derivations pad each problem, and pacing.  ``run_student`` drives a live
:class:`~logictutor.service.TutorService` session with those parameters and
records exactly what was planted, so downstream analytics can be checked
against known ground truth rather than against itself.

Every submitted attempt is an independent coin flip at the planted accuracy:
intended steps are retried until correct, and each failed flip submits a
deliberately unjustifiable attempt.  The driver asserts that the tutor judged
each attempt the way the plant intended; any disagreement raises
:class:`SimulationError` instead of silently skewing the ground truth.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Any, Optional

from .formulas import Bin, OR, Var, format_formula, variables
from .proofs import DERIVED, GIVEN, Justification, Problem, ProofNode, SolutionGraph
from .service import (
    CONDITIONS,
    CONTROL,
    GPP_CONDITION,
    MODE_GPP,
    MODE_PS,
    MODE_WE,
    ServiceConfig,
    TutorService,
)

_BASE_TS = 1_700_000_000.0
_STUDENT_TS_GAP = 1_000_000.0


class SimulationError(RuntimeError):
    """The tutor judged a planted attempt differently than intended."""


@dataclass(frozen=True)
class StudentProfile:
    """Planted behaviour for one synthetic student."""

    student_id: str
    condition: str
    seed: int
    accuracy: float = 0.75
    pretest_accuracy: Optional[float] = None
    posttest_accuracy: Optional[float] = None
    backward_probability: float = 0.2
    extra_derivations: int = 2
    think_seconds: float = 20.0
    posttest_speedup: float = 1.0
    hint_requests: int = 1
    rule_accuracies: Optional[dict[str, float]] = None
    step_budget: Optional[int] = None
    explanation_text: str = (
        "Deriving the subgoals first broke the proof into pieces I could finish."
    )

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ValueError(f"unknown condition {self.condition!r}")
        for name in ("accuracy", "pretest_accuracy", "posttest_accuracy"):
            value = getattr(self, name)
            if value is not None and not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {value}")
        if not 0.0 <= self.backward_probability <= 1.0:
            raise ValueError("backward_probability must be in [0, 1]")
        if self.extra_derivations < 0:
            raise ValueError("extra_derivations must be non-negative")
        if self.think_seconds <= 0 or self.posttest_speedup <= 0:
            raise ValueError("pacing parameters must be positive")
        if self.hint_requests < 0:
            raise ValueError("hint_requests must be non-negative")
        for rule, value in (self.rule_accuracies or {}).items():
            if not 0.0 < value <= 1.0:
                raise ValueError(f"accuracy for {rule} must be in (0, 1], got {value}")
        if self.step_budget is not None and self.step_budget < 1:
            raise ValueError("step_budget must be at least 1")

    def accuracy_for(self, phase: str) -> float:
        if phase == "pretest" and self.pretest_accuracy is not None:
            return self.pretest_accuracy
        if phase == "posttest" and self.posttest_accuracy is not None:
            return self.posttest_accuracy
        return self.accuracy

    def accuracy_for_rule(self, phase: str, rule_id: str) -> float:
        if self.rule_accuracies and rule_id in self.rule_accuracies:
            return self.rule_accuracies[rule_id]
        return self.accuracy_for(phase)


@dataclass
class AttemptCounts:
    """Derivation attempts as the student made them (tutor playback of worked
    examples is excluded, matching the analytics counters)."""

    total: int = 0
    correct: int = 0
    incorrect_rule: int = 0
    incorrect_statement: int = 0
    forward: int = 0
    backward: int = 0

    @property
    def incorrect(self) -> int:
        return self.incorrect_rule + self.incorrect_statement

    def record(self, attempt: dict) -> None:
        self.total += 1
        if attempt["outcome"] == "correct":
            self.correct += 1
        elif attempt["outcome"] == "incorrect-rule":
            self.incorrect_rule += 1
        else:
            self.incorrect_statement += 1
        if attempt["direction"] == "backward":
            self.backward += 1
        else:
            self.forward += 1

    def as_dict(self) -> dict[str, int]:
        return {
            "total": self.total,
            "correct": self.correct,
            "incorrect": self.incorrect,
            "incorrect_rule": self.incorrect_rule,
            "incorrect_statement": self.incorrect_statement,
            "forward": self.forward,
            "backward": self.backward,
        }


@dataclass
class StudentRun:
    """Everything one simulated session produced and planted."""

    profile: StudentProfile
    session_id: str
    counts: AttemptCounts
    hints_requested: int
    hints_auto: int
    explanations: int
    modes: dict[str, int]
    scores: list[dict]
    log_text: str

    def ground_truth(self) -> dict[str, Any]:
        return {
            "student_id": self.profile.student_id,
            "condition": self.profile.condition,
            "seed": self.profile.seed,
            "accuracy": self.profile.accuracy,
            "pretest_accuracy": self.profile.accuracy_for("pretest"),
            "posttest_accuracy": self.profile.accuracy_for("posttest"),
            "backward_probability": self.profile.backward_probability,
            "extra_derivations": self.profile.extra_derivations,
            "session_id": self.session_id,
            "counts": self.counts.as_dict(),
            "hints_requested": self.hints_requested,
            "hints_auto": self.hints_auto,
            "hints_shown": self.hints_requested + self.hints_auto,
            "explanations": self.explanations,
            "modes": dict(self.modes),
        }


def _fresh_letters(problem: Problem, needed: int) -> list[str]:
    used: set[str] = set()
    for node in problem.solution.nodes.values():
        used |= variables(node.statement)
    free = [c for c in string.ascii_uppercase if c not in used]
    if len(free) < needed:
        raise SimulationError(
            f"problem {problem.id} leaves only {len(free)} unused letters, need {needed}"
        )
    return free[:needed]


class _Driver:
    def __init__(self, service: TutorService, profile: StudentProfile, start_ts: float):
        self.service = service
        self.profile = profile
        self.rng = Random(f"sim-behaviour-{profile.seed}")
        self.now = start_ts
        self.counts = AttemptCounts()
        self.hints_requested = 0
        self.hints_auto = 0
        self.explanations = 0
        self.modes = {MODE_PS: 0, MODE_WE: 0, MODE_GPP: 0}
        self.session_id = ""
        self._speedup = 1.0

    # -- pacing ---------------------------------------------------------------

    def tick(self) -> float:
        scale = self.profile.think_seconds / self._speedup
        self.now += scale * self.rng.lognormvariate(0.0, 0.4)
        return self.now

    # -- attempt plumbing ------------------------------------------------------

    def _submit(self, payload: dict, expected_outcome: str) -> dict:
        response = self.service.submit_step(self.session_id, payload, self.tick())
        attempt = response["attempt"]
        if attempt["outcome"] != expected_outcome:
            raise SimulationError(
                f"planted a {expected_outcome} attempt but the tutor judged it "
                f"{attempt['outcome']}: {payload}"
            )
        self.counts.record(attempt)
        if response.get("auto_hint") is not None:
            self.hints_auto += 1
        return response

    def _planted_wrong(self, *, decoy_statement: str,
                       given_id: str, fresh: list[str],
                       backward_target: Optional[str]) -> None:
        """One deliberately failing attempt.

        ``MP`` from a premise paired with itself never licenses anything, so
        it is a guaranteed wrong-rule plant in both directions.  ``Add``
        declaring a disjunction of unused letters applies as a rule but never
        matches the declared statement, giving a guaranteed wrong-statement
        plant (forward only: against an existing target the declared statement
        is fixed, so only the rule can be wrong)."""
        if backward_target is not None:
            self._submit(
                {
                    "direction": "backward",
                    "target": backward_target,
                    "rule": "MP",
                    "parents": [given_id, given_id],
                },
                "incorrect-rule",
            )
            return
        if self.rng.random() < 0.5:
            self._submit(
                {
                    "direction": "forward",
                    "statement": decoy_statement,
                    "rule": "MP",
                    "parents": [given_id, given_id],
                },
                "incorrect-rule",
            )
        else:
            junk = format_formula(Bin(OR, Var(fresh[0]), Var(fresh[1])))
            self._submit(
                {
                    "direction": "forward",
                    "statement": junk,
                    "rule": "Add",
                    "parents": [given_id],
                },
                "incorrect-statement",
            )

    def _attempt_until_correct(self, payload: dict, alpha: float, *,
                               given_id: str, fresh: list[str]) -> dict:
        """Retry an intended step, planting a wrong attempt on each failed
        accuracy flip; the intended attempt itself is submitted on success."""
        if self.profile.rule_accuracies:
            alpha = self.profile.rule_accuracies.get(payload["rule"], alpha)
        decoy = payload.get("statement") or ""
        backward_target = payload.get("target") if payload["direction"] == "backward" else None
        while self.rng.random() >= alpha:
            self._planted_wrong(
                decoy_statement=decoy,
                given_id=given_id,
                fresh=fresh,
                backward_target=backward_target,
            )
        return self._submit(payload, "correct")

    # -- per-mode solvers --------------------------------------------------------

    def _we_playback(self, view: dict) -> None:
        for _ in range(view["steps_total"] - view["steps_revealed"]):
            self.service.submit_step(self.session_id, {"direction": "advance"}, self.tick())

    def _solve_ps(self, view: dict, alpha: float) -> None:
        problem = self.service.problems[view["problem_id"]]
        solution = problem.solution
        fresh = _fresh_letters(problem, 2 + self.profile.extra_derivations)
        given_id = solution.given_ids()[0]
        id_map = {gid: gid for gid in solution.given_ids()}
        order = solution.derived_ids()
        for i, nid in enumerate(order):
            if i == len(order) - 1:
                self._extras(problem, fresh, alpha, given_id)
            node = solution.nodes[nid]
            payload: dict[str, Any] = {
                "rule": node.justification.rule_id,
                "parents": [id_map[p] for p in node.justification.parent_ids],
            }
            last = i == len(order) - 1
            if last and self.rng.random() < self.profile.backward_probability:
                payload["direction"] = "backward"
                payload["target"] = "C"
            else:
                payload["direction"] = "forward"
                payload["statement"] = format_formula(node.statement)
            response = self._attempt_until_correct(
                payload, alpha, given_id=given_id, fresh=fresh
            )
            id_map[nid] = response["node"]["id"]

    def _solve_gpp(self, view: dict, alpha: float) -> None:
        problem = self.service.problems[view["problem_id"]]
        solution = problem.solution
        fresh = _fresh_letters(problem, 2 + self.profile.extra_derivations)
        given_id = "1"
        if view["help_allowed"]:
            for _ in range(self.profile.hint_requests):
                hint = self.service.request_hint(self.session_id, self.tick())
                if hint is None:
                    break
                self.hints_requested += 1
        node_by_statement = {n["statement"]: n["id"] for n in view["nodes"]}
        open_statements = {
            n["statement"] for n in view["nodes"] if n["id"] in view["unjustified"]
        }
        ordered_opens = [
            nid
            for nid in solution.derived_ids()
            if format_formula(solution.nodes[nid].statement) in open_statements
        ]
        for i, nid in enumerate(ordered_opens):
            if i == len(ordered_opens) - 1:
                self._extras(problem, fresh, alpha, given_id)
            node = solution.nodes[nid]
            statement = format_formula(node.statement)
            target_id = node_by_statement[statement]
            parents = [
                node_by_statement[format_formula(solution.nodes[p].statement)]
                for p in node.justification.parent_ids
            ]
            payload: dict[str, Any] = {
                "rule": node.justification.rule_id,
                "parents": parents,
            }
            if self.rng.random() < self.profile.backward_probability:
                payload["direction"] = "backward"
                payload["target"] = target_id
            else:
                payload["direction"] = "forward"
                payload["statement"] = statement
            response = self._attempt_until_correct(
                payload, alpha, given_id=given_id, fresh=fresh
            )
            if response["node"]["id"] != target_id:
                raise SimulationError(
                    f"expected to justify {target_id} in place, landed on "
                    f"{response['node']['id']}"
                )

    def _extras(self, problem: Problem, fresh: list[str], alpha: float,
                given_id: str) -> None:
        """Benign throwaway derivations that pad the attempt count without
        touching the proof: each adds a fresh disjunct onto the first
        premise."""
        for i in range(self.profile.extra_derivations):
            statement = format_formula(Bin(OR, problem.premises[0], Var(fresh[2 + i])))
            self._attempt_until_correct(
                {
                    "direction": "forward",
                    "statement": statement,
                    "rule": "Add",
                    "parents": [given_id],
                },
                alpha,
                given_id=given_id,
                fresh=fresh,
            )

    # -- session loop ------------------------------------------------------------

    def run(self) -> StudentRun:
        session = self.service.create_session(
            self.profile.student_id,
            self.tick(),
            seed=self.profile.seed,
            session_id=f"sess-{self.profile.student_id}",
        )
        self.session_id = session.id
        self.service.assign_condition(self.session_id, self.profile.condition, self.tick())
        while True:
            view = self.service.problem_view(self.session_id)
            if view["session_complete"]:
                scores = view["scores"]
                break
            mode = view["mode"]
            self.modes[mode] += 1
            self._speedup = (
                self.profile.posttest_speedup if view["phase"] == "posttest" else 1.0
            )
            alpha = self.profile.accuracy_for(view["phase"])
            if mode == MODE_WE:
                self._we_playback(view)
            elif mode == MODE_GPP:
                self._solve_gpp(view, alpha)
            else:
                self._solve_ps(view, alpha)
            done = self.service.complete_problem(self.session_id, self.tick())
            if "explanation_prompt" in done:
                self.service.submit_explanation(
                    self.session_id, self.profile.explanation_text, self.tick()
                )
                self.explanations += 1
        return StudentRun(
            profile=self.profile,
            session_id=self.session_id,
            counts=self.counts,
            hints_requested=self.hints_requested,
            hints_auto=self.hints_auto,
            explanations=self.explanations,
            modes=dict(self.modes),
            scores=scores,
            log_text=self.service.session_log(self.session_id),
        )


def run_student(
    service: TutorService, profile: StudentProfile, start_ts: float = _BASE_TS
) -> StudentRun:
    """Run one synthetic student through a full session."""
    return _Driver(service, profile, start_ts).run()


# -- solution corpora for the subgoal miner -------------------------------------


def generate_corpus(
    problem: Problem, n: int, profile: StudentProfile, seed: int
) -> list[SolutionGraph]:
    """``n`` complete solutions of ``problem`` for mining.

    Each solution follows the expert derivation and, when the profile allows,
    adds off-path detours (a premise with a fresh disjunct tacked on) whose
    content varies across the corpus so no detour statement reaches mining
    support.  ``profile.step_budget`` caps derivations per solution; a budget
    below the expert step count is unsolvable and rejected."""
    if n <= 0:
        raise ValueError(f"corpus size must be positive, got {n}")
    expert = problem.solution
    needed = len(expert.derived_ids())
    detours = profile.extra_derivations
    if profile.step_budget is not None:
        if profile.step_budget < needed:
            raise SimulationError(
                f"step budget {profile.step_budget} cannot cover the "
                f"{needed}-step solution of {problem.id}"
            )
        detours = min(detours, profile.step_budget - needed)
    used: set[str] = set()
    for node in expert.nodes.values():
        used |= variables(node.statement)
    pool = [c for c in string.ascii_uppercase if c not in used]
    if detours and len(pool) < 2 * detours + 1:
        detours = max(0, (len(pool) - 1) // 2)
    rng = Random(f"corpus-{seed}")
    given_ids = expert.given_ids()
    graphs: list[SolutionGraph] = []
    for _ in range(n):
        nodes: dict[str, ProofNode] = {}
        for gid in given_ids:
            nodes[gid] = ProofNode(gid, expert.nodes[gid].statement, GIVEN)
        if detours:
            for j, letter in enumerate(rng.sample(pool, detours)):
                gid = given_ids[rng.randrange(len(given_ids))]
                statement = Bin(OR, nodes[gid].statement, Var(letter))
                nodes[f"x{j + 1}"] = ProofNode(
                    f"x{j + 1}", statement, DERIVED, Justification("Add", (gid,))
                )
        for nid in expert.derived_ids():
            node = expert.nodes[nid]
            nodes[nid] = ProofNode(nid, node.statement, DERIVED, node.justification)
        graph = SolutionGraph(nodes, expert.conclusion_id)
        graph.validate()
        graphs.append(graph)
    return graphs


# -- cohorts -------------------------------------------------------------------


@dataclass(frozen=True)
class CohortSpec:
    students: tuple[StudentProfile, ...]
    ps_probability: float = 0.5


_PROFILE_FIELDS = (
    "student_id",
    "condition",
    "seed",
    "accuracy",
    "pretest_accuracy",
    "posttest_accuracy",
    "backward_probability",
    "extra_derivations",
    "think_seconds",
    "posttest_speedup",
    "hint_requests",
    "rule_accuracies",
    "step_budget",
    "explanation_text",
)


def profile_to_dict(profile: StudentProfile) -> dict[str, Any]:
    return {name: getattr(profile, name) for name in _PROFILE_FIELDS}


def profile_from_dict(data: dict[str, Any]) -> StudentProfile:
    unknown = set(data) - set(_PROFILE_FIELDS)
    if unknown:
        raise ValueError(f"unknown profile fields: {sorted(unknown)}")
    return StudentProfile(**data)


def cohort_to_dict(spec: CohortSpec) -> dict[str, Any]:
    return {
        "ps_probability": spec.ps_probability,
        "students": [profile_to_dict(p) for p in spec.students],
    }


def cohort_from_dict(data: dict[str, Any]) -> CohortSpec:
    students = tuple(profile_from_dict(d) for d in data["students"])
    if len({p.student_id for p in students}) != len(students):
        raise ValueError("student ids must be unique")
    return CohortSpec(students, data.get("ps_probability", 0.5))


def make_cohort(
    n_control: int,
    n_gpp: int,
    seed: int,
    *,
    accuracy: float = 0.75,
    accuracy_jitter: float = 0.0,
    posttest_gain: float = 0.0,
    gpp_posttest_bonus: float = 0.0,
    backward_probability: float = 0.2,
    extra_derivations: int = 2,
    think_seconds: float = 20.0,
    posttest_speedup: float = 1.0,
    hint_requests: int = 1,
    ps_probability: float = 0.5,
) -> CohortSpec:
    """Deterministically expand cohort-level knobs into per-student profiles.

    ``posttest_gain`` (plus ``gpp_posttest_bonus`` for the guided condition)
    raises posttest accuracy relative to the pre/training level, planting a
    learning effect for the analysis pipeline to find."""
    rng = Random(f"cohort-{seed}")
    students: list[StudentProfile] = []
    for i in range(n_control + n_gpp):
        condition = CONTROL if i < n_control else GPP_CONDITION
        prefix = "c" if condition == CONTROL else "g"
        index = i + 1 if condition == CONTROL else i - n_control + 1
        base = accuracy
        if accuracy_jitter:
            base += rng.uniform(-accuracy_jitter, accuracy_jitter)
        base = min(0.98, max(0.3, base))
        gain = posttest_gain + (gpp_posttest_bonus if condition == GPP_CONDITION else 0.0)
        post = min(0.98, max(0.3, base + gain))
        students.append(
            StudentProfile(
                student_id=f"{prefix}{index:02d}",
                condition=condition,
                seed=rng.randrange(1 << 30),
                accuracy=base,
                posttest_accuracy=post,
                backward_probability=backward_probability,
                extra_derivations=extra_derivations,
                think_seconds=think_seconds,
                posttest_speedup=posttest_speedup,
                hint_requests=hint_requests,
            )
        )
    return CohortSpec(tuple(students), ps_probability)


def run_cohort(
    spec: CohortSpec,
    out_dir: str | Path,
    *,
    service: Optional[TutorService] = None,
    start_ts: float = _BASE_TS,
) -> dict[str, Any]:
    """Run every student in the cohort, writing one JSONL session log per
    student under ``<out_dir>/logs/`` and the planted ground truth to
    ``<out_dir>/ground_truth.json``.  Returns the ground-truth document."""
    out = Path(out_dir)
    logs = out / "logs"
    logs.mkdir(parents=True, exist_ok=True)
    if service is None:
        service = TutorService(config=ServiceConfig(ps_probability=spec.ps_probability))
    students = []
    for i, profile in enumerate(spec.students):
        run = run_student(service, profile, start_ts=start_ts + i * _STUDENT_TS_GAP)
        (logs / f"{profile.student_id}.jsonl").write_text(
            run.log_text, encoding="utf-8"
        )
        students.append(run.ground_truth())
    truth = {
        "ps_probability": spec.ps_probability,
        "students": students,
    }
    (out / "ground_truth.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return truth
