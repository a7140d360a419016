"""Per-problem scores, normalized learning gain, and attempt metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping

from .proofs import BACKWARD, CORRECT, FORWARD, INCORRECT_RULE, INCORRECT_STATEMENT, KIND_DERIVE, StepAttempt


@dataclass(frozen=True)
class ProblemBaseline:
    expert_steps: int
    reference_seconds: float
    cap_seconds: float

    def __post_init__(self):
        if self.expert_steps < 1:
            raise ValueError("expert_steps must be positive")
        if not 0 < self.reference_seconds < self.cap_seconds:
            raise ValueError("need 0 < reference_seconds < cap_seconds")


@dataclass(frozen=True)
class Baselines:
    problems: Mapping[str, ProblemBaseline]

    def for_problem(self, problem_id: str) -> ProblemBaseline:
        try:
            return self.problems[problem_id]
        except KeyError:
            raise KeyError(f"no baseline for problem {problem_id}") from None


def baselines_to_dict(baselines: Baselines) -> dict:
    return {
        pid: {
            "expert_steps": b.expert_steps,
            "reference_seconds": b.reference_seconds,
            "cap_seconds": b.cap_seconds,
        }
        for pid, b in baselines.problems.items()
    }


def baselines_from_dict(data: dict) -> Baselines:
    return Baselines(
        {
            pid: ProblemBaseline(
                entry["expert_steps"],
                entry["reference_seconds"],
                entry["cap_seconds"],
            )
            for pid, entry in data.items()
        }
    )


@dataclass(frozen=True)
class ProblemScore:
    value: float  # 0..100, one decimal
    accuracy_factor: float
    step_factor: float
    time_factor: float
    correct_attempts: int
    total_attempts: int
    elapsed_seconds: float


def _round_half_up(value: float, places: int = 1) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def score_problem(
    correct_attempts: int,
    total_attempts: int,
    elapsed_seconds: float,
    baseline: ProblemBaseline,
) -> ProblemScore:
    """Equal-weight blend of accuracy, step economy, and pace.

    Accuracy is correct/total attempts (1.0 when there were no attempts);
    the step factor compares the expert step count against every attempt
    the solver made; the time factor falls linearly from 1 at the
    reference time to 0 at the cap.  The blended value is scaled to 100
    and rounded half-up to one decimal.
    """
    if correct_attempts < 0 or total_attempts < correct_attempts:
        raise ValueError("need 0 <= correct_attempts <= total_attempts")
    if elapsed_seconds < 0:
        raise ValueError("elapsed_seconds must be nonnegative")
    accuracy = correct_attempts / total_attempts if total_attempts else 1.0
    steps = min(1.0, baseline.expert_steps / total_attempts) if total_attempts else 1.0
    span = baseline.cap_seconds - baseline.reference_seconds
    time = (baseline.cap_seconds - elapsed_seconds) / span
    time = min(1.0, max(0.0, time))
    value = _round_half_up(100.0 * (accuracy + steps + time) / 3.0)
    return ProblemScore(
        value=value,
        accuracy_factor=accuracy,
        step_factor=steps,
        time_factor=time,
        correct_attempts=correct_attempts,
        total_attempts=total_attempts,
        elapsed_seconds=elapsed_seconds,
    )


def nlg(pre: float, post: float) -> float:
    """Normalized learning gain on 0-100 test scores.

    (post - pre) / sqrt(100 - pre), clamped to [-1, 1].  A perfect
    pretest leaves no headroom: the gain is 0 for a perfect posttest and
    -1 for anything lower, keeping the sign aligned with post - pre.
    """
    for name, score in (("pre", pre), ("post", post)):
        if not 0 <= score <= 100:
            raise ValueError(f"{name} must be in [0, 100], got {score}")
    if pre == 100:
        return 0.0 if post == 100 else -1.0
    gain = (post - pre) / math.sqrt(100.0 - pre)
    return min(1.0, max(-1.0, gain))


def _student_derivations(attempts: Iterable[StepAttempt]) -> list[StepAttempt]:
    return [a for a in attempts if a.kind == KIND_DERIVE]


@dataclass(frozen=True)
class CountMetrics:
    total: int
    correct: int
    incorrect: int
    incorrect_rule: int
    incorrect_statement: int
    forward: int
    backward: int


def count_metrics(attempts: Iterable[StepAttempt]) -> CountMetrics:
    """Attempt tallies over the solver's own derivations (tutor playback
    steps are excluded)."""
    derivations = _student_derivations(attempts)
    outcomes = [a.outcome for a in derivations]
    return CountMetrics(
        total=len(derivations),
        correct=outcomes.count(CORRECT),
        incorrect=len(derivations) - outcomes.count(CORRECT),
        incorrect_rule=outcomes.count(INCORRECT_RULE),
        incorrect_statement=outcomes.count(INCORRECT_STATEMENT),
        forward=sum(1 for a in derivations if a.direction == FORWARD),
        backward=sum(1 for a in derivations if a.direction == BACKWARD),
    )


def rule_accuracy(attempts: Iterable[StepAttempt]) -> dict[str, float]:
    """Per-rule fraction of correct attempts among the solver's own
    derivations, keyed by rule id."""
    totals: dict[str, int] = {}
    correct: dict[str, int] = {}
    for attempt in _student_derivations(attempts):
        totals[attempt.rule_id] = totals.get(attempt.rule_id, 0) + 1
        if attempt.outcome == CORRECT:
            correct[attempt.rule_id] = correct.get(attempt.rule_id, 0) + 1
    return {
        rule_id: correct.get(rule_id, 0) / total for rule_id, total in sorted(totals.items())
    }
