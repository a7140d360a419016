"""Study outcomes from session logs.

Reads the per-student JSONL event logs the tutor writes, reduces each session
to one :class:`StudentRecord` (test scores, normalized learning gain, attempt
and hint counters), and compares the two conditions with Mann-Whitney U tests
under a Bonferroni-adjusted significance level, including a median split on
pretest score to separate low from high prior knowledge."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from statistics import mean, median
from typing import Any, Optional, Sequence

from .scoring import nlg
from .service import events_from_jsonl
from .stats import bonferroni_threshold, mann_whitney_u, median_split

PHASES = ("pretest", "training", "posttest")
TEST_MEASURES = ("pretest", "posttest", "gain")


class AnalyticsError(ValueError):
    """A session log is malformed or incomplete."""


@dataclass(frozen=True)
class StudentRecord:
    """One student's session reduced to the study's outcome measures."""

    student_id: str
    session_id: str
    condition: str
    pretest: float
    posttest: float
    training: float
    gain: float
    attempts: dict[str, int]
    accuracy: float
    rule_accuracy: dict[str, dict[str, Any]]
    hints_requested: int
    hints_auto: int
    hints_by_phase: dict[str, int]
    explanations: int
    modes: dict[str, int]
    scores: tuple[dict, ...]

    def as_dict(self) -> dict[str, Any]:
        return {
            "student_id": self.student_id,
            "session_id": self.session_id,
            "condition": self.condition,
            "pretest": self.pretest,
            "posttest": self.posttest,
            "training": self.training,
            "gain": self.gain,
            "attempts": dict(self.attempts),
            "accuracy": self.accuracy,
            "rule_accuracy": {k: dict(v) for k, v in self.rule_accuracy.items()},
            "hints_requested": self.hints_requested,
            "hints_auto": self.hints_auto,
            "hints_by_phase": dict(self.hints_by_phase),
            "explanations": self.explanations,
            "modes": dict(self.modes),
        }


def student_record_from_events(events: Sequence[dict]) -> StudentRecord:
    if not events:
        raise AnalyticsError("empty session log")
    for i, event in enumerate(events):
        if event.get("seq") != i:
            raise AnalyticsError(f"event {i} has seq {event.get('seq')}, log is not contiguous")
    created = events[0]
    if created["type"] != "session-created":
        raise AnalyticsError("log does not start with session-created")
    condition: Optional[str] = None
    phase_of: dict[str, str] = {}
    modes = {"PS": 0, "WE": 0, "GPP": 0}
    counts = {
        "total": 0,
        "correct": 0,
        "incorrect": 0,
        "incorrect_rule": 0,
        "incorrect_statement": 0,
        "forward": 0,
        "backward": 0,
    }
    rule_counts: dict[str, dict[str, int]] = {}
    hints_requested = 0
    hints_auto = 0
    hints_by_phase = {phase: 0 for phase in PHASES}
    explanations = 0
    scores: list[dict] = []
    completed = False
    for event in events[1:]:
        etype = event["type"]
        if etype == "condition-assigned":
            condition = event["condition"]
        elif etype == "problem-started":
            phase_of[event["problem_id"]] = event["phase"]
            modes[event["mode"]] += 1
        elif etype == "step":
            attempt = event["attempt"]
            if attempt["kind"] != "derive":
                continue
            counts["total"] += 1
            outcome = attempt["outcome"]
            if outcome == "correct":
                counts["correct"] += 1
            elif outcome == "incorrect-rule":
                counts["incorrect"] += 1
                counts["incorrect_rule"] += 1
            elif outcome == "incorrect-statement":
                counts["incorrect"] += 1
                counts["incorrect_statement"] += 1
            else:
                raise AnalyticsError(f"unknown outcome {outcome!r}")
            counts[attempt["direction"]] += 1
            per_rule = rule_counts.setdefault(
                attempt["rule"], {"attempts": 0, "correct": 0}
            )
            per_rule["attempts"] += 1
            if outcome == "correct":
                per_rule["correct"] += 1
        elif etype == "hint-shown":
            phase = phase_of.get(event["problem_id"])
            if phase is None:
                raise AnalyticsError(
                    f"hint for {event['problem_id']} before it started"
                )
            hints_by_phase[phase] += 1
            if event["origin"] == "requested":
                hints_requested += 1
            else:
                hints_auto += 1
        elif etype == "explanation-submitted":
            explanations += 1
        elif etype == "problem-completed":
            scores.append(event)
        elif etype == "session-completed":
            completed = True
    if condition is None:
        raise AnalyticsError("log has no condition-assigned event")
    if not completed:
        raise AnalyticsError("log has no session-completed event")
    by_phase: dict[str, list[float]] = {phase: [] for phase in PHASES}
    for record in scores:
        by_phase[record["phase"]].append(record["value"])
    for phase in PHASES:
        if not by_phase[phase]:
            raise AnalyticsError(f"no completed {phase} problems in log")
    pretest = mean(by_phase["pretest"])
    posttest = mean(by_phase["posttest"])
    rule_accuracy = {
        rule: {
            "attempts": stats["attempts"],
            "correct": stats["correct"],
            "accuracy": stats["correct"] / stats["attempts"],
        }
        for rule, stats in sorted(rule_counts.items())
    }
    return StudentRecord(
        student_id=created["student_id"],
        session_id=created["session_id"],
        condition=condition,
        pretest=pretest,
        posttest=posttest,
        training=mean(by_phase["training"]),
        gain=nlg(pretest, posttest),
        attempts=counts,
        accuracy=counts["correct"] / counts["total"] if counts["total"] else 1.0,
        rule_accuracy=rule_accuracy,
        hints_requested=hints_requested,
        hints_auto=hints_auto,
        hints_by_phase=hints_by_phase,
        explanations=explanations,
        modes=modes,
        scores=tuple(
            {k: v for k, v in record.items() if k not in ("seq", "ts", "type")}
            for record in scores
        ),
    )


def load_records(logs_dir: str | Path) -> list[StudentRecord]:
    """One record per ``*.jsonl`` file, ordered by student id."""
    logs = sorted(Path(logs_dir).glob("*.jsonl"))
    if not logs:
        raise AnalyticsError(f"no .jsonl session logs under {logs_dir}")
    records = []
    for path in logs:
        events = events_from_jsonl(path.read_text(encoding="utf-8"))
        try:
            records.append(student_record_from_events(events))
        except AnalyticsError as exc:
            raise AnalyticsError(f"{path.name}: {exc}") from None
    records.sort(key=lambda r: r.student_id)
    return records


# -- condition comparisons --------------------------------------------------


def _comparison(measure: str, a: Sequence[float], b: Sequence[float],
                threshold: float) -> dict[str, Any]:
    result = mann_whitney_u(a, b)
    return {
        "measure": measure,
        "n_control": len(a),
        "n_gpp": len(b),
        "median_control": median(a),
        "median_gpp": median(b),
        "u": result.u,
        "z": result.z,
        "p": result.p,
        "threshold": threshold,
        "significant": result.p < threshold,
    }


def _values(records: Sequence[StudentRecord], condition: str, measure: str) -> list[float]:
    return [getattr(r, measure) for r in records if r.condition == condition]


def analyze(records: Sequence[StudentRecord], alpha: float = 0.05) -> dict[str, Any]:
    """Full analysis document: per-student rows, pooled counters, the three
    condition comparisons (pretest, posttest, gain) under one Bonferroni
    family, and the prior-knowledge median split on gain (a second family)."""
    if not records:
        raise AnalyticsError("no student records to analyze")
    records = sorted(records, key=lambda r: r.student_id)
    conditions = {"Control": 0, "GPP": 0}
    for record in records:
        if record.condition not in conditions:
            raise AnalyticsError(f"unknown condition {record.condition!r}")
        conditions[record.condition] += 1
    pooled = {
        key: sum(r.attempts[key] for r in records)
        for key in ("total", "correct", "incorrect", "incorrect_rule",
                    "incorrect_statement", "forward", "backward")
    }
    pooled_accuracy = pooled["correct"] / pooled["total"] if pooled["total"] else 1.0
    pooled_rules: dict[str, dict[str, int]] = {}
    for record in records:
        for rule, stats in record.rule_accuracy.items():
            slot = pooled_rules.setdefault(rule, {"attempts": 0, "correct": 0})
            slot["attempts"] += stats["attempts"]
            slot["correct"] += stats["correct"]
    rule_accuracy = {
        rule: {
            "attempts": stats["attempts"],
            "correct": stats["correct"],
            "accuracy": stats["correct"] / stats["attempts"],
        }
        for rule, stats in sorted(pooled_rules.items())
    }
    report: dict[str, Any] = {
        "alpha": alpha,
        "n_students": len(records),
        "conditions": conditions,
        "students": [r.as_dict() for r in records],
        "attempts": {**pooled, "accuracy": pooled_accuracy},
        "rule_accuracy": rule_accuracy,
        "hints": {
            "requested": sum(r.hints_requested for r in records),
            "auto": sum(r.hints_auto for r in records),
            "by_phase": {
                phase: sum(r.hints_by_phase[phase] for r in records)
                for phase in PHASES
            },
        },
        "explanations": sum(r.explanations for r in records),
    }
    comparable = all(conditions[c] >= 1 for c in conditions)
    report["comparisons"] = []
    report["prior_knowledge"] = None
    if comparable:
        threshold = bonferroni_threshold(len(TEST_MEASURES), alpha)
        report["comparisons"] = [
            _comparison(
                measure,
                _values(records, "Control", measure),
                _values(records, "GPP", measure),
                threshold,
            )
            for measure in TEST_MEASURES
        ]
        low, high = median_split(records, key=lambda r: r.pretest)
        split: dict[str, Any] = {
            "median_pretest": median(r.pretest for r in records),
            "n_low": len(low),
            "n_high": len(high),
        }
        split_threshold = bonferroni_threshold(2, alpha)
        for name, group in (("low", low), ("high", high)):
            control = [r.gain for r in group if r.condition == "Control"]
            guided = [r.gain for r in group if r.condition == "GPP"]
            if control and guided:
                split[name] = _comparison("gain", control, guided, split_threshold)
            else:
                split[name] = None
        report["prior_knowledge"] = split
    return report


def analyze_logs(logs_dir: str | Path, alpha: float = 0.05):
    records = load_records(logs_dir)
    return records, analyze(records, alpha)


def verify_log_scores(events: Sequence[dict], baselines) -> int:
    """Recompute every problem score in a log from its own step events and
    the given baselines; raises :class:`AnalyticsError` on any mismatch.
    Returns the number of scores verified."""
    from .scoring import score_problem

    started_at: Optional[float] = None
    correct = total = 0
    verified = 0
    for event in events:
        etype = event["type"]
        if etype == "problem-started":
            started_at = event["ts"]
            correct = total = 0
        elif etype == "step":
            total += 1
            if event["attempt"]["outcome"] == "correct":
                correct += 1
        elif etype == "problem-completed":
            if started_at is None:
                raise AnalyticsError("problem-completed before problem-started")
            baseline = baselines.for_problem(event["problem_id"])
            score = score_problem(correct, total, event["ts"] - started_at, baseline)
            for key, expected in (
                ("value", score.value),
                ("accuracy_factor", score.accuracy_factor),
                ("step_factor", score.step_factor),
                ("time_factor", score.time_factor),
            ):
                if event[key] != expected:
                    raise AnalyticsError(
                        f"{event['problem_id']}: logged {key} {event[key]} != "
                        f"recomputed {expected}"
                    )
            verified += 1
    return verified


# -- rendering ----------------------------------------------------------------


def report_to_json(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def records_to_csv(records: Sequence[StudentRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "student_id",
            "condition",
            "pretest",
            "posttest",
            "gain",
            "attempts",
            "correct",
            "accuracy",
            "forward",
            "backward",
            "hints_requested",
            "hints_auto",
            "explanations",
        ]
    )
    for r in sorted(records, key=lambda x: x.student_id):
        writer.writerow(
            [
                r.student_id,
                r.condition,
                f"{r.pretest:.1f}",
                f"{r.posttest:.1f}",
                f"{r.gain:.4f}",
                r.attempts["total"],
                r.attempts["correct"],
                f"{r.accuracy:.4f}",
                r.attempts["forward"],
                r.attempts["backward"],
                r.hints_requested,
                r.hints_auto,
                r.explanations,
            ]
        )
    return buffer.getvalue()


def _table(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * widths[j] for j in range(len(row))))
    return "\n".join(lines)


def report_tables(report: dict[str, Any]) -> str:
    """Fixed-width summary for terminals."""
    sections = []
    student_rows = [["student", "cond", "pre", "post", "gain", "attempts", "acc"]]
    for s in report["students"]:
        student_rows.append(
            [
                s["student_id"],
                s["condition"],
                f"{s['pretest']:.1f}",
                f"{s['posttest']:.1f}",
                f"{s['gain']:+.3f}",
                str(s["attempts"]["total"]),
                f"{s['accuracy']:.3f}",
            ]
        )
    sections.append("Students\n" + _table(student_rows))
    pooled = report["attempts"]
    sections.append(
        "Attempts (pooled)\n"
        + _table(
            [
                ["total", "correct", "incorrect", "forward", "backward", "accuracy"],
                [
                    str(pooled["total"]),
                    str(pooled["correct"]),
                    str(pooled["incorrect"]),
                    str(pooled["forward"]),
                    str(pooled["backward"]),
                    f"{pooled['accuracy']:.3f}",
                ],
            ]
        )
    )
    rule_rows = [["rule", "attempts", "correct", "accuracy"]]
    for rule, stats in report["rule_accuracy"].items():
        rule_rows.append(
            [
                rule,
                str(stats["attempts"]),
                str(stats["correct"]),
                f"{stats['accuracy']:.3f}",
            ]
        )
    sections.append("Rule accuracy\n" + _table(rule_rows))
    hints = report["hints"]
    sections.append(
        "Hints\n"
        + _table(
            [
                ["requested", "auto", "pretest", "training", "posttest"],
                [
                    str(hints["requested"]),
                    str(hints["auto"]),
                    str(hints["by_phase"]["pretest"]),
                    str(hints["by_phase"]["training"]),
                    str(hints["by_phase"]["posttest"]),
                ],
            ]
        )
    )
    if report["comparisons"]:
        rows = [["measure", "ctrl median", "gpp median", "U", "z", "p", "sig"]]
        for c in report["comparisons"]:
            rows.append(
                [
                    c["measure"],
                    f"{c['median_control']:.2f}",
                    f"{c['median_gpp']:.2f}",
                    f"{c['u']:.1f}",
                    f"{c['z']:+.3f}",
                    f"{c['p']:.4f}",
                    "yes" if c["significant"] else "no",
                ]
            )
        sections.append(
            f"Condition comparisons (Bonferroni threshold "
            f"{report['comparisons'][0]['threshold']:.4f})\n" + _table(rows)
        )
    split = report.get("prior_knowledge")
    if split:
        rows = [["subgroup", "n", "ctrl median gain", "gpp median gain", "p", "sig"]]
        for name, n in (("low", split["n_low"]), ("high", split["n_high"])):
            c = split[name]
            if c is None:
                rows.append([name, str(n), "-", "-", "-", "-"])
            else:
                rows.append(
                    [
                        name,
                        str(n),
                        f"{c['median_control']:+.3f}",
                        f"{c['median_gpp']:+.3f}",
                        f"{c['p']:.4f}",
                        "yes" if c["significant"] else "no",
                    ]
                )
        sections.append(
            f"Gain by prior knowledge (pretest median {split['median_pretest']:.1f})\n"
            + _table(rows)
        )
    return "\n\n".join(sections) + "\n"
