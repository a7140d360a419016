"""Command-line interface.

Subcommands cover the full artifact workflow: inspect the problem bank,
generate solution corpora, mine subgoal chunks, assemble guided problems,
simulate cohorts, analyze session logs, and serve the HTTP API.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bank
from .analytics import (
    AnalyticsError,
    analyze,
    load_records,
    records_to_csv,
    report_tables,
    report_to_json,
    verify_log_scores,
)
from .gpp import (
    MiningConfig,
    build_gpp,
    chunk_model_from_dict,
    chunk_model_to_dict,
    gpp_to_dict,
    mine_subgoals,
)
from .scoring import baselines_from_dict, baselines_to_dict
from .serialize import (
    dump_json,
    load_json,
    problem_from_dict,
    problem_to_dict,
    solution_from_dict,
    solution_to_dict,
)
from .service import (
    ServiceConfig,
    ServiceError,
    TutorService,
    events_from_jsonl,
    replay_session_log,
)
from .sim import (
    SimulationError,
    StudentProfile,
    CohortSpec,
    cohort_from_dict,
    generate_corpus,
    make_cohort,
    run_cohort,
)
from .formulas import FormulaSyntaxError, parse_formula


class CliError(Exception):
    """User-facing failure; printed to stderr with exit status 2."""


def _load_problem(ref: str):
    """A problem bank id, or a path to a problem JSON file."""
    if Path(ref).exists():
        return problem_from_dict(load_json(ref))
    try:
        return bank.get_problem(ref)
    except KeyError:
        raise CliError(
            f"{ref!r} is neither a problem file nor a bank problem id "
            f"(known ids: {', '.join(sorted(p.id for p in bank.all_problems()))})"
        ) from None


# -- subcommand handlers ---------------------------------------------------------


def _cmd_problems(args) -> int:
    problems = bank.all_problems()
    if args.id:
        problems = tuple(p for p in problems if p.id == args.id)
        if not problems:
            raise CliError(f"unknown problem id {args.id!r}")
    if args.json:
        payload = [problem_to_dict(p) for p in problems]
        data = payload[0] if args.id else payload
        if args.out:
            dump_json(data, args.out)
        else:
            print(json.dumps(data, ensure_ascii=False, indent=2))
        return 0
    from .formulas import format_formula

    for p in problems:
        premises = "; ".join(format_formula(f) for f in p.premises)
        steps = len(p.solution.derived_ids())
        print(
            f"{p.id:6s} level {p.level}  {steps} steps  "
            f"{premises} ⊢ {format_formula(p.conclusion)}"
        )
    return 0


def _cmd_rules(args) -> int:
    rows = TutorService().rules_view()
    if args.json:
        print(json.dumps(rows, ensure_ascii=False, indent=2))
        return 0
    for row in rows:
        print(f"{row['id']:5s} {row['name']:24s} arity {row['arity']}  {row['kind']}")
    return 0


def _cmd_baselines(args) -> int:
    dump_json(baselines_to_dict(bank.default_baselines()), args.out)
    print(f"wrote baselines for {len(bank.all_problems())} problems to {args.out}")
    return 0


def _cmd_corpus(args) -> int:
    problem = _load_problem(args.problem)
    profile = StudentProfile(
        student_id="corpus",
        condition="Control",
        seed=args.seed,
        extra_derivations=args.detours,
        step_budget=args.budget,
    )
    graphs = generate_corpus(problem, args.n, profile, args.seed)
    from .formulas import format_formula

    with open(args.out, "w", encoding="utf-8") as fh:
        for graph in graphs:
            line = {
                "problem_id": problem.id,
                "premises": [format_formula(f) for f in problem.premises],
                **solution_to_dict(graph),
            }
            fh.write(json.dumps(line, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {len(graphs)} solutions of {problem.id} to {args.out}")
    return 0


def _read_corpus(path: str):
    problem_id = None
    premises = None
    graphs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CliError(f"{path}:{lineno}: not valid JSON ({exc})") from None
            if problem_id is None:
                problem_id = data["problem_id"]
                premises = tuple(parse_formula(t) for t in data["premises"])
            elif data["problem_id"] != problem_id:
                raise CliError(
                    f"{path}:{lineno}: corpus mixes problems "
                    f"{problem_id!r} and {data['problem_id']!r}"
                )
            graphs.append(solution_from_dict(data, premises))
    if not graphs:
        raise CliError(f"{path} contains no solutions")
    return problem_id, graphs


def _cmd_mine(args) -> int:
    problem_id, graphs = _read_corpus(args.corpus)
    config = MiningConfig(tau=args.tau, min_statement_support=args.min_support)
    model = mine_subgoals(problem_id, graphs, config)
    if args.approve:
        model = model.approve()
    dump_json(chunk_model_to_dict(model), args.out)
    status = "approved" if model.approved else "pending review"
    print(
        f"mined {len(model.chunks)} chunk(s) from {model.corpus_size} solutions "
        f"of {problem_id} (tau={model.tau}); {status}; wrote {args.out}"
    )
    for chunk in model.chunks:
        print(f"  chunk {chunk.index}: subgoal {chunk.subgoal!r}, "
              f"members {list(chunk.members)}")
    for warning in model.warnings:
        print(f"  warning: {warning}")
    return 0


def _cmd_build_gpp(args) -> int:
    problem = _load_problem(args.solution)
    model = chunk_model_from_dict(load_json(args.chunks))
    gpp = build_gpp(problem, model, allow_unapproved=args.allow_unapproved)
    dump_json(gpp_to_dict(gpp), args.out)
    print(
        f"built guided problem {gpp.problem_id}: {len(gpp.chunks)} chunk(s), "
        f"{len(gpp.unjustified_ids)} open node(s); wrote {args.out}"
    )
    return 0


def _cmd_simulate(args) -> int:
    if args.cohort:
        spec = cohort_from_dict(load_json(args.cohort))
    else:
        if args.seed is None:
            raise CliError("--seed is required when no --cohort file is given")
        spec = make_cohort(
            args.control,
            args.gpp,
            args.seed,
            accuracy=args.accuracy,
            accuracy_jitter=args.accuracy_jitter,
            posttest_gain=args.posttest_gain,
            gpp_posttest_bonus=args.gpp_posttest_bonus,
            extra_derivations=args.detours,
            ps_probability=args.ps_probability,
        )
    service = None
    if args.curriculum:
        curriculum = bank.curriculum_from_dict(load_json(args.curriculum))
        service = TutorService(
            curriculum=curriculum,
            config=ServiceConfig(ps_probability=spec.ps_probability),
        )
    truth = run_cohort(spec, args.out, service=service)
    students = truth["students"]
    attempts = sum(s["counts"]["total"] for s in students)
    print(
        f"simulated {len(students)} students ({attempts} attempts) into {args.out}; "
        f"logs under {Path(args.out) / 'logs'}, ground truth in "
        f"{Path(args.out) / 'ground_truth.json'}"
    )
    return 0


def _cmd_analyze(args) -> int:
    records = load_records(args.logs)
    if args.baselines:
        baselines = baselines_from_dict(load_json(args.baselines))
        verified = 0
        for path in sorted(Path(args.logs).glob("*.jsonl")):
            events = events_from_jsonl(path.read_text(encoding="utf-8"))
            verified += verify_log_scores(events, baselines)
        print(f"verified {verified} logged scores against {args.baselines}")
    if args.replay:
        for path in sorted(Path(args.logs).glob("*.jsonl")):
            text = path.read_text(encoding="utf-8")
            if replay_session_log(events_from_jsonl(text)) != text:
                raise CliError(f"replay of {path.name} diverged from the log")
        print(f"replayed {len(records)} session logs byte for byte")
    report = analyze(records, alpha=args.alpha)
    if args.report:
        Path(args.report).write_text(report_to_json(report), encoding="utf-8")
        print(f"wrote report to {args.report}")
    if args.csv:
        Path(args.csv).write_text(records_to_csv(records), encoding="utf-8")
        print(f"wrote per-student table to {args.csv}")
    if not args.quiet:
        print()
        print(report_tables(report), end="")
    return 0


def _cmd_serve(args) -> int:
    import random as _random

    import uvicorn

    from .api import create_app

    if args.seed is not None:
        _random.seed(args.seed)
    curriculum = None
    if args.curriculum:
        curriculum = bank.curriculum_from_dict(load_json(args.curriculum))
    service = TutorService(
        curriculum=curriculum,
        config=ServiceConfig(ps_probability=args.ps_probability),
        log_dir=args.data_dir,
    )
    app = create_app(service)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logictutor",
        description="Propositional-proof tutor: problem bank, subgoal mining, "
        "guided problems, cohort simulation, analytics, and HTTP service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("problems", help="list the built-in problem bank")
    p.add_argument("--id", help="only this problem")
    p.add_argument("--json", action="store_true", help="emit problem JSON")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_problems)

    p = sub.add_parser("rules", help="list the inference and equivalence rules")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_rules)

    p = sub.add_parser("baselines", help="write the default scoring baselines")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_baselines)

    p = sub.add_parser(
        "corpus", help="generate a solution corpus (JSONL) for the miner"
    )
    p.add_argument("--problem", required=True, help="bank id or problem JSON file")
    p.add_argument("--n", type=int, default=50, help="number of solutions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--detours", type=int, default=2,
                   help="off-path derivations per solution")
    p.add_argument("--budget", type=int, default=None,
                   help="max derivations per solution")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_corpus)

    p = sub.add_parser("mine", help="mine subgoal chunks from a solution corpus")
    p.add_argument("--corpus", required=True, help="JSONL corpus file")
    p.add_argument("--tau", type=float, default=0.5,
                   help="co-occurrence threshold for strong edges")
    p.add_argument("--min-support", type=float, default=0.5,
                   help="statement support needed to enter mining")
    p.add_argument("--approve", action="store_true",
                   help="mark the model approved for building guided problems")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser(
        "build-gpp", help="assemble a guided problem from a chunk model"
    )
    p.add_argument("--solution", required=True,
                   help="bank id or problem JSON file (with expert solution)")
    p.add_argument("--chunks", required=True, help="chunk model JSON file")
    p.add_argument("--allow-unapproved", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_gpp)

    p = sub.add_parser("simulate", help="run a synthetic cohort through the tutor")
    p.add_argument("--curriculum", help="curriculum JSON (defaults to built-in)")
    p.add_argument("--cohort", help="cohort JSON file with student profiles")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--control", type=int, default=10,
                   help="generated Control students (without --cohort)")
    p.add_argument("--gpp", type=int, default=10,
                   help="generated GPP students (without --cohort)")
    p.add_argument("--accuracy", type=float, default=0.75)
    p.add_argument("--accuracy-jitter", type=float, default=0.05)
    p.add_argument("--posttest-gain", type=float, default=0.05)
    p.add_argument("--gpp-posttest-bonus", type=float, default=0.05)
    p.add_argument("--detours", type=int, default=2,
                   help="off-path derivations per problem")
    p.add_argument("--ps-probability", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="reduce session logs to the study report")
    p.add_argument("--logs", required=True, help="directory of *.jsonl session logs")
    p.add_argument("--baselines", help="verify logged scores against these baselines")
    p.add_argument("--replay", action="store_true",
                   help="re-run each log and require byte-identical output")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--csv", help="write a per-student CSV here")
    p.add_argument("--quiet", action="store_true", help="skip the stdout tables")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--host", default=os.environ.get("LOGICTUTOR_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("LOGICTUTOR_PORT", "8000")))
    p.add_argument("--data-dir",
                   default=os.environ.get("LOGICTUTOR_DATA_DIR"),
                   help="persist session logs and snapshots here")
    p.add_argument("--seed", type=int,
                   default=(int(os.environ["LOGICTUTOR_SEED"])
                            if "LOGICTUTOR_SEED" in os.environ else None))
    p.add_argument("--ps-probability", type=float, default=0.5)
    p.add_argument("--curriculum", default=None,
                   help="curriculum JSON (defaults to built-in)")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        CliError,
        AnalyticsError,
        ServiceError,
        SimulationError,
        FormulaSyntaxError,
        FileNotFoundError,
        KeyError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
