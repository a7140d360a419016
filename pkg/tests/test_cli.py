import json

import pytest

from logictutor.cli import main
from logictutor.gpp import chunk_model_from_dict, gpp_from_dict
from logictutor.scoring import baselines_from_dict
from logictutor.serialize import load_json, problem_from_dict
from logictutor.sim import cohort_to_dict, make_cohort


def run(*argv):
    return main([str(a) for a in argv])


class TestBankCommands:
    def test_problems_listing(self, capsys):
        assert run("problems") == 0
        out = capsys.readouterr().out
        assert "L1.1" in out and "L7.6" in out and "⊢" in out

    def test_problem_json_export(self, tmp_path):
        target = tmp_path / "problem.json"
        assert run("problems", "--id", "L2.4", "--json", "--out", target) == 0
        problem = problem_from_dict(load_json(target))
        assert problem.id == "L2.4"
        problem.validate()

    def test_unknown_problem_id(self, capsys):
        assert run("problems", "--id", "L9.9") == 2
        assert "unknown problem id" in capsys.readouterr().err

    def test_rules_json(self, capsys):
        assert run("rules", "--json") == 0
        rows = json.loads(capsys.readouterr().out)
        assert {"id": "MP", "name": "Modus Ponens", "arity": 2, "kind": "inference"} in rows

    def test_baselines_export(self, tmp_path):
        target = tmp_path / "baselines.json"
        assert run("baselines", "--out", target) == 0
        baselines = baselines_from_dict(load_json(target))
        assert baselines.for_problem("L2.4").expert_steps == 5


class TestMiningPipeline:
    def corpus_path(self, tmp_path, problem="L2.4", n=30, seed=5):
        path = tmp_path / "corpus.jsonl"
        assert run("corpus", "--problem", problem, "--n", n, "--seed", seed,
                   "--out", path) == 0
        return path

    def test_corpus_lines_are_self_contained(self, tmp_path):
        path = self.corpus_path(tmp_path)
        lines = [json.loads(l) for l in path.read_text("utf-8").splitlines()]
        assert len(lines) == 30
        assert all(l["problem_id"] == "L2.4" for l in lines)
        assert all("premises" in l and "steps" in l for l in lines)

    def test_mine_then_build(self, tmp_path, capsys):
        corpus = self.corpus_path(tmp_path)
        chunks = tmp_path / "chunks.json"
        assert run("mine", "--corpus", corpus, "--approve", "--out", chunks) == 0
        model = chunk_model_from_dict(load_json(chunks))
        assert model.approved
        assert model.corpus_size == 30
        gpp_path = tmp_path / "gpp.json"
        assert run("build-gpp", "--solution", "L2.4", "--chunks", chunks,
                   "--out", gpp_path) == 0
        gpp = gpp_from_dict(load_json(gpp_path))
        assert gpp.problem_id == "L2.4"
        assert "C" in gpp.unjustified_ids

    def test_unapproved_model_is_rejected_without_flag(self, tmp_path, capsys):
        corpus = self.corpus_path(tmp_path)
        chunks = tmp_path / "chunks.json"
        assert run("mine", "--corpus", corpus, "--out", chunks) == 0
        gpp_path = tmp_path / "gpp.json"
        assert run("build-gpp", "--solution", "L2.4", "--chunks", chunks,
                   "--out", gpp_path) == 2
        assert "not approved" in capsys.readouterr().err
        assert run("build-gpp", "--solution", "L2.4", "--chunks", chunks,
                   "--allow-unapproved", "--out", gpp_path) == 0

    def test_mixed_corpus_rejected(self, tmp_path, capsys):
        first = self.corpus_path(tmp_path)
        second = tmp_path / "other.jsonl"
        assert run("corpus", "--problem", "L2.1", "--n", 3, "--seed", 1,
                   "--out", second) == 0
        mixed = tmp_path / "mixed.jsonl"
        mixed.write_text(
            first.read_text("utf-8") + second.read_text("utf-8"), encoding="utf-8"
        )
        assert run("mine", "--corpus", mixed, "--out", tmp_path / "x.json") == 2
        assert "mixes problems" in capsys.readouterr().err

    def test_budget_error_surfaces(self, tmp_path, capsys):
        assert run("corpus", "--problem", "L2.4", "--n", 3, "--seed", 1,
                   "--budget", 1, "--out", tmp_path / "c.jsonl") == 2
        assert "step budget" in capsys.readouterr().err


class TestSimulateAnalyze:
    def test_generated_cohort_and_full_analysis(self, tmp_path):
        study = tmp_path / "study"
        assert run("simulate", "--control", 2, "--gpp", 2, "--seed", 3,
                   "--out", study) == 0
        truth = json.loads((study / "ground_truth.json").read_text("utf-8"))
        assert len(truth["students"]) == 4
        assert len(list((study / "logs").glob("*.jsonl"))) == 4
        baselines = tmp_path / "baselines.json"
        assert run("baselines", "--out", baselines) == 0
        report_path = tmp_path / "report.json"
        csv_path = tmp_path / "students.csv"
        assert run("analyze", "--logs", study / "logs",
                   "--baselines", baselines, "--replay",
                   "--report", report_path, "--csv", csv_path, "--quiet") == 0
        report = json.loads(report_path.read_text("utf-8"))
        assert report["n_students"] == 4
        assert report["attempts"]["total"] == sum(
            s["counts"]["total"] for s in truth["students"]
        )
        assert report["attempts"]["backward"] == sum(
            s["counts"]["backward"] for s in truth["students"]
        )
        assert len(csv_path.read_text("utf-8").strip().splitlines()) == 5

    def test_cohort_file_is_used(self, tmp_path):
        spec = make_cohort(1, 1, seed=8, ps_probability=1.0)
        cohort_path = tmp_path / "cohort.json"
        cohort_path.write_text(json.dumps(cohort_to_dict(spec)), encoding="utf-8")
        study = tmp_path / "study"
        assert run("simulate", "--cohort", cohort_path, "--out", study) == 0
        truth = json.loads((study / "ground_truth.json").read_text("utf-8"))
        assert truth["ps_probability"] == 1.0
        assert [s["student_id"] for s in truth["students"]] == ["c01", "g01"]
        assert all(s["modes"] == {"PS": 28, "WE": 0, "GPP": 0}
                   for s in truth["students"])

    def test_seed_required_without_cohort(self, capsys):
        assert run("simulate", "--out", "/tmp/nowhere-xyz") == 2
        assert "--seed is required" in capsys.readouterr().err

    def test_analyze_missing_logs(self, tmp_path, capsys):
        assert run("analyze", "--logs", tmp_path, "--quiet") == 2
        assert "no .jsonl" in capsys.readouterr().err

    def test_tampered_log_fails_replay(self, tmp_path, capsys):
        study = tmp_path / "study"
        assert run("simulate", "--control", 1, "--gpp", 0, "--seed", 3,
                   "--out", study) == 0
        log = next((study / "logs").glob("*.jsonl"))
        lines = log.read_text("utf-8").splitlines(keepends=True)
        lines[3] = lines[3].replace('"outcome":"correct"', '"outcome":"incorrect-rule"')
        log.write_text("".join(lines), encoding="utf-8")
        assert run("analyze", "--logs", study / "logs", "--replay", "--quiet") == 2

    def test_tampered_score_fails_baseline_verification(self, tmp_path, capsys):
        study = tmp_path / "study"
        assert run("simulate", "--control", 1, "--gpp", 0, "--seed", 3,
                   "--out", study) == 0
        baselines = tmp_path / "baselines.json"
        assert run("baselines", "--out", baselines) == 0
        log = next((study / "logs").glob("*.jsonl"))
        text = log.read_text("utf-8")
        import re

        tampered = re.sub(r'"value":\d+(\.\d+)?', '"value":99.9', text, count=1)
        assert tampered != text
        log.write_text(tampered, encoding="utf-8")
        assert run("analyze", "--logs", study / "logs",
                   "--baselines", baselines, "--quiet") == 2
        assert "recomputed" in capsys.readouterr().err
