"""Built-in curriculum: 28 problems across seven levels.

Level 1 is the pretest (2 problems), levels 2-6 are training (4 each,
the last one of each level is solved unaided), and level 7 is the
posttest (6 problems).  Every problem ships with an expert solution, a
reviewer-approved chunk model, and default pacing baselines derived
from the expert step count.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formulas import format_formula, parse_formula
from .gpp import Chunk, ChunkModel
from .proofs import Problem, solution_from_steps
from .scoring import Baselines, ProblemBaseline

PRETEST_LEVEL = 1
POSTTEST_LEVEL = 7

# id, level, premises, conclusion, expert steps, chunk groups
# (members..., subgoal last)
_SPECS = [
    {
        "id": "L1.1", "level": 1,
        "premises": ["K", "L", "(L ∧ K) → M"],
        "conclusion": "M ∨ N",
        "steps": [
            ("K ∧ L", "Conj", ["1", "2"]),
            ("L ∧ K", "Com", ["d1"]),
            ("M", "MP", ["d2", "3"]),
            ("M ∨ N", "Add", ["d3"]),
        ],
        "chunks": [(["K ∧ L", "L ∧ K"], "L ∧ K"), (["M"], "M")],
    },
    {
        "id": "L1.2", "level": 1,
        "premises": ["S", "(S ∨ T) → (U ∧ ¬V)", "¬V → W"],
        "conclusion": "W ∨ X",
        "steps": [
            ("S ∨ T", "Add", ["1"]),
            ("U ∧ ¬V", "MP", ["d1", "2"]),
            ("¬V", "Simp", ["d2"]),
            ("W", "MP", ["d3", "3"]),
            ("W ∨ X", "Add", ["d4"]),
        ],
        "chunks": [(["S ∨ T", "U ∧ ¬V"], "U ∧ ¬V"), (["¬V", "W"], "W")],
    },
    {
        "id": "L2.1", "level": 2,
        "premises": ["A", "B", "(B ∧ A) → C"],
        "conclusion": "C ∨ D",
        "steps": [
            ("A ∧ B", "Conj", ["1", "2"]),
            ("B ∧ A", "Com", ["d1"]),
            ("C", "MP", ["d2", "3"]),
            ("C ∨ D", "Add", ["d3"]),
        ],
        "chunks": [(["A ∧ B", "B ∧ A"], "B ∧ A"), (["C"], "C")],
    },
    {
        "id": "L2.2", "level": 2,
        "premises": ["E", "E → F", "F → G", "G → H"],
        "conclusion": "H ∨ I",
        "steps": [
            ("F", "MP", ["1", "2"]),
            ("G", "MP", ["d1", "3"]),
            ("H", "MP", ["d2", "4"]),
            ("H ∨ I", "Add", ["d3"]),
        ],
        "chunks": [(["F", "G"], "G"), (["H"], "H")],
    },
    {
        "id": "L2.3", "level": 2,
        "premises": ["K → L", "¬L", "K ∨ (M ∧ N)", "N → O"],
        "conclusion": "O ∨ P",
        "steps": [
            ("¬K", "MT", ["1", "2"]),
            ("M ∧ N", "DS", ["3", "d1"]),
            ("N", "Simp", ["d2"]),
            ("O", "MP", ["d3", "4"]),
            ("O ∨ P", "Add", ["d4"]),
        ],
        "chunks": [(["¬K", "M ∧ N"], "M ∧ N"), (["N", "O"], "O")],
    },
    {
        "id": "L2.4", "level": 2,
        "premises": ["P", "(P ∨ Q) → (G ∧ ¬H)", "¬H → J"],
        "conclusion": "J ∨ K",
        "steps": [
            ("P ∨ Q", "Add", ["1"]),
            ("G ∧ ¬H", "MP", ["d1", "2"]),
            ("¬H", "Simp", ["d2"]),
            ("J", "MP", ["d3", "3"]),
            ("J ∨ K", "Add", ["d4"]),
        ],
        "chunks": [(["P ∨ Q", "G ∧ ¬H"], "G ∧ ¬H"), (["¬H", "J"], "J")],
    },
    {
        "id": "L3.1", "level": 3,
        "premises": ["¬A ∨ B", "B → C", "¬C"],
        "conclusion": "¬A ∧ ¬B",
        "steps": [
            ("A → B", "Impl", ["1"]),
            ("A → C", "HS", ["d1", "2"]),
            ("¬A", "MT", ["d2", "3"]),
            ("¬B", "MT", ["2", "3"]),
            ("¬A ∧ ¬B", "Conj", ["d3", "d4"]),
        ],
        "chunks": [(["A → B", "A → C", "¬A"], "¬A"), (["¬B"], "¬B")],
    },
    {
        "id": "L3.2", "level": 3,
        "premises": ["(K → L) ∧ (M → N)", "K", "L → O", "N → R"],
        "conclusion": "(O ∨ R) ∨ S",
        "steps": [
            ("K ∨ M", "Add", ["2"]),
            ("L ∨ N", "CD", ["1", "d1"]),
            ("(L → O) ∧ (N → R)", "Conj", ["3", "4"]),
            ("O ∨ R", "CD", ["d3", "d2"]),
            ("(O ∨ R) ∨ S", "Add", ["d4"]),
        ],
        "chunks": [
            (["K ∨ M", "L ∨ N"], "L ∨ N"),
            (["(L → O) ∧ (N → R)", "O ∨ R"], "O ∨ R"),
        ],
    },
    {
        "id": "L3.3", "level": 3,
        "premises": ["¬(S ∨ T)", "(¬S ∧ ¬T) → U", "U → (V ∧ W)"],
        "conclusion": "V ∧ U",
        "steps": [
            ("¬S ∧ ¬T", "DeM", ["1"]),
            ("U", "MP", ["d1", "2"]),
            ("V ∧ W", "MP", ["d2", "3"]),
            ("V", "Simp", ["d3"]),
            ("V ∧ U", "Conj", ["d4", "d2"]),
        ],
        "chunks": [(["¬S ∧ ¬T", "U"], "U"), (["V ∧ W", "V"], "V")],
    },
    {
        "id": "L3.4", "level": 3,
        "premises": ["¬(A ∧ B)", "¬B → C", "A", "C → (D ∧ E)"],
        "conclusion": "D",
        "steps": [
            ("¬A ∨ ¬B", "DeM", ["1"]),
            ("¬¬A", "DN", ["3"]),
            ("¬B", "DS", ["d1", "d2"]),
            ("C", "MP", ["d3", "2"]),
            ("D ∧ E", "MP", ["d4", "4"]),
            ("D", "Simp", ["d5"]),
        ],
        "chunks": [(["¬A ∨ ¬B", "¬¬A", "¬B"], "¬B"), (["C", "D ∧ E"], "D ∧ E")],
    },
    {
        "id": "L4.1", "level": 4,
        "premises": ["E → F", "¬F", "E ∨ (G ∧ H)", "H → I"],
        "conclusion": "I ∨ J",
        "steps": [
            ("¬E", "MT", ["1", "2"]),
            ("G ∧ H", "DS", ["3", "d1"]),
            ("H", "Simp", ["d2"]),
            ("I", "MP", ["d3", "4"]),
            ("I ∨ J", "Add", ["d4"]),
        ],
        "chunks": [(["¬E", "G ∧ H"], "G ∧ H"), (["H", "I"], "I")],
    },
    {
        "id": "L4.2", "level": 4,
        "premises": ["K", "K → (L ∧ M)", "M → (N ∨ O)", "¬N", "O → P"],
        "conclusion": "P ∨ Q",
        "steps": [
            ("L ∧ M", "MP", ["1", "2"]),
            ("M", "Simp", ["d1"]),
            ("N ∨ O", "MP", ["d2", "3"]),
            ("O", "DS", ["d3", "4"]),
            ("P", "MP", ["d4", "5"]),
            ("P ∨ Q", "Add", ["d5"]),
        ],
        "chunks": [(["L ∧ M", "M"], "M"), (["N ∨ O", "O", "P"], "P")],
    },
    {
        "id": "L4.3", "level": 4,
        "premises": ["S → T", "T → U", "U → V", "S", "¬W → ¬V"],
        "conclusion": "W",
        "steps": [
            ("S → U", "HS", ["1", "2"]),
            ("S → V", "HS", ["d1", "3"]),
            ("V", "MP", ["4", "d2"]),
            ("¬¬V", "DN", ["d3"]),
            ("¬¬W", "MT", ["5", "d4"]),
            ("W", "DN", ["d5"]),
        ],
        "chunks": [(["S → U", "S → V", "V"], "V"), (["¬¬V", "¬¬W"], "¬¬W")],
    },
    {
        "id": "L4.4", "level": 4,
        "premises": ["A", "A → B", "C", "C → D", "(D ∧ B) → E"],
        "conclusion": "E ∨ F",
        "steps": [
            ("B", "MP", ["1", "2"]),
            ("D", "MP", ["3", "4"]),
            ("B ∧ D", "Conj", ["d1", "d2"]),
            ("D ∧ B", "Com", ["d3"]),
            ("E", "MP", ["d4", "5"]),
            ("E ∨ F", "Add", ["d5"]),
        ],
        "chunks": [(["B"], "B"), (["D", "B ∧ D", "D ∧ B"], "D ∧ B"), (["E"], "E")],
    },
    {
        "id": "L5.1", "level": 5,
        "premises": ["¬(K ∧ L)", "¬L → M", "K", "M → (N ∧ O)"],
        "conclusion": "N",
        "steps": [
            ("¬K ∨ ¬L", "DeM", ["1"]),
            ("¬¬K", "DN", ["3"]),
            ("¬L", "DS", ["d1", "d2"]),
            ("M", "MP", ["d3", "2"]),
            ("N ∧ O", "MP", ["d4", "4"]),
            ("N", "Simp", ["d5"]),
        ],
        "chunks": [(["¬K ∨ ¬L", "¬¬K", "¬L"], "¬L"), (["M", "N ∧ O"], "N ∧ O")],
    },
    {
        "id": "L5.2", "level": 5,
        "premises": ["S", "S → (T ∧ U)", "U → (V ∨ W)", "¬V", "W → X"],
        "conclusion": "X ∨ Y",
        "steps": [
            ("T ∧ U", "MP", ["1", "2"]),
            ("U", "Simp", ["d1"]),
            ("V ∨ W", "MP", ["d2", "3"]),
            ("W", "DS", ["d3", "4"]),
            ("X", "MP", ["d4", "5"]),
            ("X ∨ Y", "Add", ["d5"]),
        ],
        "chunks": [(["T ∧ U", "U"], "U"), (["V ∨ W", "W", "X"], "X")],
    },
    {
        "id": "L5.3", "level": 5,
        "premises": ["A → B", "B → C", "C → D", "A", "¬E → ¬D"],
        "conclusion": "E",
        "steps": [
            ("A → C", "HS", ["1", "2"]),
            ("A → D", "HS", ["d1", "3"]),
            ("D", "MP", ["4", "d2"]),
            ("¬¬D", "DN", ["d3"]),
            ("¬¬E", "MT", ["5", "d4"]),
            ("E", "DN", ["d5"]),
        ],
        "chunks": [(["A → C", "A → D", "D"], "D"), (["¬¬D", "¬¬E"], "¬¬E")],
    },
    {
        "id": "L5.4", "level": 5,
        "premises": ["E → F", "F → G", "G → H", "E", "¬I → ¬H", "I → J"],
        "conclusion": "J",
        "steps": [
            ("E → G", "HS", ["1", "2"]),
            ("E → H", "HS", ["d1", "3"]),
            ("H", "MP", ["4", "d2"]),
            ("¬¬H", "DN", ["d3"]),
            ("¬¬I", "MT", ["5", "d4"]),
            ("I", "DN", ["d5"]),
            ("J", "MP", ["d6", "6"]),
        ],
        "chunks": [(["E → G", "E → H", "H"], "H"), (["¬¬H", "¬¬I", "I"], "I")],
    },
    {
        "id": "L6.1", "level": 6,
        "premises": ["A", "A → (B ∧ C)", "C → (D ∨ E)", "¬D", "E → (F ∧ ¬G)"],
        "conclusion": "¬G ∨ H",
        "steps": [
            ("B ∧ C", "MP", ["1", "2"]),
            ("C", "Simp", ["d1"]),
            ("D ∨ E", "MP", ["d2", "3"]),
            ("E", "DS", ["d3", "4"]),
            ("F ∧ ¬G", "MP", ["d4", "5"]),
            ("¬G", "Simp", ["d5"]),
            ("¬G ∨ H", "Add", ["d6"]),
        ],
        "chunks": [
            (["B ∧ C", "C"], "C"),
            (["D ∨ E", "E"], "E"),
            (["F ∧ ¬G", "¬G"], "¬G"),
        ],
    },
    {
        "id": "L6.2", "level": 6,
        "premises": ["P ∨ Q", "Q → R", "¬R", "(P ∧ ¬Q) → S", "S → T"],
        "conclusion": "T ∨ U",
        "steps": [
            ("¬Q", "MT", ["2", "3"]),
            ("P", "DS", ["1", "d1"]),
            ("P ∧ ¬Q", "Conj", ["d2", "d1"]),
            ("S", "MP", ["d3", "4"]),
            ("T", "MP", ["d4", "5"]),
            ("T ∨ U", "Add", ["d5"]),
        ],
        "chunks": [(["¬Q", "P", "P ∧ ¬Q"], "P ∧ ¬Q"), (["S", "T"], "T")],
    },
    {
        "id": "L6.3", "level": 6,
        "premises": ["¬(A ∧ B)", "A", "¬B → (C ∨ D)", "¬C", "D → E"],
        "conclusion": "E ∨ F",
        "steps": [
            ("¬A ∨ ¬B", "DeM", ["1"]),
            ("¬¬A", "DN", ["2"]),
            ("¬B", "DS", ["d1", "d2"]),
            ("C ∨ D", "MP", ["d3", "3"]),
            ("D", "DS", ["d4", "4"]),
            ("E", "MP", ["d5", "5"]),
            ("E ∨ F", "Add", ["d6"]),
        ],
        "chunks": [
            (["¬A ∨ ¬B", "¬¬A", "¬B"], "¬B"),
            (["C ∨ D", "D"], "D"),
            (["E"], "E"),
        ],
    },
    {
        "id": "L6.4", "level": 6,
        "premises": ["K → L", "L → M", "M → N", "K", "¬O → ¬N", "O → P"],
        "conclusion": "P",
        "steps": [
            ("K → M", "HS", ["1", "2"]),
            ("K → N", "HS", ["d1", "3"]),
            ("N", "MP", ["4", "d2"]),
            ("¬¬N", "DN", ["d3"]),
            ("¬¬O", "MT", ["5", "d4"]),
            ("O", "DN", ["d5"]),
            ("P", "MP", ["d6", "6"]),
        ],
        "chunks": [(["K → M", "K → N", "N"], "N"), (["¬¬N", "¬¬O", "O"], "O")],
    },
    {
        "id": "L7.1", "level": 7,
        "premises": ["G", "(G ∨ H) → (J ∧ ¬K)", "¬K → L"],
        "conclusion": "L ∨ M",
        "steps": [
            ("G ∨ H", "Add", ["1"]),
            ("J ∧ ¬K", "MP", ["d1", "2"]),
            ("¬K", "Simp", ["d2"]),
            ("L", "MP", ["d3", "3"]),
            ("L ∨ M", "Add", ["d4"]),
        ],
        "chunks": [(["G ∨ H", "J ∧ ¬K"], "J ∧ ¬K"), (["¬K", "L"], "L")],
    },
    {
        "id": "L7.2", "level": 7,
        "premises": ["S → T", "¬T", "S ∨ (U ∧ V)", "V → W"],
        "conclusion": "W ∨ X",
        "steps": [
            ("¬S", "MT", ["1", "2"]),
            ("U ∧ V", "DS", ["3", "d1"]),
            ("V", "Simp", ["d2"]),
            ("W", "MP", ["d3", "4"]),
            ("W ∨ X", "Add", ["d4"]),
        ],
        "chunks": [(["¬S", "U ∧ V"], "U ∧ V"), (["V", "W"], "W")],
    },
    {
        "id": "L7.3", "level": 7,
        "premises": ["A", "A → (B ∧ C)", "C → (D ∨ E)", "¬D", "E → F"],
        "conclusion": "F ∨ G",
        "steps": [
            ("B ∧ C", "MP", ["1", "2"]),
            ("C", "Simp", ["d1"]),
            ("D ∨ E", "MP", ["d2", "3"]),
            ("E", "DS", ["d3", "4"]),
            ("F", "MP", ["d4", "5"]),
            ("F ∨ G", "Add", ["d5"]),
        ],
        "chunks": [(["B ∧ C", "C"], "C"), (["D ∨ E", "E", "F"], "F")],
    },
    {
        "id": "L7.4", "level": 7,
        "premises": ["¬(K ∨ L)", "(¬K ∧ ¬L) → M", "M → (N ∧ O)"],
        "conclusion": "(N ∧ M) ∨ P",
        "steps": [
            ("¬K ∧ ¬L", "DeM", ["1"]),
            ("M", "MP", ["d1", "2"]),
            ("N ∧ O", "MP", ["d2", "3"]),
            ("N", "Simp", ["d3"]),
            ("N ∧ M", "Conj", ["d4", "d2"]),
            ("(N ∧ M) ∨ P", "Add", ["d5"]),
        ],
        "chunks": [(["¬K ∧ ¬L", "M"], "M"), (["N ∧ O", "N", "N ∧ M"], "N ∧ M")],
    },
    {
        "id": "L7.5", "level": 7,
        "premises": ["(S → T) ∧ (U → V)", "¬¬S", "T → W", "V → X"],
        "conclusion": "(W ∨ X) ∨ Y",
        "steps": [
            ("S", "DN", ["2"]),
            ("S ∨ U", "Add", ["d1"]),
            ("T ∨ V", "CD", ["1", "d2"]),
            ("(T → W) ∧ (V → X)", "Conj", ["3", "4"]),
            ("W ∨ X", "CD", ["d4", "d3"]),
            ("(W ∨ X) ∨ Y", "Add", ["d5"]),
        ],
        "chunks": [
            (["S", "S ∨ U", "T ∨ V"], "T ∨ V"),
            (["(T → W) ∧ (V → X)", "W ∨ X"], "W ∨ X"),
        ],
    },
    {
        "id": "L7.6", "level": 7,
        "premises": ["E", "E → (F ∧ G)", "G → (H ∨ I)", "¬H", "I → (J ∧ K)", "K → L"],
        "conclusion": "L",
        "steps": [
            ("F ∧ G", "MP", ["1", "2"]),
            ("G", "Simp", ["d1"]),
            ("H ∨ I", "MP", ["d2", "3"]),
            ("I", "DS", ["d3", "4"]),
            ("J ∧ K", "MP", ["d4", "5"]),
            ("K", "Simp", ["d5"]),
            ("L", "MP", ["d6", "6"]),
        ],
        "chunks": [(["F ∧ G", "G"], "G"), (["H ∨ I", "I"], "I"), (["J ∧ K", "K"], "K")],
    },
]

# pacing defaults per expert step
_REFERENCE_SECONDS_PER_STEP = 30.0
_CAP_SECONDS_PER_STEP = 120.0


def _canonical(text: str) -> str:
    return format_formula(parse_formula(text))


@lru_cache(maxsize=1)
def all_problems() -> tuple[Problem, ...]:
    problems = []
    for spec in _SPECS:
        premises = tuple(parse_formula(t) for t in spec["premises"])
        solution = solution_from_steps(premises, spec["steps"])
        problems.append(
            Problem(
                id=spec["id"],
                premises=premises,
                conclusion=parse_formula(spec["conclusion"]),
                level=spec["level"],
                solution=solution,
            )
        )
    return tuple(problems)


def get_problem(problem_id: str) -> Problem:
    for problem in all_problems():
        if problem.id == problem_id:
            return problem
    raise KeyError(f"unknown problem {problem_id}")


@lru_cache(maxsize=1)
def chunk_models() -> dict[str, ChunkModel]:
    out = {}
    for spec in _SPECS:
        chunks = tuple(
            Chunk(
                index,
                tuple(sorted(_canonical(m) for m in members)),
                _canonical(subgoal),
            )
            for index, (members, subgoal) in enumerate(spec["chunks"], start=1)
        )
        out[spec["id"]] = ChunkModel(
            problem_id=spec["id"],
            tau=0.5,
            corpus_size=0,  # authored, not mined
            chunks=chunks,
            approved=True,
        )
    return out


def chunk_model_for(problem_id: str) -> ChunkModel:
    try:
        return chunk_models()[problem_id]
    except KeyError:
        raise KeyError(f"no chunk model for problem {problem_id}") from None


def default_baselines() -> Baselines:
    entries = {}
    for problem in all_problems():
        steps = len(problem.solution.derived_ids())
        entries[problem.id] = ProblemBaseline(
            expert_steps=steps,
            reference_seconds=steps * _REFERENCE_SECONDS_PER_STEP,
            cap_seconds=steps * _CAP_SECONDS_PER_STEP,
        )
    return Baselines(entries)


@dataclass(frozen=True)
class CurriculumLevel:
    level: int
    phase: str  # "pretest" | "training" | "posttest"
    problem_ids: tuple[str, ...]


@dataclass(frozen=True)
class Curriculum:
    levels: tuple[CurriculumLevel, ...]

    def problem_ids(self) -> list[str]:
        return [pid for level in self.levels for pid in level.problem_ids]

    def validate(self) -> None:
        if not self.levels:
            raise ValueError("curriculum has no levels")
        numbers = [lvl.level for lvl in self.levels]
        if numbers != sorted(numbers) or len(set(numbers)) != len(numbers):
            raise ValueError("levels must be strictly increasing")
        for level in self.levels:
            if level.phase not in ("pretest", "training", "posttest"):
                raise ValueError(f"unknown phase {level.phase}")
            if not level.problem_ids:
                raise ValueError(f"level {level.level} has no problems")
        ids = self.problem_ids()
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate problem ids in curriculum")


def default_curriculum() -> Curriculum:
    by_level: dict[int, list[str]] = {}
    for spec in _SPECS:
        by_level.setdefault(spec["level"], []).append(spec["id"])
    levels = []
    for number in sorted(by_level):
        if number == PRETEST_LEVEL:
            phase = "pretest"
        elif number == POSTTEST_LEVEL:
            phase = "posttest"
        else:
            phase = "training"
        levels.append(CurriculumLevel(number, phase, tuple(by_level[number])))
    return Curriculum(tuple(levels))


def curriculum_to_dict(curriculum: Curriculum) -> dict:
    return {
        "levels": [
            {"level": lvl.level, "phase": lvl.phase, "problems": list(lvl.problem_ids)}
            for lvl in curriculum.levels
        ]
    }


def curriculum_from_dict(data: dict) -> Curriculum:
    return Curriculum(
        tuple(
            CurriculumLevel(lvl["level"], lvl["phase"], tuple(lvl["problems"]))
            for lvl in data["levels"]
        )
    )
