"""Shared test helpers: random formula generation and pattern-matched
premise instantiation for exercising every rule in the catalog."""

from __future__ import annotations

import random

from logictutor.formulas import AND, IFF, IMPLIES, OR, Bin, Formula, Not, Var

VAR_POOL = "GHJKP"


def random_formula(rng: random.Random, max_depth: int, var_pool: str = VAR_POOL) -> Formula:
    if max_depth <= 0 or rng.random() < 0.3:
        return Var(rng.choice(var_pool))
    if rng.random() < 0.25:
        return Not(random_formula(rng, max_depth - 1, var_pool))
    op = rng.choice((AND, OR, IMPLIES, IFF))
    return Bin(
        op,
        random_formula(rng, max_depth - 1, var_pool),
        random_formula(rng, max_depth - 1, var_pool),
    )


def matching_premises(rule_id: str, rng: random.Random, max_depth: int = 2) -> list[Formula]:
    """Premises guaranteed to match the rule's pattern, built from random
    subformulas, so every trial is a real application."""
    sub = lambda: random_formula(rng, max_depth)
    a, b, c, d = sub(), sub(), sub(), sub()
    if rule_id == "MP":
        return [a, Bin(IMPLIES, a, b)]
    if rule_id == "MT":
        return [Bin(IMPLIES, a, b), Not(b)]
    if rule_id == "DS":
        disj = Bin(OR, a, b)
        return [disj, Not(a) if rng.random() < 0.5 else Not(b)]
    if rule_id == "HS":
        return [Bin(IMPLIES, a, b), Bin(IMPLIES, b, c)]
    if rule_id == "Simp":
        return [Bin(AND, a, b)]
    if rule_id == "Conj":
        return [a, b]
    if rule_id == "Add":
        return [a]
    if rule_id == "CD":
        return [Bin(AND, Bin(IMPLIES, a, b), Bin(IMPLIES, c, d)), Bin(OR, a, c)]
    if rule_id == "DeM":
        return [
            rng.choice(
                [
                    Not(Bin(AND, a, b)),
                    Not(Bin(OR, a, b)),
                    Bin(OR, Not(a), Not(b)),
                    Bin(AND, Not(a), Not(b)),
                ]
            )
        ]
    if rule_id == "DN":
        return [rng.choice([a, Not(Not(a))])]
    if rule_id == "Com":
        return [Bin(rng.choice((AND, OR, IFF)), a, b)]
    if rule_id == "Impl":
        return [rng.choice([Bin(IMPLIES, a, b), Bin(OR, a, b), Bin(OR, Not(a), b)])]
    raise ValueError(rule_id)


def walkthrough_problem():
    """Three-given problem with a five-step expert chain, used across the
    proof, chunking, and service tests."""
    from logictutor.proofs import Problem, solution_from_steps
    from logictutor.formulas import parse_formula

    premises = tuple(
        parse_formula(text) for text in ["P", "(P ∨ Q) → G ∧ ¬H", "¬H → J"]
    )
    solution = solution_from_steps(
        premises,
        [
            ("P ∨ Q", "Add", ["1"]),
            ("G ∧ ¬H", "MP", ["d1", "2"]),
            ("¬H", "Simp", ["d2"]),
            ("J", "MP", ["d3", "3"]),
            ("J ∨ K", "Add", ["d4"]),
        ],
    )
    return Problem(
        id="demo-walkthrough",
        premises=premises,
        conclusion=parse_formula("J ∨ K"),
        level=3,
        solution=solution,
    )


def walkthrough_chunk_model(approved=True):
    """Reviewer-approved chunk model matching walkthrough_problem()."""
    from logictutor.gpp import Chunk, ChunkModel

    model = ChunkModel(
        problem_id="demo-walkthrough",
        tau=0.5,
        corpus_size=50,
        chunks=(
            Chunk(1, ("G ∧ ¬H", "P ∨ Q"), "G ∧ ¬H"),
            Chunk(2, ("J", "¬H"), "J"),
        ),
    )
    return model.approve() if approved else model


def two_route_corpus(n_route_a, n_route_b, seed=0):
    """Solutions to a four-given problem with two routes to ¬H.

    Route a goes through G ∧ ¬H (Simplification); route b goes through
    ¬¬P (Disjunctive Syllogism on the fourth given).  Route-b solvers
    still derive P ∨ Q and G ∧ ¬H as unused detours, so those statements
    have full support but co-derive with ¬H only at route-a frequency.
    """
    import random

    from logictutor.formulas import parse_formula
    from logictutor.proofs import solution_from_steps

    premises = tuple(
        parse_formula(t) for t in ["P", "(P ∨ Q) → G ∧ ¬H", "¬H → J", "¬P ∨ ¬H"]
    )
    route_a = [
        ("P ∨ Q", "Add", ["1"]),
        ("G ∧ ¬H", "MP", ["d1", "2"]),
        ("¬H", "Simp", ["d2"]),
        ("J", "MP", ["d3", "3"]),
        ("J ∨ K", "Add", ["d4"]),
    ]
    route_b = [
        ("¬¬P", "DN", ["1"]),
        ("¬H", "DS", ["4", "d1"]),
        ("J", "MP", ["d2", "3"]),
        ("P ∨ Q", "Add", ["1"]),
        ("G ∧ ¬H", "MP", ["d4", "2"]),
        ("J ∨ K", "Add", ["d3"]),
    ]
    corpus = [solution_from_steps(premises, route_a) for _ in range(n_route_a)]
    corpus += [solution_from_steps(premises, route_b) for _ in range(n_route_b)]
    random.Random(seed).shuffle(corpus)
    return premises, corpus


def two_branch_problem():
    """Two independent implication branches joined only at the conclusion."""
    from logictutor.formulas import parse_formula
    from logictutor.proofs import Problem, solution_from_steps

    premises = tuple(
        parse_formula(t) for t in ["A", "A → B", "B → C", "D", "D → E", "E → F"]
    )
    solution = solution_from_steps(
        premises,
        [
            ("B", "MP", ["1", "2"]),
            ("C", "MP", ["d1", "3"]),
            ("E", "MP", ["4", "5"]),
            ("F", "MP", ["d3", "6"]),
            ("C ∧ F", "Conj", ["d2", "d4"]),
        ],
    )
    return Problem(
        id="demo-two-branch",
        premises=premises,
        conclusion=parse_formula("C ∧ F"),
        level=4,
        solution=solution,
    )


def two_branch_corpus(n, seed=0):
    """n complete solutions to two_branch_problem(), half deriving the
    second branch first."""
    import random

    from logictutor.proofs import solution_from_steps

    problem = two_branch_problem()
    first_branch = [
        ("B", "MP", ["1", "2"]),
        ("C", "MP", ["d1", "3"]),
        ("E", "MP", ["4", "5"]),
        ("F", "MP", ["d3", "6"]),
        ("C ∧ F", "Conj", ["d2", "d4"]),
    ]
    second_branch = [
        ("E", "MP", ["4", "5"]),
        ("F", "MP", ["d1", "6"]),
        ("B", "MP", ["1", "2"]),
        ("C", "MP", ["d3", "3"]),
        ("C ∧ F", "Conj", ["d4", "d2"]),
    ]
    corpus = [
        solution_from_steps(
            problem.premises, first_branch if i % 2 == 0 else second_branch
        )
        for i in range(n)
    ]
    random.Random(seed).shuffle(corpus)
    return problem, corpus
