import random

import pytest

from logictutor.formulas import parse_formula
from logictutor.gpp import (
    Chunk,
    ChunkModel,
    MiningConfig,
    build_gpp,
    chunk_model_from_dict,
    chunk_model_to_dict,
    gpp_from_dict,
    gpp_to_dict,
    hint_script,
    mine_subgoals,
    self_explanation_prompt,
)
from logictutor.proofs import (
    derive_forward,
    hypothesize_backward,
    is_complete,
    solution_from_steps,
)
from logictutor.rules import get_rule
from logictutor.serialize import canonical_json, state_to_dict

from .util import (
    two_branch_corpus,
    two_branch_problem,
    two_route_corpus,
    walkthrough_chunk_model,
    walkthrough_problem,
)

P = parse_formula


class TestMining:
    def test_two_route_corpus_splits_into_two_chunks(self):
        _, corpus = two_route_corpus(24, 26, seed=7)
        model = mine_subgoals("variant", corpus)
        assert model.corpus_size == 50
        assert model.tau == 0.5
        assert len(model.chunks) == 2
        first, second = model.chunks
        assert first.members == ("G ∧ ¬H", "P ∨ Q")
        assert first.subgoal == "G ∧ ¬H"
        assert second.members == ("J", "¬H", "¬¬P")
        assert second.subgoal == "J"
        assert not model.approved
        assert model.warnings == ()

    def test_majority_route_absorbs_the_detour_chunk(self):
        # when the Simp route clears tau, G ∧ ¬H co-derives with ¬H in
        # more than half the corpus and everything merges into one chunk
        _, corpus = two_route_corpus(40, 10, seed=7)
        model = mine_subgoals("variant", corpus)
        assert len(model.chunks) == 1
        assert model.chunks[0].subgoal == "J"
        assert "¬¬P" not in model.chunks[0].members  # support 0.2 < 0.5

    def test_two_branch_corpus_yields_branch_chunks(self):
        _, corpus = two_branch_corpus(50, seed=3)
        model = mine_subgoals("demo-two-branch", corpus)
        assert len(model.chunks) == 2
        assert model.chunks[0] == Chunk(1, ("B", "C"), "C")
        assert model.chunks[1] == Chunk(2, ("E", "F"), "F")

    def test_mining_is_order_insensitive(self):
        _, corpus = two_route_corpus(24, 26, seed=1)
        reference = chunk_model_to_dict(mine_subgoals("variant", corpus))
        for seed in range(5):
            shuffled = list(corpus)
            random.Random(seed).shuffle(shuffled)
            assert chunk_model_to_dict(mine_subgoals("variant", shuffled)) == reference

    def test_chunk_order_follows_co_derivation_flow(self):
        # route a dominates: single chain, but the cross edge from
        # G ∧ ¬H into ¬H orders chunk 1 before chunk 2 in the split case
        _, corpus = two_route_corpus(24, 26, seed=2)
        model = mine_subgoals("variant", corpus)
        subgoal_order = [c.subgoal for c in model.chunks]
        assert subgoal_order == ["G ∧ ¬H", "J"]

    def test_single_step_corpus_degenerates_to_conclusion_chunk(self):
        premises = (P("P"), P("P → Q"))
        corpus = [
            solution_from_steps(premises, [("Q", "MP", ["1", "2"])]) for _ in range(10)
        ]
        model = mine_subgoals("tiny", corpus)
        assert len(model.chunks) == 1
        assert model.chunks[0].members == ("Q",)
        assert model.chunks[0].subgoal == "Q"
        assert any("conclusion-only" in w for w in model.warnings)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            mine_subgoals("x", [])

    def test_mixed_conclusions_rejected(self):
        premises = (P("P"), P("P → Q"))
        a = solution_from_steps(premises, [("Q", "MP", ["1", "2"])])
        b = solution_from_steps(premises, [("Q", "MP", ["1", "2"]), ("Q ∨ R", "Add", ["d1"])])
        with pytest.raises(ValueError):
            mine_subgoals("x", [a, b])

    def test_tau_validation(self):
        with pytest.raises(ValueError):
            MiningConfig(tau=0.0)
        with pytest.raises(ValueError):
            MiningConfig(min_statement_support=1.5)

    def test_random_route_mixes_keep_invariants(self):
        rng = random.Random(20240612)
        for _ in range(30):
            n = rng.randint(10, 40)
            n_b = rng.randint(0, n)
            _, corpus = two_route_corpus(n - n_b, n_b, seed=rng.randint(0, 999))
            if not corpus:
                continue
            model = mine_subgoals("variant", corpus)
            seen = []
            for chunk in model.chunks:
                assert chunk.subgoal in chunk.members
                seen.extend(chunk.members)
            assert len(seen) == len(set(seen))  # chunks partition statements
            assert [c.index for c in model.chunks] == list(range(1, len(model.chunks) + 1))
            shuffled = list(corpus)
            rng.shuffle(shuffled)
            assert chunk_model_to_dict(mine_subgoals("variant", shuffled)) == (
                chunk_model_to_dict(model)
            )

    def test_chunk_model_round_trip(self):
        _, corpus = two_route_corpus(24, 26, seed=9)
        model = mine_subgoals("variant", corpus).approve()
        data = chunk_model_to_dict(model)
        assert chunk_model_from_dict(data) == model
        assert data["approved"] is True


class TestBuildGpp:
    def test_walkthrough_layout(self):
        gpp = build_gpp(walkthrough_problem(), walkthrough_chunk_model())
        assert list(gpp.nodes) == ["1", "2", "3", "1.1", "1.C", "2.1", "2.C", "C"]
        assert gpp.unjustified_ids == ("1.1", "2.1", "C")
        assert gpp.nodes["1.1"].role == "member"
        assert gpp.nodes["1.C"].role == "subgoal"
        assert gpp.nodes["2.C"].role == "subgoal"
        assert gpp.nodes["C"].role == "conclusion"
        assert gpp.nodes["1.C"].justification.parent_ids == ("1.1", "2")
        assert gpp.nodes["2.C"].justification.parent_ids == ("2.1", "3")
        assert gpp.nodes["C"].justification.parent_ids == ("2.C",)
        assert [c.member_ids for c in gpp.chunks] == [("1.1", "1.C"), ("2.1", "2.C")]

    def test_initial_state_shows_expert_edges_but_is_incomplete(self):
        gpp = build_gpp(walkthrough_problem(), walkthrough_chunk_model())
        state = gpp.initial_state()
        assert not state.nodes["1.1"].justified
        assert state.nodes["1.C"].justified
        assert not is_complete(state)
        assert state.grounded_ids() == {"1", "2", "3"}

    def test_backward_reconstruction_completes(self):
        gpp = build_gpp(walkthrough_problem(), walkthrough_chunk_model())
        state = gpp.initial_state()
        for ts, node_id in enumerate(gpp.unjustified_ids, start=1):
            just = gpp.expert_justification(node_id)
            attempt = hypothesize_backward(
                state, node_id, get_rule(just.rule_id), just.parent_ids, float(ts)
            )
            assert attempt.outcome == "correct"
        assert is_complete(state)

    def test_forward_reconstruction_justifies_in_place(self):
        gpp = build_gpp(walkthrough_problem(), walkthrough_chunk_model())
        state = gpp.initial_state()
        a1 = derive_forward(state, ["1"], get_rule("Add"), P("P ∨ Q"), 1.0)
        a2 = derive_forward(state, ["1.C"], get_rule("Simp"), P("¬H"), 2.0)
        a3 = derive_forward(state, ["2.C"], get_rule("Add"), P("J ∨ K"), 3.0)
        assert (a1.node_id, a2.node_id, a3.node_id) == ("1.1", "2.1", "C")
        assert is_complete(state)
        assert set(state.nodes) == {"1", "2", "3", "1.1", "1.C", "2.1", "2.C", "C"}

    def test_unapproved_model_rejected(self):
        with pytest.raises(ValueError):
            build_gpp(walkthrough_problem(), walkthrough_chunk_model(approved=False))
        gpp = build_gpp(
            walkthrough_problem(),
            walkthrough_chunk_model(approved=False),
            allow_unapproved=True,
        )
        assert gpp.unjustified_ids == ("1.1", "2.1", "C")

    def test_member_missing_from_solution_rejected(self):
        model = ChunkModel(
            "demo-walkthrough", 0.5, 50,
            (Chunk(1, ("G ∧ ¬H", "¬¬P"), "G ∧ ¬H"),),
        ).approve()
        with pytest.raises(ValueError):
            build_gpp(walkthrough_problem(), model)

    def test_uncovered_expert_statement_rejected(self):
        model = ChunkModel(
            "demo-walkthrough", 0.5, 50,
            (Chunk(1, ("G ∧ ¬H", "P ∨ Q"), "G ∧ ¬H"),),
        ).approve()
        with pytest.raises(ValueError):
            build_gpp(walkthrough_problem(), model)

    def test_problem_id_mismatch_rejected(self):
        model = walkthrough_chunk_model()
        with pytest.raises(ValueError):
            build_gpp(two_branch_problem(), model)

    def test_conclusion_only_chunk_is_dropped(self):
        premises = (P("P"), P("P → Q"))
        problem_solution = solution_from_steps(premises, [("Q", "MP", ["1", "2"])])
        from logictutor.proofs import Problem

        problem = Problem("tiny", premises, P("Q"), level=2, solution=problem_solution)
        model = ChunkModel("tiny", 0.5, 10, (Chunk(1, ("Q",), "Q"),)).approve()
        gpp = build_gpp(problem, model)
        assert gpp.chunks == ()
        assert gpp.unjustified_ids == ("C",)
        state = gpp.initial_state()
        assert set(state.nodes) == {"1", "2", "C"}

    def test_two_branch_gpp(self):
        problem, corpus = two_branch_corpus(50, seed=5)
        model = mine_subgoals(problem.id, corpus).approve()
        gpp = build_gpp(problem, model)
        assert gpp.unjustified_ids == ("1.1", "2.1", "C")
        assert gpp.nodes["1.C"].statement == P("C")
        assert gpp.nodes["2.C"].statement == P("F")
        assert gpp.nodes["C"].justification.parent_ids == ("1.C", "2.C")

    def test_gpp_round_trip(self):
        gpp = build_gpp(walkthrough_problem(), walkthrough_chunk_model())
        data = gpp_to_dict(gpp)
        loaded = gpp_from_dict(data)
        assert gpp_to_dict(loaded) == data
        live = canonical_json(state_to_dict(gpp.initial_state(7.0)))
        assert canonical_json(state_to_dict(loaded.initial_state(7.0))) == live


class TestHints:
    def test_walkthrough_hint_script(self):
        gpp = build_gpp(walkthrough_problem(), walkthrough_chunk_model())
        hints = hint_script(gpp)
        assert [(h.order, h.target_id, h.rule_id) for h in hints] == [
            (0, "C", "Add"),
            (1, "2.1", "Simp"),
            (2, "1.1", "Add"),
        ]
        assert hints[1].message == "Apply Simplification here to isolate ¬H."
        assert hints[0].message == (
            "Apply Addition here to introduce a disjunct and derive J ∨ K."
        )

    def test_hint_targets_are_exactly_the_open_nodes(self):
        problem, corpus = two_branch_corpus(50, seed=5)
        gpp = build_gpp(problem, mine_subgoals(problem.id, corpus).approve())
        hints = hint_script(gpp)
        assert {h.target_id for h in hints} == set(gpp.unjustified_ids)
        assert hints[0].target_id == "C"


class TestPrompt:
    def test_walkthrough_prompt_cites_subgoals_in_order(self):
        gpp = build_gpp(walkthrough_problem(), walkthrough_chunk_model())
        assert self_explanation_prompt(gpp) == (
            "How did the subgoals (G ∧ ¬H), J help you derive the conclusion?"
        )

    def test_single_subgoal_prompt_is_singular(self):
        premises = (P("A"), P("A → B"), P("B → D"))
        solution = solution_from_steps(
            premises, [("B", "MP", ["1", "2"]), ("D", "MP", ["d1", "3"])]
        )
        from logictutor.proofs import Problem

        problem = Problem("mini", premises, P("D"), level=2, solution=solution)
        model = ChunkModel("mini", 0.5, 10, (Chunk(1, ("B",), "B"),)).approve()
        gpp = build_gpp(problem, model)
        assert self_explanation_prompt(gpp) == (
            "How did the subgoal B help you derive the conclusion?"
        )
