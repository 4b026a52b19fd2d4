from __future__ import annotations

import json

import pytest

from kgqa.drafts import CritiqueCategory, Draft, DraftFailure, parse_draft
from kgqa.executor import Entities, Literals, Number
from kgqa.fixtures import default_refine_demos
from kgqa.kg import AttributeValue
from kgqa.pipeline import (
    PipelineConfig,
    answer_question,
    majority_vote,
    select_demonstrations,
)
from kgqa.prompts import build_draft_prompt, build_refine_prompt
from kgqa.providers import RecordingProvider, ReplayMissError, ReplayProvider

from conftest import Q2_BAD_COMPLETION, Q2_GOOD_COMPLETION, Q2_QUESTION, SequenceProvider


class TestParseDraft:
    def test_well_formed(self, q2_good_completion):
        draft = parse_draft(q2_good_completion)
        assert isinstance(draft, Draft)
        assert len(draft.question_info) == 2
        assert draft.question_info[0].polarity == "negative"
        assert draft.question_info[1].kind == "literal"

    def test_missing_question_info(self):
        failure = parse_draft("# expression\nSTOP(START('x'))")
        assert isinstance(failure, DraftFailure)
        assert failure.category == CritiqueCategory.NO_QUESTION_INFO

    def test_malformed_rows(self):
        text = "# question_info\n- Boeing / entity / positive\n# expression\nSTOP(START('x'))"
        assert parse_draft(text).category == CritiqueCategory.WRONG_QUESTION_INFO

    def test_empty_block_is_wrong_question_info(self):
        text = "# question_info\n# expression\nSTOP(START('x'))"
        assert parse_draft(text).category == CritiqueCategory.WRONG_QUESTION_INFO

    def test_bad_expression(self, q2_bad_completion):
        assert parse_draft(q2_bad_completion).category == CritiqueCategory.WRONG_EXPRESSION

    def test_wrong_format(self):
        assert parse_draft("no blocks at all").category == CritiqueCategory.WRONG_FORMAT

    def test_leading_prose_tolerated(self, q2_good_completion):
        assert isinstance(parse_draft("Sure, here it is:\n" + q2_good_completion), Draft)


class TestPrompts:
    def test_draft_prompt_deterministic(self, rockets_trainset):
        a = build_draft_prompt(Q2_QUESTION, rockets_trainset)
        b = build_draft_prompt(Q2_QUESTION, rockets_trainset)
        assert a == b

    def test_zero_demos(self):
        prompt = build_draft_prompt("Who?", [])
        assert "Question: Who?" in prompt
        assert "START(" in prompt  # signature block present

    def test_constraint_elements_switch_changes_only_demo_blocks(self, rockets_trainset):
        with_info = build_draft_prompt(Q2_QUESTION, rockets_trainset, include_question_info=True)
        without = build_draft_prompt(Q2_QUESTION, rockets_trainset, include_question_info=False)
        assert with_info != without
        assert "# question_info" in with_info
        assert "# question_info\n-" not in without

    def test_draft_prompt_golden(self, rockets_trainset, request):
        golden = request.path.parent / "data" / "golden_draft_prompt.txt"
        prompt = build_draft_prompt(Q2_QUESTION, rockets_trainset[:2])
        assert prompt == golden.read_text()

    def test_refine_prompt_category_demos(self, q2_bad_completion):
        failure = parse_draft(q2_bad_completion)
        demos = default_refine_demos()
        prompt = build_refine_prompt(Q2_QUESTION, failure, demos)
        assert "Critique: wrong_expression" in prompt
        assert prompt.count("Refined:") == 3 + 1  # three demos plus the tail cue
        assert q2_bad_completion in prompt

    def test_refine_prompt_unknown_category_uses_all_demos(self, q2_good_completion):
        draft = parse_draft(q2_good_completion)
        demos = default_refine_demos()
        prompt = build_refine_prompt(Q2_QUESTION, draft, demos)
        assert "(identify the category first)" in prompt
        assert prompt.count("Refined:") == 10 + 1

    def test_refine_prompt_golden(self, q2_bad_completion, request):
        golden = request.path.parent / "data" / "golden_refine_prompt.txt"
        prompt = build_refine_prompt(Q2_QUESTION, parse_draft(q2_bad_completion), default_refine_demos())
        assert prompt == golden.read_text()


class TestSelectDemonstrations:
    def test_identical_question_ranks_first(self, rockets_trainset, embedder):
        out = select_demonstrations(rockets_trainset[2].question, rockets_trainset, embedder, 3)
        assert out[0].qid == "t3"

    def test_k_one(self, rockets_trainset, embedder):
        assert len(select_demonstrations("anything about rockets", rockets_trainset, embedder, 1)) == 1

    def test_matches_direct_cosine(self, rockets_trainset, embedder):
        question = "Which rockets are produced by Lockheed Martin?"
        out = select_demonstrations(question, rockets_trainset, embedder, 3)
        qv = embedder.embed(question)
        scored = sorted(
            rockets_trainset,
            key=lambda ex: (-float(embedder.embed(ex.question) @ qv), ex.qid),
        )
        assert [d.qid for d in out] == [ex.qid for ex in scored[:3]]

    def test_k_larger_than_trainset_warns(self, rockets_trainset, embedder, caplog):
        out = select_demonstrations("anything", rockets_trainset, embedder, 50)
        assert len(out) == len(rockets_trainset)


class TestMajorityVote:
    def test_strict_majority(self):
        delta = Entities(frozenset({"Delta"}))
        saturn = Entities(frozenset({"Saturn"}))
        assert majority_vote([delta, delta, saturn]) == delta

    def test_singleton(self):
        one = Number(1)
        assert majority_vote([one]) == one

    def test_tie_breaks_to_earliest(self):
        delta = Entities(frozenset({"Delta"}))
        saturn = Entities(frozenset({"Saturn"}))
        assert majority_vote([delta, saturn]) == delta
        assert majority_vote([saturn, delta]) == saturn

    def test_empty_sets_excluded_unless_all_empty(self):
        empty = Entities(frozenset())
        delta = Entities(frozenset({"Delta"}))
        assert majority_vote([empty, empty, delta]) == delta
        assert majority_vote([empty, empty]) == empty

    def test_literals_and_numbers_vote(self):
        lit = Literals(frozenset({AttributeValue("float", 1.0)}))
        assert majority_vote([lit, lit, Number(2)]) == lit


class TestAnswerQuestion:
    def test_correct_draft_direct(self, rockets, rockets_index, rockets_trainset):
        provider = SequenceProvider([Q2_GOOD_COMPLETION])
        pred = answer_question(
            Q2_QUESTION, rockets, rockets_index, rockets_trainset, provider, PipelineConfig(k=3)
        )
        assert pred.answers == Entities(frozenset({"Delta"}))
        assert pred.refined is False
        assert pred.chosen_candidate == 0

    def test_bad_draft_recovers_via_refinement(self, rockets, rockets_index, rockets_trainset):
        provider = SequenceProvider([Q2_BAD_COMPLETION, Q2_GOOD_COMPLETION])
        pred = answer_question(
            Q2_QUESTION, rockets, rockets_index, rockets_trainset, provider, PipelineConfig(k=3)
        )
        assert pred.answers == Entities(frozenset({"Delta"}))
        assert pred.refined is True
        assert provider.calls == 2

    def test_refinement_disabled_yields_empty(self, rockets, rockets_index, rockets_trainset):
        provider = SequenceProvider([Q2_BAD_COMPLETION])
        pred = answer_question(
            Q2_QUESTION,
            rockets,
            rockets_index,
            rockets_trainset,
            provider,
            PipelineConfig(k=3, refinement_enabled=False),
        )
        assert pred.answers == Entities(frozenset())
        assert pred.refined is False
        assert provider.calls == 1

    def test_provider_call_budget(self, rockets, rockets_index, rockets_trainset):
        n = 3
        provider = SequenceProvider([Q2_BAD_COMPLETION] * n + [Q2_BAD_COMPLETION] * n)
        pred = answer_question(
            Q2_QUESTION, rockets, rockets_index, rockets_trainset, provider,
            PipelineConfig(k=3, n_candidates=n),
        )
        assert provider.calls <= 2 * n
        assert pred.trace["provider_calls"] <= 2 * n

    def test_replay_determinism(self, rockets, rockets_index, rockets_trainset):
        recorder = RecordingProvider(SequenceProvider([Q2_BAD_COMPLETION, Q2_GOOD_COMPLETION]))
        cfg = PipelineConfig(k=3)
        recorded_pred = answer_question(
            Q2_QUESTION, rockets, rockets_index, rockets_trainset, recorder, cfg
        )
        replay = ReplayProvider(recorder.recorded)
        traces = [
            json.dumps(
                answer_question(Q2_QUESTION, rockets, rockets_index, rockets_trainset, replay, cfg).trace,
                sort_keys=True,
            )
            for _ in range(3)
        ]
        assert traces[0] == traces[1] == traces[2]
        assert json.dumps(recorded_pred.trace, sort_keys=True) == traces[0]

    def test_trace_records_stages(self, rockets, rockets_index, rockets_trainset):
        provider = SequenceProvider([Q2_GOOD_COMPLETION])
        pred = answer_question(
            Q2_QUESTION, rockets, rockets_index, rockets_trainset, provider, PipelineConfig(k=3)
        )
        trace = pred.trace
        assert trace["question"] == Q2_QUESTION
        assert trace["demo_qids"]
        assert trace["candidates"][0]["attempt"]["parse"] == "ok"
        assert trace["candidates"][0]["attempt"]["grounded"]
        assert trace["candidates"][0]["attempt"]["executions"]
        assert trace["final"]["answers"] == {"kind": "entities", "ids": ["Delta"]}


class TestReplayProvider:
    def test_round_trips_through_file(self, tmp_path):
        provider = ReplayProvider.from_prompts({"p1": ["a", "b"]})
        path = tmp_path / "replay.json"
        provider.save(path)
        loaded = ReplayProvider.from_file(path)
        assert loaded.complete("p1", 0.9, 2) == ["a", "b"]

    def test_missing_prompt(self):
        provider = ReplayProvider({})
        with pytest.raises(ReplayMissError):
            provider.complete("nope", 0.9, 1)

    def test_insufficient_completions(self):
        provider = ReplayProvider.from_prompts({"p": ["only one"]})
        with pytest.raises(ReplayMissError):
            provider.complete("p", 0.9, 2)
