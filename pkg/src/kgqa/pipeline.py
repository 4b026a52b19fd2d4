"""End-to-end question answering: demonstration selection, constraint-aware
draft generation, schema-guided grounding, first-nonempty execution, one-shot
self-directed refinement, and majority voting over sampled candidates.

Refinement fires at most once per candidate, and only when the draft failed
to parse or every grounded query executed empty; transport errors always
propagate instead of degrading into empty answers.  With a replay provider
the whole run is deterministic, including the trace.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .dataset import DatasetExample, answers_to_json
from .drafts import Draft, DraftFailure, parse_draft
from .embedding import EmbeddingProvider, SimilarityIndex
from .errors import ConfigError
from .executor import AnswerSet, Entities, EvalError, evaluate, is_empty_answer
from .kg import KnowledgeGraph
from .matcher import (
    GroundedLogicalForm,
    MatchError,
    MatcherConfig,
    brute_force_ground,
    ground,
)
from .prompts import RefineDemo, build_draft_prompt, build_refine_prompt
from .providers import CompletionProvider, prompt_key
from .pylf import print_pylf

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    k: int = 40
    n_candidates: int = 1
    temperature: float = 0.9
    refine_demo_count: int = 10
    matcher: MatcherConfig = field(default_factory=MatcherConfig)
    refinement_enabled: bool = True
    constraint_elements_enabled: bool = True
    # Ablation: replace schema-guided matching with the unguided cartesian
    # baseline (Ke = Kr = matcher.j); grounded forms then carry no validity
    # guarantee and failing executions are skipped.
    brute_force_matching: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be at least 1")


@dataclass
class Prediction:
    answers: AnswerSet
    chosen_candidate: int
    refined: bool
    trace: dict


def select_demonstrations(
    question: str,
    trainset: Sequence[DatasetExample],
    embedder: EmbeddingProvider,
    k: int,
) -> List[DatasetExample]:
    """Top-k nearest training questions by embedding cosine, ties by qid."""
    if not trainset:
        raise ConfigError("trainset is empty")
    if k > len(trainset):
        log.warning("k=%d exceeds trainset size %d; returning all", k, len(trainset))
        k = len(trainset)
    query_vec = embedder.embed(question)
    scored = []
    for ex in trainset:
        sim = float(embedder.embed(ex.question) @ query_vec)
        scored.append((ex, sim))
    scored.sort(key=lambda pair: (-pair[1], pair[0].qid))
    return [ex for ex, _ in scored[:k]]


def majority_vote(candidate_answers: Sequence[AnswerSet]) -> AnswerSet:
    """Most frequent answer set; ties break to the earliest candidate.

    Empty answer sets are excluded from the vote unless every candidate is
    empty.
    """
    if not candidate_answers:
        raise ValueError("majority_vote requires at least one candidate")
    pool = [(i, a) for i, a in enumerate(candidate_answers) if not is_empty_answer(a)]
    if not pool:
        return candidate_answers[0]
    counts: dict = {}
    first: dict = {}
    for i, answer in pool:
        counts[answer] = counts.get(answer, 0) + 1
        if answer not in first:
            first[answer] = i
    return max(counts, key=lambda a: (counts[a], -first[a]))


def _execute_candidates(
    candidates: Sequence[GroundedLogicalForm],
    kg: KnowledgeGraph,
) -> Tuple[Optional[AnswerSet], List[dict]]:
    """Run candidates best-first; stop at the first non-empty answer."""
    executions = []
    for cand in candidates:
        text = print_pylf(cand.expr)
        try:
            result = evaluate(cand.expr, kg)
        except EvalError as exc:
            executions.append({"pylf": text, "error": str(exc)})
            continue
        executions.append({"pylf": text, "answers": answers_to_json(result)})
        if not is_empty_answer(result):
            return result, executions
    return None, executions


def _attempt(completion: str, kg, index, cfg) -> Tuple[Optional[AnswerSet], object, dict]:
    """Parse, ground, and execute one completion.

    Returns (answer or None, Draft or DraftFailure, stage record).
    """
    record: dict = {}
    parsed = parse_draft(completion)
    if isinstance(parsed, DraftFailure):
        record["parse"] = parsed.category.value
        record["detail"] = parsed.detail
        return None, parsed, record
    record["parse"] = "ok"
    record["question_info"] = [
        {"mention": r.mention, "kind": r.kind, "polarity": r.polarity, "note": r.note}
        for r in parsed.question_info
    ]
    record["expression"] = print_pylf(parsed.expr)
    try:
        if cfg.brute_force_matching:
            candidates = brute_force_ground(
                parsed.expr, index, ke=cfg.matcher.j, kr=cfg.matcher.j
            )
        else:
            candidates = ground(parsed.expr, kg, index, cfg.matcher)
    except MatchError as exc:
        record["grounding_error"] = str(exc)
        return None, parsed, record
    record["grounded"] = [
        {"pylf": print_pylf(c.expr), "score": c.score} for c in candidates
    ]
    answer, executions = _execute_candidates(candidates, kg)
    record["executions"] = executions
    return answer, parsed, record


def answer_question(
    question: str,
    kg: KnowledgeGraph,
    index: SimilarityIndex,
    trainset: Sequence[DatasetExample],
    provider: CompletionProvider,
    cfg: PipelineConfig,
    refine_demos: Optional[Sequence[RefineDemo]] = None,
) -> Prediction:
    """Answer one question; see the module docstring for the decision flow."""
    if refine_demos is None:
        from .fixtures import default_refine_demos

        refine_demos = default_refine_demos()

    demos = select_demonstrations(question, trainset, index.embedder, cfg.k)
    prompt = build_draft_prompt(
        question, demos, include_question_info=cfg.constraint_elements_enabled
    )
    completions = provider.complete(prompt, cfg.temperature, cfg.n_candidates)
    provider_calls = 1

    candidate_answers: List[AnswerSet] = []
    candidate_traces: List[dict] = []
    any_refined = False
    for completion in completions:
        answer, draft_or_failure, record = _attempt(completion, kg, index, cfg)
        cand_trace = {"completion": completion, "attempt": record, "refined": False}
        if answer is None and cfg.refinement_enabled:
            refine_prompt = build_refine_prompt(question, draft_or_failure, refine_demos)
            refine_completion = provider.complete(refine_prompt, cfg.temperature, 1)[0]
            provider_calls += 1
            answer, _, refine_record = _attempt(refine_completion, kg, index, cfg)
            cand_trace["refined"] = True
            cand_trace["refine_prompt_sha256"] = prompt_key(refine_prompt)
            cand_trace["refine_completion"] = refine_completion
            cand_trace["refine_attempt"] = refine_record
            any_refined = True
        final_answer = answer if answer is not None else Entities(ids=frozenset())
        cand_trace["answer"] = answers_to_json(final_answer)
        candidate_answers.append(final_answer)
        candidate_traces.append(cand_trace)

    voted = majority_vote(candidate_answers)
    chosen = next(i for i, a in enumerate(candidate_answers) if a == voted)
    trace = {
        "question": question,
        "config": {
            "k": cfg.k,
            "n_candidates": cfg.n_candidates,
            "temperature": cfg.temperature,
            "j": cfg.matcher.j,
            "theta": cfg.matcher.theta,
            "refinement_enabled": cfg.refinement_enabled,
            "constraint_elements_enabled": cfg.constraint_elements_enabled,
        },
        "demo_qids": [d.qid for d in demos],
        "draft_prompt_sha256": prompt_key(prompt),
        "provider_calls": provider_calls,
        "candidates": candidate_traces,
        "final": {
            "answers": answers_to_json(voted),
            "chosen_candidate": chosen,
            "refined": any_refined,
        },
    }
    return Prediction(answers=voted, chosen_candidate=chosen, refined=any_refined, trace=trace)
