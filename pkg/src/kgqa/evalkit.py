"""Scoring (EM / set F1), report breakdowns, and the constraint-flip
transform that derives negative-constrained examples from positive ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from .dataset import DatasetExample, decode_answers
from .errors import DataError, KgqaError
from .executor import AnswerSet, EvalError, answer_elements, evaluate, is_empty_answer
from .kg import KnowledgeGraph
from .pylf import (
    And,
    Arg,
    Count,
    Expr,
    Join,
    Stop,
    parse_pylf,
    print_pylf,
    profile_constraints,
    resolve_exact,
    validate,
)


def exact_match(pred: AnswerSet, gold: AnswerSet) -> int:
    """1 iff the answer sets are equal as element sets (counts numerically)."""
    return int(answer_elements(pred) == answer_elements(gold))


def f1(pred: AnswerSet, gold: AnswerSet) -> float:
    """Set-overlap F1: 2|p∩g| / (|p|+|g|); requires a non-empty gold set."""
    gold_elems = answer_elements(gold)
    if not gold_elems:
        raise ValueError("gold answer set must be non-empty")
    pred_elems = answer_elements(pred)
    if not pred_elems:
        return 0.0
    overlap = len(pred_elems & gold_elems)
    return 2.0 * overlap / (len(pred_elems) + len(gold_elems))


@dataclass
class BucketStats:
    em: float
    f1: float
    n: int


@dataclass
class EvalReport:
    overall_em: float
    overall_f1: float
    by_num_constraints: Dict[int, BucketStats]
    by_function_type: Dict[str, BucketStats]
    per_example: List[Tuple[str, int, float]]

    def to_json(self) -> dict:
        return {
            "overall_em": self.overall_em,
            "overall_f1": self.overall_f1,
            "by_num_constraints": {
                str(k): {"em": b.em, "f1": b.f1, "n": b.n}
                for k, b in sorted(self.by_num_constraints.items())
            },
            "by_function_type": {
                k: {"em": b.em, "f1": b.f1, "n": b.n}
                for k, b in sorted(self.by_function_type.items())
            },
            "per_example": [
                {"qid": qid, "em": em, "f1": score} for qid, em, score in self.per_example
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"overall: EM {self.overall_em:.1f}  F1 {self.overall_f1:.1f}  (n={len(self.per_example)})",
            "by number of constraints:",
        ]
        for k, b in sorted(self.by_num_constraints.items()):
            lines.append(f"  {k:>2}: EM {b.em:5.1f}  F1 {b.f1:5.1f}  (n={b.n})")
        lines.append("by function type:")
        for k, b in sorted(self.by_function_type.items()):
            lines.append(f"  {k:<12} EM {b.em:5.1f}  F1 {b.f1:5.1f}  (n={b.n})")
        return "\n".join(lines)


def _example_buckets(example: DatasetExample) -> Tuple[int, str]:
    num = example.num_constraints
    ftype = example.function_type
    if num is None or ftype is None:
        if example.pylf:
            profile = profile_constraints(parse_pylf(example.pylf))
            num = profile.total if num is None else num
            ftype = profile.function_type if ftype is None else ftype
        else:
            num = num if num is not None else 0
            ftype = ftype if ftype is not None else "none"
    return num, ftype


def evaluate_dataset(
    predictions: Iterable[Tuple[str, AnswerSet]],
    golds: Sequence[DatasetExample],
) -> EvalReport:
    """Score predictions against gold examples and aggregate breakdowns."""
    by_qid = {ex.qid: ex for ex in golds}
    seen = set()
    per_example = []
    rows = []
    for qid, answer in predictions:
        if qid in seen:
            raise DataError(f"duplicate prediction for qid {qid!r}")
        seen.add(qid)
        if qid not in by_qid:
            raise DataError(f"prediction qid {qid!r} not present in gold dataset")
        example = by_qid[qid]
        gold = decode_answers(example.answers)
        em = exact_match(answer, gold)
        score = f1(answer, gold)
        per_example.append((qid, em, score))
        rows.append((example, em, score))
    if not rows:
        raise DataError("no predictions to score")

    def bucket(items):
        n = len(items)
        return BucketStats(
            em=100.0 * sum(e for e, _ in items) / n,
            f1=100.0 * sum(s for _, s in items) / n,
            n=n,
        )

    by_num: Dict[int, list] = {}
    by_type: Dict[str, list] = {}
    for example, em, score in rows:
        num, ftype = _example_buckets(example)
        by_num.setdefault(num, []).append((em, score))
        by_type.setdefault(ftype, []).append((em, score))

    return EvalReport(
        overall_em=100.0 * sum(e for _, e, _ in per_example) / len(per_example),
        overall_f1=100.0 * sum(s for _, _, s in per_example) / len(per_example),
        by_num_constraints={k: bucket(v) for k, v in by_num.items()},
        by_function_type={k: bucket(v) for k, v in by_type.items()},
        per_example=per_example,
    )


# ---------------------------------------------------------------------------
# Constraint-flip transform
# ---------------------------------------------------------------------------


class NestTransformError(KgqaError):
    """The source example is not eligible for the constraint flip."""


@dataclass
class NestExample:
    source_qid: str
    question: str
    pylf: Expr
    answers: AnswerSet
    flipped_path: int


def _joins_by_position(expr: Expr) -> Dict[int, Join]:
    """Pre-order node index -> JOIN node, for every join in the expression."""
    found: Dict[int, Join] = {}
    counter = [0]

    def visit(node: Expr) -> None:
        idx = counter[0]
        counter[0] += 1
        if isinstance(node, Join):
            found[idx] = node
        for child in _expr_children(node):
            visit(child)

    visit(expr)
    return found


def _expr_children(node: Expr) -> tuple:
    if isinstance(node, (Stop, Count, Join, Arg)):
        return (node.inner,)
    if isinstance(node, And):
        return (node.left, node.right)
    return ()


def flip_join(expr: Expr, position: int) -> Expr:
    """Toggle the neg flag of the JOIN at the given pre-order node index.

    Flipping the same position twice reproduces the original expression.
    """
    counter = [0]
    flipped = [False]

    def visit(node: Expr) -> Expr:
        idx = counter[0]
        counter[0] += 1
        if isinstance(node, Stop):
            return Stop(inner=visit(node.inner))
        if isinstance(node, Count):
            return Count(inner=visit(node.inner))
        if isinstance(node, Join):
            inner = visit(node.inner)
            if idx == position:
                flipped[0] = True
                return Join(rel=node.rel, inner=inner, reversed=node.reversed, neg=not node.neg)
            return Join(rel=node.rel, inner=inner, reversed=node.reversed, neg=node.neg)
        if isinstance(node, And):
            return And(left=visit(node.left), right=visit(node.right))
        if isinstance(node, Arg):
            return Arg(mode=node.mode, inner=visit(node.inner), rel=node.rel)
        return node

    out = visit(expr)
    if not flipped[0]:
        raise NestTransformError(f"no JOIN at node position {position}")
    return out


def _placeholder_question(source: DatasetExample, relation: str) -> str:
    return f"{source.question} [negated constraint: no '{relation}' link]"


def rewording_prompt(source: DatasetExample, nest: "NestExample") -> str:
    """Prompt text for optionally polishing the placeholder question."""
    return (
        "Rewrite the question below so that it naturally expresses that the "
        "answer must NOT be connected through the flipped relation, keeping "
        "every other constraint unchanged. Answer with the question only.\n"
        f"Original question: {source.question}\n"
        f"Original logical form: {source.pylf}\n"
        f"Negated logical form: {print_pylf(nest.pylf)}\n"
    )


def nest_transform(example: DatasetExample, kg: KnowledgeGraph) -> List[NestExample]:
    """Produce one variant per positive JOIN, keeping only non-empty answers.

    Precondition: the gold form has at least two constraints and at least one
    positive JOIN.  Variants whose flipped form is invalid or executes empty
    are dropped; an all-dropped outcome returns an empty list.
    """
    if not example.pylf:
        raise NestTransformError(f"example {example.qid!r} has no gold pylf")
    expr = resolve_exact(parse_pylf(example.pylf), kg)
    profile = profile_constraints(expr)
    if profile.total < 2:
        raise NestTransformError(
            f"example {example.qid!r} has {profile.total} constraints; need at least 2"
        )
    joins = _joins_by_position(expr)
    if not joins:
        raise NestTransformError(f"example {example.qid!r} has no JOIN to flip")
    flippable = [p for p, node in sorted(joins.items()) if not node.neg]
    if not flippable:
        # Every join is already negative: nothing to flip, nothing emitted.
        return []

    out = []
    for position in flippable:
        variant = flip_join(expr, position)
        if validate(variant, kg):
            continue
        try:
            answers = evaluate(variant, kg)
        except EvalError:
            continue
        if is_empty_answer(answers):
            continue
        out.append(
            NestExample(
                source_qid=example.qid,
                question=_placeholder_question(example, joins[position].rel.name),
                pylf=variant,
                answers=answers,
                flipped_path=position,
            )
        )
    return out
