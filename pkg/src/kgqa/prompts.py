"""Prompt assembly for draft generation and refinement.

Both builders are pure string concatenation: fixed inputs always yield
byte-identical prompts, which the replay provider and trace determinism
depend on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

from .dataset import DatasetExample
from .drafts import ConstraintElement, Draft, DraftFailure
from .kg import AttributeValue
from .pylf import And, Arg, Cmp, Count, Expr, Join, Mention, Start, Stop, parse_pylf

PYLF_SIGNATURES = """\
Available functions:
  START(x)                       begin a chain at an entity mention or a literal x
  JOIN(rel, expr, neg=False)     entities with an edge via rel to a result of expr;
                                 prefix rel with R_ to read the edge from head to tail;
                                 neg=True keeps entities that have no such edge
  AND(a, b)                      intersection of two results
  COUNT(expr)                    the number of results; only directly inside STOP
  ARG('ARGMIN'|'ARGMAX', expr, rel)  results of expr with the smallest or largest value via rel
  CMP(op, rel, n)                entities whose value via rel satisfies op n; op is one of < <= > >=
  STOP(expr)                     wraps the final expression"""

DRAFT_INSTRUCTION = """\
Translate the question into a logical form. First list every constraint element
you can identify under a `# question_info` header, one line per element:
- <mention> | <entity|literal> | <positive|negative|calculation> | <short note>
Then write the logical form under an `# expression` header using only the
functions documented below, wrapping the final expression in STOP()."""

REFINE_INSTRUCTION = """\
A draft answer to the question below was rejected: it failed to parse or its
query executed to an empty result. Identify the critique category that best
explains the failure (no_question_info, wrong_question_info, wrong_expression,
or wrong_format), then write a corrected draft with both a `# question_info`
and an `# expression` block."""


@dataclass(frozen=True)
class RefineDemo:
    category: str
    question: str
    draft: str
    refined: str


def question_info_from_expr(expr: Expr) -> List[ConstraintElement]:
    """Derive constraint elements from a gold logical form, for demo rendering."""
    rows: List[ConstraintElement] = []

    def visit(node: Expr, negated: bool) -> None:
        if isinstance(node, (Stop, Count)):
            if isinstance(node, Count):
                rows.append(
                    ConstraintElement("count", "literal", "calculation", "count the results")
                )
            visit(node.inner, negated)
        elif isinstance(node, Start):
            leaf = node.leaf
            if isinstance(leaf, AttributeValue):
                rows.append(
                    ConstraintElement(leaf.lexical(), "literal", "calculation", "literal value")
                )
            else:
                surface = leaf.surface if isinstance(leaf, Mention) else leaf.id
                polarity = "negative" if negated else "positive"
                rows.append(ConstraintElement(surface, "entity", polarity, "topic entity"))
        elif isinstance(node, Join):
            visit(node.inner, negated or node.neg)
        elif isinstance(node, And):
            visit(node.left, negated)
            visit(node.right, negated)
        elif isinstance(node, Arg):
            rows.append(
                ConstraintElement(node.rel.name, "literal", "calculation", f"{node.mode} over values")
            )
            visit(node.inner, negated)
        elif isinstance(node, Cmp):
            rows.append(
                ConstraintElement(
                    node.bound.lexical(), "literal", "calculation", f"{node.op} bound via {node.rel.name}"
                )
            )

    visit(expr, False)
    return rows


def _render_rows(rows: Sequence[ConstraintElement]) -> str:
    return "\n".join(f"- {r.mention} | {r.kind} | {r.polarity} | {r.note}" for r in rows)


def _render_demo(example: DatasetExample, include_question_info: bool) -> str:
    parts = [f"Question: {example.question}"]
    if include_question_info and example.pylf:
        rows = question_info_from_expr(parse_pylf(example.pylf))
        parts.append("# question_info")
        parts.append(_render_rows(rows))
    parts.append("# expression")
    parts.append(example.pylf or "")
    return "\n".join(parts)


def build_draft_prompt(
    question: str,
    demos: Sequence[DatasetExample],
    signatures: str = PYLF_SIGNATURES,
    include_question_info: bool = True,
) -> str:
    """Instruction, function signatures, k demonstrations, target question."""
    blocks = [DRAFT_INSTRUCTION, signatures]
    blocks.extend(_render_demo(d, include_question_info) for d in demos)
    blocks.append(f"Question: {question}")
    return "\n\n".join(blocks) + "\n"


def _render_refine_demo(demo: RefineDemo) -> str:
    return (
        f"Question: {demo.question}\n"
        f"Critique: {demo.category}\n"
        f"Draft:\n{demo.draft}\n"
        f"Refined:\n{demo.refined}"
    )


def build_refine_prompt(
    question: str,
    draft_or_failure: Union[Draft, DraftFailure],
    demos: Sequence[RefineDemo],
    signatures: str = PYLF_SIGNATURES,
) -> str:
    """Refinement prompt carrying the critique and the original draft verbatim.

    When the draft failed to parse, its category is already known and only the
    matching demonstrations are included.  When the draft parsed but executed
    empty, the category is left open for the model and all demonstrations are
    included.
    """
    if isinstance(draft_or_failure, DraftFailure):
        category: Optional[str] = draft_or_failure.category.value
        selected = [d for d in demos if d.category == category] or list(demos)
    else:
        category = None
        selected = list(demos)

    blocks = [REFINE_INSTRUCTION, signatures]
    blocks.extend(_render_refine_demo(d) for d in selected)
    critique_line = category if category is not None else "(identify the category first)"
    blocks.append(
        f"Question: {question}\n"
        f"Critique: {critique_line}\n"
        f"Draft:\n{draft_or_failure.raw}\n"
        f"Refined:"
    )
    return "\n\n".join(blocks) + "\n"
