"""Parsing of model completions into structured drafts.

Wire format expected from a completion, anywhere in its text:

    # question_info
    - <mention> | <entity|literal> | <positive|negative|calculation> | <note>
    ...
    # expression
    <PyLF, nested-call or variable-assignment style>

Parse failures are data, not exceptions, and carry one of four critique
categories used to steer refinement:

    no_question_info     expression found, question_info block missing
    wrong_question_info  block present but rows malformed or empty
    wrong_expression     expression does not parse as PyLF
    wrong_format         neither block locatable
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import List, Union

from .pylf import Expr, PylfParseError, parse_pylf


class CritiqueCategory(enum.Enum):
    NO_QUESTION_INFO = "no_question_info"
    WRONG_QUESTION_INFO = "wrong_question_info"
    WRONG_EXPRESSION = "wrong_expression"
    WRONG_FORMAT = "wrong_format"


KINDS = ("entity", "literal")
POLARITIES = ("positive", "negative", "calculation")


@dataclass(frozen=True)
class ConstraintElement:
    mention: str
    kind: str
    polarity: str
    note: str = ""


@dataclass
class Draft:
    question_info: List[ConstraintElement]
    expr: Expr
    raw: str


@dataclass
class DraftFailure:
    category: CritiqueCategory
    detail: str
    raw: str


_QINFO_HEADER = re.compile(r"^[ \t]*#+[ \t]*question_info[ \t]*$", re.I | re.M)
_EXPR_HEADER = re.compile(r"^[ \t]*#+[ \t]*expression[ \t]*$", re.I | re.M)


def _parse_rows(block: str):
    rows = []
    for line in block.splitlines():
        line = line.strip()
        if not line:
            continue
        if not line.startswith("-"):
            return None, f"question_info line does not start with '-': {line!r}"
        parts = [p.strip() for p in line[1:].split("|", 3)]
        if len(parts) < 3:
            return None, f"question_info line has fewer than 3 fields: {line!r}"
        mention, kind, polarity = parts[0], parts[1].lower(), parts[2].lower()
        note = parts[3] if len(parts) == 4 else ""
        if not mention:
            return None, f"empty mention in question_info line: {line!r}"
        if kind not in KINDS:
            return None, f"bad kind {kind!r} (expected entity or literal)"
        if polarity not in POLARITIES:
            return None, f"bad polarity {polarity!r} (expected positive, negative, or calculation)"
        rows.append(ConstraintElement(mention=mention, kind=kind, polarity=polarity, note=note))
    if not rows:
        return None, "question_info block is empty"
    return rows, ""


def parse_draft(completion: str) -> Union[Draft, DraftFailure]:
    """Extract the question_info and expression blocks from a completion."""
    qinfo_match = _QINFO_HEADER.search(completion)
    expr_match = _EXPR_HEADER.search(completion)

    if qinfo_match is None and expr_match is None:
        return DraftFailure(
            category=CritiqueCategory.WRONG_FORMAT,
            detail="neither a question_info nor an expression block was found",
            raw=completion,
        )
    if qinfo_match is None:
        return DraftFailure(
            category=CritiqueCategory.NO_QUESTION_INFO,
            detail="missing question_info block",
            raw=completion,
        )
    if expr_match is None:
        return DraftFailure(
            category=CritiqueCategory.WRONG_FORMAT,
            detail="missing expression block",
            raw=completion,
        )

    qinfo_block = completion[qinfo_match.end() : expr_match.start()]
    rows, problem = _parse_rows(qinfo_block)
    if rows is None:
        return DraftFailure(
            category=CritiqueCategory.WRONG_QUESTION_INFO,
            detail=problem,
            raw=completion,
        )

    expr_block = completion[expr_match.end() :].strip()
    try:
        expr = parse_pylf(expr_block)
    except PylfParseError as exc:
        return DraftFailure(
            category=CritiqueCategory.WRONG_EXPRESSION,
            detail=str(exc),
            raw=completion,
        )
    return Draft(question_info=rows, expr=expr, raw=completion)
