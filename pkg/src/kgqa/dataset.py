"""Dataset JSONL tooling and answer-set (de)serialization.

One JSON object per line: {"qid", "question", "pylf", "answers": [...],
"function_type", "num_constraints", "split"}.  Answer encoding: entity ids
are bare strings, typed literals use the TSV form '"lexical"^^tag', and a
count answer is a single JSON number.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import List, Optional

from .errors import DataError
from .executor import AnswerSet, Entities, Literals, Number
from .kg import AttributeValue

_TYPED_LITERAL_RE = re.compile(r'^"(?P<lex>.*)"\^\^(?P<tag>[a-z]+)$', re.S)


@dataclass
class DatasetExample:
    qid: str
    question: str
    pylf: Optional[str] = None
    answers: list = field(default_factory=list)
    function_type: Optional[str] = None
    num_constraints: Optional[int] = None
    split: Optional[str] = None

    def to_json(self) -> dict:
        out = {"qid": self.qid, "question": self.question, "answers": self.answers}
        for key in ("pylf", "function_type", "num_constraints", "split"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def load_dataset(path) -> List[DatasetExample]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except ValueError as exc:
                raise DataError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            if "qid" not in row or "question" not in row:
                raise DataError(f"{path}:{line_no}: missing qid or question")
            examples.append(
                DatasetExample(
                    qid=str(row["qid"]),
                    question=row["question"],
                    pylf=row.get("pylf"),
                    answers=row.get("answers", []),
                    function_type=row.get("function_type"),
                    num_constraints=row.get("num_constraints"),
                    split=row.get("split"),
                )
            )
    return examples


def save_dataset(examples, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.to_json(), sort_keys=True) + "\n")


def decode_answers(raw: list) -> AnswerSet:
    """Decode the JSON answers array into an AnswerSet."""
    if len(raw) == 1 and isinstance(raw[0], (int, float)) and not isinstance(raw[0], bool):
        return Number(value=int(raw[0]))
    literals = set()
    entity_ids = set()
    for item in raw:
        if not isinstance(item, str):
            raise DataError(f"unexpected answer element {item!r}")
        m = _TYPED_LITERAL_RE.match(item)
        if m:
            literals.add(AttributeValue.from_lexical(m.group("lex"), m.group("tag")))
        else:
            entity_ids.add(item)
    if literals and entity_ids:
        raise DataError("answers mix entity ids and literals")
    if literals:
        return Literals(values=frozenset(literals))
    return Entities(ids=frozenset(entity_ids))


def encode_answers(answers: AnswerSet) -> list:
    if isinstance(answers, Number):
        return [answers.value]
    if isinstance(answers, Literals):
        return sorted(f'"{v.lexical()}"^^{v.tag}' for v in answers.values)
    return sorted(answers.ids)


def answers_to_json(answers: AnswerSet) -> dict:
    """Trace-friendly form with an explicit kind marker."""
    if isinstance(answers, Number):
        return {"kind": "number", "value": answers.value}
    if isinstance(answers, Literals):
        return {"kind": "literals", "values": sorted(f'"{v.lexical()}"^^{v.tag}' for v in answers.values)}
    return {"kind": "entities", "ids": sorted(answers.ids)}
