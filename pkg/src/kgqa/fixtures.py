"""Access to the data files shipped with the package.

Two small graphs: ``rockets`` (four entities, used throughout the docs and
tests) and ``spaceflight`` (twelve entities and relations, sized for the
matching demos), plus the fixed refinement demonstration set.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import List, Tuple

from .kg import KnowledgeGraph, load_kg
from .prompts import RefineDemo


def data_dir() -> Path:
    return Path(str(resources.files(__package__).joinpath("data")))


def fixture_paths(name: str) -> Tuple[Path, Path, Path]:
    base = data_dir() / name
    return base / "entities.tsv", base / "triples.tsv", base / "schema.tsv"


def load_rockets() -> KnowledgeGraph:
    return load_kg(*fixture_paths("rockets"))


def load_spaceflight() -> KnowledgeGraph:
    return load_kg(*fixture_paths("spaceflight"))


def default_refine_demos() -> List[RefineDemo]:
    with open(data_dir() / "refine_demos.json", encoding="utf-8") as fh:
        rows = json.load(fh)
    return [
        RefineDemo(
            category=row["category"],
            question=row["question"],
            draft=row["draft"],
            refined=row["refined"],
        )
        for row in rows
    ]
