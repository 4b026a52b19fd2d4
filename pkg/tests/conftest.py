from __future__ import annotations

import pytest

from kgqa.dataset import DatasetExample
from kgqa.embedding import TrigramHashEmbedder
from kgqa.fixtures import load_rockets, load_spaceflight
from kgqa.matcher import build_index
from kgqa.providers import CompletionProvider


@pytest.fixture(scope="session")
def rockets():
    return load_rockets()


@pytest.fixture(scope="session")
def spaceflight():
    return load_spaceflight()


@pytest.fixture(scope="session")
def embedder():
    return TrigramHashEmbedder()


@pytest.fixture(scope="session")
def rockets_index(rockets, embedder):
    return build_index(rockets, embedder)


@pytest.fixture(scope="session")
def spaceflight_index(spaceflight, embedder):
    return build_index(spaceflight, embedder)


@pytest.fixture()
def rockets_trainset():
    return [
        DatasetExample(
            qid="t1",
            question="Which rockets are produced by Boeing Company?",
            pylf="STOP(JOIN('R_producing', START('BoeingCompany')))",
            answers=["Saturn"],
        ),
        DatasetExample(
            qid="t2",
            question="Which company produces Delta?",
            pylf="STOP(JOIN('producing', START('Delta')))",
            answers=["LockheedMartin"],
        ),
        DatasetExample(
            qid="t3",
            question="How many rockets does Lockheed Martin produce?",
            pylf="STOP(COUNT(JOIN('R_producing', START('LockheedMartin'))))",
            answers=[1],
        ),
        DatasetExample(
            qid="t4",
            question="Which rockets have a mass below 2000?",
            pylf="STOP(CMP('<', 'mass', 2000))",
            answers=["Delta"],
        ),
        DatasetExample(
            qid="t5",
            question="Which rocket produced by Boeing Company has the largest mass?",
            pylf="STOP(ARG('ARGMAX', JOIN('R_producing', START('BoeingCompany')), 'mass'))",
            answers=["Saturn"],
        ),
    ]


Q2_QUESTION = "Which rockets are not produced by Boeing Company and have a mass less than 2.32e+03?"

Q2_GOOD_COMPLETION = """\
# question_info
- Boeing Company | entity | negative | must not be the producer
- 2.32e+03 | literal | calculation | mass upper bound
# expression
STOP(AND(JOIN('R_producing', START('Boeing Company'), neg=True), CMP('<', 'mass', 2.32e+03)))"""

Q2_BAD_COMPLETION = """\
# question_info
- Boeing Company | entity | negative | must not be the producer
- 2.32e+03 | literal | calculation | mass upper bound
# expression
STOP(JOINN('producing', START('Boeing Company')))"""


@pytest.fixture()
def q2_question():
    return Q2_QUESTION


@pytest.fixture()
def q2_good_completion():
    return Q2_GOOD_COMPLETION


@pytest.fixture()
def q2_bad_completion():
    return Q2_BAD_COMPLETION


class SequenceProvider(CompletionProvider):
    """Test provider that serves queued completions in order."""

    def __init__(self, queue):
        self.queue = list(queue)
        self.calls = 0

    def complete(self, prompt, temperature, n):
        self.calls += 1
        if len(self.queue) < n:
            raise AssertionError("SequenceProvider ran out of completions")
        return [self.queue.pop(0) for _ in range(n)]


@pytest.fixture()
def sequence_provider():
    return SequenceProvider
