"""Negative-constrained knowledge-graph question answering toolkit."""

from .dataset import DatasetExample, decode_answers, encode_answers, load_dataset, save_dataset
from .drafts import ConstraintElement, CritiqueCategory, Draft, DraftFailure, parse_draft
from .embedding import HttpEmbedder, SimilarityIndex, TrigramHashEmbedder
from .errors import ConfigError, DataError, KgqaError, TransportError
from .evalkit import (
    EvalReport,
    NestExample,
    NestTransformError,
    evaluate_dataset,
    exact_match,
    f1,
    flip_join,
    nest_transform,
)
from .executor import (
    AnswerSet,
    Entities,
    EvalError,
    Literals,
    Number,
    brute_force_evaluate,
    evaluate,
    is_empty_answer,
)
from .kg import (
    AttributeValue,
    EntityRecord,
    KGLoadError,
    KnowledgeGraph,
    SchemaTriple,
    Triple,
    load_kg,
)
from .matcher import (
    EntityCandidate,
    GroundedLogicalForm,
    MatchError,
    MatcherConfig,
    brute_force_ground,
    build_index,
    candidate_entities,
    ground,
)
from .pipeline import PipelineConfig, Prediction, answer_question, majority_vote, select_demonstrations
from .prompts import RefineDemo, build_draft_prompt, build_refine_prompt
from .providers import HttpChatProvider, RecordingProvider, ReplayProvider
from .pylf import (
    And,
    Arg,
    Cmp,
    ConstraintProfile,
    Count,
    EntityRef,
    Expr,
    Join,
    Mention,
    PylfParseError,
    RelationRef,
    Start,
    Stop,
    infer_type,
    parse_pylf,
    print_pylf,
    profile_constraints,
    resolve_exact,
    validate,
)
from .sparql import SparqlQuery, compile_query, execute_remote, export_ntriples

__version__ = "0.1.0"
