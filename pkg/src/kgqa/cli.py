"""Command-line entry point.

Subcommands: answer, eval, match, compile, nest, export-rdf, index.
Configuration comes from a flat ``key = value`` file plus flag overrides;
named presets encode the per-dataset hyperparameter profiles.  Exit codes:
0 success, 2 configuration error, 3 transport error, 4 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import fixtures
from .dataset import (
    DatasetExample,
    answers_to_json,
    encode_answers,
    load_dataset,
    save_dataset,
)
from .embedding import HttpEmbedder, SimilarityIndex, TrigramHashEmbedder
from .errors import ConfigError, DataError, KgqaError, TransportError
from .evalkit import (
    NestTransformError,
    evaluate_dataset,
    flip_join,
    nest_transform,
    rewording_prompt,
)
from .executor import Entities, evaluate
from .kg import KnowledgeGraph, load_kg
from .matcher import MatcherConfig, brute_force_ground, build_index, ground
from .pipeline import PipelineConfig, answer_question
from .providers import HttpChatProvider, ReplayProvider
from .pylf import parse_pylf, print_pylf, profile_constraints, resolve_exact
from .sparql import compile_query, execute_remote, export_ntriples

log = logging.getLogger("kgqa")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRANSPORT = 3
EXIT_DATA = 4

# Per-dataset hyperparameter profiles.
PRESETS = {
    "grailqa": {"k": 40, "theta": 0.7},
    "nestkgqa": {"k": 40, "theta": 0.7},
    "webqsp": {"k": 100, "theta": 0.8},
    "graphq": {"k": 100, "theta": 0.8},
}


@dataclass
class RunConfig:
    kg_entities: Optional[str] = None
    kg_triples: Optional[str] = None
    kg_schema: Optional[str] = None
    fixture: Optional[str] = None
    dataset: Optional[str] = None
    trainset: Optional[str] = None
    index_cache: Optional[str] = None
    replay: Optional[str] = None
    llm_base_url: Optional[str] = None
    llm_model: Optional[str] = None
    endpoint: Optional[str] = None
    embedding_endpoint: Optional[str] = None
    embedding_dim: int = 512
    timeout: float = 30.0
    outdir: str = "out"
    seed: int = 0
    jobs: int = 1
    preset: Optional[str] = None
    k: int = 40
    theta: float = 0.7
    j: int = 10
    max_candidates: int = 200
    n_candidates: int = 1
    temperature: float = 0.9
    refinement: bool = True
    constraint_elements: bool = True
    ablate_matching: bool = False

    def matcher_config(self) -> MatcherConfig:
        return MatcherConfig(j=self.j, theta=self.theta, max_candidates=self.max_candidates)

    def pipeline_config(self) -> PipelineConfig:
        return PipelineConfig(
            k=self.k,
            n_candidates=self.n_candidates,
            temperature=self.temperature,
            matcher=self.matcher_config(),
            refinement_enabled=self.refinement,
            constraint_elements_enabled=self.constraint_elements,
            brute_force_matching=self.ablate_matching,
        )


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    for caster in (int, float):
        try:
            return caster(raw)
        except ValueError:
            pass
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "'\"":
        return raw[1:-1]
    return raw


def load_config_file(path) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
            key, _, raw = line.partition("=")
            values[key.strip()] = _parse_value(raw)
    return values


def build_run_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        file_values = load_config_file(args.config)
        for key, value in file_values.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    preset = getattr(args, "preset", None) or cfg.preset
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        cfg.preset = preset
        for key, value in PRESETS[preset].items():
            setattr(cfg, key, value)
    for key in (
        "kg_entities", "kg_triples", "kg_schema", "fixture", "dataset", "trainset",
        "index_cache", "replay", "llm_base_url", "llm_model", "endpoint", "outdir",
    ):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    for key in ("timeout", "seed", "jobs", "k", "theta", "j", "max_candidates",
                "n_candidates", "temperature"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "no_refine", False):
        cfg.refinement = False
    if getattr(args, "no_constraint_elements", False):
        cfg.constraint_elements = False
    if getattr(args, "ablate", None):
        if args.ablate != "brute-force-matching":
            raise ConfigError(f"unknown ablation {args.ablate!r}")
        cfg.ablate_matching = True
    return cfg


def _load_graph(cfg: RunConfig) -> KnowledgeGraph:
    if cfg.fixture:
        paths = fixtures.fixture_paths(cfg.fixture)
        return load_kg(*paths)
    for key in ("kg_entities", "kg_triples", "kg_schema"):
        path = getattr(cfg, key)
        if not path:
            raise ConfigError(f"missing {key} (or use fixture = rockets|spaceflight)")
        if not Path(path).exists():
            raise ConfigError(f"{key} file not found: {path}")
    return load_kg(cfg.kg_entities, cfg.kg_triples, cfg.kg_schema)


def _embedder(cfg: RunConfig):
    if cfg.embedding_endpoint:
        return HttpEmbedder(cfg.embedding_endpoint, dimension=cfg.embedding_dim,
                            timeout=cfg.timeout)
    return TrigramHashEmbedder(dimension=cfg.embedding_dim)


def _load_index(cfg: RunConfig, kg: KnowledgeGraph) -> SimilarityIndex:
    embedder = _embedder(cfg)
    if cfg.index_cache and Path(cfg.index_cache).exists():
        return SimilarityIndex.load(cfg.index_cache, embedder)
    index = build_index(kg, embedder)
    if cfg.index_cache:
        index.save(cfg.index_cache)
    return index


def _provider(cfg: RunConfig):
    if cfg.replay:
        if not Path(cfg.replay).exists():
            raise ConfigError(f"replay file not found: {cfg.replay}")
        return ReplayProvider.from_file(cfg.replay)
    if cfg.llm_base_url and cfg.llm_model:
        return HttpChatProvider(base_url=cfg.llm_base_url, model=cfg.llm_model)
    raise ConfigError("configure either replay or llm_base_url + llm_model")


def _load_trainset(cfg: RunConfig):
    if not cfg.trainset:
        raise ConfigError("missing trainset path")
    if not Path(cfg.trainset).exists():
        raise ConfigError(f"trainset file not found: {cfg.trainset}")
    return load_dataset(cfg.trainset)


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _answer_one(question, kg, index, trainset, provider, cfg: RunConfig):
    return answer_question(
        question, kg, index, trainset, provider, cfg.pipeline_config()
    )


def cmd_answer(args) -> int:
    cfg = build_run_config(args)
    kg = _load_graph(cfg)
    index = _load_index(cfg, kg)
    trainset = _load_trainset(cfg)
    provider = _provider(cfg)
    prediction = _answer_one(args.question, kg, index, trainset, provider, cfg)
    out = _outdir(cfg)
    trace_path = out / "trace.json"
    trace_path.write_text(json.dumps(prediction.trace, indent=2, sort_keys=True) + "\n")
    print(json.dumps(answers_to_json(prediction.answers), sort_keys=True))
    print(f"trace written to {trace_path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = build_run_config(args)
    kg = _load_graph(cfg)
    index = _load_index(cfg, kg)
    trainset = _load_trainset(cfg)
    provider = _provider(cfg)
    if not cfg.dataset or not Path(cfg.dataset).exists():
        raise ConfigError(f"dataset file not found: {cfg.dataset}")
    examples = load_dataset(cfg.dataset)
    out = _outdir(cfg)

    def run_one(example: DatasetExample):
        try:
            pred = _answer_one(example.question, kg, index, trainset, provider, cfg)
            return example.qid, pred.answers, pred.trace
        except TransportError:
            raise
        except KgqaError as exc:
            log.warning("example %s failed: %s", example.qid, exc)
            return example.qid, Entities(ids=frozenset()), {"error": str(exc)}

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run_one, examples))
    else:
        results = [run_one(ex) for ex in examples]

    predictions_path = out / "predictions.jsonl"
    with open(predictions_path, "w", encoding="utf-8") as fh:
        for qid, answers, trace in results:
            fh.write(json.dumps(
                {"qid": qid, "answers": encode_answers(answers), "trace": trace},
                sort_keys=True,
            ) + "\n")
    report = evaluate_dataset([(qid, answers) for qid, answers, _ in results], examples)
    (out / "report.json").write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    (out / "report.txt").write_text(report.to_text() + "\n")
    print(report.to_text())
    return EXIT_OK


def cmd_match(args) -> int:
    cfg = build_run_config(args)
    kg = _load_graph(cfg)
    index = _load_index(cfg, kg)
    draft = parse_pylf(args.draft)
    if cfg.ablate_matching:
        candidates = brute_force_ground(draft, index, ke=cfg.j, kr=cfg.j)
    else:
        candidates = ground(draft, kg, index, cfg.matcher_config())
    print(f"{len(candidates)} candidates")
    for cand in candidates[: args.limit]:
        print(f"  {cand.score:.4f}  {print_pylf(cand.expr)}")
    return EXIT_OK


def cmd_compile(args) -> int:
    cfg = build_run_config(args)
    kg = _load_graph(cfg)
    expr = resolve_exact(parse_pylf(args.pylf), kg)
    query = compile_query(expr, kg)
    print(query.text)
    if args.execute:
        if not cfg.endpoint:
            raise ConfigError("no endpoint configured")
        answers = execute_remote(query, cfg.endpoint, timeout=cfg.timeout)
        print(json.dumps(answers_to_json(answers), sort_keys=True))
    return EXIT_OK


def cmd_nest(args) -> int:
    cfg = build_run_config(args)
    kg = _load_graph(cfg)
    if not cfg.dataset or not Path(cfg.dataset).exists():
        raise ConfigError(f"dataset file not found: {cfg.dataset}")
    source = load_dataset(cfg.dataset)
    out = _outdir(cfg)
    kept: list = []
    prompts: list = []
    skipped = 0
    for example in source:
        try:
            variants = nest_transform(example, kg)
        except (NestTransformError, DataError, KgqaError) as exc:
            log.warning("skipping %s: %s", example.qid, exc)
            skipped += 1
            continue
        for variant in variants:
            profile = profile_constraints(variant.pylf)
            kept.append(DatasetExample(
                qid=f"{variant.source_qid}.neg{variant.flipped_path}",
                question=variant.question,
                pylf=print_pylf(variant.pylf),
                answers=encode_answers(variant.answers),
                function_type=profile.function_type,
                num_constraints=profile.total,
                split=example.split,
            ))
            prompts.append({
                "qid": f"{variant.source_qid}.neg{variant.flipped_path}",
                "prompt": rewording_prompt(example, variant),
            })
    if args.roundtrip:
        failures = 0
        for example in source:
            try:
                variants = nest_transform(example, kg)
            except KgqaError:
                continue
            original = resolve_exact(parse_pylf(example.pylf), kg)
            for variant in variants:
                if flip_join(variant.pylf, variant.flipped_path) != original:
                    failures += 1
        print(f"roundtrip failures: {failures}")
        if failures:
            return EXIT_DATA
    nest_path = out / Path(args.out).name if args.out else out / "nest.jsonl"
    save_dataset(kept, nest_path)
    with open(out / "rewording_prompts.jsonl", "w", encoding="utf-8") as fh:
        for row in prompts:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    if not kept:
        log.warning("no multi-constraint examples produced any variant")
    print(f"sources: {len(source)}  skipped: {skipped}  variants kept: {len(kept)}")
    print(f"wrote {nest_path} and {out / 'rewording_prompts.jsonl'}")
    return EXIT_OK


def cmd_export_rdf(args) -> int:
    cfg = build_run_config(args)
    kg = _load_graph(cfg)
    text = export_ntriples(kg)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_index(args) -> int:
    cfg = build_run_config(args)
    kg = _load_graph(cfg)
    if not cfg.index_cache:
        raise ConfigError("missing index_cache path")
    index = build_index(kg, _embedder(cfg))
    index.save(cfg.index_cache)
    print(f"indexed {index.n_entities} entities, {index.n_relations} relations -> {cfg.index_cache}")
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="hyperparameter profile")
    parser.add_argument("--fixture", help="packaged fixture name (rockets, spaceflight)")
    parser.add_argument("--kg-entities", dest="kg_entities")
    parser.add_argument("--kg-triples", dest="kg_triples")
    parser.add_argument("--kg-schema", dest="kg_schema")
    parser.add_argument("--dataset")
    parser.add_argument("--trainset")
    parser.add_argument("--index-cache", dest="index_cache")
    parser.add_argument("--replay")
    parser.add_argument("--llm-base-url", dest="llm_base_url")
    parser.add_argument("--llm-model", dest="llm_model")
    parser.add_argument("--endpoint")
    parser.add_argument("--outdir")
    parser.add_argument("--timeout", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--j", type=int)
    parser.add_argument("--max-candidates", dest="max_candidates", type=int)
    parser.add_argument("--n-candidates", dest="n_candidates", type=int)
    parser.add_argument("--temperature", type=float)
    parser.add_argument("--no-refine", dest="no_refine", action="store_true")
    parser.add_argument("--no-constraint-elements", dest="no_constraint_elements",
                        action="store_true")
    parser.add_argument("--ablate", choices=["brute-force-matching"])


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgqa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("answer", help="answer a single question")
    _add_common(p)
    p.add_argument("question")
    p.set_defaults(func=cmd_answer)

    p = sub.add_parser("eval", help="run the pipeline over a dataset and score it")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("match", help="inspect grounding candidates for a draft")
    _add_common(p)
    p.add_argument("draft", help="PyLF draft text")
    p.add_argument("--limit", type=int, default=20)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("compile", help="compile a grounded PyLF form to SPARQL")
    _add_common(p)
    p.add_argument("pylf")
    p.add_argument("--execute", action="store_true", help="also run it on the endpoint")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("nest", help="derive negative-constrained examples from a dataset")
    _add_common(p)
    p.add_argument("--out", help="output file name inside outdir")
    p.add_argument("--roundtrip", action="store_true",
                   help="check that re-flipping reproduces the sources")
    p.set_defaults(func=cmd_nest)

    p = sub.add_parser("export-rdf", help="export the KG as N-Triples")
    _add_common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_rdf)

    p = sub.add_parser("index", help="build and persist the similarity index")
    _add_common(p)
    p.set_defaults(func=cmd_index)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except TransportError as exc:
        log.error("transport error: %s", exc)
        return EXIT_TRANSPORT
    except (DataError, KgqaError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
