"""Pipeline driver: annotate -> curate -> embed -> train -> eval -> predict -> report.

Every stage writes its outputs atomically (temp file + rename) so a rerun
with unchanged inputs reproduces byte-identical artifacts.

Exit codes: 0 success, 1 internal failure, 2 missing input, 3 validation
failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import re
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

from . import aggregation, curation, embeddings, evaluation
from .annotate import annotate as annotate_text
from .annotate import compile_rules, read_rules
from .classifiers import load_model, predict_score, save_model, topic_seed
from .config import PipelineConfig
from .corpus import Corpus, Document, TopicId, read_corpus, write_corpus
from .errors import PolitopicsError
from .evaluation import MetricsSummary

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_MISSING_INPUT = 2
EXIT_VALIDATION = 3

STAGES = ("annotate", "curate", "embed", "train", "eval", "predict", "report")


@contextlib.contextmanager
def atomic_write(path):
    """Write to a sibling temp file, then rename over the target."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _write_text_atomic(path, text):
    with atomic_write(path) as fh:
        fh.write(text)


def _require(path, what):
    if not path:
        raise ValueError(f"no path configured for {what}")
    if not os.path.exists(path):
        raise FileNotFoundError(f"{what} not found: {path}")
    return path


def _model_filename(topic: TopicId) -> str:
    slug = re.sub(r"[^0-9A-Za-z]+", "-", topic.name).strip("-").lower()
    return f"{slug}_{topic.perspective}.model"


def _parse_topics(spec: str | None, corpus: Corpus):
    if not spec or spec == "all":
        return sorted(corpus.topic_index)
    return [TopicId.parse(token.strip()) for token in spec.split(",")]


# ---------------------------------------------------------------- stages


def stage_annotate(rules_path, in_path, out_path):
    rules = read_rules(_require(rules_path, "rules file"))
    matcher = compile_rules(rules)
    corpus = read_corpus(_require(in_path, "input corpus"))
    labeled = [
        Document(
            doc.id,
            doc.text,
            doc.session,
            doc.labels | annotate_text(doc.text, matcher),
            dict(doc.extra),
        )
        for doc in corpus
    ]
    out = Corpus(labeled)
    tmp = out_path + ".stage"
    write_corpus(out, tmp)
    os.replace(tmp, out_path)
    return out


def stage_curate(cfg: curation.CurationConfig, in_path, out_path, report_path):
    corpus = read_corpus(_require(in_path, "input corpus"))
    curated, report = curation.curate(corpus, cfg)
    tmp_out = out_path + ".stage"
    write_corpus(curated, tmp_out)
    os.replace(tmp_out, out_path)
    if report_path:
        with atomic_write(report_path) as fh:
            for rule in curation.RULE_ORDER:
                if rule in report.drops:
                    fh.write(
                        json.dumps({"rule": rule, "dropped": report.drops[rule]}) + "\n"
                    )
            fh.write(
                json.dumps(
                    {
                        "summary": True,
                        "input": report.input_count,
                        "kept": report.kept_count,
                        "topics_after": {
                            str(t): n for t, n in sorted(report.topics_after.items())
                        },
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    return report


def stage_embed(provider, in_path, out_path, dim, seed):
    if provider == "hashed":
        corpus = read_corpus(_require(in_path, "input corpus"))
        store = embeddings.embed_corpus(corpus, dim=dim, seed=seed)
    elif provider == "file":
        store = embeddings.load_store(_require(in_path, "embedding file"))
    else:
        raise ValueError(f"unknown embedding provider {provider!r}")
    tmp = out_path + ".stage"
    embeddings.write_store(store, tmp)
    os.replace(tmp, out_path)
    return store


def _train_one(corpus, store, topic, head, base_seed):
    doc_ids = [doc.id for doc in corpus]
    X = store.matrix(doc_ids)
    y = [1.0 if topic in corpus[d].labels else -1.0 for d in doc_ids]
    data = evaluation.LabeledSet(X, y, topic)
    return evaluation.train_head(head, data, topic_seed(base_seed, topic), None)


def stage_train(corpus_path, embeddings_path, models_dir, head_for, topics_spec, base_seed, jobs=1):
    corpus = read_corpus(_require(corpus_path, "corpus"))
    store = embeddings.load_store(_require(embeddings_path, "embeddings"))
    topics = _parse_topics(topics_spec, corpus)
    os.makedirs(models_dir, exist_ok=True)

    def job(topic):
        return topic, _train_one(corpus, store, topic, head_for(topic), base_seed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(job, topics))
    else:
        results = dict(job(t) for t in topics)

    index = []
    for topic in topics:  # deterministic order regardless of completion order
        filename = _model_filename(topic)
        path = os.path.join(models_dir, filename)
        tmp = path + ".stage"
        save_model(results[topic], tmp)
        os.replace(tmp, path)
        index.append({"topic": str(topic), "file": filename, "head": head_for(topic)})
    with atomic_write(os.path.join(models_dir, "models.index")) as fh:
        for entry in index:
            fh.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")
    return topics


def stage_eval(
    corpus_path,
    embeddings_path,
    topics_spec,
    head_for,
    k,
    base_seed,
    out_table,
    out_summary=None,
    jobs=1,
):
    corpus = read_corpus(_require(corpus_path, "corpus"))
    store = embeddings.load_store(_require(embeddings_path, "embeddings"))
    topics = _parse_topics(topics_spec, corpus)

    def job(topic):
        folds = evaluation.make_folds(corpus, topic, k=k, seed=topic_seed(base_seed, topic))
        return topic, evaluation.evaluate_topic(
            corpus, topic, store, folds, head=head_for(topic), base_seed=base_seed
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            summaries = dict(pool.map(job, topics))
    else:
        summaries = dict(job(t) for t in topics)

    _write_text_atomic(out_table, evaluation.render_table(summaries))
    if out_summary:
        with atomic_write(out_summary) as fh:
            for topic in sorted(summaries):
                s = summaries[topic]
                for fold, (tpr, tnr) in enumerate(zip(s.fold_tpr, s.fold_tnr)):
                    fh.write(
                        json.dumps(
                            {"topic": str(topic), "fold": fold, "tpr": tpr, "tnr": tnr},
                            sort_keys=True,
                        )
                        + "\n"
                    )
    return summaries


def stage_predict(models_dir, embeddings_path, policy_text, out_path):
    index_path = _require(os.path.join(models_dir, "models.index"), "model index")
    store = embeddings.load_store(_require(embeddings_path, "embeddings"))
    policy = aggregation.AggregationPolicy.parse(policy_text)
    models = {}
    with open(index_path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                entry = json.loads(line)
                models[TopicId.parse(entry["topic"])] = load_model(
                    os.path.join(models_dir, entry["file"])
                )
    with atomic_write(out_path) as fh:
        for doc_id, vector in store.vectors.items():
            scores = aggregation.TopicScoreSet(
                doc_id,
                {topic: predict_score(model, vector) for topic, model in models.items()},
            )
            result = aggregation.aggregate(scores, policy)
            fh.write(
                json.dumps(
                    {
                        "id": doc_id,
                        "topics": [
                            {"topic": str(t), "score": s} for t, s in result.topics
                        ],
                        **({"truncated": True} if result.truncated else {}),
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )


def stage_report(summary_path, out_table):
    by_topic: dict[TopicId, MetricsSummary] = {}
    with open(_require(summary_path, "eval summary"), encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            topic = TopicId.parse(record["topic"])
            summary = by_topic.setdefault(topic, MetricsSummary(topic=topic))
            summary.fold_tpr.append(float(record["tpr"]))
            summary.fold_tnr.append(float(record["tnr"]))
    _write_text_atomic(out_table, evaluation.render_table(by_topic))
    return by_topic


def run_stage(stage: str, config: PipelineConfig) -> int:
    """Run one named stage off a pipeline config; returns an exit code."""
    paths = config.paths
    try:
        if stage == "annotate":
            stage_annotate(
                paths.get("rules"), paths.get("corpus"), paths.get("annotated", "annotated.jsonl")
            )
        elif stage == "curate":
            stage_curate(
                config.curation,
                paths.get("annotated", paths.get("corpus")),
                paths.get("curated", "curated.jsonl"),
                paths.get("reports"),
            )
        elif stage == "embed":
            stage_embed(
                config.embed_provider,
                paths.get("curated", paths.get("corpus")),
                paths.get("embeddings"),
                config.embed_dim,
                config.base_seed,
            )
        elif stage == "train":
            stage_train(
                paths.get("curated", paths.get("corpus")),
                paths.get("embeddings"),
                paths.get("models"),
                config.head_for,
                None,
                config.base_seed,
                config.jobs,
            )
        elif stage == "eval":
            stage_eval(
                paths.get("curated", paths.get("corpus")),
                paths.get("embeddings"),
                None,
                config.head_for,
                config.k,
                config.base_seed,
                paths.get("table", "eval_table.txt"),
                paths.get("summary"),
                config.jobs,
            )
        elif stage == "predict":
            stage_predict(
                paths.get("models"),
                paths.get("embeddings"),
                config.aggregation_policy,
                paths.get("predictions", "predictions.jsonl"),
            )
        elif stage == "report":
            stage_report(paths.get("summary"), paths.get("table", "eval_table.txt"))
        else:
            print(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}", file=sys.stderr)
            return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (PolitopicsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


# ---------------------------------------------------------------- argparse


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="politopics",
        description="Topic classification pipeline for parliamentary initiative texts.",
    )
    parser.add_argument("--config", help="flat key=value pipeline config file")
    parser.add_argument("--seed", type=int, help="override the base seed")
    parser.add_argument("--jobs", type=int, help="parallel per-topic jobs")
    sub = parser.add_subparsers(dest="stage")

    p = sub.add_parser("annotate", help="label a corpus from a keyword rule file")
    p.add_argument("--rules", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("curate", help="clean and filter a labeled corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")

    p = sub.add_parser("embed", help="compute or import embeddings")
    p.add_argument("--provider", choices=("hashed", "file"), default="hashed")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=768)

    p = sub.add_parser("train", help="train one detector per topic")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--topics", default="all")
    p.add_argument("--head", choices=evaluation.HEADS, default="svm")

    p = sub.add_parser("eval", help="k-fold one-vs-all evaluation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--topics", default="all")
    p.add_argument("--head", choices=evaluation.HEADS, default="svm")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out", required=True)
    p.add_argument("--summary")

    p = sub.add_parser("predict", help="score documents and aggregate topics")
    p.add_argument("--models", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--policy", default="threshold:0.5")
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="render a table from an eval summary")
    p.add_argument("--summary", required=True)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; map to the validation code
        return EXIT_VALIDATION if exc.code else EXIT_OK
    if not args.stage:
        parser.print_usage(sys.stderr)
        return EXIT_VALIDATION

    config = (
        PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    )
    if args.seed is not None:
        config.base_seed = args.seed
    if args.jobs is not None:
        config.jobs = args.jobs

    try:
        if args.stage == "annotate":
            stage_annotate(args.rules, args.infile, args.out)
        elif args.stage == "curate":
            stage_curate(config.curation, args.infile, args.out, args.report)
        elif args.stage == "embed":
            stage_embed(args.provider, args.infile, args.out, args.dim, config.base_seed)
        elif args.stage == "train":
            stage_train(
                args.corpus,
                args.embeddings,
                args.models,
                lambda t: config.head_overrides.get(str(t), args.head),
                args.topics,
                config.base_seed,
                config.jobs,
            )
        elif args.stage == "eval":
            stage_eval(
                args.corpus,
                args.embeddings,
                args.topics,
                lambda t: config.head_overrides.get(str(t), args.head),
                args.k,
                config.base_seed,
                args.out,
                args.summary,
                config.jobs,
            )
        elif args.stage == "predict":
            stage_predict(args.models, args.embeddings, args.policy, args.out)
        elif args.stage == "report":
            stage_report(args.summary, args.out)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (PolitopicsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
