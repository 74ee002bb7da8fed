import json
import os

import numpy as np
import pytest

from politopics import cli
from politopics.config import PipelineConfig, apply_env_overrides, parse_kv_file
from politopics.corpus import read_corpus

FILLER = (
    "de la actividad parlamentaria registrada durante la sesión semanal "
    "con las medidas propuestas por el gobierno para el periodo actual"
)


def make_text(keyword=None, variant=0):
    head = f"Texto número {variant} sobre la iniciativa"
    if keyword:
        head += f" de {keyword}"
    return f"{head} {FILLER}"


def write_pipeline_inputs(tmp_path, n_docs=40, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    rules_path = tmp_path / "rules.jsonl"
    rules_path.write_text(
        json.dumps({"name": "Vacuna", "perspective": 1, "patterns": ["vacuna"]})
        + "\n"
        + json.dumps({"name": "Turismo", "perspective": 1, "patterns": ["turismo"]})
        + "\n",
        encoding="utf-8",
    )
    corpus_path = tmp_path / "raw.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for i in range(n_docs):
            keyword = None
            roll = rng.random()
            if roll < 0.4:
                keyword = "vacuna"
            elif roll < 0.8:
                keyword = "turismo"
            record = {"id": f"d{i}", "text": make_text(keyword, i), "labels": []}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return rules_path, corpus_path


def run(args):
    return cli.main([str(a) for a in args])


def test_full_pipeline(tmp_path):
    rules, raw = write_pipeline_inputs(tmp_path)
    annotated = tmp_path / "annotated.jsonl"
    curated = tmp_path / "curated.jsonl"
    report = tmp_path / "report.jsonl"
    emb = tmp_path / "emb.txt"
    models = tmp_path / "models"
    table = tmp_path / "table.txt"
    summary = tmp_path / "summary.jsonl"
    preds = tmp_path / "preds.jsonl"

    assert run(["annotate", "--rules", rules, "--in", raw, "--out", annotated]) == 0
    assert run(["curate", "--in", annotated, "--out", curated, "--report", report]) == 0
    assert run(["embed", "--in", curated, "--out", emb, "--dim", 64]) == 0
    assert run(["train", "--corpus", curated, "--embeddings", emb, "--models", models]) == 0
    assert (
        run(
            [
                "eval",
                "--corpus", curated,
                "--embeddings", emb,
                "--k", 5,
                "--out", table,
                "--summary", summary,
            ]
        )
        == 0
    )
    assert run(["predict", "--models", models, "--embeddings", emb, "--out", preds]) == 0

    # curation report partitions the input
    records = [json.loads(line) for line in report.read_text().splitlines()]
    summary_rec = records[-1]
    dropped = sum(r["dropped"] for r in records[:-1])
    assert summary_rec["input"] == summary_rec["kept"] + dropped

    # predictions recover the planted keyword topics
    curated_corpus = read_corpus(curated)
    for line in preds.read_text().splitlines():
        record = json.loads(line)
        predicted = {t["topic"] for t in record["topics"]}
        actual = {str(t) for t in curated_corpus[record["id"]].labels}
        assert predicted == actual

    # report stage reproduces the eval table from the machine-readable summary
    table2 = tmp_path / "table2.txt"
    assert run(["report", "--summary", summary, "--out", table2]) == 0
    assert table.read_bytes() == table2.read_bytes()


def test_eval_deterministic_bytes(tmp_path):
    rules, raw = write_pipeline_inputs(tmp_path, n_docs=30, seed=4)
    annotated = tmp_path / "ann.jsonl"
    emb = tmp_path / "emb.txt"
    run(["annotate", "--rules", rules, "--in", raw, "--out", annotated])
    run(["embed", "--in", annotated, "--out", emb, "--dim", 32])
    tables = []
    for name in ("t1.txt", "t2.txt"):
        out = tmp_path / name
        assert (
            run(
                [
                    "--seed", 7,
                    "eval",
                    "--corpus", annotated,
                    "--embeddings", emb,
                    "--k", 5,
                    "--out", out,
                ]
            )
            == 0
        )
        tables.append(out.read_bytes())
    assert tables[0] == tables[1]


def test_missing_input_exit_code(tmp_path):
    out = tmp_path / "x.jsonl"
    code = run(["curate", "--in", tmp_path / "nope.jsonl", "--out", out])
    assert code == cli.EXIT_MISSING_INPUT


def test_validation_exit_code(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n")
    code = run(["curate", "--in", bad, "--out", tmp_path / "o.jsonl"])
    assert code == cli.EXIT_VALIDATION


def test_unknown_stage_via_run_stage(capsys):
    code = cli.run_stage("transmogrify", PipelineConfig())
    assert code == cli.EXIT_VALIDATION
    assert "transmogrify" in capsys.readouterr().err


def test_unknown_stage_via_argv():
    assert run(["transmogrify"]) == cli.EXIT_VALIDATION
    assert run([]) == cli.EXIT_VALIDATION


def test_run_stage_curate(tmp_path):
    rules, raw = write_pipeline_inputs(tmp_path, n_docs=10)
    annotated = tmp_path / "a.jsonl"
    run(["annotate", "--rules", rules, "--in", raw, "--out", annotated])
    config = PipelineConfig(
        paths={
            "annotated": str(annotated),
            "curated": str(tmp_path / "c.jsonl"),
            "reports": str(tmp_path / "r.jsonl"),
        }
    )
    assert cli.run_stage("curate", config) == 0
    assert (tmp_path / "c.jsonl").exists()
    assert (tmp_path / "r.jsonl").exists()


def test_config_file_and_env_override(tmp_path):
    cfg_path = tmp_path / "pipeline.cfg"
    cfg_path.write_text(
        "# pipeline config\n"
        "eval.k=4\n"
        "seed=11\n"
        "curation.min_chars=50\n"
        f"paths.corpus={tmp_path / 'c.jsonl'}\n",
        encoding="utf-8",
    )
    values = parse_kv_file(cfg_path)
    assert values["eval.k"] == "4"
    overridden = apply_env_overrides(values, {"POLITOPICS_EVAL_K": "6"})
    assert overridden["eval.k"] == "6"
    config = PipelineConfig.from_values(overridden)
    assert config.k == 6
    assert config.base_seed == 11
    assert config.curation.min_chars == 50
    assert config.paths["corpus"].endswith("c.jsonl")


def test_head_override_per_topic():
    config = PipelineConfig.from_values({"eval.head": "svm", "head.Vacuna_1": "logistic"})
    from politopics.corpus import TopicId

    assert config.head_for(TopicId("Vacuna", 1)) == "logistic"
    assert config.head_for(TopicId("Turismo", 1)) == "svm"


def test_jobs_parallel_eval_matches_serial(tmp_path):
    rules, raw = write_pipeline_inputs(tmp_path, n_docs=30, seed=2)
    annotated = tmp_path / "a.jsonl"
    emb = tmp_path / "e.txt"
    run(["annotate", "--rules", rules, "--in", raw, "--out", annotated])
    run(["embed", "--in", annotated, "--out", emb, "--dim", 32])
    serial = tmp_path / "serial.txt"
    parallel = tmp_path / "parallel.txt"
    assert run(["eval", "--corpus", annotated, "--embeddings", emb, "--out", serial]) == 0
    assert (
        run(["--jobs", 4, "eval", "--corpus", annotated, "--embeddings", emb, "--out", parallel])
        == 0
    )
    assert serial.read_bytes() == parallel.read_bytes()
