"""Shared test fixtures and builders: in-memory runs, on-disk corpora, and
an exact-AUC instance generator."""

from __future__ import annotations

import json
import os

import pytest

from fairrank.ingest import PredictionRecord, RunData, RunManifest


def make_manifest(run_id="run-a", algorithm="alg", dataset="ds", attribute="attr",
                  seed=0, hparam_id="h0", split="test", m=2):
    return RunManifest(run_id, algorithm, dataset, attribute, seed, hparam_id,
                       split, tuple(f"g{i}" for i in range(m)))


def make_run(scores, labels, groups, **manifest_kwargs):
    """In-memory RunData from parallel score/label/group sequences."""
    manifest = make_manifest(**manifest_kwargs)
    records = [PredictionRecord(manifest.run_id, f"s{i}", float(s), int(y), int(g))
               for i, (s, y, g) in enumerate(zip(scores, labels, groups))]
    return RunData(manifest, records)


def scores_with_auc(pair_wins: int, n_pos: int, n_neg: int):
    """Distinct-score instance whose AUC is exactly pair_wins/(n_pos*n_neg).

    Negatives sit at integer positions 1..n_neg; a positive that should beat
    exactly k negatives sits at k + 0.5. Everything is scaled into (0,1).
    Returns (scores, labels).
    """
    assert 0 <= pair_wins <= n_pos * n_neg
    per_pos = []
    remaining = pair_wins
    for _ in range(n_pos):
        k = min(remaining, n_neg)
        per_pos.append(k)
        remaining -= k
    assert remaining == 0
    denom = n_neg + 1.0
    scores = [j / denom for j in range(1, n_neg + 1)]
    labels = [0] * n_neg
    for k in per_pos:
        scores.append((k + 0.5) / denom)
        labels.append(1)
    return scores, labels


def write_corpus_run(root, manifest: dict, lines):
    """Write one run directory under root; lines are JSONL strings or dicts."""
    run_dir = os.path.join(root, manifest["run_id"])
    os.makedirs(run_dir, exist_ok=True)
    with open(os.path.join(run_dir, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, sort_keys=True)
    text = "\n".join(line if isinstance(line, str) else json.dumps(line, sort_keys=True)
                     for line in lines)
    with open(os.path.join(run_dir, "predictions.jsonl"), "w", encoding="utf-8") as f:
        f.write(text + "\n" if text else "")
    return run_dir


def manifest_dict(run_id, algorithm="alg", dataset="ds", attribute="attr", seed=0,
                  hparam_id="h0", split="test", group_names=("g0", "g1")):
    return {"run_id": run_id, "algorithm": algorithm, "dataset": dataset,
            "attribute": attribute, "seed": seed, "hparam_id": hparam_id,
            "split": split, "group_names": list(group_names)}


def record_dict(run_id, sample_id, score, label, group):
    return {"run_id": run_id, "sample_id": sample_id, "score": score,
            "label": label, "group": group}


@pytest.fixture
def toy_corpus(tmp_path):
    """Deterministic two-algorithm, two-dataset corpus (8 runs, m=2) that
    passes validation and exercises every pipeline stage."""
    import numpy as np

    root = tmp_path / "corpus"
    for alg, shift in [("alphanet", 0.00), ("betanet", 0.06)]:
        for ds in ["ds-one", "ds-two"]:
            for seed in [0, 1]:
                run_id = f"{ds}-{alg}-s{seed}"
                rng = np.random.default_rng(hash((alg, ds, seed)) % 2**31)
                lines = []
                for i in range(80):
                    g = i % 2
                    y = (i // 2) % 2
                    base = 0.64 if y else 0.36
                    if g == 1:
                        base -= shift
                    s = float(np.clip(rng.normal(base, 0.15), 0.001, 0.999))
                    lines.append(record_dict(run_id, f"s{i}", round(s, 6), y, g))
                write_corpus_run(str(root), manifest_dict(
                    run_id, algorithm=alg, dataset=ds, attribute="age",
                    seed=seed), lines)
    return str(root)
