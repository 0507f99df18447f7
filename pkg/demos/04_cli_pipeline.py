#!/usr/bin/env python3
"""The full command-line pipeline on a corpus built from scratch.

Writes a corpus of prediction logs (two algorithms, three datasets, two
seeds each), then drives the `fairrank` pipeline: validate -> report
(evaluate + select + compare), and shows what lands in the output
directory. Everything here also works from a shell; the Python calls map
one-to-one onto the CLI.
"""

import json
import os
import random
import tempfile

from fairrank.cli import main

root = tempfile.mkdtemp(prefix="pipeline-demo-")
runs, out = os.path.join(root, "runs"), os.path.join(root, "report")
rng = random.Random(11)

# -- write the corpus: <runs>/<run_id>/{manifest.json,predictions.jsonl} -----
def write_run(run_id, algorithm, dataset, seed, margin):
    run_dir = os.path.join(runs, run_id)
    os.makedirs(run_dir)
    manifest = {"run_id": run_id, "algorithm": algorithm, "dataset": dataset,
                "attribute": "sex", "seed": seed, "hparam_id": "h0",
                "split": "test", "group_names": ["female", "male"]}
    with open(os.path.join(run_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
    with open(os.path.join(run_dir, "predictions.jsonl"), "w") as f:
        for i in range(80):
            label, group = (i // 2) % 2, i % 2
            score = min(1.0, max(0.0, 0.5 + margin * (2 * label - 1)
                                 + rng.uniform(-0.35, 0.35)))
            f.write(json.dumps({"run_id": run_id, "sample_id": f"s{i:03d}",
                                "score": round(score, 6), "label": label,
                                "group": group}) + "\n")

for dataset in ("derm", "chest", "retina"):
    for seed in (0, 1):
        write_run(f"wide-{dataset}-s{seed}", "widenet", dataset, seed, margin=0.30)
        write_run(f"slim-{dataset}-s{seed}", "slimnet", dataset, seed, margin=0.15)

# -- validate: structural checks, per-run verdicts ----------------------------
print("$ fairrank validate", runs)
code = main(["validate", runs])
print(f"(exit {code})\n")

# -- report: evaluate + select + compare in one pass --------------------------
argv = ["report", "--runs-dir", runs, "--out", out,
        "--strategy", "pareto", "--metric", "worst_auc", "--force-posthoc"]
print("$ fairrank", " ".join(argv))
code = main(argv)
print(f"(exit {code})\n")

print("artifacts in", out)
for name in sorted(os.listdir(out)):
    print(f"  {name:28s} {os.path.getsize(os.path.join(out, name)):6d} bytes")

with open(os.path.join(out, "comparison_worst_auc.json")) as f:
    comparison = json.load(f)
print("\nworst-case-AUC comparison:", json.dumps(
    {k: comparison[k] for k in ("metric", "k", "N", "mean_ranks", "p_value")}, indent=2))

print("\nmetrics.csv, first lines:")
with open(os.path.join(out, "metrics.csv")) as f:
    for line in f.read().splitlines()[:3]:
        print("  " + (line[:110] + "..." if len(line) > 110 else line))
