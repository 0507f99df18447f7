#!/usr/bin/env python3
"""Logging predictions from a training loop and reading back the report.

The bridge package (`fairrank_bridge`) writes engine-compatible run
directories batch by batch — the natural shape of an evaluation loop —
then shells out to the installed `fairrank` executable and parses its
artifacts. It never imports the engine, so trainer and engine
environments can differ.
"""

import random
import tempfile

from fairrank_bridge import ReportOptions, begin_run, run_report

root = tempfile.mkdtemp(prefix="bridge-demo-")
runs, out = f"{root}/runs", f"{root}/report"
rng = random.Random(23)


def fake_eval_loop(batches, batch_size, margin):
    """Stand-in for a model's evaluation pass: yields one batch at a time."""
    counter = 0
    for _ in range(batches):
        ids, scores, labels, groups = [], [], [], []
        for _ in range(batch_size):
            label, group = rng.randrange(2), rng.randrange(2)
            score = min(1.0, max(0.0, 0.5 + margin * (2 * label - 1)
                                 + rng.uniform(-0.3, 0.3)))
            ids.append(f"s{counter:04d}")
            scores.append(score)
            labels.append(label)
            groups.append(group)
            counter += 1
        yield ids, scores, labels, groups


# -- export: one session per run, batches appended as they arrive -------------
for algorithm, margin in (("anchor", 0.26), ("trial", 0.15)):
    for dataset in ("derm", "chest"):
        with begin_run(runs, run_id=f"{algorithm}-{dataset}", algorithm=algorithm,
                       dataset=dataset, attribute="sex", seed=0, hparam_id="h0",
                       split="test", group_names=["female", "male"]) as session:
            written = sum(session.log_batch(*batch)
                          for batch in fake_eval_loop(5, 32, margin))
            print(f"exported {session.run_id}: {written} predictions")

# -- report: subprocess to the engine, parsed artifacts back ------------------
report = run_report(runs, out, ReportOptions(strategy="pareto",
                                             metric="worst_auc",
                                             force_posthoc=True))
print(f"\nengine wrote {len(report.raw)} artifacts to {report.out_dir}")
print("per-run worst-case AUC:")
for row in report.metrics:
    print(f"  {row['run_id']:14s} {row['worst_auc']:.4f}")
print("mean ranks:", report.comparison["mean_ranks"])
chosen = [e["chosen_run_id"] for e in report.selection["selections"]]
print("selected per algorithm/dataset:", chosen)
print("diagram attached:", "yes" if report.svg else "no (comparison not significant)")
