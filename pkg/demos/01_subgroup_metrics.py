#!/usr/bin/env python3
"""Metric suite walkthrough on one synthetic run.

A screening model scores 600 patients split into two subgroups. The
second subgroup is both rarer and harder (noisier scores), so its AUC
lags — exactly the situation the per-group metrics exist to expose.
"""

import numpy as np

from fairrank.ingest import PredictionRecord, RunData, RunManifest, resampling_weights
from fairrank.metrics import (MetricConfig, auc, bce, confusion_rates, ece,
                              eq_odd, evaluate_run, select_threshold, tpr_at_tnr)

rng = np.random.default_rng(7)

# -- build the run: group 1 is smaller and noisier -------------------------
n0, n1 = 450, 150
groups = np.array([0] * n0 + [1] * n1)
labels = rng.integers(0, 2, n0 + n1)
noise = np.where(groups == 0, 0.12, 0.30)
scores = np.clip(0.5 + 0.3 * (2 * labels - 1) + rng.normal(0, noise), 0, 1)

manifest = RunManifest(run_id="demo-run", algorithm="net", dataset="synthetic",
                       attribute="site", seed=7, hparam_id="h0", split="test",
                       group_names=("site_a", "site_b"))
records = [PredictionRecord("demo-run", f"s{i}", float(s), int(y), int(g))
           for i, (s, y, g) in enumerate(zip(scores, labels, groups))]
run = RunData(manifest, records)

# -- scalar metrics on the pooled run ---------------------------------------
print("pooled metrics")
print(f"  auc          {auc(scores, labels):.4f}   (rank statistic, ties half-credited)")
print(f"  bce          {bce(scores, labels):.4f}   (log loss)")
print(f"  ece          {ece(scores, labels):.4f}   (10-bin calibration gap)")
t = select_threshold(scores, labels)
r = confusion_rates(scores, labels, t)
print(f"  threshold    {t:.4f}   (max-F1 rule)  ->  tpr {r.tpr:.3f}  tnr {r.tnr:.3f}")
print(f"  tpr@0.8tnr   {tpr_at_tnr(scores, labels, 0.8):.4f}   (sensitivity at fixed specificity)")

# -- the fairness view: same metrics per subgroup ---------------------------
bundle = evaluate_run(run, MetricConfig())
print("\nper-subgroup view")
for name, gm in zip(manifest.group_names, bundle.per_group):
    print(f"  {name}: auc {gm.auc:.4f}  fpr {gm.fpr:.3f}  fnr {gm.fnr:.3f}  "
          f"tpr@0.8tnr {gm.tpr_at_80tnr:.4f}")
print(f"  worst-case auc {bundle.worst_auc:.4f}   auc gap {bundle.auc_gap:.4f}")

# equalized-odds agreement between the groups' confusion rates at the shared
# threshold: 1.0 means identical error profiles
rates = [confusion_rates(scores[groups == g], labels[groups == g], t) for g in (0, 1)]
eo = eq_odd(*rates)
print(f"  eq-odd {eo.eqodd:.4f}  (eqopp0 {eo.eqopp0:.4f}, eqopp1 {eo.eqopp1:.4f})")

# -- group-balanced resampling ----------------------------------------------
w = resampling_weights(groups, 2)
print("\nresampling weights: each subgroup draws with total probability 1/m")
print(f"  group totals: {w[groups == 0].sum():.3f} / {w[groups == 1].sum():.3f}")
