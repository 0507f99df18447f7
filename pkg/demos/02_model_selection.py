#!/usr/bin/env python3
"""Three ways to pick a model from a hyperparameter sweep.

Six checkpoints of one architecture, each summarized by its overall AUC
and its two subgroup AUCs. Selecting by overall AUC alone rewards the
checkpoint that sacrifices the weaker subgroup; the Pareto-minimax and
distance-to-utopia strategies make the trade-off explicit.
"""

from fairrank.selection import (ModelCandidate, dominates, dto_distance,
                                dto_utopia, pareto_front, select)

candidates = [
    ModelCandidate("ckpt-01", overall_auc=0.952, group_auc=(0.970, 0.700)),
    ModelCandidate("ckpt-02", overall_auc=0.914, group_auc=(0.930, 0.820)),
    ModelCandidate("ckpt-03", overall_auc=0.905, group_auc=(0.900, 0.870)),
    ModelCandidate("ckpt-04", overall_auc=0.889, group_auc=(0.880, 0.860)),  # dominated by ckpt-03
    ModelCandidate("ckpt-05", overall_auc=0.872, group_auc=(0.850, 0.885)),
    ModelCandidate("ckpt-06", overall_auc=0.918, group_auc=(0.960, 0.760)),
]

print("candidates (overall | subgroup aucs)")
for c in candidates:
    print(f"  {c.run_id}:  {c.overall_auc:.3f} | {c.group_auc[0]:.3f} {c.group_auc[1]:.3f}")

# -- dominance and the Pareto front -----------------------------------------
front = pareto_front(candidates)
print("\npareto front over subgroup-AUC vectors:",
      ", ".join(c.run_id for c in front.members))
print("dominated:", ", ".join(c.run_id for c in front.dominated))
assert dominates(candidates[2].group_auc, candidates[3].group_auc)

# -- the three selection strategies ------------------------------------------
print("\nstrategy outcomes")
for strategy in ("overall", "pareto_minimax", "dto"):
    result = select(candidates, strategy)
    print(f"  {strategy:15s} -> {result.chosen}  (criterion {result.score:.4f})")

# -- why dto picked what it picked -------------------------------------------
utopia = dto_utopia(candidates)
print(f"\nutopia point (componentwise best subgroup AUCs): "
      f"({utopia[0]:.3f}, {utopia[1]:.3f})")
print("normalized distance to utopia, ascending:")
for c in sorted(candidates, key=lambda c: dto_distance(c, utopia)):
    print(f"  {c.run_id}: {dto_distance(c, utopia):.4f}")

# overall AUC crowns ckpt-01 despite its 0.700 subgroup; pareto_minimax
# maximizes the worst subgroup (ckpt-03); dto picks the front member
# closest to the best of both worlds.
