"""Model selection over candidate runs: overall-AUC, Pareto-front minimax,
and distance-to-utopia (DTO) strategies.

A candidate is a hyperparameter/checkpoint choice summarized by its pooled
AUC and its per-subgroup AUC vector. All three strategies are deterministic,
with documented tie-breaking, so repeated runs select the same model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyCandidates, LengthMismatch

STRATEGIES = ("overall", "pareto_minimax", "dto")


@dataclass(frozen=True)
class ModelCandidate:
    """One selectable model: its run id, pooled AUC, and the per-subgroup
    AUC vector (entries may be None when a subgroup was degenerate)."""
    run_id: str
    overall_auc: float
    group_auc: tuple[float | None, ...]

    @property
    def vector_defined(self) -> bool:
        return all(v is not None for v in self.group_auc)

    @property
    def worst(self) -> float:
        return min(self.group_auc)


@dataclass(frozen=True)
class ParetoFront:
    members: tuple[ModelCandidate, ...]
    dominated: tuple[ModelCandidate, ...]


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of one selection problem.

    score holds the winning criterion value (overall AUC, worst-group AUC,
    or DTO distance depending on the strategy). excluded lists candidates
    that could not enter the strategy, as (run_id, reason) pairs. front_size
    is set by the Pareto strategy only. on_front reports whether the chosen
    model lies on the Pareto front of the eligible candidates (None when
    that is undeterminable, e.g. the chosen vector is partly undefined).
    """
    strategy: str
    chosen: str
    score: float
    tie_broken: bool
    front_size: int | None = None
    excluded: tuple[tuple[str, str], ...] = ()
    on_front: bool | None = None


def dominates(a, b) -> bool:
    """True iff vector a is componentwise >= b with at least one strict >."""
    a = tuple(a)
    b = tuple(b)
    if len(a) != len(b):
        raise LengthMismatch(f"vectors of length {len(a)} vs {len(b)}")
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def _check_candidates(candidates) -> list[ModelCandidate]:
    candidates = list(candidates)
    if not candidates:
        raise EmptyCandidates("no candidates to select from")
    m = len(candidates[0].group_auc)
    for c in candidates:
        if len(c.group_auc) != m:
            raise LengthMismatch(
                f"candidate {c.run_id} has {len(c.group_auc)} subgroup AUCs, expected {m}")
    return candidates


def _split_defined(candidates):
    eligible = [c for c in candidates if c.vector_defined]
    excluded = tuple((c.run_id, "undefined subgroup AUC") for c in candidates
                     if not c.vector_defined)
    return eligible, excluded


def pareto_front(candidates) -> ParetoFront:
    """Split candidates into Pareto-front members (not dominated by any other
    candidate's subgroup-AUC vector) and the dominated rest. Candidates with
    equal vectors all land on the front."""
    candidates = _check_candidates(candidates)
    members, dominated = [], []
    for c in candidates:
        if any(dominates(other.group_auc, c.group_auc) for other in candidates if other is not c):
            dominated.append(c)
        else:
            members.append(c)
    return ParetoFront(tuple(members), tuple(dominated))


def _q(x: float) -> float:
    """Quantize a criterion value for comparison. Values that agree to 12
    decimal places are treated as tied, so candidates specified in decimals
    tie exactly where hand computation says they should, while genuinely
    different metric values (anything beyond ~5e-13 apart) stay ordered."""
    return round(x, 12)


def _pick(scored, strategy, front_size=None, excluded=(), on_front=None) -> SelectionResult:
    """Resolve (key, true_score, candidate) triples: smallest key wins.

    key is a tuple (quantized criterion, tie-breaks..., run_id) with
    maximized quantities negated; true_score is the unquantized criterion
    reported on the result. tie_broken is set when several candidates share
    the winning quantized criterion.
    """
    best_key, best_score, best = min(scored, key=lambda ksc: ksc[0])
    tie_broken = sum(1 for key, _, _ in scored if key[0] == best_key[0]) > 1
    return SelectionResult(strategy, best.run_id, best_score, tie_broken,
                           front_size, excluded, on_front)


def select_overall(candidates) -> SelectionResult:
    """Choose the candidate with the highest pooled AUC (ties: smallest
    run_id). Candidates need no subgroup AUC vector for this strategy."""
    candidates = _check_candidates(candidates)
    scored = [((_q(-c.overall_auc), c.run_id), c.overall_auc, c) for c in candidates]
    result = _pick(scored, "overall")
    chosen = next(c for c in candidates if c.run_id == result.chosen)
    eligible, _ = _split_defined(candidates)
    on_front = None
    if chosen.vector_defined and eligible:
        on_front = any(f.run_id == chosen.run_id for f in pareto_front(eligible).members)
    return SelectionResult(result.strategy, result.chosen, result.score,
                           result.tie_broken, None, (), on_front)


def select_pareto_minimax(candidates) -> SelectionResult:
    """Choose, among Pareto-front members, the candidate with the best
    worst-subgroup AUC (ties: higher overall AUC, then smallest run_id).

    Because the argmax of the min-component is never dominated, the winning
    score equals the max-min over all eligible candidates. Candidates with
    an undefined subgroup AUC are excluded and reported.
    """
    candidates = _check_candidates(candidates)
    eligible, excluded = _split_defined(candidates)
    if not eligible:
        raise EmptyCandidates("no candidate has a fully defined subgroup AUC vector")
    front = pareto_front(eligible)
    scored = [((_q(-c.worst), _q(-c.overall_auc), c.run_id), c.worst, c)
              for c in front.members]
    return _pick(scored, "pareto_minimax", front_size=len(front.members),
                 excluded=excluded, on_front=True)


def dto_utopia(candidates) -> tuple[float, ...]:
    """Utopia point: componentwise maximum of the candidates' subgroup-AUC
    vectors (candidates with undefined entries are ignored)."""
    candidates = _check_candidates(candidates)
    eligible, _ = _split_defined(candidates)
    if not eligible:
        raise EmptyCandidates("no candidate has a fully defined subgroup AUC vector")
    return tuple(max(c.group_auc[i] for c in eligible)
                 for i in range(len(eligible[0].group_auc)))


def dto_distance(candidate: ModelCandidate, utopia) -> float:
    """Normalized Euclidean distance from the candidate's subgroup-AUC
    vector to the utopia point: sqrt(sum of squared gaps) / sqrt(m)."""
    utopia = tuple(utopia)
    if len(utopia) != len(candidate.group_auc):
        raise LengthMismatch("utopia point and candidate vector differ in length")
    gaps = [u - v for u, v in zip(utopia, candidate.group_auc)]
    return math.sqrt(sum(g * g for g in gaps)) / math.sqrt(len(utopia))


def select_dto(candidates) -> SelectionResult:
    """Choose the candidate whose subgroup-AUC vector is nearest the utopia
    point (ties: higher overall AUC, then smallest run_id)."""
    candidates = _check_candidates(candidates)
    eligible, excluded = _split_defined(candidates)
    if not eligible:
        raise EmptyCandidates("no candidate has a fully defined subgroup AUC vector")
    utopia = dto_utopia(eligible)
    front_ids = {c.run_id for c in pareto_front(eligible).members}
    scored = [((_q(d), _q(-c.overall_auc), c.run_id), d, c)
              for c in eligible for d in (dto_distance(c, utopia),)]
    result = _pick(scored, "dto", excluded=excluded)
    return SelectionResult(result.strategy, result.chosen, result.score, result.tie_broken,
                           None, excluded, result.chosen in front_ids)


def select(candidates, strategy: str) -> SelectionResult:
    """Dispatch to one of the three strategies by name."""
    if strategy == "overall":
        return select_overall(candidates)
    if strategy == "pareto_minimax":
        return select_pareto_minimax(candidates)
    if strategy == "dto":
        return select_dto(candidates)
    raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
