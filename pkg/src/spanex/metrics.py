"""Perturbation metrics: comprehensiveness, sufficiency, preserved accuracy.

For a selection S on an instance with original predicted class y and
probability p_orig = p(y | x):

    comp(S) = p_orig - p(y | x with S removed)     -- high when S mattered
    suff(S) = p_orig - p(y | x with only S kept)   -- low when S suffices

Per-token variants divide by |S|, making selections of different sizes
comparable.  Both perturbed probabilities are read at the ORIGINAL predicted
class, whatever the perturbed argmax turns out to be.  A failed oracle call
(or a Keep that would empty a part) leaves that leg missing with its reason —
a score of zero would be a lie.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle.protocol import Oracle, OracleError
from .perturb import (
    DegenerateSelectionError,
    PerturbMode,
    SelectionSource,
    TokenSelection,
    perturb,
    selection_from_explanation,
)
from .types import Instance, SpanexError


class MetricError(SpanexError):
    pass


@dataclass(frozen=True)
class EvalRecord:
    """One selection's scores on one instance (legs may be missing)."""

    instance_id: str
    source: SelectionSource
    predicted: int  # original predicted class index
    p_orig: float
    p_removed: float | None
    p_kept: float | None
    kept_predicted: int | None  # argmax on the Keep run, for preserved accuracy
    perturbed_token_count: int  # |S|
    comp_missing: str | None = None
    suff_missing: str | None = None

    @property
    def aopc_comp(self) -> float | None:
        return None if self.p_removed is None else self.p_orig - self.p_removed

    @property
    def aopc_suff(self) -> float | None:
        return None if self.p_kept is None else self.p_orig - self.p_kept

    @property
    def aopc_comp_per_token(self) -> float | None:
        if self.aopc_comp is None or self.perturbed_token_count == 0:
            return None
        return self.aopc_comp / self.perturbed_token_count

    @property
    def aopc_suff_per_token(self) -> float | None:
        if self.aopc_suff is None or self.perturbed_token_count == 0:
            return None
        return self.aopc_suff / self.perturbed_token_count

    @property
    def preserved(self) -> float | None:
        """1.0 when the Keep run's argmax matches the original prediction."""
        if self.kept_predicted is None:
            return None
        return 1.0 if self.kept_predicted == self.predicted else 0.0

    @property
    def preserved_per_token(self) -> float | None:
        if self.preserved is None or self.perturbed_token_count == 0:
            return None
        return self.preserved / self.perturbed_token_count


def aopc_single(instance: Instance, selection: TokenSelection, oracle: Oracle) -> EvalRecord:
    """Score one selection: comp via Remove, suff (and preservation) via Keep."""
    base = oracle.predict(list(instance.part1_tokens), list(instance.part2_tokens))
    y = base.predicted
    p_orig = float(base.probabilities[y])

    p_removed: float | None = None
    comp_missing: str | None = None
    try:
        part1, part2 = perturb(instance, selection, PerturbMode.REMOVE)
        p_removed = float(oracle.predict(part1, part2).probabilities[y])
    except (OracleError, DegenerateSelectionError) as exc:
        comp_missing = f"{type(exc).__name__}: {exc}"

    p_kept: float | None = None
    kept_predicted: int | None = None
    suff_missing: str | None = None
    try:
        part1, part2 = perturb(instance, selection, PerturbMode.KEEP)
        kept = oracle.predict(part1, part2)
        p_kept = float(kept.probabilities[y])
        kept_predicted = kept.predicted
    except (OracleError, DegenerateSelectionError) as exc:
        suff_missing = f"{type(exc).__name__}: {exc}"

    return EvalRecord(
        instance_id=instance.id,
        source=selection.source,
        predicted=y,
        p_orig=p_orig,
        p_removed=p_removed,
        p_kept=p_kept,
        kept_predicted=kept_predicted,
        perturbed_token_count=selection.size,
        comp_missing=comp_missing,
        suff_missing=suff_missing,
    )


def aopc_curve(
    instance: Instance, explanation, oracle: Oracle, K: int, metric: str = "comp"
) -> float:
    """Mean of the per-k scores for k = 1..K over a ranked explanation.

    K is truncated to the number of pairs; K = 0 (or no pairs) gives 0.0.
    A missing leg at any k is an error here — the curve has no way to carry a
    hole, unlike the per-record report.
    """
    if metric not in ("comp", "suff"):
        raise MetricError(f"metric must be 'comp' or 'suff', got {metric!r}")
    if K < 0:
        raise MetricError(f"K must be >= 0, got {K}")
    K = min(K, len(explanation.pairs))
    if K == 0:
        return 0.0
    scores = []
    for k in range(1, K + 1):
        sel = selection_from_explanation(instance, explanation, k)
        rec = aopc_single(instance, sel, oracle)
        value = rec.aopc_comp if metric == "comp" else rec.aopc_suff
        if value is None:
            reason = rec.comp_missing if metric == "comp" else rec.suff_missing
            raise MetricError(f"instance {instance.id}, k={k}: {metric} unavailable ({reason})")
        scores.append(value)
    return float(np.mean(scores))


def pha(dataset, selections, oracle: Oracle, k: int | None = None) -> float:
    """Fraction of instances whose Keep-run argmax matches the original one.

    ``selections`` maps instance id to either a TokenSelection or a ranked
    explanation; explanations need ``k`` to pick their top pairs.  Instances
    absent from the mapping are skipped; an empty intersection is an error.
    """
    hits = 0
    total = 0
    for instance in dataset:
        picked = selections.get(instance.id)
        if picked is None:
            continue
        if not isinstance(picked, TokenSelection):
            if k is None:
                raise MetricError("explanations need k to select their top pairs")
            picked = selection_from_explanation(instance, picked, k)
        part1, part2 = perturb(instance, picked, PerturbMode.KEEP)
        original = oracle.predict(list(instance.part1_tokens), list(instance.part2_tokens))
        kept = oracle.predict(part1, part2)
        hits += int(kept.predicted == original.predicted)
        total += 1
    if total == 0:
        raise MetricError("no instance had a selection")
    return hits / total
