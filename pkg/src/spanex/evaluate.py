"""Dataset-level faithfulness evaluation and report building.

One evaluation walks a dataset and scores token selections against an oracle:
human annotations (one selection per (type, level, annotator), or per pair),
extracted explanations at each requested top-k, and optionally the two
reference baselines.  Every scored selection becomes one record; aggregation
reduces records to (label, type, level, metric) cells with mean, population
standard deviation, and count, plus a per-metric ranking of the cells and an
optional split by how many annotators agreed on an interaction.

Oracle calls can run on a small thread pool; records are merged by a stable
work key afterwards, so the report is byte-identical regardless of scheduling.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import ceil
from typing import Callable, Mapping, Sequence

import numpy as np

from .agreement import MatchMode, match_interactions
from .baselines import (
    BASELINE_KINDS,
    BaselineError,
    build_baseline_spec,
    sample_baseline,
)
from .explain import Explanation
from .metrics import EvalRecord, aopc_single
from .perturb import (
    BaselineSource,
    ExtractedTopKSource,
    HumanTypeSource,
    TokenSelection,
    selection_from_annotations,
    selection_from_interaction,
    selection_from_explanation,
)
from .types import Dataset, Instance, Level, Part, SpanexError

METRICS = (
    "aopc_comp",
    "aopc_suff",
    "pha",
    "aopc_comp_per_token",
    "aopc_suff_per_token",
    "pha_per_token",
)
# Lower sufficiency is better (the kept spans already carry the prediction);
# everything else ranks descending.
_ASCENDING_METRICS = {"aopc_suff"}
_RANKED_METRICS = ("aopc_comp", "aopc_suff", "pha")

UNIT_UNION = "union"
UNIT_PAIR = "pair"


class EvalError(SpanexError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    topk: tuple[int, ...] = (1, 3, 5)
    baselines: tuple[str, ...] = ()
    seed: int = 0
    unit: str = UNIT_UNION
    levels: tuple[Level, ...] = (Level.LOW, Level.HIGH)
    agreement_split: bool = False
    part_phrase_fixed: Part = Part.P1
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.unit not in (UNIT_UNION, UNIT_PAIR):
            raise EvalError(f"unit must be '{UNIT_UNION}' or '{UNIT_PAIR}', got {self.unit!r}")
        for kind in self.baselines:
            if kind not in BASELINE_KINDS:
                raise EvalError(f"unknown baseline {kind!r} (choose from {BASELINE_KINDS})")
        if any(k < 1 for k in self.topk):
            raise EvalError(f"top-k values must be >= 1, got {self.topk}")
        if self.jobs < 1:
            raise EvalError(f"jobs must be >= 1, got {self.jobs}")

    def to_dict(self) -> dict:
        return {
            "topk": list(self.topk),
            "baselines": list(self.baselines),
            "seed": self.seed,
            "unit": self.unit,
            "levels": [lv.value for lv in self.levels],
            "agreement_split": self.agreement_split,
            "part_phrase_fixed": self.part_phrase_fixed.value,
            "jobs": self.jobs,
        }

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class AggregateRow:
    label: str
    type: str
    level: str
    metric: str
    mean: float
    std: float
    n: int


@dataclass(frozen=True)
class RankRow:
    metric: str
    type: str
    level: str
    rank: int
    total: int
    band: str  # top | mid | low tertile
    mean: float


@dataclass(frozen=True)
class SplitRow:
    """Aggregate over interactions grouped by how many annotators share them."""

    agreement: int  # 1, 2, or 3+ annotators in the relaxed match group
    type: str
    level: str
    metric: str
    mean: float
    std: float
    n: int


@dataclass
class EvalReport:
    dataset: str
    config: EvalConfig
    records: list[tuple[tuple, str, EvalRecord]]  # (work key, gold label, record)
    aggregates: list[AggregateRow] = field(default_factory=list)
    ranking: list[RankRow] = field(default_factory=list)
    split: list[SplitRow] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)

    @property
    def failures(self) -> list[dict]:
        out = []
        for key, _, rec in self.records:
            for leg, reason in (("comp", rec.comp_missing), ("suff", rec.suff_missing)):
                if reason is not None:
                    out.append(
                        {
                            "instance_id": rec.instance_id,
                            "source": _source_to_dict(rec.source),
                            "leg": leg,
                            "reason": reason,
                        }
                    )
        return out

    def to_dict(self, toolkit_version: str = "") -> dict:
        return {
            "dataset": self.dataset,
            "toolkit_version": toolkit_version,
            "config": self.config.to_dict(),
            "config_hash": self.config.hash(),
            "records": [_record_to_dict(rec) for _, _, rec in self.records],
            "aggregates": [vars(row) | {} for row in self.aggregates],
            "ranking": [vars(row) | {} for row in self.ranking],
            "agreement_split": [vars(row) | {} for row in self.split],
            "failures": self.failures,
            "skipped": self.skipped,
        }

    def summary_csv_rows(self) -> list[list]:
        return summary_csv(self.dataset, (vars(r) for r in self.aggregates))

    def plot_csv_rows(self) -> list[list]:
        return plot_csv(self.dataset, (vars(r) for r in self.aggregates))


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def summary_csv(dataset: str, aggregates) -> list[list]:
    rows: list[list] = [["dataset", "label", "type", "level", "metric", "mean", "std", "n"]]
    for row in aggregates:
        rows.append(
            [dataset, row["label"], row["type"], row["level"], row["metric"],
             _fmt(row["mean"]), _fmt(row["std"]), row["n"]]
        )
    return rows


def plot_csv(dataset: str, aggregates) -> list[list]:
    """Tidy bar data: one row per (metric, label, type, level) bar."""
    rows: list[list] = [["dataset", "metric", "label", "type", "level", "value", "err", "n"]]
    for row in aggregates:
        rows.append(
            [dataset, row["metric"], row["label"], row["type"], row["level"],
             _fmt(row["mean"]), _fmt(row["std"]), row["n"]]
        )
    return rows


def _source_to_dict(source) -> dict:
    if isinstance(source, HumanTypeSource):
        return {
            "kind": "human",
            "type": source.type.value,
            "level": source.level.value,
            "annotator": source.annotator,
        }
    if isinstance(source, ExtractedTopKSource):
        return {"kind": "topk", "k": source.k}
    if isinstance(source, BaselineSource):
        return {
            "kind": "baseline",
            "baseline": source.kind,
            "level": source.level.value,
            "annotator": source.annotator,
        }
    raise EvalError(f"unknown selection source {source!r}")


def _record_to_dict(rec: EvalRecord) -> dict:
    return {
        "instance_id": rec.instance_id,
        "source": _source_to_dict(rec.source),
        "predicted": rec.predicted,
        "p_orig": rec.p_orig,
        "p_removed": rec.p_removed,
        "p_kept": rec.p_kept,
        "kept_predicted": rec.kept_predicted,
        "perturbed_token_count": rec.perturbed_token_count,
        "aopc_comp": rec.aopc_comp,
        "aopc_suff": rec.aopc_suff,
        "aopc_comp_per_token": rec.aopc_comp_per_token,
        "aopc_suff_per_token": rec.aopc_suff_per_token,
        "preserved": rec.preserved,
        "comp_missing": rec.comp_missing,
        "suff_missing": rec.suff_missing,
    }


def _metric_value(rec: EvalRecord, metric: str) -> float | None:
    return {
        "aopc_comp": rec.aopc_comp,
        "aopc_suff": rec.aopc_suff,
        "pha": rec.preserved,
        "aopc_comp_per_token": rec.aopc_comp_per_token,
        "aopc_suff_per_token": rec.aopc_suff_per_token,
        "pha_per_token": rec.preserved_per_token,
    }[metric]


def _cell_of(source) -> tuple[str, str]:
    """(type, level) report cell for a record source."""
    if isinstance(source, HumanTypeSource):
        return source.type.value, source.level.value
    if isinstance(source, ExtractedTopKSource):
        return f"Extracted-Top{source.k}", "n/a"
    if isinstance(source, BaselineSource):
        return source.kind, source.level.value
    raise EvalError(f"unknown selection source {source!r}")


# --- deterministic display order ---------------------------------------------

_LEVEL_ORDER = {"low": 0, "high": 1, "n/a": 2}
_LABEL_ORDER = {"all": 0, "Entailment": 1, "Neutral": 2, "Contradiction": 3}


def _type_order(name: str) -> tuple:
    from .types import InteractionType

    human = [t.value for t in InteractionType]
    if name in human:
        return (0, human.index(name), 0)
    if name.startswith("Extracted-Top"):
        return (1, int(name.removeprefix("Extracted-Top")), 0)
    if name in BASELINE_KINDS:
        return (2, BASELINE_KINDS.index(name), 0)
    return (3, 0, 0)


# --- work-item generation ----------------------------------------------------

@dataclass(frozen=True)
class _WorkItem:
    key: tuple
    instance: Instance
    label: str
    factory: Callable[[], TokenSelection]
    split_size: int | None = None  # relaxed agreement-group size, when tracked


def _subseed(seed: int, *parts: str) -> int:
    blob = "|".join([str(seed), *parts]).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


def _human_items(instance: Instance, config: EvalConfig) -> list[_WorkItem]:
    items: list[_WorkItem] = []
    label = instance.label.value
    split_sizes: dict[tuple[str, int], int] = {}
    if config.agreement_split or config.unit == UNIT_PAIR:
        # Map each paired human interaction to its relaxed-group size.
        for level in config.levels:
            try:
                groups = match_interactions(instance, MatchMode.RELAXED, level)
            except SpanexError:
                continue
            for group in groups:
                for annotator, interaction in group.members:
                    split_sizes[(annotator, id(interaction))] = group.size

    for annotator in instance.annotators():
        interactions = instance.interactions(annotator)
        for level in config.levels:
            at_level = [it for it in interactions if it.level is level]
            if config.unit == UNIT_UNION:
                types = sorted({it.type for it in at_level}, key=lambda t: t.value)
                for itype in types:
                    items.append(
                        _WorkItem(
                            key=(instance.id, "human", level.value, annotator, itype.value, 0),
                            instance=instance,
                            label=label,
                            factory=lambda i=instance, a=annotator, t=itype, lv=level: (
                                selection_from_annotations(i, a, t, lv)
                            ),
                        )
                    )
            else:
                for ordinal, interaction in enumerate(
                    sorted(at_level, key=lambda it: it.sort_key())
                ):
                    items.append(
                        _WorkItem(
                            key=(
                                instance.id, "human", level.value, annotator,
                                interaction.type.value, ordinal,
                            ),
                            instance=instance,
                            label=label,
                            factory=lambda i=instance, it=interaction, a=annotator: (
                                selection_from_interaction(i, it, a)
                            ),
                            split_size=split_sizes.get((annotator, id(interaction))),
                        )
                    )
    if config.agreement_split and config.unit == UNIT_UNION:
        # The split needs per-interaction granularity; add those records on
        # top of the union ones, tagged so they stay out of the main table.
        for annotator in instance.annotators():
            for level in config.levels:
                at_level = [
                    it for it in instance.interactions(annotator)
                    if it.level is level and not it.type.is_dangler
                ]
                for ordinal, interaction in enumerate(
                    sorted(at_level, key=lambda it: it.sort_key())
                ):
                    size = split_sizes.get((annotator, id(interaction)))
                    if size is None:
                        continue
                    items.append(
                        _WorkItem(
                            key=(
                                instance.id, "split", level.value, annotator,
                                interaction.type.value, ordinal,
                            ),
                            instance=instance,
                            label=label,
                            factory=lambda i=instance, it=interaction, a=annotator: (
                                selection_from_interaction(i, it, a)
                            ),
                            split_size=size,
                        )
                    )
    return items


def _baseline_items(
    instance: Instance, config: EvalConfig, skipped: list[dict]
) -> list[_WorkItem]:
    items: list[_WorkItem] = []
    for annotator in instance.annotators():
        for level in config.levels:
            for kind in config.baselines:
                try:
                    spec = build_baseline_spec(
                        instance,
                        annotator,
                        level,
                        kind,
                        seed=_subseed(config.seed, instance.id, annotator, level.value, kind),
                        fixed_part=config.part_phrase_fixed,
                    )
                except BaselineError as exc:
                    skipped.append(
                        {
                            "instance_id": instance.id,
                            "annotator": annotator,
                            "level": level.value,
                            "baseline": kind,
                            "reason": str(exc),
                        }
                    )
                    continue
                items.append(
                    _WorkItem(
                        key=(instance.id, "baseline", level.value, annotator, kind, 0),
                        instance=instance,
                        label=instance.label.value,
                        factory=lambda i=instance, s=spec: sample_baseline(i, s),
                    )
                )
    return items


def _topk_items(
    instance: Instance, explanation: Explanation, config: EvalConfig
) -> list[_WorkItem]:
    return [
        _WorkItem(
            key=(instance.id, "topk", "n/a", "", f"{k:06d}", 0),
            instance=instance,
            label=instance.label.value,
            factory=lambda i=instance, e=explanation, kk=k: selection_from_explanation(i, e, kk),
        )
        for k in config.topk
    ]


# --- aggregation -------------------------------------------------------------

def _aggregate(records: list[tuple[tuple, str, EvalRecord]]) -> list[AggregateRow]:
    cells: dict[tuple[str, str, str, str], list[float]] = {}
    for key, label, rec in records:
        if key[1] == "split":
            continue
        rtype, rlevel = _cell_of(rec.source)
        for metric in METRICS:
            value = _metric_value(rec, metric)
            if value is None:
                continue
            for lab in (label, "all"):
                cells.setdefault((lab, rtype, rlevel, metric), []).append(value)
    rows = [
        AggregateRow(
            label=lab,
            type=rtype,
            level=rlevel,
            metric=metric,
            mean=float(np.mean(values)),
            std=float(np.std(values)),
            n=len(values),
        )
        for (lab, rtype, rlevel, metric), values in cells.items()
    ]
    rows.sort(
        key=lambda r: (
            _LABEL_ORDER.get(r.label, 99),
            _type_order(r.type),
            _LEVEL_ORDER.get(r.level, 99),
            METRICS.index(r.metric),
        )
    )
    return rows


def _rank(aggregates: list[AggregateRow]) -> list[RankRow]:
    out: list[RankRow] = []
    for metric in _RANKED_METRICS:
        cells = [r for r in aggregates if r.label == "all" and r.metric == metric]
        reverse = metric not in _ASCENDING_METRICS
        cells.sort(key=lambda r: ((-r.mean if reverse else r.mean), _type_order(r.type)))
        total = len(cells)
        for i, row in enumerate(cells, start=1):
            band = "top" if i <= ceil(total / 3) else ("mid" if i <= ceil(2 * total / 3) else "low")
            out.append(
                RankRow(
                    metric=metric, type=row.type, level=row.level,
                    rank=i, total=total, band=band, mean=row.mean,
                )
            )
    return out


def _split_rows(
    records: list[tuple[tuple, str, EvalRecord]], sizes: dict[tuple, int], unit: str
) -> list[SplitRow]:
    want = "split" if unit == UNIT_UNION else "human"
    cells: dict[tuple[int, str, str, str], list[float]] = {}
    for key, _, rec in records:
        size = sizes.get(key)
        if key[1] != want or size is None:
            continue
        rtype, rlevel = _cell_of(rec.source)
        for metric in METRICS:
            value = _metric_value(rec, metric)
            if value is not None:
                cells.setdefault((size, rtype, rlevel, metric), []).append(value)
    rows = [
        SplitRow(
            agreement=size,
            type=rtype,
            level=rlevel,
            metric=metric,
            mean=float(np.mean(values)),
            std=float(np.std(values)),
            n=len(values),
        )
        for (size, rtype, rlevel, metric), values in cells.items()
    ]
    rows.sort(
        key=lambda r: (
            r.agreement,
            _type_order(r.type),
            _LEVEL_ORDER.get(r.level, 99),
            METRICS.index(r.metric),
        )
    )
    return rows


# --- entry point -------------------------------------------------------------

def evaluate_dataset(
    dataset: Dataset,
    explanations: Mapping[str, Explanation] | Sequence[Explanation] | None,
    oracle,
    config: EvalConfig = EvalConfig(),
) -> EvalReport:
    """Score a dataset and build the aggregate report.

    ``explanations`` maps instance ids to ranked explanations; ``None`` means
    evaluate the human annotations instead.  Baselines from the config are
    sampled off the annotations in either mode.
    """
    by_id: dict[str, Explanation] = {}
    if explanations is not None:
        if not isinstance(explanations, Mapping):
            explanations = {e.instance_id: e for e in explanations}
        by_id = dict(explanations)
        unknown = set(by_id) - {inst.id for inst in dataset}
        if unknown:
            raise EvalError(f"explanations reference unknown instances: {sorted(unknown)}")

    skipped: list[dict] = []
    items: list[_WorkItem] = []
    for instance in dataset:
        if explanations is None:
            items.extend(_human_items(instance, config))
        elif instance.id in by_id:
            items.extend(_topk_items(instance, by_id[instance.id], config))
        items.extend(_baseline_items(instance, config, skipped))
    items.sort(key=lambda w: w.key)

    def score(item: _WorkItem) -> tuple[tuple, str, EvalRecord]:
        return item.key, item.label, aopc_single(item.instance, item.factory(), oracle)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(score, items))
    else:
        results = [score(item) for item in items]
    results.sort(key=lambda r: r[0])

    report = EvalReport(
        dataset=dataset.name.value, config=config, records=results, skipped=skipped
    )
    report.aggregates = _aggregate(results)
    report.ranking = _rank(report.aggregates)
    if config.agreement_split:
        sizes = {item.key: item.split_size for item in items if item.split_size is not None}
        report.split = _split_rows(results, sizes, config.unit)
    return report
