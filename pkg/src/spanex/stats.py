"""Descriptive corpus statistics: label mix, interaction counts, span lengths."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from .types import Dataset, InteractionType, Label, Level


@dataclass(frozen=True)
class TypeLevelStat:
    type: InteractionType
    level: Level
    count: int
    mean_span_length: float | None  # None when count == 0


@dataclass(frozen=True)
class DatasetStats:
    dataset: str
    n_instances: int
    labels: dict[str, int]
    annotators: dict[str, int]  # annotator -> interaction count
    type_level: tuple[TypeLevelStat, ...]

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "n_instances": self.n_instances,
            "labels": dict(sorted(self.labels.items())),
            "annotators": dict(sorted(self.annotators.items())),
            "interactions": [
                {
                    "type": s.type.value,
                    "level": s.level.value,
                    "count": s.count,
                    "mean_span_length": s.mean_span_length,
                }
                for s in self.type_level
            ],
        }

    def to_csv_rows(self) -> list[list]:
        rows: list[list] = [["type", "level", "count", "mean_span_length"]]
        for s in self.type_level:
            rows.append(
                [
                    s.type.value,
                    s.level.value,
                    s.count,
                    "" if s.mean_span_length is None else f"{s.mean_span_length:.4f}",
                ]
            )
        return rows


def summarize_dataset(dataset: Dataset) -> DatasetStats:
    labels = Counter(inst.label.value for inst in dataset)
    annotators: Counter[str] = Counter()
    counts: Counter[tuple[InteractionType, Level]] = Counter()
    span_totals: dict[tuple[InteractionType, Level], list[int]] = defaultdict(lambda: [0, 0])
    for inst in dataset:
        for ann in inst.annotators():
            ints = inst.interactions(ann)
            annotators[ann] += len(ints)
            for it in ints:
                key = (it.type, it.level)
                counts[key] += 1
                for span in it.spans:
                    span_totals[key][0] += len(span)
                    span_totals[key][1] += 1
    stats = []
    for itype in InteractionType:
        for level in (Level.HIGH, Level.LOW):
            key = (itype, level)
            total, n_spans = span_totals.get(key, (0, 0))
            stats.append(
                TypeLevelStat(
                    type=itype,
                    level=level,
                    count=counts.get(key, 0),
                    mean_span_length=(total / n_spans) if n_spans else None,
                )
            )
    for label in Label:
        labels.setdefault(label.value, 0)
    return DatasetStats(
        dataset=dataset.name.value,
        n_instances=len(dataset),
        labels=dict(labels),
        annotators=dict(annotators),
        type_level=tuple(stats),
    )
