"""Cross-annotator interaction matching and chance-corrected agreement.

Matching operates on paired interactions of one instance at one level:

* ``EXACT``: two interactions match when both token spans are identical.
* ``RELAXED``: they match when the Part-1 spans share at least one token AND
  the Part-2 spans share at least one token; groups are the connected
  components of this relation (it is not transitive on its own, so a chain
  a~b~c lands in one group even when a and c do not overlap).

A group's size is the number of *distinct* annotators in it.  Agreement on
interaction type is Fleiss' kappa over the groups covering the full annotator
panel, with one rating per annotator per group.
"""
from __future__ import annotations

import enum
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .types import (
    Dataset,
    HUMAN_TYPES,
    Instance,
    Interaction,
    InteractionType,
    Level,
    SpanexError,
    ValidationError,
)


class MatchMode(enum.Enum):
    EXACT = "exact"
    RELAXED = "relaxed"


class AgreementError(SpanexError):
    """Raised for malformed rating tables."""


# Fixed category order for rating tables.
KAPPA_CATEGORIES: tuple[InteractionType, ...] = (
    InteractionType.SYNONYM,
    InteractionType.ANTONYM,
    InteractionType.HYPERNYM_P1_P2,
    InteractionType.HYPERNYM_P2_P1,
)


@dataclass(frozen=True)
class MatchGroup:
    mode: MatchMode
    level: Level
    members: tuple[tuple[str, Interaction], ...]

    @property
    def annotators(self) -> tuple[str, ...]:
        return tuple(sorted({a for a, _ in self.members}))

    @property
    def size(self) -> int:
        """Number of distinct annotators represented in the group."""
        return len({a for a, _ in self.members})

    def rating(self, annotator: str) -> InteractionType:
        """The annotator's rating: type of their first interaction in span order."""
        mine = [it for a, it in self.members if a == annotator]
        if not mine:
            raise KeyError(annotator)
        return min(mine, key=lambda it: it.sort_key()).type

    def ratings(self) -> dict[str, InteractionType]:
        return {a: self.rating(a) for a in self.annotators}

    @property
    def group_type(self) -> InteractionType:
        """Plurality rating, alphabetical tie-break on the type name."""
        votes = Counter(self.ratings().values())
        top = max(votes.values())
        return min((t for t, c in votes.items() if c == top), key=lambda t: t.value)

    def sort_key(self) -> tuple:
        return min(it.sort_key() for _, it in self.members)


def _paired_at_level(
    instance: Instance, level: Level, types: frozenset[InteractionType]
) -> list[tuple[str, Interaction]]:
    for t in types:
        if t.is_dangler:
            raise ValidationError("matching is defined for paired interaction types only")
    out = []
    for annotator in instance.annotators():
        for it in instance.interactions(annotator):
            if it.level is level and it.type in types:
                out.append((annotator, it))
    return out


def _spans_key(it: Interaction) -> tuple[int, int, int, int]:
    assert it.span_p1 is not None and it.span_p2 is not None
    return (it.span_p1.start, it.span_p1.end, it.span_p2.start, it.span_p2.end)


def _relaxed_match(a: Interaction, b: Interaction) -> bool:
    assert a.span_p1 and a.span_p2 and b.span_p1 and b.span_p2
    return a.span_p1.overlaps(b.span_p1) and a.span_p2.overlaps(b.span_p2)


def match_interactions(
    instance: Instance,
    mode: MatchMode,
    level: Level,
    types: frozenset[InteractionType] = HUMAN_TYPES,
) -> list[MatchGroup]:
    """Partition one instance's paired interactions at ``level`` into groups.

    Every selected interaction lands in exactly one group.  In EXACT mode a
    single annotator's duplicate span tuples split into parallel groups, so
    exact groups carry at most one interaction per annotator.
    """
    members = _paired_at_level(instance, level, types)
    groups: list[MatchGroup] = []
    if mode is MatchMode.EXACT:
        buckets: dict[tuple, dict[str, list[Interaction]]] = defaultdict(lambda: defaultdict(list))
        for annotator, it in members:
            buckets[_spans_key(it)][annotator].append(it)
        for per_ann in buckets.values():
            depth = max(len(v) for v in per_ann.values())
            for g in range(depth):
                layer = tuple(
                    (a, ints[g]) for a, ints in sorted(per_ann.items()) if g < len(ints)
                )
                groups.append(MatchGroup(mode=mode, level=level, members=layer))
    else:
        n = len(members)
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(n):
            for j in range(i + 1, n):
                if _relaxed_match(members[i][1], members[j][1]):
                    parent[find(i)] = find(j)
        comps: dict[int, list[tuple[str, Interaction]]] = defaultdict(list)
        for i, m in enumerate(members):
            comps[find(i)].append(m)
        for comp in comps.values():
            comp.sort(key=lambda m: (m[0], m[1].sort_key()))
            groups.append(MatchGroup(mode=mode, level=level, members=tuple(comp)))
    groups.sort(key=lambda g: g.sort_key())
    return groups


def fleiss_kappa_table(table: np.ndarray) -> float:
    """Fleiss' kappa for an (items x categories) table of rating counts.

    Every row must sum to the same number of raters n >= 2.  The degenerate
    all-ratings-in-one-category table has no chance disagreement to correct
    for and comes back as perfect agreement (1.0).
    """
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.size == 0:
        raise AgreementError(f"rating table must be 2-d and non-empty, got shape {table.shape}")
    if (table < 0).any() or not np.allclose(table, np.round(table)):
        raise AgreementError("rating table entries must be non-negative integers")
    n_items, _ = table.shape
    row_sums = table.sum(axis=1)
    n = row_sums[0]
    if not (row_sums == n).all():
        raise AgreementError(f"every item needs the same number of ratings, got {sorted(set(row_sums))}")
    if n < 2:
        raise AgreementError("Fleiss' kappa needs at least 2 ratings per item")
    p_j = table.sum(axis=0) / (n_items * n)
    p_i = ((table**2).sum(axis=1) - n) / (n * (n - 1))
    p_bar = p_i.mean()
    p_e = (p_j**2).sum()
    if np.isclose(1.0, p_e):
        return 1.0
    return float((p_bar - p_e) / (1 - p_e))


def groups_to_table(groups: list[MatchGroup], raters: int) -> np.ndarray:
    """Rating-count table over the full-panel groups (size == raters)."""
    cat_index = {t: i for i, t in enumerate(KAPPA_CATEGORIES)}
    rows = []
    for g in groups:
        if g.size != raters:
            continue
        row = [0] * len(KAPPA_CATEGORIES)
        for rating in g.ratings().values():
            if rating not in cat_index:
                raise AgreementError(f"rating {rating.value} is not a human interaction type")
            row[cat_index[rating]] += 1
        rows.append(row)
    return np.array(rows, dtype=int).reshape(len(rows), len(KAPPA_CATEGORIES))


def fleiss_kappa(groups: list[MatchGroup], raters: int = 3) -> float | None:
    """Kappa over full-panel groups; None when there are none to rate."""
    table = groups_to_table(groups, raters)
    if table.shape[0] == 0:
        return None
    return fleiss_kappa_table(table)


@dataclass(frozen=True)
class AgreementCell:
    mode: MatchMode
    level: Level
    counts: dict[int, int]  # distinct-annotator count -> number of groups
    kappa: float | None
    kappa_groups: int

    @property
    def total_groups(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class AgreementReport:
    dataset: str
    annotators: tuple[str, ...]
    cells: tuple[AgreementCell, ...]

    def cell(self, mode: MatchMode, level: Level) -> AgreementCell:
        for c in self.cells:
            if c.mode is mode and c.level is level:
                return c
        raise KeyError((mode, level))

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "annotators": list(self.annotators),
            "cells": [
                {
                    "mode": c.mode.value,
                    "level": c.level.value,
                    "counts": {str(k): v for k, v in sorted(c.counts.items())},
                    "total_groups": c.total_groups,
                    "kappa": c.kappa,
                    "kappa_groups": c.kappa_groups,
                }
                for c in self.cells
            ],
        }

    def to_csv_rows(self) -> list[list]:
        rows: list[list] = [["mode", "level", "annotators", "groups", "kappa", "kappa_groups"]]
        for c in self.cells:
            for k in sorted(c.counts):
                rows.append([c.mode.value, c.level.value, k, c.counts[k], "", ""])
            rows.append(
                [
                    c.mode.value,
                    c.level.value,
                    "total",
                    c.total_groups,
                    "" if c.kappa is None else f"{c.kappa:.4f}",
                    c.kappa_groups,
                ]
            )
        return rows


def summarize(dataset: Dataset) -> AgreementReport:
    panel = sorted({a for inst in dataset for a in inst.annotators()})
    cells = []
    for mode in MatchMode:
        for level in (Level.HIGH, Level.LOW):
            all_groups: list[MatchGroup] = []
            for inst in dataset:
                all_groups.extend(match_interactions(inst, mode, level))
            counts = Counter(g.size for g in all_groups)
            kappa = fleiss_kappa(all_groups, len(panel)) if len(panel) >= 2 else None
            cells.append(
                AgreementCell(
                    mode=mode,
                    level=level,
                    counts=dict(counts),
                    kappa=kappa,
                    kappa_groups=sum(1 for g in all_groups if g.size == len(panel)),
                )
            )
    return AgreementReport(dataset=dataset.name.value, annotators=tuple(panel), cells=tuple(cells))
