"""System augmentation: surface-match synonyms and dangler coverage.

Two passes, both per annotator and per level, both idempotent:

1. Every case-insensitive token match across the two parts becomes a
   single-token ``Synonym-SYS`` pair, unless the token is a stopword or an
   existing paired interaction at that level already covers both occurrences.
2. Every maximal run of tokens not covered by any span at that level becomes a
   ``Dangler-SYS-P1``/``-P2`` interaction, so that afterwards every token of
   both parts is covered at both levels.

Augmentation never mutates its input; new instances are returned.
"""
from __future__ import annotations

from .stopwords import is_stopword
from .types import (
    Dataset,
    Instance,
    Interaction,
    InteractionType,
    Level,
    Part,
    Span,
)

_LEVELS = (Level.HIGH, Level.LOW)


def _covers_pair(ints: tuple[Interaction, ...], level: Level, i: int, j: int) -> bool:
    for it in ints:
        if it.level is not level or it.span_p1 is None or it.span_p2 is None:
            continue
        if it.span_p1.start <= i < it.span_p1.end and it.span_p2.start <= j < it.span_p2.end:
            return True
    return False


def synonym_sys_interactions(
    instance: Instance, existing: tuple[Interaction, ...]
) -> list[Interaction]:
    """Surface-match Synonym-SYS interactions to add on top of ``existing``."""
    p1 = [t.lower() for t in instance.part1_tokens]
    p2 = [t.lower() for t in instance.part2_tokens]
    added: list[Interaction] = []
    for level in _LEVELS:
        for i, w1 in enumerate(p1):
            if is_stopword(w1):
                continue
            for j, w2 in enumerate(p2):
                if w1 != w2:
                    continue
                if _covers_pair(existing, level, i, j):
                    continue
                added.append(
                    Interaction(
                        type=InteractionType.SYNONYM_SYS,
                        level=level,
                        span_p1=Span(Part.P1, i, i + 1),
                        span_p2=Span(Part.P2, j, j + 1),
                    )
                )
    return added


def _uncovered_runs(length: int, covered: set[int]) -> list[tuple[int, int]]:
    runs: list[tuple[int, int]] = []
    start = None
    for i in range(length + 1):
        if i < length and i not in covered:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i))
            start = None
    return runs


def dangler_interactions(
    instance: Instance, existing: tuple[Interaction, ...]
) -> list[Interaction]:
    """Danglers covering whatever ``existing`` leaves uncovered, per level."""
    added: list[Interaction] = []
    for level in _LEVELS:
        for part, length in (
            (Part.P1, len(instance.part1_tokens)),
            (Part.P2, len(instance.part2_tokens)),
        ):
            covered: set[int] = set()
            for it in existing:
                if it.level is not level:
                    continue
                span = it.span_on(part)
                if span is not None:
                    covered.update(span.indices())
            itype = (
                InteractionType.DANGLER_SYS_P1 if part is Part.P1 else InteractionType.DANGLER_SYS_P2
            )
            for start, end in _uncovered_runs(length, covered):
                span = Span(part, start, end)
                added.append(
                    Interaction(
                        type=itype,
                        level=level,
                        span_p1=span if part is Part.P1 else None,
                        span_p2=span if part is Part.P2 else None,
                    )
                )
    return added


def _selected_annotators(instance: Instance, annotator: str | None) -> list[str]:
    if annotator is None:
        return list(instance.annotators())
    if annotator not in instance.annotations:
        raise KeyError(f"instance {instance.id} has no annotator {annotator!r}")
    return [annotator]


def augment_synonym_sys(instance: Instance, annotator: str | None = None) -> Instance:
    """Add surface-match Synonym-SYS pairs for one annotator (or all)."""
    annotations = dict(instance.annotations)
    for ann in _selected_annotators(instance, annotator):
        ints = annotations.get(ann, ())
        annotations[ann] = ints + tuple(synonym_sys_interactions(instance, ints))
    return instance.with_annotations(annotations)


def augment_danglers(
    instance: Instance, annotator: str | None = None, level: Level | None = None
) -> Instance:
    """Add danglers over uncovered tokens for one annotator (or all).

    ``level`` restricts the pass to one annotation level; default is both.
    """
    levels = _LEVELS if level is None else (level,)
    annotations = dict(instance.annotations)
    for ann in _selected_annotators(instance, annotator):
        ints = annotations.get(ann, ())
        added = [it for it in dangler_interactions(instance, ints) if it.level in levels]
        annotations[ann] = ints + tuple(added)
    return instance.with_annotations(annotations)


def augment_instance(instance: Instance, annotator: str | None = None) -> Instance:
    """Run both augmentation passes for one annotator (or all of them)."""
    annotations = dict(instance.annotations)
    for ann in _selected_annotators(instance, annotator):
        ints = annotations.get(ann, ())
        ints = ints + tuple(synonym_sys_interactions(instance, ints))
        ints = ints + tuple(dangler_interactions(instance, ints))
        annotations[ann] = ints
    return instance.with_annotations(annotations)


def augment_dataset(dataset: Dataset, annotator: str | None = None) -> Dataset:
    return Dataset(
        name=dataset.name,
        instances=tuple(augment_instance(inst, annotator) for inst in dataset),
    )
