"""Token selections and the Remove/Keep perturbations built on them.

A :class:`TokenSelection` names, per part, the token indices an explanation
points at, plus where the selection came from (a human interaction type, the
top-k pairs of an extracted explanation, or a sampled baseline).  ``perturb``
turns a selection into the two perturbed token sequences: Remove deletes the
selected tokens from both parts, Keep retains only them.  Both preserve the
original token order.  Keep raises when it would empty a part — a model
cannot score an empty input, and silently scoring the wrong thing is worse
than failing loudly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Union

from .types import Instance, InteractionType, Level, Part, Span, SpanexError


class PerturbError(SpanexError):
    pass


class DegenerateSelectionError(PerturbError):
    """Keep-mode selection that would leave a part empty."""


class PerturbMode(enum.Enum):
    REMOVE = "remove"
    KEEP = "keep"


@dataclass(frozen=True)
class HumanTypeSource:
    """All spans of one (type, level) by one annotator, taken as a unit."""

    type: InteractionType
    level: Level
    annotator: str

    def key(self) -> tuple:
        return ("human", self.type.value, self.level.value, self.annotator)


@dataclass(frozen=True)
class ExtractedTopKSource:
    """The top-k span pairs of an extracted explanation."""

    k: int

    def key(self) -> tuple:
        return ("topk", self.k)


@dataclass(frozen=True)
class BaselineSource:
    kind: str  # "Random-Phrase" | "Part-Phrase"
    level: Level
    annotator: str

    def key(self) -> tuple:
        return ("baseline", self.kind, self.level.value, self.annotator)


SelectionSource = Union[HumanTypeSource, ExtractedTopKSource, BaselineSource]


@dataclass(frozen=True)
class TokenSelection:
    instance_id: str
    p1: frozenset[int]
    p2: frozenset[int]
    source: SelectionSource

    def __post_init__(self) -> None:
        object.__setattr__(self, "p1", frozenset(self.p1))
        object.__setattr__(self, "p2", frozenset(self.p2))

    @property
    def size(self) -> int:
        return len(self.p1) + len(self.p2)

    @property
    def is_empty(self) -> bool:
        return not self.p1 and not self.p2

    def key(self) -> tuple:
        return (self.instance_id, *self.source.key())

    def complement(self, instance: Instance) -> "TokenSelection":
        """Every unselected token of the instance, same source tag."""
        _check_instance(self, instance)
        return TokenSelection(
            instance_id=self.instance_id,
            p1=frozenset(range(len(instance.part1_tokens))) - self.p1,
            p2=frozenset(range(len(instance.part2_tokens))) - self.p2,
            source=self.source,
        )


def _check_instance(selection: TokenSelection, instance: Instance) -> None:
    if selection.instance_id != instance.id:
        raise PerturbError(
            f"selection is for instance {selection.instance_id!r}, got {instance.id!r}"
        )
    n1, n2 = len(instance.part1_tokens), len(instance.part2_tokens)
    if any(i < 0 or i >= n1 for i in selection.p1):
        raise PerturbError(f"instance {instance.id}: P1 selection index out of range 0..{n1 - 1}")
    if any(i < 0 or i >= n2 for i in selection.p2):
        raise PerturbError(f"instance {instance.id}: P2 selection index out of range 0..{n2 - 1}")


def selection_from_spans(
    instance: Instance, spans: Iterable[Span], source: SelectionSource
) -> TokenSelection:
    """Union of the spans' token indices, bucketed by part."""
    p1: set[int] = set()
    p2: set[int] = set()
    for span in spans:
        (p1 if span.part is Part.P1 else p2).update(span.indices())
    sel = TokenSelection(instance_id=instance.id, p1=frozenset(p1), p2=frozenset(p2), source=source)
    _check_instance(sel, instance)
    return sel


def selection_from_annotations(
    instance: Instance, annotator: str, itype: InteractionType, level: Level
) -> TokenSelection:
    """All spans of one (type, level, annotator) as a single selection.

    Human annotations carry no ranking, so the unit of evaluation is the union
    of the type's spans; danglers contribute the one span they have.
    """
    spans = [
        s
        for it in instance.interactions(annotator)
        if it.type is itype and it.level is level
        for s in it.spans
    ]
    source = HumanTypeSource(type=itype, level=level, annotator=annotator)
    return selection_from_spans(instance, spans, source)


def selection_from_interaction(instance: Instance, interaction, annotator: str) -> TokenSelection:
    """One interaction's own spans (per-pair evaluation unit)."""
    source = HumanTypeSource(type=interaction.type, level=interaction.level, annotator=annotator)
    return selection_from_spans(instance, interaction.spans, source)


def selection_from_explanation(instance: Instance, explanation, k: int) -> TokenSelection:
    """Tokens covered by the top-k pairs of an extracted explanation."""
    if explanation.instance_id != instance.id:
        raise PerturbError(
            f"explanation is for {explanation.instance_id!r}, got instance {instance.id!r}"
        )
    p1, p2 = explanation.token_indices(k)
    sel = TokenSelection(
        instance_id=instance.id, p1=frozenset(p1), p2=frozenset(p2), source=ExtractedTopKSource(k=k)
    )
    _check_instance(sel, instance)
    return sel


def perturb(
    instance: Instance, selection: TokenSelection, mode: PerturbMode
) -> tuple[list[str], list[str]]:
    """The perturbed (part1, part2) token sequences.

    Remove deletes the selected tokens; Keep retains only them.  Order is
    preserved either way.  Keep raises :class:`DegenerateSelectionError` when
    a part would come out empty.
    """
    _check_instance(selection, instance)
    if mode is PerturbMode.REMOVE:
        part1 = [t for i, t in enumerate(instance.part1_tokens) if i not in selection.p1]
        part2 = [t for i, t in enumerate(instance.part2_tokens) if i not in selection.p2]
        return part1, part2
    if mode is PerturbMode.KEEP:
        part1 = [t for i, t in enumerate(instance.part1_tokens) if i in selection.p1]
        part2 = [t for i, t in enumerate(instance.part2_tokens) if i in selection.p2]
        for name, part in (("part 1", part1), ("part 2", part2)):
            if not part:
                raise DegenerateSelectionError(
                    f"instance {instance.id}: keeping the selection empties {name}"
                )
        return part1, part2
    raise PerturbError(f"unknown perturbation mode {mode!r}")
