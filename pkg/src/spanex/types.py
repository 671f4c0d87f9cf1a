"""Core data model: spans, interactions, instances, datasets.

Everything here is immutable after construction (frozen dataclasses; interaction
lists are tuples).  Token spans are half-open ``[start, end)`` indices into the
owning part's token list, never character offsets.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping


class Part(enum.Enum):
    """Which side of the sequence pair a span lives on."""

    P1 = "p1"  # premise / evidence
    P2 = "p2"  # hypothesis / claim

    def other(self) -> "Part":
        return Part.P2 if self is Part.P1 else Part.P1


class Level(enum.Enum):
    LOW = "low"  # word / leaf level
    HIGH = "high"  # phrase level


class InteractionType(enum.Enum):
    SYNONYM = "Synonym"
    ANTONYM = "Antonym"
    # The more general span (the hypernym) sits in the part named first.
    HYPERNYM_P1_P2 = "Hypernym-P1-P2"
    HYPERNYM_P2_P1 = "Hypernym-P2-P1"
    SYNONYM_SYS = "Synonym-SYS"
    DANGLER_SYS_P1 = "Dangler-SYS-P1"
    DANGLER_SYS_P2 = "Dangler-SYS-P2"

    @property
    def is_human(self) -> bool:
        return self in HUMAN_TYPES

    @property
    def is_dangler(self) -> bool:
        return self in DANGLER_TYPES


HUMAN_TYPES = frozenset(
    {
        InteractionType.SYNONYM,
        InteractionType.ANTONYM,
        InteractionType.HYPERNYM_P1_P2,
        InteractionType.HYPERNYM_P2_P1,
    }
)
SYSTEM_TYPES = frozenset(set(InteractionType) - HUMAN_TYPES)
DANGLER_TYPES = frozenset(
    {InteractionType.DANGLER_SYS_P1, InteractionType.DANGLER_SYS_P2}
)
# Types whose Part-2 span asserts that the Part-2 material is supported by
# Part 1 (used by the label-constraint checker).
P2_SUPPORTING_TYPES = frozenset(
    {
        InteractionType.SYNONYM,
        InteractionType.SYNONYM_SYS,
        InteractionType.HYPERNYM_P2_P1,
    }
)


class Label(enum.Enum):
    ENTAILMENT = "Entailment"
    NEUTRAL = "Neutral"
    CONTRADICTION = "Contradiction"


class DatasetName(enum.Enum):
    SNLI = "SNLI"
    FEVER = "FEVER"


class SpanexError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SpanexError):
    """A value violates a structural invariant of the data model."""


@dataclass(frozen=True, order=True)
class Span:
    """Half-open token span ``[start, end)`` on one part."""

    part: Part = field(compare=False)
    start: int
    end: int

    def __post_init__(self) -> None:
        if not isinstance(self.start, int) or not isinstance(self.end, int):
            raise ValidationError(f"span offsets must be ints, got {self.start!r}:{self.end!r}")
        if self.start < 0 or self.end <= self.start:
            raise ValidationError(f"invalid span [{self.start}, {self.end}): need 0 <= start < end")

    def __len__(self) -> int:
        return self.end - self.start

    def tokens(self, part_tokens: Iterable[str]) -> tuple[str, ...]:
        return tuple(part_tokens)[self.start : self.end]

    def indices(self) -> range:
        return range(self.start, self.end)

    def overlaps(self, other: "Span") -> bool:
        return self.part is other.part and self.start < other.end and other.start < self.end

    def contains(self, other: "Span") -> bool:
        return self.part is other.part and self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class Interaction:
    """One annotated interaction between the two parts (or a dangler on one).

    Paired types carry both spans; danglers carry exactly the span on their own
    part and ``None`` on the other.
    """

    type: InteractionType
    level: Level
    span_p1: Span | None
    span_p2: Span | None

    def __post_init__(self) -> None:
        if self.type is InteractionType.DANGLER_SYS_P1:
            if self.span_p1 is None or self.span_p2 is not None:
                raise ValidationError("Dangler-SYS-P1 carries a P1 span only")
        elif self.type is InteractionType.DANGLER_SYS_P2:
            if self.span_p2 is None or self.span_p1 is not None:
                raise ValidationError("Dangler-SYS-P2 carries a P2 span only")
        else:
            if self.span_p1 is None or self.span_p2 is None:
                raise ValidationError(f"{self.type.value} interactions need spans on both parts")
        if self.span_p1 is not None and self.span_p1.part is not Part.P1:
            raise ValidationError("span_p1 must lie on part 1")
        if self.span_p2 is not None and self.span_p2.part is not Part.P2:
            raise ValidationError("span_p2 must lie on part 2")

    @property
    def spans(self) -> tuple[Span, ...]:
        return tuple(s for s in (self.span_p1, self.span_p2) if s is not None)

    def span_on(self, part: Part) -> Span | None:
        return self.span_p1 if part is Part.P1 else self.span_p2

    def sort_key(self) -> tuple:
        def k(s: Span | None) -> tuple[int, int]:
            return (-1, -1) if s is None else (s.start, s.end)

        return (*k(self.span_p1), *k(self.span_p2), self.type.value, self.level.value)


def _check_span_bounds(span: Span | None, n1: int, n2: int, ctx: str) -> None:
    if span is None:
        return
    limit = n1 if span.part is Part.P1 else n2
    if span.end > limit:
        raise ValidationError(f"{ctx}: span [{span.start}, {span.end}) exceeds part length {limit}")


@dataclass(frozen=True)
class Instance:
    """One sequence pair with its gold label and per-annotator interactions.

    ``annotations`` maps annotator id to that annotator's interactions.  Treat
    it as read-only; transformations (augmentation etc.) return new instances.
    """

    id: str
    dataset: DatasetName
    label: Label
    part1_tokens: tuple[str, ...]
    part2_tokens: tuple[str, ...]
    annotations: Mapping[str, tuple[Interaction, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "part1_tokens", tuple(self.part1_tokens))
        object.__setattr__(self, "part2_tokens", tuple(self.part2_tokens))
        object.__setattr__(
            self, "annotations", {a: tuple(ints) for a, ints in self.annotations.items()}
        )
        if not self.id:
            raise ValidationError("instance id must be non-empty")
        if not self.part1_tokens or not self.part2_tokens:
            raise ValidationError(f"instance {self.id}: both parts must be non-empty")
        for ann, ints in self.annotations.items():
            for it in ints:
                _check_span_bounds(it.span_p1, len(self.part1_tokens), len(self.part2_tokens), f"{self.id}/{ann}")
                _check_span_bounds(it.span_p2, len(self.part1_tokens), len(self.part2_tokens), f"{self.id}/{ann}")

    def tokens(self, part: Part) -> tuple[str, ...]:
        return self.part1_tokens if part is Part.P1 else self.part2_tokens

    def annotators(self) -> tuple[str, ...]:
        return tuple(sorted(self.annotations))

    def interactions(self, annotator: str) -> tuple[Interaction, ...]:
        return self.annotations.get(annotator, ())

    def with_annotations(self, annotations: Mapping[str, tuple[Interaction, ...]]) -> "Instance":
        return replace(self, annotations=dict(annotations))


@dataclass(frozen=True)
class Dataset:
    """A named collection of instances with unique ids."""

    name: DatasetName
    instances: tuple[Instance, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "instances", tuple(self.instances))
        seen: set[str] = set()
        for inst in self.instances:
            if inst.id in seen:
                raise ValidationError(f"duplicate instance id {inst.id!r}")
            seen.add(inst.id)
            if inst.dataset is not self.name:
                raise ValidationError(
                    f"instance {inst.id}: dataset {inst.dataset.value} != container {self.name.value}"
                )

    def __iter__(self) -> Iterator[Instance]:
        return iter(self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def get(self, instance_id: str) -> Instance:
        for inst in self.instances:
            if inst.id == instance_id:
                return inst
        raise KeyError(instance_id)


@dataclass(frozen=True)
class Violation:
    """One label-constraint violation found by the consistency checker."""

    instance_id: str
    annotator: str
    rule: str
    message: str
