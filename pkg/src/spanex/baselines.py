"""Reference selections matched to the annotation statistics.

Random-Phrase redraws everything: the number of span pairs and each span's
length come from the annotator's recorded interactions on the instance, and
the spans land uniformly at random within their part.  Part-Phrase keeps one
side of every human pair verbatim (part 1 by default) and randomizes only the
other side.  Sampling is driven by ``numpy.random.default_rng`` on the spec's
seed, so a spec reproduces its selection bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .perturb import BaselineSource, TokenSelection
from .types import Instance, Level, Part, Span, SpanexError

RANDOM_PHRASE = "Random-Phrase"
PART_PHRASE = "Part-Phrase"
BASELINE_KINDS = (RANDOM_PHRASE, PART_PHRASE)

_MAX_RESAMPLES = 100


class BaselineError(SpanexError):
    pass


@dataclass(frozen=True)
class BaselineSpec:
    """Everything a baseline draw needs, recorded from one annotator's work.

    The distributions are per-instance empirical multisets: drawing the pair
    count from ``pair_counts`` and lengths from ``p1_lengths``/``p2_lengths``
    reproduces the annotation statistics by construction.
    """

    kind: str
    level: Level
    annotator: str
    pair_counts: tuple[int, ...]
    p1_lengths: tuple[int, ...]
    p2_lengths: tuple[int, ...]
    human_pairs: tuple[tuple[Span, Span], ...]
    seed: int
    fixed_part: Part = Part.P1

    def __post_init__(self) -> None:
        if self.kind not in BASELINE_KINDS:
            raise BaselineError(f"unknown baseline kind {self.kind!r}")
        if not self.pair_counts or not self.p1_lengths or not self.p2_lengths:
            raise BaselineError("baseline spec needs non-empty source distributions")


def build_baseline_spec(
    instance: Instance,
    annotator: str,
    level: Level,
    kind: str,
    seed: int,
    fixed_part: Part = Part.P1,
) -> BaselineSpec:
    """Record the annotator's paired interactions at one level as distributions.

    Danglers are one-sided and carry no pair shape, so they do not feed the
    distributions.  No paired interaction at all means there is nothing to
    mirror — that is an error, not an empty baseline.
    """
    paired = [
        it
        for it in instance.interactions(annotator)
        if it.level is level and not it.type.is_dangler
    ]
    if not paired:
        raise BaselineError(
            f"instance {instance.id}: {annotator} has no paired {level.value} interactions"
        )
    return BaselineSpec(
        kind=kind,
        level=level,
        annotator=annotator,
        pair_counts=(len(paired),),
        p1_lengths=tuple(len(it.span_p1) for it in paired),
        p2_lengths=tuple(len(it.span_p2) for it in paired),
        human_pairs=tuple((it.span_p1, it.span_p2) for it in paired),
        seed=seed,
        fixed_part=fixed_part,
    )


def _draw(rng: np.random.Generator, values: tuple[int, ...]) -> int:
    return int(values[int(rng.integers(0, len(values)))])


def _sample_span(
    rng: np.random.Generator, lengths: tuple[int, ...], part: Part, part_len: int
) -> Span:
    """A span with length drawn from ``lengths``, placed uniformly in the part.

    Lengths that do not fit are redrawn; after 100 failures the draw is
    truncated to the part length (only reachable with foreign distributions —
    recorded spans always fit their own part).
    """
    for _ in range(_MAX_RESAMPLES):
        length = _draw(rng, lengths)
        if length <= part_len:
            start = int(rng.integers(0, part_len - length + 1))
            return Span(part, start, start + length)
    return Span(part, 0, part_len)


def sample_baseline(instance: Instance, spec: BaselineSpec) -> TokenSelection:
    """One seeded baseline draw as a token selection."""
    rng = np.random.default_rng(spec.seed)
    n1, n2 = len(instance.part1_tokens), len(instance.part2_tokens)
    p1: set[int] = set()
    p2: set[int] = set()

    if spec.kind == RANDOM_PHRASE:
        for _ in range(_draw(rng, spec.pair_counts)):
            p1.update(_sample_span(rng, spec.p1_lengths, Part.P1, n1).indices())
            p2.update(_sample_span(rng, spec.p2_lengths, Part.P2, n2).indices())
    else:  # Part-Phrase: one side verbatim, the other redrawn
        for span_p1, span_p2 in spec.human_pairs:
            if spec.fixed_part is Part.P1:
                p1.update(span_p1.indices())
                p2.update(_sample_span(rng, spec.p2_lengths, Part.P2, n2).indices())
            else:
                p2.update(span_p2.indices())
                p1.update(_sample_span(rng, spec.p1_lengths, Part.P1, n1).indices())

    return TokenSelection(
        instance_id=instance.id,
        p1=frozenset(p1),
        p2=frozenset(p2),
        source=BaselineSource(kind=spec.kind, level=spec.level, annotator=spec.annotator),
    )
