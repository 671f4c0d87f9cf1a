"""From attention to ranked span-pair explanations.

Pipeline per instance: encode via the oracle, pick the interaction head,
build the cross-part attention graph, partition it with Louvain, collapse
each community's token sets into contiguous spans per part, and rank the
within-community span pairs by the total edge weight between them (both
directions).  Span offsets are part-local token indices, heads are 1-based.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .graph import InteractionGraph, build_graph
from .heads import (
    METHOD_CLASSIFIER_WEIGHT,
    METHOD_SCALAR_MIX,
    ScalarMixModel,
    classifier_weight_head,
)
from .louvain import Partition, UndefinedModularityError, louvain
from .oracle.protocol import Oracle
from .types import Instance, Part, Span, SpanexError


class ExplainError(SpanexError):
    pass


@dataclass(frozen=True)
class SpanPair:
    span_p1: Span
    span_p2: Span
    score: float


@dataclass(frozen=True)
class Explanation:
    instance_id: str
    head: int  # 1-based
    method: str
    seed: int
    pairs: tuple[SpanPair, ...]  # ranked, best first

    def top(self, k: int) -> tuple[SpanPair, ...]:
        if k < 1:
            raise ExplainError(f"k must be >= 1, got {k}")
        return self.pairs[:k]

    def token_indices(self, k: int) -> tuple[set[int], set[int]]:
        """Part-local token index sets covered by the top-k pairs."""
        p1: set[int] = set()
        p2: set[int] = set()
        for pair in self.top(k):
            p1.update(pair.span_p1.indices())
            p2.update(pair.span_p2.indices())
        return p1, p2


def _contiguous_runs(indices: list[int]) -> list[tuple[int, int]]:
    runs = []
    for i in sorted(indices):
        if runs and i == runs[-1][1]:
            runs[-1] = (runs[-1][0], i + 1)
        else:
            runs.append((i, i + 1))
    return runs


def communities_to_spans(
    partition: Partition, graph: InteractionGraph
) -> dict[int, tuple[list[Span], list[Span]]]:
    """Per community: contiguous part-local spans of its tokens on each part."""
    out: dict[int, tuple[list[Span], list[Span]]] = {}
    for comm, members in partition.communities().items():
        p1_idx = [i for i in members if i < graph.boundary]
        p2_idx = [i - graph.boundary for i in members if i >= graph.boundary]
        spans_p1 = [Span(Part.P1, s, e) for s, e in _contiguous_runs(p1_idx)]
        spans_p2 = [Span(Part.P2, s, e) for s, e in _contiguous_runs(p2_idx)]
        out[comm] = (spans_p1, spans_p2)
    return out


def rank_span_pairs(
    spans_by_community: dict[int, tuple[list[Span], list[Span]]], graph: InteractionGraph
) -> tuple[SpanPair, ...]:
    """Cartesian product of each community's spans, scored and ranked."""
    weight: dict[tuple[int, int], float] = {}
    for src, dst, w in graph.edges:
        weight[(src, dst)] = w
    pairs: list[SpanPair] = []
    for spans_p1, spans_p2 in spans_by_community.values():
        for s1 in spans_p1:
            for s2 in spans_p2:
                score = 0.0
                for i in s1.indices():
                    for j in s2.indices():
                        g_j = j + graph.boundary
                        score += weight.get((i, g_j), 0.0) + weight.get((g_j, i), 0.0)
                pairs.append(SpanPair(span_p1=s1, span_p2=s2, score=score))
    pairs.sort(
        key=lambda p: (
            -p.score,
            p.span_p1.start,
            p.span_p1.end,
            p.span_p2.start,
            p.span_p2.end,
        )
    )
    return tuple(pairs)


def extract_explanation(
    instance: Instance,
    oracle: Oracle,
    method: str = METHOD_CLASSIFIER_WEIGHT,
    seed: int = 0,
    threshold: float = 0.0,
    scalar_mix: ScalarMixModel | None = None,
) -> Explanation:
    """Ranked span-pair explanation for one instance.

    ``scalar-mix`` needs a trained :class:`ScalarMixModel` (its head is
    model-level); ``classifier-weight`` picks the head per instance.  A graph
    with no cross-part edges above threshold yields an empty explanation.
    """
    enc = oracle.encode(list(instance.part1_tokens), list(instance.part2_tokens))
    if method == METHOD_CLASSIFIER_WEIGHT:
        meta = oracle.meta()
        head = classifier_weight_head(enc.cls, meta.classifier, meta.head_count, enc.predicted)
    elif method == METHOD_SCALAR_MIX:
        if scalar_mix is None:
            raise ExplainError("scalar-mix extraction needs a trained ScalarMixModel")
        head = scalar_mix.head
    else:
        raise ExplainError(f"unknown head-selection method {method!r}")

    words = list(instance.part1_tokens) + list(instance.part2_tokens)
    graph = build_graph(enc.head(head), enc.boundary, words=words, threshold=threshold)
    if not graph.edges:
        return Explanation(
            instance_id=instance.id, head=head, method=method, seed=seed, pairs=()
        )
    try:
        partition = louvain(graph, seed=seed)
    except UndefinedModularityError as exc:  # unreachable given the edge check
        raise ExplainError(str(exc)) from exc
    return Explanation(
        instance_id=instance.id,
        head=head,
        method=method,
        seed=seed,
        pairs=rank_span_pairs(communities_to_spans(partition, graph), graph),
    )


# --- serialization ----------------------------------------------------------

def explanation_to_dict(exp: Explanation) -> dict:
    return {
        "instance_id": exp.instance_id,
        "head": exp.head,
        "method": exp.method,
        "seed": exp.seed,
        "pairs": [
            {
                "p1": [p.span_p1.start, p.span_p1.end],
                "p2": [p.span_p2.start, p.span_p2.end],
                "score": p.score,
            }
            for p in exp.pairs
        ],
    }


def explanation_from_dict(obj: dict) -> Explanation:
    try:
        pairs = tuple(
            SpanPair(
                span_p1=Span(Part.P1, p["p1"][0], p["p1"][1]),
                span_p2=Span(Part.P2, p["p2"][0], p["p2"][1]),
                score=float(p["score"]),
            )
            for p in obj["pairs"]
        )
        return Explanation(
            instance_id=obj["instance_id"],
            head=int(obj["head"]),
            method=obj["method"],
            seed=int(obj["seed"]),
            pairs=pairs,
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise ExplainError(f"malformed explanation object: {exc}") from exc


def save_explanations(explanations: list[Explanation], path: str | Path, **metadata) -> None:
    payload = {**metadata, "explanations": [explanation_to_dict(e) for e in explanations]}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_explanations(path: str | Path) -> tuple[dict, list[Explanation]]:
    obj = json.loads(Path(path).read_text())
    if not isinstance(obj, dict) or "explanations" not in obj:
        raise ExplainError("explanation file must be an object with an 'explanations' list")
    exps = [explanation_from_dict(o) for o in obj["explanations"]]
    meta = {k: v for k, v in obj.items() if k != "explanations"}
    return meta, exps
