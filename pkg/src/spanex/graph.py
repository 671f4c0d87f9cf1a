"""Directed bipartite interaction graph over the tokens of a sequence pair.

Nodes are word tokens (global indices: part 1 first, then part 2).  Edges are
top-layer attention weights between tokens on *different* parts; within-part
attention never enters the graph.  An edge is kept when its weight is strictly
positive and at least ``threshold``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import Part, SpanexError


class GraphError(SpanexError):
    pass


@dataclass(frozen=True)
class GraphNode:
    index: int  # global token index
    part: Part
    word: str


@dataclass(frozen=True)
class InteractionGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[tuple[int, int, float], ...]  # (src, dst, weight)
    boundary: int  # first part-2 global index

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.size, self.size))
        for src, dst, w in self.edges:
            adj[src, dst] = w
        return adj

    def part_of(self, index: int) -> Part:
        return Part.P1 if index < self.boundary else Part.P2

    def word_of(self, index: int) -> str:
        return self.nodes[index].word


def build_graph(
    attention: np.ndarray,
    boundary: int,
    words: list[str] | tuple[str, ...] | None = None,
    threshold: float = 0.0,
) -> InteractionGraph:
    """Build the cross-part interaction graph from one head's attention.

    ``attention`` is the (T, T) matrix of the chosen head; ``boundary`` the
    number of part-1 tokens.  ``threshold`` (epsilon >= 0) drops weak edges;
    zero-weight entries are never edges regardless.
    """
    attention = np.asarray(attention, dtype=float)
    if attention.ndim != 2 or attention.shape[0] != attention.shape[1]:
        raise GraphError(f"attention must be square, got shape {attention.shape}")
    t = attention.shape[0]
    if not 0 < boundary < t:
        raise GraphError(f"boundary {boundary} must split 1..{t - 1} tokens")
    if threshold < 0:
        raise GraphError(f"threshold must be >= 0, got {threshold}")
    if (attention < 0).any():
        raise GraphError("attention weights must be non-negative")
    if words is None:
        words = [f"t{i}" for i in range(t)]
    if len(words) != t:
        raise GraphError(f"got {len(words)} words for {t} attention rows")

    nodes = tuple(
        GraphNode(index=i, part=Part.P1 if i < boundary else Part.P2, word=words[i])
        for i in range(t)
    )
    edges = []
    for i in range(t):
        for j in range(t):
            if (i < boundary) == (j < boundary):
                continue
            w = float(attention[i, j])
            if w > 0 and w >= threshold:
                edges.append((i, j, w))
    return InteractionGraph(nodes=nodes, edges=tuple(edges), boundary=boundary)


def graph_to_dict(graph: InteractionGraph) -> dict:
    """Edge-list debug dump: {nodes: [{id, part, word}], edges: [[src, dst, w]]}."""
    return {
        "nodes": [{"id": n.index, "part": n.part.value, "word": n.word} for n in graph.nodes],
        "edges": [[src, dst, w] for src, dst, w in graph.edges],
    }
