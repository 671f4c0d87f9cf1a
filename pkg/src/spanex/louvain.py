"""Directed-graph Louvain community detection with auditable moves.

Modularity follows the directed generalization

    Q = (1/m) * sum_ij [A_ij - kout_i * kin_j / m] * delta(c_i, c_j)

summed over ordered pairs including i == j, with m the total edge weight.
The local-move phase uses the standard gain of inserting an isolated node i
into a community C,

    dQ = k_i_in / m - (kout_i * Sigma_in(C) + kin_i * Sigma_out(C)) / m**2

where k_i_in counts edges between i and C in both directions; the net gain of
a relocation is the insertion gain at the destination minus the insertion
gain back home.  Phases of local moves and graph aggregation alternate until
nothing improves.  Every accepted move strictly increases Q; passing an
``audit`` list records each move with enough state to recompute both sides.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import count

import numpy as np

from .graph import InteractionGraph
from .types import SpanexError


class UndefinedModularityError(SpanexError):
    """Modularity needs at least one edge (m > 0)."""


@dataclass(frozen=True)
class Partition:
    """Community assignment per node, compacted to 0..k-1 in first-use order."""

    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(int(c) for c in self.assignment))

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment))

    def communities(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for node, comm in enumerate(self.assignment):
            out.setdefault(comm, []).append(node)
        return out

    @staticmethod
    def compact(assignment: list[int] | tuple[int, ...]) -> "Partition":
        relabel: dict[int, int] = {}
        out = []
        for c in assignment:
            if c not in relabel:
                relabel[c] = len(relabel)
            out.append(relabel[c])
        return Partition(assignment=tuple(out))

    @staticmethod
    def singletons(n: int) -> "Partition":
        return Partition(assignment=tuple(range(n)))


def _as_adjacency(graph: InteractionGraph | np.ndarray) -> np.ndarray:
    if isinstance(graph, InteractionGraph):
        return graph.adjacency()
    adj = np.asarray(graph, dtype=float)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise UndefinedModularityError(f"adjacency must be square, got {adj.shape}")
    return adj


def directed_modularity(
    graph: InteractionGraph | np.ndarray, partition: Partition | list[int] | tuple[int, ...]
) -> float:
    adj = _as_adjacency(graph)
    m = adj.sum()
    if m <= 0:
        raise UndefinedModularityError("graph has no edges; modularity is undefined")
    comm = np.asarray(
        partition.assignment if isinstance(partition, Partition) else partition, dtype=int
    )
    if comm.shape != (adj.shape[0],):
        raise UndefinedModularityError(
            f"partition length {comm.shape} does not match {adj.shape[0]} nodes"
        )
    kout = adj.sum(axis=1)
    kin = adj.sum(axis=0)
    delta = comm[:, None] == comm[None, :]
    return float(((adj - np.outer(kout, kin) / m) * delta).sum() / m)


@dataclass
class ModularityState:
    """Running degree bookkeeping for the local-move phase.

    Per node: weighted out/in degree.  Per community: the summed degrees of
    its members (sigma_out, sigma_in).  Kept incrementally; ``check`` verifies
    the sums against a full recount.
    """

    m: float
    kout: np.ndarray  # (n,) weighted out-degrees
    kin: np.ndarray  # (n,) weighted in-degrees
    sigma_out: np.ndarray  # per-community sum of member kout
    sigma_in: np.ndarray  # per-community sum of member kin

    @staticmethod
    def from_adjacency(adj: np.ndarray) -> "ModularityState":
        m = float(adj.sum())
        if m <= 0:
            raise UndefinedModularityError("graph has no edges; modularity is undefined")
        kout = adj.sum(axis=1)
        kin = adj.sum(axis=0)
        # Communities start as singletons, so community sums start as degrees.
        return ModularityState(
            m=m, kout=kout, kin=kin, sigma_out=kout.copy(), sigma_in=kin.copy()
        )

    def detach(self, node: int, community: int) -> None:
        self.sigma_out[community] -= self.kout[node]
        self.sigma_in[community] -= self.kin[node]

    def insert(self, node: int, community: int) -> None:
        self.sigma_out[community] += self.kout[node]
        self.sigma_in[community] += self.kin[node]

    def insertion_gain(self, node: int, community: int, k_node_in: float) -> float:
        """Gain of placing a detached node into a community.

        ``k_node_in`` is the total edge weight between the node and the
        community, counted in both directions.
        """
        return k_node_in / self.m - (
            self.kout[node] * self.sigma_in[community]
            + self.kin[node] * self.sigma_out[community]
        ) / (self.m * self.m)

    def check(self, assignment: list[int]) -> None:
        """Assert community sums equal a from-scratch recount (test hook)."""
        n = len(assignment)
        out = np.zeros_like(self.sigma_out)
        inn = np.zeros_like(self.sigma_in)
        for i in range(n):
            out[assignment[i]] += self.kout[i]
            inn[assignment[i]] += self.kin[i]
        if not (np.allclose(out, self.sigma_out) and np.allclose(inn, self.sigma_in)):
            raise UndefinedModularityError("modularity state out of sync with assignment")


@dataclass(frozen=True)
class MoveRecord:
    """One accepted local move, with the level graph it happened on."""

    level: int
    node: int
    source: int
    target: int
    gain: float  # predicted net modularity change
    adjacency: np.ndarray  # the level's graph (shared reference, do not mutate)
    before: tuple[int, ...]  # level-graph assignment before the move
    after: tuple[int, ...]


# Accept a move only when it beats staying home by more than this; guards the
# strict-increase invariant against float noise on near-ties.
_GAIN_EPS = 1e-12


def _local_moves(
    adj: np.ndarray,
    rng: random.Random,
    level: int,
    audit: list[MoveRecord] | None,
) -> tuple[list[int], bool]:
    """One phase of node relocations; returns (assignment, any_move_made)."""
    n = adj.shape[0]
    state = ModularityState.from_adjacency(adj)
    comm = list(range(n))
    # Neighbors in either direction, excluding self-loops (a node's self-loop
    # follows it everywhere and cancels out of every gain comparison).
    neighbors: list[list[int]] = [
        [j for j in range(n) if j != i and (adj[i, j] > 0 or adj[j, i] > 0)] for i in range(n)
    ]
    moved_any = False
    improved = True
    while improved:
        improved = False
        order = list(range(n))
        rng.shuffle(order)
        for i in order:
            home = comm[i]
            # Detach i: gains are insertion gains for an isolated node.
            state.detach(i, home)
            k_i_in: dict[int, float] = {home: 0.0}
            for j in neighbors[i]:
                c = comm[j]
                k_i_in[c] = k_i_in.get(c, 0.0) + adj[i, j] + adj[j, i]

            home_gain = state.insertion_gain(i, home, k_i_in[home])
            best_comm, best_gain = home, home_gain
            # Sorted iteration + strict improvement = lowest community id on ties.
            for c in sorted(k_i_in):
                if c == home:
                    continue
                g = state.insertion_gain(i, c, k_i_in[c])
                if g > best_gain + _GAIN_EPS:
                    best_comm, best_gain = c, g
            if best_comm != home and best_gain - home_gain > _GAIN_EPS:
                before = tuple(comm) if audit is not None else ()
                comm[i] = best_comm
                state.insert(i, best_comm)
                moved_any = improved = True
                if audit is not None:
                    audit.append(
                        MoveRecord(
                            level=level,
                            node=i,
                            source=home,
                            target=best_comm,
                            gain=best_gain - home_gain,
                            adjacency=adj,
                            before=before,
                            after=tuple(comm),
                        )
                    )
            else:
                comm[i] = home
                state.insert(i, home)
    return comm, moved_any


def _aggregate(adj: np.ndarray, comm: list[int]) -> tuple[np.ndarray, list[int]]:
    """Collapse communities to super-nodes; returns (new_adj, node->super map)."""
    relabel: dict[int, int] = {}
    mapping = []
    for c in comm:
        if c not in relabel:
            relabel[c] = len(relabel)
        mapping.append(relabel[c])
    k = len(relabel)
    new_adj = np.zeros((k, k))
    n = adj.shape[0]
    for i in range(n):
        for j in range(n):
            if adj[i, j] != 0:
                new_adj[mapping[i], mapping[j]] += adj[i, j]
    return new_adj, mapping


def _louvain_once(
    adj: np.ndarray,
    seed: int,
    audit: list[MoveRecord] | None,
) -> Partition:
    """One greedy Louvain run; ``seed`` fixes the node visit order."""
    rng = random.Random(seed)
    n = adj.shape[0]
    node_map = list(range(n))  # original node -> current super-node
    level_adj = adj.copy()
    for level in count():
        comm, moved = _local_moves(level_adj, rng, level, audit)
        if not moved:
            break
        # comm labels double as old-node ids; _aggregate compacts them and
        # returns, per old level-node, the super-node it landed in.
        level_adj, mapping = _aggregate(level_adj, comm)
        node_map = [mapping[s] for s in node_map]
    return Partition.compact(node_map)


def louvain(
    graph: InteractionGraph | np.ndarray,
    seed: int = 0,
    audit: list[MoveRecord] | None = None,
    restarts: int = 8,
) -> Partition:
    """Louvain partition of a directed weighted graph.

    The greedy phase depends on node visit order, so the driver runs
    ``restarts`` independent passes (visit orders seeded ``seed`` through
    ``seed + restarts - 1``) and returns the highest-modularity result; exact
    ties keep the earliest pass, so the outcome is deterministic in ``seed``.
    ``audit``, when given, receives the winning pass's move records only.
    Graphs with no edges raise :class:`UndefinedModularityError` (modularity
    cannot rank their partitions).
    """
    adj = _as_adjacency(graph)
    if adj.sum() <= 0:
        raise UndefinedModularityError("graph has no edges; Louvain needs m > 0")
    if restarts < 1:
        raise UndefinedModularityError(f"need at least one restart, got {restarts}")
    best: Partition | None = None
    best_q = -math.inf
    best_audit: list[MoveRecord] = []
    for r in range(restarts):
        trial_audit: list[MoveRecord] = []
        part = _louvain_once(adj, seed + r, trial_audit if audit is not None else None)
        q = directed_modularity(adj, part)
        if q > best_q:
            best, best_q, best_audit = part, q, trial_audit
    if audit is not None:
        audit.extend(best_audit)
    assert best is not None
    return best
