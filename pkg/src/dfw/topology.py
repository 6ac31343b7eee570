"""Time-varying communication topologies.

Graph snapshots are immutable values. Sequences are driven by
:func:`next_graph`, which enforces per-round connectivity by rejection
resampling (random graphs) or swap retry (edge swap) when the sequence
spec asks for it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterator, Optional

import numpy as np

from .errors import DegenerateTopologyError

REJECTION_BUDGET = 10_000

SEQUENCE_KINDS = ("static", "erdos_renyi_per_round", "edge_swap")


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph on nodes ``0..n_nodes-1``.

    Edges are stored as a frozenset of ``(i, j)`` pairs normalized to
    ``i < j``; self-loops and out-of-range indices are rejected.
    """

    n_nodes: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError("graph needs at least one node")
        normalized = set()
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError(f"edge ({i}, {j}) out of range for {self.n_nodes} nodes")
            normalized.add((int(i), int(j)) if i < j else (int(j), int(i)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def max_edges(self) -> int:
        return self.n_nodes * (self.n_nodes - 1) // 2

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean adjacency matrix (symmetric, zero diagonal)."""
        a = np.zeros((self.n_nodes, self.n_nodes), dtype=bool)
        if self.edges:
            ij = np.array(sorted(self.edges))
            a[ij[:, 0], ij[:, 1]] = True
            a[ij[:, 1], ij[:, 0]] = True
        return a

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def to_edgelist(self) -> str:
        """Debug-dump format: a ``n <n_nodes>`` header then ``i j`` lines."""
        lines = [f"n {self.n_nodes}"]
        lines.extend(f"{i} {j}" for i, j in sorted(self.edges))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_edgelist(text: str) -> "Graph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("n "):
            raise ValueError("edge list must start with a 'n <n_nodes>' header")
        n = int(lines[0].split()[1])
        edges = set()
        for ln in lines[1:]:
            i, j = ln.split()
            edges.add((int(i), int(j)))
        return Graph(n, frozenset(edges))


def path_graph(n: int) -> Graph:
    """Path 0-1-...-(n-1)."""
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset(combinations(range(n), 2)))


def empty_graph(n: int) -> Graph:
    return Graph(n, frozenset())


def gen_erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Sample G(n, p): each of the n(n-1)/2 candidate edges kept with probability p."""
    if n < 2:
        raise ValueError("random graph needs at least two nodes")
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must be in [0, 1]")
    pairs = list(combinations(range(n), 2))
    draws = rng.random(len(pairs))
    return Graph(n, frozenset(pair for pair, u in zip(pairs, draws) if u < p))


def is_connected(g: Graph) -> bool:
    """True iff every node is reachable from node 0."""
    if g.n_nodes == 1:
        return True
    adj = g.adjacency
    reached = np.zeros(g.n_nodes, dtype=bool)
    reached[0] = True
    frontier = reached.copy()
    while True:
        new = adj[frontier].any(axis=0) & ~reached
        if not new.any():
            break
        reached |= new
        frontier = new
    return bool(reached.all())


def edge_swap_step(
    g: Graph,
    swaps: int,
    rng: np.random.Generator,
    require_connected: bool = False,
) -> Graph:
    """Apply ``swaps`` edge swaps, each removing one random present edge and
    adding one random edge absent from the pre-swap graph.

    The edge count is conserved. With ``require_connected`` each swap is
    resampled until the result is connected, up to ``REJECTION_BUDGET``
    retries.
    """
    if swaps < 0:
        raise ValueError("swap count must be nonnegative")
    if swaps == 0:
        return g
    if g.n_edges == 0 or g.n_edges == g.max_edges:
        raise ValueError("edge swap needs at least one present and one absent edge")
    current = set(g.edges)
    all_pairs = set(combinations(range(g.n_nodes), 2))
    for _ in range(swaps):
        present = sorted(current)
        absent = sorted(all_pairs - current)
        for _attempt in range(REJECTION_BUDGET):
            removed = present[rng.integers(len(present))]
            added = absent[rng.integers(len(absent))]
            candidate = current - {removed} | {added}
            if not require_connected or _edges_connected(g.n_nodes, candidate):
                current = candidate
                break
        else:
            raise DegenerateTopologyError(
                f"no connected swap found within {REJECTION_BUDGET} retries"
            )
    return Graph(g.n_nodes, frozenset(current))


def _edges_connected(n: int, edges: set[tuple[int, int]]) -> bool:
    return is_connected(Graph(n, frozenset(edges)))


@dataclass(frozen=True)
class GraphSequenceSpec:
    """Recipe for the graph sequence seen by a decentralized run.

    ``static`` keeps the round-0 graph forever, ``erdos_renyi_per_round``
    resamples G(n, p) each round, ``edge_swap`` perturbs the previous
    round's graph while conserving its edge count. ``initial_graph``
    overrides the round-0 draw for the static and edge-swap kinds.
    """

    kind: str
    n_nodes: int
    p: float = 0.5
    swaps_per_round: int = 1
    seed: int = 0
    require_connected: bool = True
    initial_graph: Optional[Graph] = None

    def __post_init__(self) -> None:
        if self.kind not in SEQUENCE_KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}; expected one of {SEQUENCE_KINDS}")
        if self.n_nodes < 1:
            raise ValueError("sequence needs at least one node")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("edge probability must be in [0, 1]")
        if self.kind == "erdos_renyi_per_round" and not self.p > 0.0:
            raise ValueError("per-round random graphs need p in (0, 1]")
        if self.swaps_per_round < 0:
            raise ValueError("swaps_per_round must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.initial_graph is not None and self.initial_graph.n_nodes != self.n_nodes:
            raise ValueError("initial graph node count does not match the spec")
        if (
            self.kind == "erdos_renyi_per_round"
            and self.require_connected
            and self.n_nodes >= 2
            and self.p <= math.log(self.n_nodes) / self.n_nodes
        ):
            warnings.warn(
                f"p={self.p} is below the almost-sure connectivity threshold "
                f"ln(n)/n={math.log(self.n_nodes) / self.n_nodes:.4f}; "
                "expect heavy rejection resampling",
                stacklevel=2,
            )


def _initial_graph(spec: GraphSequenceSpec, rng: np.random.Generator) -> Graph:
    if spec.initial_graph is not None:
        if spec.require_connected and not is_connected(spec.initial_graph):
            raise DegenerateTopologyError("initial graph is disconnected")
        return spec.initial_graph
    if spec.require_connected:
        return _connected_erdos_renyi(spec.n_nodes, spec.p, rng)
    return gen_erdos_renyi(spec.n_nodes, spec.p, rng)


def _connected_erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    for _ in range(REJECTION_BUDGET):
        g = gen_erdos_renyi(n, p, rng)
        if is_connected(g):
            return g
    raise DegenerateTopologyError(
        f"no connected G({n}, {p}) sample within {REJECTION_BUDGET} draws"
    )


def next_graph(
    spec: GraphSequenceSpec,
    t: int,
    prev: Optional[Graph],
    rng: np.random.Generator,
) -> Graph:
    """Produce the round-``t`` graph of the sequence.

    Pass the previously returned graph as ``prev``; the static kind then
    repeats it without consuming randomness, and the edge-swap kind
    perturbs it. A complete or empty previous graph admits no
    count-conserving swap and is returned unchanged.
    """
    if spec.kind == "static":
        if prev is not None:
            return prev
        return _initial_graph(spec, rng)
    if spec.kind == "erdos_renyi_per_round":
        if spec.require_connected:
            return _connected_erdos_renyi(spec.n_nodes, spec.p, rng)
        return gen_erdos_renyi(spec.n_nodes, spec.p, rng)
    # edge swap
    if prev is None:
        if t > 0:
            raise ValueError("edge-swap sequence needs the previous graph for t > 0")
        return _initial_graph(spec, rng)
    if prev.n_edges in (0, prev.max_edges):
        return prev
    return edge_swap_step(
        prev, spec.swaps_per_round, rng, require_connected=spec.require_connected
    )


def graph_sequence(spec: GraphSequenceSpec, rng: np.random.Generator) -> Iterator[Graph]:
    """Infinite iterator over the sequence described by ``spec``."""
    prev: Optional[Graph] = None
    t = 0
    while True:
        g = next_graph(spec, t, prev, rng)
        yield g
        prev = g
        t += 1
