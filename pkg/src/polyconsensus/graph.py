"""Sensor-network topologies: random geometric graphs and dynamic link models.

All randomness flows through an explicitly passed ``numpy.random.Generator``
(PCG64 via ``numpy.random.default_rng``). Nothing in this module touches the
global numpy RNG.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

__all__ = [
    "Graph",
    "IidFailure",
    "MarkovSwitch",
    "DynamicModel",
    "DisconnectedGraphError",
    "default_radius",
    "generate_rgg",
    "is_connected",
    "degrees",
    "sample_topology",
    "path_graph",
    "cycle_graph",
    "complete_graph",
    "MAX_RGG_ATTEMPTS",
    "topology_sequence",
]

MAX_RGG_ATTEMPTS = 100


class DisconnectedGraphError(RuntimeError):
    pass


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _normalize_edges(n: int, edges) -> np.ndarray:
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if np.any(arr < 0) or np.any(arr >= n):
        raise ValueError(f"edge endpoint outside [0, {n})")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise ValueError("self-loops are not allowed")
    arr = np.sort(arr, axis=1)
    # lexicographic order via the scalar key i * n + j
    key = np.unique(arr[:, 0] * n + arr[:, 1])
    if len(key) != len(arr):
        raise ValueError("duplicate edges are not allowed")
    return np.column_stack([key // n, key % n])


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on nodes ``0..n-1``.

    ``edges`` is an ``(m, 2)`` integer array with ``i < j`` in every row,
    sorted lexicographically. ``positions`` is ``(n, 2)`` for geometric
    graphs and ``None`` otherwise. Arrays are made read-only.
    """

    n: int
    edges: np.ndarray
    positions: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be non-negative")
        edges = _normalize_edges(self.n, self.edges)
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        if self.positions is not None:
            pos = np.array(self.positions, dtype=float)
            if pos.shape != (self.n, 2):
                raise ValueError(f"positions must have shape ({self.n}, 2)")
            pos.setflags(write=False)
            object.__setattr__(self, "positions", pos)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set:
        return {(int(i), int(j)) for i, j in self.edges}

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        if self.num_edges:
            i, j = self.edges[:, 0], self.edges[:, 1]
            A[i, j] = 1.0
            A[j, i] = 1.0
        return A

    def neighbors(self, i: int) -> list:
        out = [int(b) for a, b in self.edges if a == i]
        out += [int(a) for a, b in self.edges if b == i]
        return sorted(out)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        if self.n != other.n or not np.array_equal(self.edges, other.edges):
            return False
        if (self.positions is None) != (other.positions is None):
            return False
        return self.positions is None or np.array_equal(self.positions, other.positions)

    __hash__ = None

    def __repr__(self):
        geo = ", geometric" if self.positions is not None else ""
        return f"Graph(n={self.n}, edges={self.num_edges}{geo})"


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def default_radius(n: int) -> float:
    """Connectivity radius ``sqrt(ln n / n)``."""
    return math.sqrt(math.log(n) / n)


def _rgg_edges(positions: np.ndarray, radius: float) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=-1))
    i, j = np.nonzero(np.triu(dist < radius, k=1))
    return np.column_stack([i, j])


def generate_rgg(n: int, seed=None, radius: Optional[float] = None,
                 max_attempts: int = MAX_RGG_ATTEMPTS) -> Graph:
    """Draw a connected random geometric graph in the unit square.

    Nodes are placed uniformly; ``(i, j)`` is an edge iff their Euclidean
    distance is strictly below ``radius``. Disconnected draws are discarded
    and a fresh placement is drawn, up to ``max_attempts`` times.

    ``seed`` may be an int, ``None`` or a ``numpy.random.Generator`` (which
    is advanced in place).
    """
    if n < 2:
        raise ValueError("generate_rgg needs n >= 2")
    if radius is None:
        radius = default_radius(n)
    if radius <= 0:
        raise ValueError("radius must be positive")
    rng = _as_rng(seed)
    for _ in range(max_attempts):
        positions = rng.uniform(0.0, 1.0, size=(n, 2))
        g = Graph(n, _rgg_edges(positions, radius), positions)
        if is_connected(g):
            return g
    raise DisconnectedGraphError(
        f"no connected geometric graph with n={n}, radius={radius:.4g} "
        f"after {max_attempts} placements; increase the radius")


def is_connected(g: Graph) -> bool:
    """Breadth-first search from node 0 reaches every node (frontier-at-a-time)."""
    if g.n <= 1:
        return True
    A = g.adjacency().astype(bool)
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    frontier = seen.copy()
    while frontier.any():
        frontier = A[frontier].any(axis=0) & ~seen
        seen |= frontier
    return bool(seen.all())


def degrees(g: Graph) -> np.ndarray:
    d = np.zeros(g.n, dtype=np.int64)
    if g.num_edges:
        np.add.at(d, g.edges[:, 0], 1)
        np.add.at(d, g.edges[:, 1], 1)
    return d


# ---------------------------------------------------------------------------
# dynamic models
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IidFailure:
    """Each realizable edge (i, j) of ``base`` appears independently at every
    iteration with probability ``P[i, j]``."""

    base: Graph
    P: np.ndarray

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        n = self.base.n
        if P.shape != (n, n):
            raise ValueError(f"P must be {n}x{n}")
        if not np.allclose(P, P.T, atol=0, rtol=0):
            raise ValueError("P must be symmetric")
        if np.any(np.diag(P) != 0):
            raise ValueError("P must have a zero diagonal")
        if np.any(P < 0) or np.any(P > 1):
            raise ValueError("P entries must lie in [0, 1]")
        off = P * (1 - self.base.adjacency())
        if np.any(off != 0):
            raise ValueError("P must vanish off the realizable edge set")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    @classmethod
    def uniform(cls, base: Graph, p: float) -> "IidFailure":
        return cls(base, p * base.adjacency())

    def edge_probabilities(self) -> np.ndarray:
        e = self.base.edges
        return self.P[e[:, 0], e[:, 1]] if len(e) else np.zeros(0)


@dataclass(frozen=True)
class MarkovSwitch:
    """With probability ``q`` per iteration the whole topology is replaced by
    a freshly drawn geometric graph (new positions and edges); otherwise it is
    kept."""

    q: float
    n: int
    radius: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.n < 2:
            raise ValueError("n must be at least 2")

    def fresh(self, rng) -> Graph:
        return generate_rgg(self.n, rng, self.radius)


DynamicModel = Union[IidFailure, MarkovSwitch]


def sample_topology(model: DynamicModel, current: Optional[Graph], rng) -> Graph:
    """Draw the next topology of ``model``.

    ``current`` is ignored for :class:`IidFailure`; for :class:`MarkovSwitch`
    it is the previous iteration's graph (returned unchanged with probability
    ``1 - q``).
    """
    rng = _as_rng(rng)
    if isinstance(model, IidFailure):
        base = model.base
        keep = rng.random(base.num_edges) < model.edge_probabilities()
        return Graph(base.n, base.edges[keep], base.positions)
    if isinstance(model, MarkovSwitch):
        if current is None:
            return model.fresh(rng)
        # one uniform per step keeps the stream aligned for q in {0, 1}
        if rng.random() < model.q:
            return model.fresh(rng)
        return current
    raise TypeError(f"unknown dynamic model {type(model).__name__}")


def topology_sequence(model: DynamicModel, initial: Optional[Graph], rng,
                      steps: int) -> Iterable[Graph]:
    """Yield ``steps`` graphs G(0), G(1), ... of a dynamic model.

    For :class:`MarkovSwitch` the first graph is ``initial`` (or a fresh draw
    if ``None``); for :class:`IidFailure` every graph is an independent draw.
    """
    rng = _as_rng(rng)
    g = initial
    for t in range(steps):
        if isinstance(model, MarkovSwitch) and t == 0 and g is not None:
            yield g
            continue
        g = sample_topology(model, g, rng)
        yield g
