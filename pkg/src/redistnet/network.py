"""Interaction structures: homogeneous random graphs and scale-free networks.

Both generators produce an immutable, undirected, simple :class:`Network`.
Homogeneous random graphs start from a ring lattice of the requested degree
and are randomized by degree-preserving double-edge swaps; scale-free
networks grow from a triangle by preferential attachment.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .rng import as_generator

_HOMOGENEOUS_SWAPS_PER_EDGE = 10  # successful swaps; well past mixing at Z=1e3
_SWAP_ATTEMPT_FACTOR = 200  # proposal budget per edge before giving up
_MAX_REGENERATIONS = 100  # reseeds allowed when rewiring disconnects the graph


class EdgeListError(ValueError):
    """Malformed edge-list text; carries the offending 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class Network:
    """Undirected simple graph with per-node sorted adjacency lists.

    Instances are immutable after construction and safe to share between
    concurrently running replicates.
    """

    node_count: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int

    @classmethod
    def from_adjacency(cls, adjacency) -> "Network":
        """Build from any per-node iterable of neighbors, enforcing the
        undirected / no-self-loop / no-multi-edge invariants."""
        adj = tuple(tuple(sorted(neigh)) for neigh in adjacency)
        n = len(adj)
        degree_total = 0
        for i, neigh in enumerate(adj):
            if len(set(neigh)) != len(neigh):
                raise ValueError(f"node {i} has duplicate neighbors")
            for j in neigh:
                if j == i:
                    raise ValueError(f"node {i} has a self-loop")
                if not 0 <= j < n:
                    raise ValueError(f"node {i} lists out-of-range neighbor {j}")
                if i not in adj[j]:
                    raise ValueError(f"edge {i}-{j} is not symmetric")
            degree_total += len(neigh)
        return cls(node_count=n, adjacency=adj, edge_count=degree_total // 2)

    @classmethod
    def from_edges(cls, node_count: int, edges) -> "Network":
        neighbors: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in edges:
            neighbors[u].append(v)
            neighbors[v].append(u)
        return cls.from_adjacency(neighbors)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) arrays for the compiled kernel."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter(
            (j for neigh in self.adjacency for j in neigh),
            dtype=np.int64,
            count=2 * self.edge_count,
        )
        return indptr, indices

    @property
    def average_degree(self) -> float:
        return 2.0 * self.edge_count / self.node_count

    def edges(self) -> list[tuple[int, int]]:
        """Each undirected edge once, as (i, j) with i < j, sorted."""
        return [
            (i, j) for i, neigh in enumerate(self.adjacency) for j in neigh if i < j
        ]

    def is_connected(self) -> bool:
        if self.node_count == 0:
            return True
        seen = np.zeros(self.node_count, dtype=bool)
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    queue.append(v)
        return count == self.node_count


def _ring_lattice_edges(node_count: int, degree: int) -> set[tuple[int, int]]:
    """Circulant graph: offsets 1..degree//2 on each side, plus the
    antipodal node when the degree is odd (node_count is even then)."""
    edges: set[tuple[int, int]] = set()
    for i in range(node_count):
        for off in range(1, degree // 2 + 1):
            j = (i + off) % node_count
            edges.add((min(i, j), max(i, j)))
        if degree % 2 == 1:
            j = (i + node_count // 2) % node_count
            edges.add((min(i, j), max(i, j)))
    return edges


def generate_homogeneous(
    node_count: int, degree: int, rng: np.random.Generator | int | None = None
) -> Network:
    """Random regular graph: ring lattice randomized by double-edge swaps.

    Performs 10x edge-count successful swaps (rejecting any that would create
    a self-loop or multi-edge), then checks connectivity and starts over with
    fresh randomness if the graph fell apart.
    """
    if degree < 2:
        raise ValueError("degree must be >= 2")
    if node_count <= degree + 1:
        raise ValueError("node_count must exceed degree + 1")
    if (node_count * degree) % 2 != 0:
        raise ValueError("node_count * degree must be even")
    rng = as_generator(rng)

    for _ in range(_MAX_REGENERATIONS):
        edge_set = _ring_lattice_edges(node_count, degree)
        edge_list = list(edge_set)
        n_edges = len(edge_list)
        target_swaps = _HOMOGENEOUS_SWAPS_PER_EDGE * n_edges
        max_attempts = _SWAP_ATTEMPT_FACTOR * n_edges
        successes = 0
        attempts = 0
        while successes < target_swaps and attempts < max_attempts:
            attempts += 1
            i1 = int(rng.integers(n_edges))
            i2 = int(rng.integers(n_edges))
            if i1 == i2:
                continue
            a, b = edge_list[i1]
            c, d = edge_list[i2]
            if rng.integers(2):
                c, d = d, c
            # proposed rewiring: (a,b),(c,d) -> (a,d),(c,b)
            if len({a, b, c, d}) < 4:
                continue
            e1 = (min(a, d), max(a, d))
            e2 = (min(c, b), max(c, b))
            if e1 in edge_set or e2 in edge_set:
                continue
            edge_set.discard(edge_list[i1])
            edge_set.discard(edge_list[i2])
            edge_set.add(e1)
            edge_set.add(e2)
            edge_list[i1] = e1
            edge_list[i2] = e2
            successes += 1
        net = Network.from_edges(node_count, edge_list)
        if net.is_connected():
            return net
    raise RuntimeError(
        f"could not produce a connected {degree}-regular graph on "
        f"{node_count} nodes after {_MAX_REGENERATIONS} attempts"
    )


def generate_scale_free(
    node_count: int, m: int, rng: np.random.Generator | int | None = None
) -> Network:
    """Growth with preferential attachment, seeded by a triangle.

    Each new node attaches to min(m, nodes so far) distinct existing nodes,
    sampled proportional to current degree; degrees are only updated once the
    node's edges are all placed, so multi-edges cannot arise.
    """
    if node_count <= 3:
        raise ValueError("node_count must exceed the 3-node seed clique")
    if not 1 <= m < node_count:
        raise ValueError("m must satisfy 1 <= m < node_count")
    rng = as_generator(rng)

    neighbors: list[list[int]] = [[] for _ in range(node_count)]
    for u, v in ((0, 1), (0, 2), (1, 2)):
        neighbors[u].append(v)
        neighbors[v].append(u)
    # one entry per unit of degree; sampling an index uniformly is sampling
    # a node proportional to its degree
    degree_pool: list[int] = [0, 0, 1, 1, 2, 2]

    for new in range(3, node_count):
        k = min(m, new)
        chosen: set[int] = set()
        while len(chosen) < k:
            pick = degree_pool[int(rng.integers(len(degree_pool)))]
            chosen.add(pick)
        for target in chosen:
            neighbors[new].append(target)
            neighbors[target].append(new)
            degree_pool.append(target)
        degree_pool.extend([new] * k)

    return Network.from_adjacency(neighbors)


def ball(net: Network, i: int, d: int) -> set[int]:
    """All nodes at BFS distance 1..d from i (i itself excluded)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0 <= i < net.node_count:
        raise ValueError(f"node {i} out of range")
    dist = {i: 0}
    queue = deque([i])
    while queue:
        u = queue.popleft()
        if dist[u] == d:
            continue
        for v in net.adjacency[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    del dist[i]
    return set(dist)


def degree_distribution(net: Network) -> dict[int, float]:
    """Fraction of nodes with each degree; fractions sum to 1."""
    counts = Counter(len(a) for a in net.adjacency)
    return {z: c / net.node_count for z, c in sorted(counts.items())}


def load_edge_list(text: str, node_count: int | None = None) -> Network:
    """Parse "i j" lines (0-indexed, one undirected edge per line).

    When ``node_count`` is omitted it is inferred as max index + 1.
    """
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    max_index = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(lineno, f"expected two indices, got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(lineno, f"non-integer index in {raw!r}") from None
        if u < 0 or v < 0:
            raise EdgeListError(lineno, f"negative node index in {raw!r}")
        if node_count is not None and (u >= node_count or v >= node_count):
            raise EdgeListError(lineno, f"node index beyond {node_count - 1} in {raw!r}")
        if u == v:
            raise EdgeListError(lineno, f"self-loop at node {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListError(lineno, f"duplicate edge {key[0]}-{key[1]}")
        seen.add(key)
        edges.append(key)
        max_index = max(max_index, u, v)
    n = node_count if node_count is not None else max_index + 1
    return Network.from_edges(n, edges)


def save_edge_list(net: Network) -> str:
    """Canonical text form: sorted "i j" lines with i < j."""
    return "".join(f"{i} {j}\n" for i, j in net.edges())
