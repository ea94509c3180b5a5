"""Undirected connected topologies, their generators and the metrics used by the bounds."""

from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable


class GraphError(ValueError):
    """Invalid topology parameters or input."""


class GenerationError(RuntimeError):
    """A random generator could not produce a connected graph."""


def bfs_distances(adj, src: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


@dataclass(frozen=True, eq=False)
class Topology:
    """Simple connected undirected graph on nodes ``0..n-1`` with sorted adjacency lists."""

    adjacency: tuple[tuple[int, ...], ...]
    name: str = field(default="graph", compare=False)

    def __post_init__(self):
        adj = tuple(tuple(sorted(nbrs)) for nbrs in self.adjacency)
        object.__setattr__(self, "adjacency", adj)
        n = len(adj)
        if n < 2:
            raise GraphError("need at least 2 nodes")
        for u, nbrs in enumerate(adj):
            if len(set(nbrs)) != len(nbrs):
                raise GraphError(f"duplicate edge at node {u}")
            for v in nbrs:
                if not 0 <= v < n:
                    raise GraphError(f"node {u} lists out-of-range neighbour {v}")
                if v == u:
                    raise GraphError(f"self-loop at node {u}")
                if u not in adj[v]:
                    raise GraphError(f"asymmetric adjacency: {u}->{v} without {v}->{u}")
        if -1 in bfs_distances(adj, 0):
            raise GraphError("graph is disconnected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "graph") -> "Topology":
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(tuple(tuple(s) for s in adj), name=name)

    def __eq__(self, other):
        return isinstance(other, Topology) and self.adjacency == other.adjacency

    def __hash__(self):
        return hash(self.adjacency)

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @cached_property
    def max_degree(self) -> int:
        return max(self.degrees)

    @cached_property
    def diameter(self) -> int:
        return diameter(self)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def eccentricity(self, u: int) -> int:
        return max(bfs_distances(self.adjacency, u))

    def hop_distances(self, u: int) -> list[int]:
        return bfs_distances(self.adjacency, u)

    def __repr__(self):
        return f"Topology({self.name}, n={self.n}, Δ={self.max_degree}, D={self.diameter})"


def diameter(g: Topology) -> int:
    """Exact diameter by BFS from every node."""
    return max(max(bfs_distances(g.adjacency, u)) for u in range(g.n))


def weighted_dist(g: Topology, u: int, v: int) -> int:
    """Minimum over u-v paths of the summed degrees of every path node except v.

    Node-weighted Dijkstra: stepping out of node w costs deg(w).
    """
    if u == v:
        return 0
    deg = g.degrees
    best = [None] * g.n
    best[u] = 0
    heap = [(0, u)]
    while heap:
        d, w = heapq.heappop(heap)
        if w == v:
            return d
        if d > best[w]:
            continue
        nd = d + deg[w]
        for x in g.adjacency[w]:
            if best[x] is None or nd < best[x]:
                best[x] = nd
                heapq.heappush(heap, (nd, x))
    raise GraphError(f"{v} unreachable from {u}")


# -- generators -------------------------------------------------------------

def path(n: int) -> Topology:
    return Topology.from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"path:{n}")


def cycle(n: int) -> Topology:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Topology.from_edges(n, [(i, (i + 1) % n) for i in range(n)], name=f"cycle:{n}")


def star(n: int) -> Topology:
    return Topology.from_edges(n, [(0, i) for i in range(1, n)], name=f"star:{n}")


def complete(n: int) -> Topology:
    return Topology.from_edges(
        n, [(i, j) for i in range(n) for j in range(i + 1, n)], name=f"complete:{n}"
    )


def binary_tree(n: int) -> Topology:
    """Heap-ordered binary tree on n nodes (complete when n = 2^h - 1)."""
    return Topology.from_edges(n, [((i - 1) // 2, i) for i in range(1, n)], name=f"binary_tree:{n}")


def grid2d(rows: int, cols: int) -> Topology:
    if rows * cols < 2:
        raise GraphError("grid needs at least 2 cells")
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges.append((u, u + 1))
            if r + 1 < rows:
                edges.append((u, u + cols))
    return Topology.from_edges(rows * cols, edges, name=f"grid2d:{rows}x{cols}")


def barbell(clique: int, bridge: int) -> Topology:
    """Two ``clique``-cliques joined through a path of ``bridge`` extra nodes."""
    if clique < 2 or bridge < 0:
        raise GraphError("barbell needs clique >= 2 and bridge >= 0")
    n = 2 * clique + bridge
    edges = [(i, j) for i in range(clique) for j in range(i + 1, clique)]
    off = clique + bridge
    edges += [(off + i, off + j) for i in range(clique) for j in range(i + 1, clique)]
    chain = [clique - 1] + list(range(clique, clique + bridge)) + [off]
    edges += list(zip(chain, chain[1:]))
    return Topology.from_edges(n, edges, name=f"barbell:{clique},{bridge}")


MAX_RETRIES = 100


def random_regular(n: int, d: int, seed: int) -> Topology:
    """Uniform-ish random d-regular graph (networkx pairing), resampled until connected."""
    import networkx as nx

    if n * d % 2 or d >= n or d < 1:
        raise GraphError(f"no simple {d}-regular graph on {n} nodes")
    for attempt in range(MAX_RETRIES):
        h = nx.random_regular_graph(d, n, seed=seed * MAX_RETRIES + attempt)
        if nx.is_connected(h):
            return Topology.from_edges(n, h.edges(), name=f"random_regular:{n},{d},{seed}")
    raise GenerationError(f"random_regular({n}, {d}) stayed disconnected after {MAX_RETRIES} tries")


def gnp(n: int, p: float, seed: int) -> Topology:
    if not 0 < p <= 1:
        raise GraphError("gnp needs 0 < p <= 1")
    rng = random.Random(seed)
    for _ in range(MAX_RETRIES):
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        try:
            return Topology.from_edges(n, edges, name=f"gnp:{n},{p},{seed}")
        except GraphError:
            continue
    raise GenerationError(f"gnp({n}, {p}) stayed disconnected after {MAX_RETRIES} tries")


FAMILIES = {
    "path": path,
    "cycle": cycle,
    "star": star,
    "complete": complete,
    "binary_tree": binary_tree,
    "grid2d": grid2d,
    "random_regular": random_regular,
    "gnp": gnp,
    "barbell": barbell,
}


def generate(family: str, *params, seed: int | None = None) -> Topology:
    """Build a topology by family name; random families take their seed last or via ``seed``."""
    try:
        fn = FAMILIES[family]
    except KeyError:
        raise GraphError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    if family in ("random_regular", "gnp") and seed is not None:
        params = (*params, seed)
    try:
        return fn(*params)
    except TypeError as e:
        raise GraphError(f"bad parameters for {family}: {e}") from None


def parse_graph(text: str) -> Topology:
    """``family:p1,p2`` (grid2d also takes ``RxC``) or ``file:PATH``."""
    family, _, params = text.partition(":")
    if family == "file":
        with open(params) as fh:
            return load_edge_list(fh.read(), name=params)
    raw = params.replace("x", ",").split(",") if params else []
    values = []
    for tok in raw:
        try:
            values.append(int(tok))
        except ValueError:
            try:
                values.append(float(tok))
            except ValueError:
                raise GraphError(f"bad graph parameter {tok!r} in {text!r}") from None
    return generate(family, *values)


# -- edge-list format ------------------------------------------------------

class EdgeListError(GraphError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def store_edge_list(g: Topology) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def load_edge_list(text: str, name: str = "file") -> Topology:
    lines = text.splitlines()
    if not lines:
        raise EdgeListError("empty input", 1)
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n" or not head[1].isdigit():
        raise EdgeListError(f"expected header 'n <count>', got {lines[0]!r}", 1)
    n = int(head[1])
    edges = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise EdgeListError(f"expected 'u v', got {line!r}", lineno)
        u, v = map(int, parts)
        if u >= n or v >= n:
            raise EdgeListError(f"node id out of range 0..{n - 1}", lineno)
        if u == v:
            raise EdgeListError(f"self-loop at node {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListError(f"duplicate edge {u} {v}", lineno)
        seen.add(key)
        edges.append((u, v))
    try:
        return Topology.from_edges(n, edges, name=name)
    except GraphError as e:
        raise EdgeListError(str(e), 1) from None
