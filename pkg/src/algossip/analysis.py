"""Worst-case bound formulas, the knowledge-of-mu test and the hindsight routing oracle."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .field import dot
from .graph import Topology


def log2_ceil(n: int) -> int:
    return math.ceil(math.log2(n))


def bound_thm1(g: Topology, k: int, c: int = 16) -> int:
    """c * Δ * (D + k + ceil(log2 n))."""
    return c * g.max_degree * (g.diameter + k + log2_ceil(g.n))


def degree_path_cap(g: Topology) -> int:
    """min(3n, Δ D): caps the degree sum along any shortest path."""
    return min(3 * g.n, g.max_degree * g.diameter)


def bound_thm2(g: Topology, k: int, c: int = 16) -> int:
    """c * (min(3n, Δ D) + Δ (k + ceil(log2 n)))."""
    return c * (degree_path_cap(g) + g.max_degree * (k + log2_ceil(g.n)))


def bound_thm2_literal(g: Topology, k: int, c: int = 16) -> int:
    """Same with the theorem statement's min(n, Δ D) in place of min(3n, Δ D)."""
    return c * (min(g.n, g.max_degree * g.diameter) + g.max_degree * (k + log2_ceil(g.n)))


def bound_rr(g: Topology, k: int) -> int:
    """min(3n, Δ D) + Δ k, exact: round robin is deterministic."""
    return degree_path_cap(g) + g.max_degree * k


def bound_tree_forwarding(k: int, tree_diameter: int) -> int:
    """Rounds after the broadcast phase within which pipelined tree forwarding must finish."""
    return 2 * (k + tree_diameter) + 2


# -- knowledge of mu ---------------------------------------------------------

def knows_mu(state, mu: Sequence[int]) -> bool:
    """True iff some stored coefficient vector is non-perpendicular to ``mu``."""
    buf = getattr(state, "buffer", state)
    mu = np.asarray(mu, dtype=np.int64)
    if not mu.any():
        raise ValueError("mu must be nonzero")
    return any(dot(s, mu, buf.spec) != 0 for s in buf.coefficient_vectors())


# -- max flow ------------------------------------------------------------------

@dataclass
class FlowNetwork:
    num_nodes: int
    source: int
    arcs: list[tuple[int, int, int]] = field(default_factory=list)

    def add_arc(self, tail: int, head: int, cap: int):
        if cap <= 0:
            raise ValueError("arc capacities must be positive integers")
        self.arcs.append((tail, head, cap))


def max_flow(net: FlowNetwork, sink: int) -> int:
    """Dinic: BFS level graph, then blocking flow along shortest augmenting paths."""
    s = net.source
    if s == sink:
        raise ValueError("source and sink coincide")
    n = net.num_nodes
    head, cap, graph = [], [], [[] for _ in range(n)]
    for u, v, c in net.arcs:
        graph[u].append(len(head))
        head.append(v)
        cap.append(c)
        graph[v].append(len(head))
        head.append(u)
        cap.append(0)

    flow = 0
    while True:
        level = [-1] * n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in graph[u]:
                if cap[e] > 0 and level[head[e]] < 0:
                    level[head[e]] = level[u] + 1
                    q.append(head[e])
        if level[sink] < 0:
            return flow
        it = [0] * n
        while True:
            path_edges: list[int] = []
            u = s
            while u != sink:
                while it[u] < len(graph[u]):
                    e = graph[u][it[u]]
                    if cap[e] > 0 and level[head[e]] == level[u] + 1:
                        break
                    it[u] += 1
                else:
                    if u == s:
                        break
                    level[u] = -1  # dead end for this phase
                    e = path_edges.pop()
                    u = head[e ^ 1]
                    it[u] += 1
                    continue
                path_edges.append(e)
                u = head[e]
            if u != sink:
                break
            f = min(cap[e] for e in path_edges)
            for e in path_edges:
                cap[e] -= f
                cap[e ^ 1] += f
            flow += f


class TimeExpandedNetwork(FlowNetwork):
    """Copies (v, t) for t = 0..horizon; hold-over arcs of capacity k, one unit per transmission."""

    def __init__(self, n: int, horizon: int, k: int):
        super().__init__(num_nodes=n * (horizon + 1) + 1, source=n * (horizon + 1))
        self.n = n
        self.horizon = horizon
        self.k = k

    def node(self, v: int, t: int) -> int:
        return t * self.n + v

    @classmethod
    def from_trace(cls, trace, sources: Sequence[int], k: int, n: int, horizon: int | None = None):
        if horizon is None:
            horizon = len(trace)
        net = cls(n, horizon, k)
        for t in range(horizon):
            for v in range(n):
                net.add_arc(net.node(v, t), net.node(v, t + 1), k)
        units: dict[tuple[int, int, int], int] = {}
        for rnd in trace[:horizon]:
            for tx in rnd:
                key = (tx.sender, tx.receiver, tx.round)
                units[key] = units.get(key, 0) + 1
        for (a, b, t), c in units.items():
            net.add_arc(net.node(a, t - 1), net.node(b, t), c)
        per_origin: dict[int, int] = {}
        for origin in sources:
            per_origin[origin] = per_origin.get(origin, 0) + 1
        for origin, c in per_origin.items():
            net.add_arc(net.source, net.node(origin, 0), c)
        return net


def _node_count(trace, sources, v) -> int:
    ids = [v, *sources]
    for rnd in trace:
        for tx in rnd:
            ids.append(tx.sender)
            ids.append(tx.receiver)
    return max(ids) + 1


def hindsight_time(trace, sources: Sequence[int], k: int, v: int, n: int | None = None) -> int | None:
    """Earliest T at which all k messages could have been routed to ``v`` over the
    exchanges of rounds 1..T; ``None`` if the whole trace is not enough."""
    if n is None:
        n = _node_count(trace, sources, v)

    def feasible(horizon):
        net = TimeExpandedNetwork.from_trace(trace, sources, k, n, horizon)
        return max_flow(net, net.node(v, horizon)) >= k

    lo, hi = 0, len(trace)
    if not feasible(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def global_hindsight_time(trace, sources: Sequence[int], k: int, n: int) -> int | None:
    times = [hindsight_time(trace, sources, k, v, n) for v in range(n)]
    return None if any(t is None for t in times) else max(times)


# -- bound reports -------------------------------------------------------------

THEOREMS = {
    "ag": ("thm1", "thm2"),
    "rr": ("thm3",),
    "pug": ("thm4",),
    "tree": ("thm5",),
}


@dataclass
class BoundReport:
    graph: str
    n: int
    max_degree: int
    diameter: int
    protocol: str
    k: int
    theorem: str
    constant: int | None
    bounds: list[int]
    observed: list[int | None]

    @property
    def failures(self) -> int:
        return sum(o is None or o > b for o, b in zip(self.observed, self.bounds))

    @property
    def passed(self) -> bool:
        return self.failures == 0

    @property
    def bound(self) -> int:
        return max(self.bounds)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(bound=self.bound, failures=self.failures, passed=self.passed)
        return d


def theorem_bound(theorem: str, g: Topology, k: int, c: int = 16, tree_diameter: int | None = None) -> int:
    if theorem == "thm1":
        return bound_thm1(g, k, c)
    if theorem in ("thm2", "thm4"):
        return bound_thm2(g, k, c)
    if theorem == "thm3":
        return bound_rr(g, k)
    if theorem == "thm5":
        return bound_tree_forwarding(k, tree_diameter)
    raise ValueError(f"unknown theorem {theorem!r}")


def check_bounds(results, g: Topology, k: int, protocol: str, c: int = 16, theorem: str | None = None) -> BoundReport:
    """Compare observed completion rounds to the protocol's bound.

    Round robin is held to its exact bound; the tree protocol is judged on the
    rounds after its broadcast phase against 2(k + D') + 2.
    """
    if protocol not in THEOREMS:
        raise ValueError(f"unknown protocol {protocol!r}")
    theorem = theorem or THEOREMS[protocol][0]
    if theorem not in THEOREMS[protocol]:
        raise ValueError(f"{theorem} does not bound protocol {protocol}")
    bounds, observed = [], []
    for r in results:
        if r.protocol != protocol:
            raise ValueError(f"result from {r.protocol} run checked against {protocol}")
        if theorem == "thm5":
            bounds.append(bound_tree_forwarding(k, r.tree_diameter) if r.tree_diameter is not None else 0)
            observed.append(r.forwarding_rounds)
        else:
            bounds.append(theorem_bound(theorem, g, k, c))
            observed.append(r.rounds)
    return BoundReport(
        graph=g.name, n=g.n, max_degree=g.max_degree, diameter=g.diameter,
        protocol=protocol, k=k, theorem=theorem,
        constant=c if theorem in ("thm1", "thm2", "thm4") else None,
        bounds=bounds, observed=observed,
    )
