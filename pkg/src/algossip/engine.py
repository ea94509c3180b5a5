"""Synchronous round loop shared by all protocols.

Round t: every node picks (target, packet) from what it knew after round t-1, each
contacted node answers every initiator, then all packets are delivered at once.
Anything received in round t is usable from round t+1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .analysis import bound_thm1
from .field import GF2, CodingBuffer, FieldSpec, unit_vector
from .graph import Topology
from .protocols import (
    AlgebraicGossipNode,
    RoutingNode,
    TreeNode,
    build_parents,
)

PROTOCOLS = ("ag", "rr", "pug", "tree")


class ConfigError(ValueError):
    pass


def eccentric_node(g: Topology) -> int:
    """Smallest-id node of maximum eccentricity."""
    ecc = [g.eccentricity(u) for u in range(g.n)]
    return ecc.index(max(ecc))


def sources_at(node: int, k: int) -> tuple[int, ...]:
    return (node,) * k


def sources_spread(n: int, k: int) -> tuple[int, ...]:
    """Message j starts at node floor((j-1) n / k): evenly spaced over the id range."""
    return tuple((j * n) // k for j in range(k))


@dataclass
class RunConfig:
    protocol: str
    topology: Topology
    k: int
    sources: Sequence[int] | Mapping[int, int]
    field: FieldSpec = GF2
    payload_size: int = 16
    seed: int = 0
    max_rounds: int | None = None
    record_trace: bool = False

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}; choose from {PROTOCOLS}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if isinstance(self.sources, Mapping):
            if sorted(self.sources) != list(range(1, self.k + 1)):
                raise ConfigError("sources must map exactly the message ids 1..k")
            self.sources = tuple(self.sources[j] for j in range(1, self.k + 1))
        self.sources = tuple(self.sources)
        if len(self.sources) != self.k:
            raise ConfigError(f"{len(self.sources)} sources given for k={self.k}")
        if any(not 0 <= s < self.topology.n for s in self.sources):
            raise ConfigError("source node out of range")
        if self.payload_size < 0:
            raise ConfigError("payload size must be >= 0")
        if self.field.m == 16 and self.payload_size % 2:
            raise ConfigError("GF(2^16) needs an even payload size")
        if self.max_rounds is None:
            self.max_rounds = 4 * bound_thm1(self.topology, self.k)
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be >= 1")


@dataclass(frozen=True)
class Transmission:
    round: int
    sender: int
    receiver: int
    initiated: bool
    packet: str


@dataclass
class RunResult:
    protocol: str
    completion_rounds: list[int | None]
    rounds_executed: int
    trace: list[list[Transmission]] | None = None
    broadcast_rounds: int | None = None
    parents: dict[int, int | None] | None = None
    tree_diameter: int | None = None
    states: list | None = field(default=None, repr=False, compare=False)

    @property
    def completed(self) -> bool:
        return all(r is not None for r in self.completion_rounds)

    @property
    def rounds(self) -> int | None:
        """Global completion round, or None if max_rounds ran out first."""
        return max(self.completion_rounds) if self.completed else None

    @property
    def forwarding_rounds(self) -> int | None:
        if self.broadcast_rounds is None or not self.completed:
            return None
        return max(0, self.rounds - self.broadcast_rounds)


def make_payloads(k: int, size: int, seed: int) -> list[bytes]:
    rng = random.Random(f"payload:{seed}")
    return [rng.randbytes(size) for _ in range(k)]


def make_states(cfg: RunConfig, payloads: Sequence[bytes]) -> list:
    g = cfg.topology
    if cfg.protocol == "ag":
        states = [
            AlgebraicGossipNode(u, g.neighbors(u), CodingBuffer(cfg.field, cfg.k, cfg.payload_size))
            for u in range(g.n)
        ]
        for j, origin in enumerate(cfg.sources, start=1):
            states[origin].buffer.add(unit_vector(cfg.k, j), payloads[j - 1])
        return states
    if cfg.protocol == "tree":
        states = [TreeNode(u, g.neighbors(u)) for u in range(g.n)]
    else:
        states = [RoutingNode(u, g.neighbors(u), uniform=cfg.protocol == "pug") for u in range(g.n)]
    for j, origin in enumerate(cfg.sources, start=1):
        states[origin].hold(j, payloads[j - 1])
    return states


def play_round(states, t: int, rng: random.Random) -> list[Transmission]:
    """One synchronous round; returns the directed transmissions in delivery order."""
    exchanges = []
    for s in states:
        target, pkt = s.initiate(t, rng)
        if target is not None:
            exchanges.append((s.id, target, pkt))
    deliveries = []
    for u, v, pkt in exchanges:
        deliveries.append((u, v, True, pkt))
        deliveries.append((v, u, False, states[v].respond(u, t, rng)))
    for sender, receiver, _, pkt in deliveries:
        states[receiver].receive(pkt, sender, t)
    return [Transmission(t, s, r, init, p.summary()) for s, r, init, p in deliveries]


def completion_check(state, k: int) -> bool:
    return state.is_complete(k)


def _run_until(states, k, start, max_rounds, rng, trace, done, predicate):
    """Play rounds start+1.. until ``predicate`` holds for every node; returns last round."""
    t = start
    pending = [u for u in range(len(states)) if done[u] is None]
    while pending and t < start + max_rounds:
        t += 1
        sent = play_round(states, t, rng)
        if trace is not None:
            trace.append(sent)
        still = []
        for u in pending:
            if predicate(states[u]):
                done[u] = t
            else:
                still.append(u)
        pending = still
    return t


def run(cfg: RunConfig) -> RunResult:
    if cfg.protocol == "tree":
        return run_tree(cfg)
    rng = random.Random(cfg.seed)
    payloads = make_payloads(cfg.k, cfg.payload_size, cfg.seed)
    states = make_states(cfg, payloads)
    done: list[int | None] = [0 if s.is_complete(cfg.k) else None for s in states]
    trace = [] if cfg.record_trace else None
    t = _run_until(states, cfg.k, 0, cfg.max_rounds, rng, trace, done, lambda s: s.is_complete(cfg.k))
    return RunResult(cfg.protocol, done, t, trace=trace, states=states)


def run_tree(cfg: RunConfig) -> RunResult:
    """Min-id broadcast until everyone knows id 0, then forwarding along parent pointers.

    The broadcast phase ends when the simulator sees that every node has heard the
    minimum; phase two continues the round count from there.
    """
    if cfg.protocol != "tree":
        raise ConfigError("run_tree needs protocol 'tree'")
    g = cfg.topology
    rng = random.Random(cfg.seed)
    payloads = make_payloads(cfg.k, cfg.payload_size, cfg.seed)
    states = make_states(cfg, payloads)
    trace = [] if cfg.record_trace else None
    heard: list[int | None] = [0 if s.min_seen == 0 else None for s in states]
    b = _run_until(states, cfg.k, 0, cfg.max_rounds, rng, trace, heard, lambda s: s.min_seen == 0)
    done: list[int | None] = [None] * g.n
    if any(h is None for h in heard):
        return RunResult("tree", done, b, trace=trace, broadcast_rounds=None, states=states)

    parents = build_parents(states, 0)
    for s in states:
        s.start_forwarding(parents[s.id])
    tree = Topology.from_edges(g.n, [(v, p) for v, p in parents.items() if p is not None], name="tree")
    done = [0 if s.is_complete(cfg.k) else None for s in states]
    t = _run_until(states, cfg.k, b, cfg.max_rounds, rng, trace, done, lambda s: s.is_complete(cfg.k))
    return RunResult(
        "tree", done, t, trace=trace, broadcast_rounds=b, parents=parents,
        tree_diameter=tree.diameter, states=states,
    )
