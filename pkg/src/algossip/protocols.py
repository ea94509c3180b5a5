"""Per-node state machines for the four dissemination protocols.

Every node exposes the same three hooks used by the engine:

* ``initiate(round, rng) -> (target, packet)``: whom to contact and what to send;
  target ``None`` means the node stays silent this round.
* ``respond(partner, round, rng) -> packet``: the return half of an exchange.
* ``receive(packet, sender, round)``: called after all sends of the round.

A send only touches the sender's own bookkeeping (send counters, sent flags), never
what it knows, so all packets of a round are computed against start-of-round
knowledge.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass

from .field import CodedPacket, CodingBuffer


class ProtocolError(RuntimeError):
    """A node received a packet variant its protocol never produces."""


class PhaseIncomplete(RuntimeError):
    """Parent pointers were requested before every node heard the minimum id."""


@dataclass(frozen=True)
class Plain:
    message_id: int
    payload: bytes = b""

    def summary(self) -> str:
        return f"m{self.message_id}"


@dataclass(frozen=True)
class IdPacket:
    """Broadcast-phase packet of the tree protocol: the smallest node id seen so far."""

    node_id: int

    def summary(self) -> str:
        return f"id{self.node_id}"


class _Empty:
    __slots__ = ()

    def summary(self) -> str:
        return "-"

    def __repr__(self):
        return "EMPTY"


EMPTY = _Empty()


class AlgebraicGossipNode:
    """Uniform algebraic gossip: random neighbour, random combination of everything held."""

    protocol = "ag"

    def __init__(self, node_id: int, neighbors, buffer: CodingBuffer):
        self.id = node_id
        self.neighbors = tuple(sorted(neighbors))
        self.buffer = buffer

    def initiate(self, round: int, rng: random.Random):
        target = self.neighbors[rng.randrange(len(self.neighbors))]
        return target, self.buffer.random_packet(rng)

    def respond(self, partner: int, round: int, rng: random.Random):
        return self.buffer.random_packet(rng)

    def receive(self, packet, sender: int, round: int):
        if not isinstance(packet, CodedPacket):
            raise ProtocolError(f"algebraic gossip node got {packet!r}")
        self.buffer.add_packet(packet)

    def is_complete(self, k: int) -> bool:
        return self.buffer.rank == k


class RoutingNode:
    """Prioritized routing without coding.

    Sends the smallest-id message that has gone out fewer than deg(u) times and has
    not yet been sent to this partner. With ``uniform=False`` the target walks the
    sorted neighbour list cyclically (round robin); otherwise it is uniform random.
    """

    def __init__(self, node_id: int, neighbors, uniform: bool = False):
        self.id = node_id
        self.neighbors = tuple(sorted(neighbors))
        self.uniform = uniform
        self.held: list[int] = []
        self.payloads: dict[int, bytes] = {}
        self.send_count: dict[int, int] = {}
        self.sent_to: dict[int, set[int]] = {}

    @property
    def protocol(self) -> str:
        return "pug" if self.uniform else "rr"

    def hold(self, message_id: int, payload: bytes = b""):
        if message_id not in self.payloads:
            bisect.insort(self.held, message_id)
            self.payloads[message_id] = payload
            self.send_count[message_id] = 0
            self.sent_to[message_id] = set()

    def next_packet(self, target: int):
        budget = len(self.neighbors)
        for m in self.held:
            if self.send_count[m] < budget and target not in self.sent_to[m]:
                self.send_count[m] += 1
                self.sent_to[m].add(target)
                return Plain(m, self.payloads[m])
        return EMPTY

    def round_robin_target(self, round: int) -> int:
        return self.neighbors[round % len(self.neighbors)]

    def initiate(self, round: int, rng: random.Random | None = None):
        if self.uniform:
            target = self.neighbors[rng.randrange(len(self.neighbors))]
        else:
            target = self.round_robin_target(round)
        return target, self.next_packet(target)

    def respond(self, partner: int, round: int, rng: random.Random | None = None):
        return self.next_packet(partner)

    def receive(self, packet, sender: int, round: int):
        if packet is EMPTY:
            return
        if not isinstance(packet, Plain):
            raise ProtocolError(f"routing node got {packet!r}")
        self.hold(packet.message_id, packet.payload)

    def is_complete(self, k: int) -> bool:
        return len(self.held) == k


BROADCASTING = "broadcasting"
FORWARDING = "forwarding"


class TreeNode:
    """Min-id broadcast to pick a parent, then pipelined forwarding along the tree."""

    protocol = "tree"

    def __init__(self, node_id: int, neighbors):
        self.id = node_id
        self.neighbors = tuple(sorted(neighbors))
        self.phase = BROADCASTING
        self.min_seen = node_id
        # id -> (first round heard, sender); own id known from the start
        self.first_heard: dict[int, tuple[int, int | None]] = {node_id: (0, None)}
        self.parent: int | None = None
        self.held: list[int] = []
        self.payloads: dict[int, bytes] = {}
        self.sent_to: dict[int, set[int]] = {}

    def hold(self, message_id: int, payload: bytes = b""):
        if message_id not in self.payloads:
            bisect.insort(self.held, message_id)
            self.payloads[message_id] = payload

    def start_forwarding(self, parent: int | None):
        self.phase = FORWARDING
        self.parent = parent

    def next_packet(self, partner: int):
        sent = self.sent_to.setdefault(partner, set())
        for m in self.held:
            if m not in sent:
                sent.add(m)
                return Plain(m, self.payloads[m])
        return EMPTY

    def initiate(self, round: int, rng: random.Random):
        if self.phase == BROADCASTING:
            target = self.neighbors[rng.randrange(len(self.neighbors))]
            return target, IdPacket(self.min_seen)
        if self.parent is None:
            return None, EMPTY
        return self.parent, self.next_packet(self.parent)

    def respond(self, partner: int, round: int, rng: random.Random | None = None):
        if self.phase == BROADCASTING:
            return IdPacket(self.min_seen)
        return self.next_packet(partner)

    def receive(self, packet, sender: int, round: int):
        if packet is EMPTY:
            return
        if self.phase == BROADCASTING:
            if not isinstance(packet, IdPacket):
                raise ProtocolError(f"broadcasting tree node got {packet!r}")
            i = packet.node_id
            prev = self.first_heard.get(i)
            # same-round ties go to the smaller sender id
            if prev is None or (prev[0] == round and prev[1] is not None and sender < prev[1]):
                self.first_heard[i] = (round, sender)
            self.min_seen = min(self.min_seen, i)
            return
        if not isinstance(packet, Plain):
            raise ProtocolError(f"forwarding tree node got {packet!r}")
        self.hold(packet.message_id, packet.payload)

    def is_complete(self, k: int) -> bool:
        return len(self.held) == k


# -- functional entry points ---------------------------------------------------

def ag_step(state: AlgebraicGossipNode, rng: random.Random):
    return state.initiate(0, rng)


def rr_step(state: RoutingNode, round: int):
    return state.initiate(round)


def pug_step(state: RoutingNode, rng: random.Random):
    return state.initiate(0, rng)


def tree_step(state: TreeNode, round: int, rng: random.Random):
    return state.initiate(round, rng)


def on_receive(state, packet, sender: int, round: int):
    state.receive(packet, sender, round)
    return state


def build_parents(states, global_min_id: int) -> dict[int, int | None]:
    """Parent of v is whoever first told v the global minimum id; its owner is the root."""
    parents: dict[int, int | None] = {}
    for s in states:
        if s.id == global_min_id:
            parents[s.id] = None
            continue
        heard = s.first_heard.get(global_min_id)
        if heard is None:
            raise PhaseIncomplete(f"node {s.id} never heard id {global_min_id}")
        parents[s.id] = heard[1]
    return parents
