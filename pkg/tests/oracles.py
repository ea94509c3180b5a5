"""Brute-force reference implementations used only by the tests."""

import itertools

import numpy as np

from algossip.engine import Transmission
from algossip.field import field_mul, rank


def brute_min_cut(num_nodes, arcs, source, sink):
    others = [v for v in range(num_nodes) if v not in (source, sink)]
    best = None
    for r in range(len(others) + 1):
        for side in itertools.combinations(others, r):
            s_side = {source, *side}
            cut = sum(c for u, v, c in arcs if u in s_side and v not in s_side)
            best = cut if best is None else min(best, cut)
    return best


def random_dag(rng, num_nodes, max_arcs, max_cap):
    """Random DAG on nodes 0..num_nodes-1 (0 = source, last = sink)."""
    pairs = [(u, v) for u in range(num_nodes) for v in range(u + 1, num_nodes)]
    chosen = rng.sample(pairs, min(len(pairs), rng.randint(1, max_arcs)))
    return [(u, v, rng.randint(1, max_cap)) for u, v in chosen]


def random_trace(rng, g, rounds):
    """Each node initiates to a uniform neighbour with prob 1/2; exchanges are bidirectional."""
    trace = []
    for t in range(1, rounds + 1):
        rnd = []
        for u in range(g.n):
            if rng.random() < 0.5:
                v = rng.choice(g.neighbors(u))
                rnd.append(Transmission(t, u, v, True, "x"))
                rnd.append(Transmission(t, v, u, False, "x"))
        trace.append(rnd)
    return trace


def journeys(trace, origin, v, horizon):
    """All time-respecting transmission sequences from ``origin`` ending at ``v``."""
    out = []

    def walk(node, after, used):
        if node == v:
            out.append(frozenset(used))
            return
        for t in range(after + 1, horizon + 1):
            for i, tx in enumerate(trace[t - 1]):
                if tx.sender == node:
                    walk(tx.receiver, t, used + [(t, i)])

    walk(origin, 0, [])
    return out


def routable(trace, sources, v, horizon):
    """Can every message get its own journey to v with no transmission shared?"""
    options = [journeys(trace, o, v, horizon) for o in sources]

    def assign(i, used):
        if i == len(options):
            return True
        return any(not (j & used) and assign(i + 1, used | j) for j in options[i])

    return assign(0, frozenset())


def brute_hindsight(trace, sources, v):
    for horizon in range(len(trace) + 1):
        if routable(trace, sources, v, horizon):
            return horizon
    return None


# -- fields ----------------------------------------------------------------------

def mul_table(spec):
    q = spec.order
    return np.array([[field_mul(spec, a, b) for b in range(q)] for a in range(q)], dtype=np.int64)


def check_axioms(t):
    q = len(t)
    t = t.astype(np.uint8)
    idx = np.arange(q, dtype=np.uint8)
    assert np.array_equal(t, t.T)
    assert (t[1] == idx).all()
    # (ab)c == a(bc) for every triple
    assert np.array_equal(t[t][:, :, idx], t[idx][:, t])
    # a(b + c) == ab + ac for every triple
    xor = idx[:, None] ^ idx[None, :]
    assert np.array_equal(t[:, xor], t[:, :, None] ^ t[:, None, :])
    for a in range(1, q):
        assert (t[a] == 1).sum() == 1


def full_rank_matrix(rng, spec, k):
    while True:
        mat = rng.integers(0, spec.order, size=(k, k))
        if rank(mat, spec) == k:
            return mat
