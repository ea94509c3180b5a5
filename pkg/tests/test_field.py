import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from algossip.field import (
    GF2,
    GF256,
    GF65536,
    CodingBuffer,
    FieldSpec,
    NotDecodable,
    decode,
    dot,
    encode,
    field_inv,
    field_mul,
    random_combination,
    rank,
    unit_vector,
)

from oracles import check_axioms, full_rank_matrix, mul_table


def clmul_reduce(a, b, poly):
    """Schoolbook polynomial product, then long division by ``poly``."""
    prod = 0
    for i in range(b.bit_length()):
        if (b >> i) & 1:
            prod ^= a << i
    deg = poly.bit_length() - 1
    for shift in range(prod.bit_length() - 1, deg - 1, -1):
        if (prod >> shift) & 1:
            prod ^= poly << (shift - deg)
    return prod


@pytest.fixture(scope="module")
def table256():
    return mul_table(GF256)


# -- field_mul -----------------------------------------------------------------

def test_gf2_mul_is_and():
    assert field_mul(GF2, 1, 1) == 1
    assert field_mul(GF2, 1, 0) == 0
    assert field_mul(GF2, 0, 1) == 0


def test_gf256_known_inverse_pair():
    assert clmul_reduce(0x53, 0xCA, 0x11B) == 0x01
    assert field_mul(GF256, 0x53, 0xCA) == 0x01
    assert field_inv(GF256, 0x53) == 0xCA


@pytest.mark.parametrize("spec", [GF2, GF256, GF65536])
def test_multiplicative_identity(spec):
    rng = random.Random(0)
    for _ in range(100):
        a = rng.randrange(spec.order)
        assert field_mul(spec, a, 1) == a


def test_gf256_table_matches_polynomial_oracle(table256):
    expected = np.array([[clmul_reduce(a, b, 0x11B) for b in range(256)] for a in range(256)])
    assert np.array_equal(table256, expected)


def test_gf65536_matches_polynomial_oracle():
    rng = random.Random(1)
    for _ in range(2000):
        a, b = rng.randrange(1 << 16), rng.randrange(1 << 16)
        assert field_mul(GF65536, a, b) == clmul_reduce(a, b, 0x1100B)


def test_field_axioms_exhaustive_gf2():
    check_axioms(mul_table(GF2))


def test_field_axioms_exhaustive_gf256(table256):
    check_axioms(table256)


def test_field_axioms_sampled_gf65536():
    rng = random.Random(2)
    s = GF65536
    for _ in range(10_000):
        a, b, c = (rng.randrange(1 << 16) for _ in range(3))
        assert field_mul(s, field_mul(s, a, b), c) == field_mul(s, a, field_mul(s, b, c))
        assert field_mul(s, a, b) == field_mul(s, b, a)
        assert field_mul(s, a, b ^ c) == field_mul(s, a, b) ^ field_mul(s, a, c)
        if a:
            assert field_mul(s, a, field_inv(s, a)) == 1


def test_field_spec_validation():
    assert GF256.reduction_polynomial == 0x11B
    with pytest.raises(ValueError):
        FieldSpec(4)
    with pytest.raises(ValueError):
        FieldSpec(8, 0x11D)


# -- dot -----------------------------------------------------------------------

def test_dot_examples():
    assert dot((1, 0, 1), (1, 1, 1)) == 0
    assert dot((1, 0, 0), (1, 0, 0)) == 1
    assert dot((1, 1), (1, 1)) == 0


def test_dot_length_mismatch():
    with pytest.raises(ValueError):
        dot((1, 0), (1, 0, 1))


@pytest.mark.parametrize("spec", [GF2, GF256, GF65536])
def test_dot_bilinear(spec):
    rng = np.random.default_rng(3)
    for _ in range(1000):
        u, v, w = rng.integers(0, spec.order, size=(3, 5))
        assert dot(u ^ v, w, spec) == dot(u, w, spec) ^ dot(v, w, spec)


# -- rank ----------------------------------------------------------------------

def span_size_gf2(vectors):
    k = len(vectors[0])
    span = set()
    for coeffs in itertools.product((0, 1), repeat=len(vectors)):
        acc = [0] * k
        for c, v in zip(coeffs, vectors):
            if c:
                acc = [x ^ y for x, y in zip(acc, v)]
        span.add(tuple(acc))
    return len(span)


def test_rank_examples():
    for k in (1, 3, 6):
        assert rank([unit_vector(k, j) for j in range(1, k + 1)]) == k
    assert rank([(0, 1, 1), (0, 1, 1)]) == 1
    vecs = [(1, 1, 0), (0, 1, 1), (1, 0, 1)]
    assert span_size_gf2(vecs) == 4
    assert rank(vecs) == 2


def test_rank_leaves_input_untouched():
    vecs = [np.array([1, 1, 0]), np.array([1, 0, 1])]
    before = [v.copy() for v in vecs]
    rank(vecs)
    rank(vecs, GF256)
    assert all(np.array_equal(a, b) for a, b in zip(vecs, before))


@given(st.lists(st.lists(st.integers(0, 1), min_size=4, max_size=4), min_size=1, max_size=6))
def test_rank_gf2_matches_span_enumeration(vecs):
    assert 2 ** rank(vecs) == span_size_gf2(vecs)


@pytest.mark.parametrize("spec", [GF2, GF256])
def test_rank_invariant_under_row_operations(spec):
    rng = np.random.default_rng(4)
    for _ in range(1000):
        rows = [r for r in rng.integers(0, spec.order, size=(rng.integers(1, 6), 4))]
        r0 = rank(rows, spec)
        i, j = rng.integers(0, len(rows), size=2)
        swapped = list(rows)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        assert rank(swapped, spec) == r0
        scaled = list(rows)
        a = int(rng.integers(1, spec.order))
        scaled[i] = np.array([field_mul(spec, a, int(x)) for x in rows[i]])
        assert rank(scaled, spec) == r0
        if i != j:
            added = list(rows)
            added[i] = rows[i] ^ rows[j]
            assert rank(added, spec) == r0


# -- decode --------------------------------------------------------------------

def test_decode_identity_coefficients():
    msgs = [b"ab", b"cd", b"ef"]
    pkts = [(unit_vector(3, j + 1), m) for j, m in enumerate(msgs)]
    assert decode(pkts, GF2, 3) == msgs


def test_decode_back_substitution_gf2():
    m1, m2 = b"\x0f\xf0", b"\x33\x55"
    x = bytes(a ^ b for a, b in zip(m1, m2))
    assert decode([((1, 0), m1), ((1, 1), x)], GF2, 2) == [m1, m2]


def test_decode_rank_deficient():
    with pytest.raises(NotDecodable):
        decode([((1, 1), b"\x01")], GF2, 2)


@pytest.mark.parametrize("spec", [GF2, GF256, GF65536])
def test_decode_inverts_encode(spec):
    rng = np.random.default_rng(5)
    for _ in range(1000):
        k = int(rng.integers(1, 5))
        msgs = [rng.bytes(6) for _ in range(k)]
        pkts = encode(msgs, full_rank_matrix(rng, spec, k), spec)
        assert decode(pkts, spec, k) == msgs


# -- random_combination ----------------------------------------------------------

def test_random_combination_empty_basis():
    c, p = random_combination(random.Random(0), [], GF2, 3, 4)
    assert not c.any() and p == bytes(4)


def test_random_combination_single_packet_two_outcomes():
    basis = [(np.array([0, 1]), b"\x07")]
    outcomes = {}
    for seed in range(64):
        c, p = random_combination(random.Random(seed), basis, GF2, 2, 1)
        coin = random.Random(seed).randrange(2)
        outcomes[coin] = (tuple(c), p)
    assert outcomes == {0: ((0, 0), b"\x00"), 1: ((0, 1), b"\x07")}


def test_random_combination_uniform_over_span():
    basis = [(np.array([1, 0]), b"\x01"), (np.array([0, 1]), b"\x02")]
    rng = random.Random(6)
    counts = {}
    for _ in range(10_000):
        c, p = random_combination(rng, basis, GF2, 2, 1)
        counts[(tuple(c), p)] = counts.get((tuple(c), p), 0) + 1
    assert set(counts) == {((0, 0), b"\x00"), ((1, 0), b"\x01"), ((0, 1), b"\x02"), ((1, 1), b"\x03")}
    assert stats.chisquare(list(counts.values())).pvalue > 0.01


# -- coding buffer (node-side fast path) ----------------------------------------

@pytest.mark.parametrize("spec", [GF2, GF256])
def test_buffer_rank_agrees_with_rank(spec):
    rng = np.random.default_rng(7)
    for _ in range(200):
        k = int(rng.integers(1, 6))
        buf = CodingBuffer(spec, k, 4)
        seen = []
        for _ in range(int(rng.integers(0, 8))):
            v = rng.integers(0, 2 if spec.m == 1 else spec.order, size=k)
            seen.append(v)
            buf.add(v, rng.bytes(4))
            assert buf.rank == rank(seen, spec)
        assert buf.received == len(seen)


@pytest.mark.parametrize("spec", [GF2, GF256, GF65536])
def test_buffer_decodes_what_it_receives(spec):
    rng = random.Random(8)
    k = 4
    msgs = [rng.randbytes(8) for _ in range(k)]
    src = CodingBuffer(spec, k, 8)
    for j, m in enumerate(msgs, start=1):
        assert src.add(unit_vector(k, j), m)
    dst = CodingBuffer(spec, k, 8)
    while not dst.is_full():
        dst.add_packet(src.random_packet(rng))
    assert dst.decode() == msgs
    assert rank(dst.coefficient_vectors(), spec) == k


def test_buffer_not_decodable_before_full_rank():
    buf = CodingBuffer(GF2, 2, 2)
    buf.add((1, 1), b"\x00\x01")
    with pytest.raises(NotDecodable):
        buf.decode()


@settings(max_examples=50)
@given(st.integers(0, 2**32))
def test_buffer_random_packet_lies_in_span(seed):
    rng = random.Random(seed)
    buf = CodingBuffer(GF256, 3, 2)
    buf.add((1, 2, 0), b"\x01\x02")
    pkt = buf.random_packet(rng)
    c = pkt.coeffs
    # the span of (1, 2, 0) is {a * (1, 2, 0)}
    a = int(c[0])
    assert list(c) == [a, field_mul(GF256, a, 2), 0]
    assert pkt.payload == bytes([field_mul(GF256, a, 1), field_mul(GF256, a, 2)])
