"""Arithmetic over GF(2^m) and the linear algebra behind random linear network coding.

Field elements are plain ints in ``[0, 2^m)``. Coefficient vectors are numpy
integer arrays of length k; payloads are ``bytes`` of a run-wide fixed length.

:class:`CodingBuffer` is what a gossiping node actually holds. Over GF(2) it
packs coefficient vectors and payloads into Python ints so that combining and
eliminating rows is a handful of XORs.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# x^8+x^4+x^3+x+1 and x^16+x^12+x^3+x+1
REDUCTION_POLYNOMIALS = {1: 0b11, 8: 0x11B, 16: 0x1100B}


class NotDecodable(Exception):
    """Raised when the received coefficient vectors do not span GF(q)^k."""


def _poly_mulmod(a: int, b: int, poly: int, m: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return out


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for q in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, q) == 0:
                return False
    return True


@functools.lru_cache(maxsize=None)
def _tables(m: int, poly: int) -> tuple[np.ndarray, np.ndarray]:
    """(exp, log) tables for a generator of the multiplicative group."""
    order = (1 << m) - 1
    for g in range(2, 1 << m):
        exp = np.zeros(2 * order, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            x = _poly_mulmod(x, g, poly, m)
            if x == 1 and i < order - 1:
                break
        else:
            exp[order:] = exp[:order]
            log = np.zeros(1 << m, dtype=np.int64)
            log[exp[:order]] = np.arange(order)
            return exp, log
    raise ValueError(f"no generator found for polynomial {poly:#x}")


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^m) with a fixed reduction polynomial; m in {1, 8, 16}."""

    m: int = 1
    reduction_polynomial: int = field(default=0)

    def __post_init__(self):
        if self.m not in REDUCTION_POLYNOMIALS:
            raise ValueError(f"unsupported field GF(2^{self.m}); use m in {{1, 8, 16}}")
        fixed = REDUCTION_POLYNOMIALS[self.m]
        if self.reduction_polynomial == 0:
            object.__setattr__(self, "reduction_polynomial", fixed)
        elif self.reduction_polynomial != fixed:
            raise ValueError(
                f"GF(2^{self.m}) uses reduction polynomial {fixed:#x}, "
                f"got {self.reduction_polynomial:#x}"
            )
        if self.m > 1 and not is_irreducible(self.reduction_polynomial):
            raise ValueError(f"{self.reduction_polynomial:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.m

    def symbols_per_payload(self, payload_size: int) -> int:
        if self.m == 16:
            if payload_size % 2:
                raise ValueError("GF(2^16) payloads must have even length")
            return payload_size // 2
        return payload_size

    def payload_to_symbols(self, payload: bytes) -> np.ndarray:
        raw = np.frombuffer(payload, dtype=np.uint8)
        if self.m == 16:
            if len(raw) % 2:
                raise ValueError("GF(2^16) payloads must have even length")
            return raw.view(">u2").astype(np.int64)
        return raw.astype(np.int64)

    def symbols_to_payload(self, symbols: np.ndarray) -> bytes:
        if self.m == 16:
            return np.asarray(symbols, dtype=">u2").tobytes()
        return np.asarray(symbols, dtype=np.uint8).tobytes()


GF2 = FieldSpec(1)
GF256 = FieldSpec(8)
GF65536 = FieldSpec(16)


def field_mul(spec: FieldSpec, a: int, b: int) -> int:
    if spec.m == 1:
        return a & b
    if a == 0 or b == 0:
        return 0
    exp, log = _tables(spec.m, spec.reduction_polynomial)
    return int(exp[log[a] + log[b]])


def field_inv(spec: FieldSpec, a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no multiplicative inverse")
    if spec.m == 1:
        return 1
    exp, log = _tables(spec.m, spec.reduction_polynomial)
    return int(exp[(spec.order - 1 - log[a]) % (spec.order - 1)])


def scale(spec: FieldSpec, a: int, vec: np.ndarray) -> np.ndarray:
    """Multiply every entry of ``vec`` by the scalar ``a``."""
    vec = np.asarray(vec, dtype=np.int64)
    if a == 0:
        return np.zeros_like(vec)
    if a == 1:
        return vec.copy()
    exp, log = _tables(spec.m, spec.reduction_polynomial)
    out = exp[log[a] + log[vec]]
    out[vec == 0] = 0
    return out


def vec_mul(spec: FieldSpec, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Entry-wise product."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if spec.m == 1:
        return u & v
    exp, log = _tables(spec.m, spec.reduction_polynomial)
    out = exp[log[u] + log[v]]
    out[(u == 0) | (v == 0)] = 0
    return out


def _xor_reduce(vec: np.ndarray) -> int:
    return int(np.bitwise_xor.reduce(vec)) if len(vec) else 0


def dot(u: Sequence[int], v: Sequence[int], spec: FieldSpec = GF2) -> int:
    """Inner product in GF(2^m); 0 means the vectors are perpendicular."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {len(u)} != {len(v)}")
    return _xor_reduce(vec_mul(spec, u, v))


def _echelon(rows: np.ndarray, spec: FieldSpec, ncols: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the first ``ncols`` columns (works on a copy)."""
    a = np.array(rows, dtype=np.int64, copy=True)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = scale(spec, field_inv(spec, int(a[r, c])), a[r])
        for i in np.nonzero(a[:, c])[0]:
            if i != r:
                a[i] ^= scale(spec, int(a[i, c]), a[r])
        pivots.append(c)
        r += 1
    return a, pivots


def _gf2_rank(masks: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for x in masks:
        while x:
            top = x.bit_length() - 1
            if top not in basis:
                basis[top] = x
                break
            x ^= basis[top]
    return len(basis)


def rank(vectors: Iterable[Sequence[int]], spec: FieldSpec = GF2) -> int:
    """Dimension of the span; the input vectors are not modified."""
    rows = [np.asarray(v, dtype=np.int64) for v in vectors]
    if not rows:
        return 0
    if spec.m == 1:
        return _gf2_rank(int(np.dot(r & 1, 1 << np.arange(len(r)))) for r in rows)
    mat = np.vstack(rows)
    _, pivots = _echelon(mat, spec, mat.shape[1])
    return len(pivots)


def combine_payloads(spec: FieldSpec, coeffs: Sequence[int], payloads: Sequence[bytes]) -> bytes:
    """Sum of ``coeffs[i] * payloads[i]``, byte-wise (paired bytes for GF(2^16))."""
    size = len(payloads[0])
    acc = np.zeros(spec.symbols_per_payload(size), dtype=np.int64)
    for c, p in zip(coeffs, payloads):
        if c:
            acc ^= scale(spec, int(c), spec.payload_to_symbols(p))
    return spec.symbols_to_payload(acc)


def encode(messages: Sequence[bytes], coeff_rows: Sequence[Sequence[int]], spec: FieldSpec = GF2):
    """Coded packets ``(coeffs, combination of messages)``, one per coefficient row."""
    out = []
    for row in coeff_rows:
        row = np.asarray(row, dtype=np.int64)
        out.append((row, combine_payloads(spec, row, messages)))
    return out


def decode(packets: Sequence[tuple[Sequence[int], bytes]], spec: FieldSpec, k: int) -> list[bytes]:
    """Recover the k original messages by Gauss-Jordan elimination."""
    if not packets:
        raise NotDecodable("no packets")
    coeffs = np.vstack([np.asarray(c, dtype=np.int64) for c, _ in packets])
    if coeffs.shape[1] != k:
        raise ValueError(f"coefficient vectors have length {coeffs.shape[1]}, expected {k}")
    syms = np.vstack([spec.payload_to_symbols(p) for _, p in packets])
    reduced, pivots = _echelon(np.hstack([coeffs, syms]), spec, k)
    if len(pivots) < k:
        raise NotDecodable(f"rank {len(pivots)} < {k}")
    return [spec.symbols_to_payload(reduced[i, k:]) for i in range(k)]


def random_combination(
    rng: random.Random,
    basis: Sequence[tuple[Sequence[int], bytes]],
    spec: FieldSpec,
    k: int,
    payload_size: int,
) -> tuple[np.ndarray, bytes]:
    """Uniformly random linear combination of ``basis``; empty basis gives the zero packet."""
    coeffs = np.zeros(k, dtype=np.int64)
    acc = np.zeros(spec.symbols_per_payload(payload_size), dtype=np.int64)
    for vec, payload in basis:
        c = rng.randrange(spec.order)
        if c:
            coeffs ^= scale(spec, c, vec)
            acc ^= scale(spec, c, spec.payload_to_symbols(payload))
    return coeffs, spec.symbols_to_payload(acc)


def unit_vector(k: int, j: int) -> np.ndarray:
    """e_j for message id j in 1..k."""
    e = np.zeros(k, dtype=np.int64)
    e[j - 1] = 1
    return e


class CodedPacket:
    """Coefficient header plus coded payload, in the buffer's internal row form."""

    __slots__ = ("spec", "k", "payload_size", "_coeffs", "_payload")

    def __init__(self, spec: FieldSpec, k: int, payload_size: int, coeffs, payload):
        self.spec = spec
        self.k = k
        self.payload_size = payload_size
        # GF(2): bitmask + int; otherwise int64 arrays of coefficients / symbols
        self._coeffs = coeffs
        self._payload = payload

    @property
    def coeffs(self) -> np.ndarray:
        if self.spec.m == 1:
            return np.array([(self._coeffs >> i) & 1 for i in range(self.k)], dtype=np.int64)
        return self._coeffs.copy()

    @property
    def payload(self) -> bytes:
        if self.spec.m == 1:
            return self._payload.to_bytes(self.payload_size, "big")
        return self.spec.symbols_to_payload(self._payload)

    def is_zero(self) -> bool:
        if self.spec.m == 1:
            return self._coeffs == 0
        return not self._coeffs.any()

    def summary(self) -> str:
        return "c" + ".".join(format(int(c), "x") for c in self.coeffs)

    def __repr__(self):
        return f"CodedPacket({self.coeffs.tolist()}, {self.payload!r})"


class CodingBuffer:
    """Innovative coded packets held by one node, with incrementally maintained rank.

    Non-innovative arrivals are counted in ``received`` and dropped. Decoding is
    deferred until :meth:`decode` is called.
    """

    def __init__(self, spec: FieldSpec, k: int, payload_size: int):
        self.spec = spec
        self.k = k
        self.payload_size = payload_size
        self.symbols = spec.symbols_per_payload(payload_size)
        self.rows: list[tuple] = []
        self.received = 0
        # GF(2): leading-bit -> reduced mask; else echelon rows keyed by pivot column
        self._pivots: dict[int, object] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def is_full(self) -> bool:
        return len(self._pivots) == self.k

    def _innovative(self, coeffs) -> bool:
        if self.spec.m == 1:
            x = coeffs
            while x:
                top = x.bit_length() - 1
                row = self._pivots.get(top)
                if row is None:
                    self._pivots[top] = x
                    return True
                x ^= row
            return False
        x = coeffs.copy()
        for c in range(self.k):
            if x[c] == 0:
                continue
            row = self._pivots.get(c)
            if row is None:
                self._pivots[c] = scale(self.spec, field_inv(self.spec, int(x[c])), x)
                return True
            x ^= scale(self.spec, int(x[c]), row)
        return False

    def add(self, coeffs: Sequence[int], payload: bytes) -> bool:
        """Add a packet given as (coefficient vector, payload bytes)."""
        return self.add_packet(self.packet(coeffs, payload))

    def packet(self, coeffs: Sequence[int], payload: bytes) -> CodedPacket:
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if len(coeffs) != self.k:
            raise ValueError(f"coefficient vector length {len(coeffs)} != k={self.k}")
        if len(payload) != self.payload_size:
            raise ValueError(f"payload length {len(payload)} != {self.payload_size}")
        if self.spec.m == 1:
            mask = sum(int(b & 1) << i for i, b in enumerate(coeffs))
            return CodedPacket(self.spec, self.k, self.payload_size, mask, int.from_bytes(payload, "big"))
        return CodedPacket(self.spec, self.k, self.payload_size, coeffs, self.spec.payload_to_symbols(payload))

    def add_packet(self, pkt: CodedPacket) -> bool:
        self.received += 1
        if self._innovative(pkt._coeffs):
            self.rows.append((pkt._coeffs, pkt._payload))
            return True
        return False

    def random_packet(self, rng: random.Random) -> CodedPacket:
        spec = self.spec
        if spec.m == 1:
            mask = rng.getrandbits(len(self.rows)) if self.rows else 0
            c = p = 0
            for vc, vp in self.rows:
                if mask & 1:
                    c ^= vc
                    p ^= vp
                mask >>= 1
            return CodedPacket(spec, self.k, self.payload_size, c, p)
        c = np.zeros(self.k, dtype=np.int64)
        p = np.zeros(self.symbols, dtype=np.int64)
        for vc, vp in self.rows:
            a = rng.randrange(spec.order)
            if a:
                c ^= scale(spec, a, vc)
                p ^= scale(spec, a, vp)
        return CodedPacket(spec, self.k, self.payload_size, c, p)

    def coefficient_vectors(self) -> list[np.ndarray]:
        return [CodedPacket(self.spec, self.k, self.payload_size, c, p).coeffs for c, p in self.rows]

    def packets(self) -> list[tuple[np.ndarray, bytes]]:
        out = []
        for c, p in self.rows:
            pkt = CodedPacket(self.spec, self.k, self.payload_size, c, p)
            out.append((pkt.coeffs, pkt.payload))
        return out

    def decode(self) -> list[bytes]:
        if not self.is_full():
            raise NotDecodable(f"rank {self.rank} < {self.k}")
        if self.spec.m == 1:
            return self._decode_gf2()
        return decode(self.packets(), self.spec, self.k)

    def _decode_gf2(self) -> list[bytes]:
        rows = [list(r) for r in self.rows]
        solved: dict[int, list] = {}
        for bit in range(self.k):
            piv = next(r for r in rows if (r[0] >> bit) & 1)
            rows.remove(piv)
            for r in rows:
                if (r[0] >> bit) & 1:
                    r[0] ^= piv[0]
                    r[1] ^= piv[1]
            for r in solved.values():
                if (r[0] >> bit) & 1:
                    r[0] ^= piv[0]
                    r[1] ^= piv[1]
            solved[bit] = piv
        return [solved[b][1].to_bytes(self.payload_size, "big") for b in range(self.k)]
