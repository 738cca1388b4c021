"""Exact arithmetic in GF(p^k) for small q = p^k.

Elements are coefficient vectors of length k over Z/p (little endian,
index i holding the coefficient of x^i), always kept fully reduced.
Internally each element is also usable as an integer code in [0, q),
the base-p digit encoding of its coefficient vector; the matrix-group
constructors work with codes for speed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import is_prime
from .errors import DivisionByZero, NonPrime, UnsupportedSize

MAX_Q = 32
MAX_K = 4

# Monic irreducible polynomials over Z/p, little-endian coefficient
# lists of length k+1. For each supported (p, k) with k >= 2 this is the
# lexicographically least monic irreducible (ascending-degree coefficient
# order); tests re-derive every entry by exhaustive search.
IRREDUCIBLE_POLY: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),         # x^2 + x + 1
    (2, 3): (1, 0, 1, 1),      # x^3 + x^2 + 1
    (2, 4): (1, 0, 0, 1, 1),   # x^4 + x^3 + 1
    (3, 2): (1, 0, 1),         # x^2 + 1
    (3, 3): (1, 0, 2, 1),      # x^3 + 2x^2 + 1
    (5, 2): (1, 1, 1),         # x^2 + x + 1
}


@dataclass(frozen=True)
class FieldElement:
    """An element of GF(p^k) as a reduced coefficient vector."""

    coeffs: tuple[int, ...]


class FieldSpec:
    """GF(p^k) with a fixed irreducible modulus and precomputed tables.

    Immutable after construction; all operations are pure.
    """

    def __init__(self, p: int, k: int, poly: tuple[int, ...]):
        self.p = p
        self.k = k
        self.q = p**k
        self.poly = poly
        self._build_tables()

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and (self.p, self.k, self.poly) == (other.p, other.k, other.poly)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.poly))

    def __repr__(self):
        return f"FieldSpec(p={self.p}, k={self.k}, poly={list(self.poly)})"

    # -- integer-code arithmetic ------------------------------------------

    def code(self, coeffs) -> int:
        c = 0
        for digit in reversed(list(coeffs)):
            c = c * self.p + digit % self.p
        return c

    def coeffs(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return tuple(out)

    def add(self, a: int, b: int) -> int:
        return int(self._add[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self._add[a, self._neg[b]])

    def neg(self, a: int) -> int:
        return int(self._neg[a])

    def mul(self, a: int, b: int) -> int:
        return int(self._mul[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("0 has no multiplicative inverse")
        return int(self._inv[a])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def elements(self) -> range:
        return range(self.q)

    # -- table construction ------------------------------------------------

    def _mul_codes_poly(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        # reduce modulo the monic defining polynomial
        for top in range(2 * k - 2, k - 1, -1):
            lead = prod[top]
            if lead:
                for i in range(k + 1):
                    prod[top - k + i] = (prod[top - k + i] - lead * self.poly[i]) % p
        return self.code(prod[:k])

    def _build_tables(self):
        import numpy as np

        q = self.q
        add = np.zeros((q, q), dtype=np.int16)
        mul = np.zeros((q, q), dtype=np.int16)
        for a in range(q):
            ca = self.coeffs(a)
            for b in range(q):
                cb = self.coeffs(b)
                add[a, b] = self.code((x + y) % self.p for x, y in zip(ca, cb))
                mul[a, b] = self._mul_codes_poly(a, b)
        neg = np.zeros(q, dtype=np.int16)
        inv = np.zeros(q, dtype=np.int16)
        for a in range(q):
            neg[a] = self.code((-x) % self.p for x in self.coeffs(a))
            if a:
                row = mul[a]
                inv[a] = int(np.nonzero(row == 1)[0][0])
        self._add, self._mul, self._neg, self._inv = add, mul, neg, inv


_SPEC_CACHE: dict[tuple[int, int], FieldSpec] = {}


def field(p: int, k: int) -> FieldSpec:
    """GF(p^k) with the built-in defining polynomial for (p, k)."""
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if not (1 <= k <= MAX_K) or p**k > MAX_Q:
        raise UnsupportedSize(f"GF({p}^{k}) outside the supported range (k <= {MAX_K}, q <= {MAX_Q})")
    key = (p, k)
    if key not in _SPEC_CACHE:
        if k == 1:
            poly = (0, 1)  # the polynomial x: GF(p) = Z/p
        else:
            poly = IRREDUCIBLE_POLY[key]
        _SPEC_CACHE[key] = FieldSpec(p, k, poly)
    return _SPEC_CACHE[key]


def element(spec: FieldSpec, value) -> FieldElement:
    """Make a reduced FieldElement from coefficients or an integer code."""
    if isinstance(value, FieldElement):
        return value
    if isinstance(value, int):
        if spec.k == 1:
            value %= spec.p
        elif not 0 <= value < spec.q:
            raise ValueError(f"element code {value} out of range for GF({spec.q})")
        return FieldElement(spec.coeffs(value))
    coeffs = tuple(int(v) % spec.p for v in value)
    if len(coeffs) != spec.k:
        coeffs = (coeffs + (0,) * spec.k)[: spec.k]
    return FieldElement(coeffs)


def field_op(spec: FieldSpec, op: str, a, b=None) -> FieldElement:
    """Apply a field operation; 'b' is an element for add/mul, an exponent for pow."""
    ca = spec.code(element(spec, a).coeffs)
    if op == "add":
        r = spec.add(ca, spec.code(element(spec, b).coeffs))
    elif op == "mul":
        r = spec.mul(ca, spec.code(element(spec, b).coeffs))
    elif op == "inv":
        r = spec.inv(ca)
    elif op == "pow":
        r = spec.pow(ca, int(b))
    else:
        raise ValueError(f"unknown field operation {op!r}")
    return FieldElement(spec.coeffs(r))


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Exhaustive irreducibility test for monic poly of degree <= 4 over Z/p."""
    k = len(poly) - 1
    if poly[-1] != 1:
        return False

    def ev(cs, x):
        acc = 0
        for c in reversed(cs):
            acc = (acc * x + c) % p
        return acc

    if any(ev(poly, x) == 0 for x in range(p)):
        return False
    if k <= 3:
        return True
    # degree 4: also rule out irreducible quadratic factors
    for c0 in range(p):
        for c1 in range(p):
            quad = (c0, c1, 1)
            if any(ev(quad, x) == 0 for x in range(p)):
                continue
            rem = list(poly)
            while len(rem) >= 3:
                lead = rem[-1]
                if lead:
                    for i in range(3):
                        rem[len(rem) - 3 + i] = (rem[len(rem) - 3 + i] - lead * quad[i]) % p
                rem.pop()
            if all(c == 0 for c in rem):
                return False
    return True
