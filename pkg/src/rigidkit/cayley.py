"""Finite groups as indexed multiplication tables, plus table validation.

A CayleyGroup stores the full n x n multiplication table over element
indices 0..n-1 together with the identity index, the inverse table and
optional human-readable labels. Groups are immutable after construction
and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameters

EXHAUSTIVE_ASSOC_LIMIT = 256


@dataclass
class CayleyGroup:
    n: int
    table: np.ndarray
    identity: int
    inverse: np.ndarray
    labels: list[str] | None = None
    name: str = "group"
    meta: dict = field(default_factory=dict, repr=False, compare=False)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conj(self, a: int, b: int) -> int:
        """b a b^-1."""
        return int(self.table[self.table[b, a], self.inverse[b]])

    def power(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = self.identity
        while e:
            if e & 1:
                r = int(self.table[r, a])
            a = int(self.table[a, a])
            e >>= 1
        return r

    def order_of(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = int(self.table[x, a])
            k += 1
        return k

    def element_orders(self) -> np.ndarray:
        return np.array([self.order_of(a) for a in range(self.n)], dtype=np.int64)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"CayleyGroup({self.name!r}, n={self.n})"


@dataclass(frozen=True)
class Subgroup:
    parent: CayleyGroup
    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, a: int) -> bool:
        return a in set(self.members)


def group_from_table(table, labels=None, name="group") -> CayleyGroup:
    """Build and fully validate a CayleyGroup from a raw table."""
    t = np.asarray(table, dtype=np.int32)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise BadParameters("multiplication table must be square")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise BadParameters("table entries out of range")
    identity = find_identity(t)
    if identity is None:
        raise BadParameters("table has no identity element")
    inverse = find_inverses(t, identity)
    g = CayleyGroup(n, t, identity, inverse, labels=labels, name=name)
    validate(g)
    return g


def find_identity(table: np.ndarray) -> int | None:
    n = table.shape[0]
    idx = np.arange(n)
    for e in range(n):
        if np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx):
            return e
    return None


def find_inverses(table: np.ndarray, identity: int) -> np.ndarray:
    n = table.shape[0]
    inverse = np.full(n, -1, dtype=np.int32)
    rows, cols = np.nonzero(table == identity)
    for a, b in zip(rows, cols):
        inverse[a] = b
    if (inverse < 0).any():
        raise BadParameters("some element has no inverse")
    return inverse


def is_latin(table: np.ndarray) -> bool:
    n = table.shape[0]
    want = np.arange(n)
    return bool(
        np.array_equal(np.sort(table, axis=1), np.tile(want, (n, 1)))
        and np.array_equal(np.sort(table, axis=0), np.tile(want[:, None], (1, n)))
    )


def is_associative(table: np.ndarray, chunk: int = 32) -> bool:
    """Exhaustive associativity check, vectorized in chunks of rows."""
    n = table.shape[0]
    for i0 in range(0, n, chunk):
        sub = table[i0 : i0 + chunk]
        left = table[sub, :]          # [i,j,k] = table[table[i,j],k]
        right = sub[:, table]         # [i,j,k] = table[i, table[j,k]]
        if not np.array_equal(left, right):
            return False
    return True


def row_associates(table: np.ndarray, g: int, chunk: int = 4096) -> bool:
    """Check g(bc) = (gb)c for all b, c."""
    n = table.shape[0]
    row_g = table[g]
    for j0 in range(0, n, chunk):
        left = table[table[g, j0 : j0 + chunk], :]
        right = row_g[table[j0 : j0 + chunk, :]]
        if not np.array_equal(left, right):
            return False
    return True


def closure(table: np.ndarray, seeds, identity: int | None = None) -> np.ndarray:
    """Sorted indices of the subgroup generated by the seed elements."""
    n = table.shape[0]
    members = np.zeros(n, dtype=bool)
    if identity is not None:
        members[identity] = True
    members[list(seeds)] = True
    while True:
        idx = np.nonzero(members)[0]
        prods = table[np.ix_(idx, idx)].ravel()
        before = members.sum()
        members[prods] = True
        if members.sum() == before:
            return idx


def cheap_generators(g: CayleyGroup) -> list[int]:
    """A small (not minimal) generating set: add least element outside closure."""
    gens: list[int] = []
    have = closure(g.table, [], identity=g.identity)
    while len(have) < g.n:
        have_set = set(have.tolist())
        nxt = next(x for x in range(g.n) if x not in have_set)
        gens.append(nxt)
        have = closure(g.table, gens, identity=g.identity)
    return gens


def greedy_generators(g: CayleyGroup) -> list[int]:
    """Generating set chosen greedily by largest closure gain, ties by index."""
    gens: list[int] = []
    size = 1
    while size < g.n:
        best, best_size = None, size
        for x in range(g.n):
            c = len(closure(g.table, gens + [x], identity=g.identity))
            if c > best_size:
                best, best_size = x, c
                if c == g.n:
                    break
        if best is None:
            raise BadParameters("closure cannot grow; table is not a group")
        gens.append(best)
        size = best_size
    return gens


def validate(g: CayleyGroup) -> None:
    """Assert the full CayleyGroup invariants; raises BadParameters on failure.

    Associativity is checked exhaustively for n <= 256. Above that it is
    checked on a generating set: the elements associating with all pairs
    form a submagma, so generator checks plus closure prove the rest.
    """
    t = g.table
    if not is_latin(t):
        raise BadParameters(f"{g.name}: table is not a Latin square")
    idx = np.arange(g.n)
    if not (np.array_equal(t[g.identity], idx) and np.array_equal(t[:, g.identity], idx)):
        raise BadParameters(f"{g.name}: identity index is wrong")
    if not np.array_equal(t[idx, g.inverse[idx]], np.full(g.n, g.identity)):
        raise BadParameters(f"{g.name}: inverse table is wrong")
    if g.n <= EXHAUSTIVE_ASSOC_LIMIT:
        if not is_associative(t):
            raise BadParameters(f"{g.name}: table is not associative")
    else:
        gens = g.meta.get("generator_indices") or cheap_generators(g)
        if len(closure(t, gens, identity=g.identity)) != g.n:
            raise BadParameters(f"{g.name}: stored generators do not generate")
        for x in gens:
            if not row_associates(t, x):
                raise BadParameters(f"{g.name}: associativity fails at generator {x}")


def subgroup(parent: CayleyGroup, members) -> Subgroup:
    """Wrap a member set as a Subgroup after checking the subgroup axioms."""
    mem = tuple(sorted(int(m) for m in set(members)))
    mset = set(mem)
    if parent.identity not in mset:
        raise BadParameters("subgroup must contain the identity")
    for a in mem:
        if parent.inv(a) not in mset:
            raise BadParameters("subgroup not closed under inverse")
    prods = parent.table[np.ix_(mem, mem)]
    if not set(prods.ravel().tolist()) <= mset:
        raise BadParameters("subgroup not closed under multiplication")
    if parent.n % len(mem) != 0:
        raise BadParameters("subgroup order does not divide group order")
    return Subgroup(parent, mem)


def generated_subgroup(parent: CayleyGroup, seeds) -> Subgroup:
    return subgroup(parent, closure(parent.table, seeds, identity=parent.identity).tolist())


def make_group(
    n: int,
    table: np.ndarray,
    identity: int,
    labels=None,
    name="group",
    meta=None,
    check: bool = True,
) -> CayleyGroup:
    inverse = find_inverses(table, identity)
    g = CayleyGroup(n, table, identity, inverse, labels=labels, name=name, meta=meta or {})
    if check:
        validate(g)
    return g
