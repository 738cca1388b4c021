"""Homomorphism verification, isomorphism search, automorphism groups.

The search engine maps a small generating set (chosen greedily by
closure gain) to candidate images filtered by per-element invariants
(order, conjugacy class size, class data of powers). Candidate maps are
extended by breadth-first closure; a map passing every (element,
generator) product check is a homomorphism on the generated subgroup.
Automorphisms are stored as index permutations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arith import divisors
from .cayley import CayleyGroup, closure, greedy_generators
from .errors import NotGenerating, RelationViolated, TooLarge
from .groups import center, conjugacy_classes, conjugacy_profile, inner_automorphism

AUT_ORDER_BOUND = 2**9


@dataclass(frozen=True)
class Homomorphism:
    domain: CayleyGroup
    codomain: CayleyGroup
    images: tuple[int, ...]

    @property
    def is_bijective(self) -> bool:
        return (
            self.domain.n == self.codomain.n
            and len(set(self.images)) == self.domain.n
        )

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """self after other."""
        assert other.codomain is self.domain
        return Homomorphism(
            other.domain, self.codomain, tuple(self.images[i] for i in other.images)
        )

    def inverse(self) -> "Homomorphism":
        assert self.is_bijective
        inv = [0] * self.domain.n
        for x, y in enumerate(self.images):
            inv[y] = x
        return Homomorphism(self.codomain, self.domain, tuple(inv))


def product_preserving(hom: Homomorphism) -> bool:
    g, h = hom.domain, hom.codomain
    img = np.asarray(hom.images, dtype=np.int64)
    return bool(np.array_equal(img[g.table], h.table[np.ix_(img, img)]))


def _close_generator_map(
    g: CayleyGroup, h: CayleyGroup, gen_map: dict[int, int], injective: bool
):
    """Extend a generator->image assignment over the generated subgroup.

    Returns (members, partial_images) or None on any product conflict or
    (when injective) image collision. Every (element, generator) product
    edge is checked, which proves the hom property on the closure.
    """
    images = {g.identity: h.identity}
    used = {h.identity}
    gens = sorted(gen_map)
    for x, y in gen_map.items():
        if x in images:
            if images[x] != y:
                return None
            continue
        images[x] = y
        if injective:
            if y in used:
                return None
            used.add(y)
    frontier = list(images)
    while frontier:
        new = []
        for x in frontier:
            ix = images[x]
            for s in gens:
                xs = g.mul(x, s)
                want = h.mul(ix, gen_map[s])
                have = images.get(xs)
                if have is None:
                    images[xs] = want
                    if injective:
                        if want in used:
                            return None
                        used.add(want)
                    new.append(xs)
                elif have != want:
                    return None
        frontier = new
    # re-check all (member, generator) edges: tree construction above only
    # checked edges out of each element once per generator, which is all of them
    return images


def element_invariants(g: CayleyGroup) -> list[tuple]:
    """Per-element isomorphism-invariant fingerprints used to prune searches."""
    orders = g.element_orders()
    class_size = np.empty(g.n, dtype=np.int64)
    for cls in conjugacy_classes(g):
        class_size[cls] = len(cls)
    out = []
    for x in range(g.n):
        o = int(orders[x])
        power_data = tuple(
            (int(orders[g.power(x, d)]), int(class_size[g.power(x, d)]))
            for d in divisors(o)
        )
        out.append((o, int(class_size[x]), power_data))
    return out


def verify_homomorphism(g: CayleyGroup, h: CayleyGroup, gen_images: dict) -> Homomorphism:
    """The unique extension of a generating-set assignment, fully verified.

    Raises NotGenerating if the keys do not generate g, RelationViolated
    (with a witness pair) if no extension exists.
    """
    gen_map = {int(k): int(v) for k, v in gen_images.items()}
    gens = sorted(gen_map)
    reach = closure(g.table, gens, identity=g.identity)
    if len(reach) != g.n:
        raise NotGenerating(
            f"given elements generate a subgroup of order {len(reach)} < {g.n}"
        )
    images = _close_generator_map(g, h, gen_map, injective=False)
    if images is None:
        witness = _find_violation(g, h, gen_map)
        raise RelationViolated(
            f"no homomorphism extends the generator images (violated product {witness})",
            witness=witness,
        )
    hom = Homomorphism(g, h, tuple(images[x] for x in range(g.n)))
    if not product_preserving(hom):
        bad = _first_bad_pair(hom)
        raise RelationViolated(f"product not preserved at {bad}", witness=bad)
    return hom


def _find_violation(g: CayleyGroup, h: CayleyGroup, gen_map: dict[int, int]):
    """Recompute the closure, returning the first conflicting (x, s) pair."""
    images = {g.identity: h.identity}
    gens = sorted(gen_map)
    for x, y in gen_map.items():
        if x in images and images[x] != y:
            return (g.identity, x)
        images[x] = y
    frontier = list(images)
    while frontier:
        new = []
        for x in frontier:
            for s in gens:
                xs = g.mul(x, s)
                want = h.mul(images[x], gen_map[s])
                if xs not in images:
                    images[xs] = want
                    new.append(xs)
                elif images[xs] != want:
                    return (x, s)
        frontier = new
    return None


def _first_bad_pair(hom: Homomorphism):
    g, h = hom.domain, hom.codomain
    img = np.asarray(hom.images, dtype=np.int64)
    bad = np.nonzero(img[g.table] != h.table[np.ix_(img, img)])
    return (int(bad[0][0]), int(bad[1][0]))


def extend_homomorphism(g: CayleyGroup, h: CayleyGroup, gen_map: dict) -> Homomorphism | None:
    """Quiet variant of verify_homomorphism: None instead of raising.

    Returns None when the keys do not generate g or no extension exists.
    """
    gen_map = {int(k): int(v) for k, v in gen_map.items()}
    if len(closure(g.table, sorted(gen_map), identity=g.identity)) != g.n:
        return None
    images = _close_generator_map(g, h, gen_map, injective=False)
    if images is None:
        return None
    hom = Homomorphism(g, h, tuple(images[x] for x in range(g.n)))
    return hom if product_preserving(hom) else None


def isomorphism_obstruction(g: CayleyGroup, h: CayleyGroup) -> str | None:
    """A cheap certificate that no isomorphism exists, or None."""
    if g.n != h.n:
        return f"orders differ: {g.n} vs {h.n}"
    if g.is_abelian() != h.is_abelian():
        return "one group is abelian, the other is not"
    if conjugacy_profile(g) != conjugacy_profile(h):
        return "conjugacy profiles (element order, class size) differ"
    return None


def _search_maps(g: CayleyGroup, h: CayleyGroup, first_only: bool):
    """All (or the first) bijective homomorphisms g -> h as image tuples."""
    if g.n != h.n or isomorphism_obstruction(g, h):
        return []
    gens = greedy_generators(g)
    inv_g = element_invariants(g)
    inv_h = element_invariants(h) if h is not g else inv_g
    cands = [[y for y in range(h.n) if inv_h[y] == inv_g[s]] for s in gens]
    found: list[tuple[int, ...]] = []
    assignment: dict[int, int] = {}

    def backtrack(i: int) -> bool:
        if i == len(gens):
            images = _close_generator_map(g, h, assignment, injective=True)
            if images is not None and len(images) == g.n:
                found.append(tuple(images[x] for x in range(g.n)))
                return first_only
            return False
        for y in cands[i]:
            assignment[gens[i]] = y
            partial = _close_generator_map(g, h, assignment, injective=True)
            if partial is not None:
                if backtrack(i + 1):
                    return True
            del assignment[gens[i]]
        return False

    backtrack(0)
    return found


def find_isomorphism(g: CayleyGroup, h: CayleyGroup) -> Homomorphism | None:
    """A bijective homomorphism g -> h found by pruned backtracking, or None."""
    maps = _search_maps(g, h, first_only=True)
    if not maps:
        return None
    hom = Homomorphism(g, h, maps[0])
    assert product_preserving(hom) and hom.is_bijective
    return hom


@dataclass
class AutomorphismGroup:
    base: CayleyGroup
    generators: list[Homomorphism]
    order: int
    permutations: np.ndarray  # (order, n), rows sorted lexicographically

    def index_of(self, perm) -> int:
        key = tuple(int(x) for x in perm)
        return self._index[key]

    def __post_init__(self):
        self._index = {tuple(p.tolist()): i for i, p in enumerate(self.permutations)}

    def as_perm_list(self) -> list[np.ndarray]:
        return [self.permutations[i] for i in range(self.order)]


def automorphism_group(g: CayleyGroup) -> AutomorphismGroup:
    """The full automorphism group by exhaustive pruned search (|G| <= 512)."""
    if g.n > AUT_ORDER_BOUND:
        raise TooLarge(f"automorphism enumeration is bounded at order {AUT_ORDER_BOUND}")
    maps = _search_maps(g, g, first_only=False)
    perms = np.array(sorted(maps), dtype=np.int64)
    # closure sanity: composing any two stored automorphisms stays stored
    index = {tuple(p.tolist()): i for i, p in enumerate(perms)}
    gens: list[Homomorphism] = []
    have = {tuple(range(g.n))}
    for row in perms:
        key = tuple(row.tolist())
        if key in have:
            continue
        gens.append(Homomorphism(g, g, key))
        have = _perm_closure(have | {key}, g.n)
        if len(have) == len(perms):
            break
    assert len(have) == len(perms), "automorphism set is not closed"
    return AutomorphismGroup(g, gens, len(perms), perms)


def _perm_closure(seed: set[tuple[int, ...]], n: int) -> set[tuple[int, ...]]:
    out = set(seed)
    frontier = list(seed)
    while frontier:
        new = []
        for a in frontier:
            for b in list(out):
                for c in (tuple(a[i] for i in b), tuple(b[i] for i in a)):
                    if c not in out:
                        out.add(c)
                        new.append(c)
        frontier = new
    return out


def inner_embedding(g: CayleyGroup) -> tuple[AutomorphismGroup, int]:
    """(Inn G as a stored automorphism group, |Aut G| / |Inn G|)."""
    aut = automorphism_group(g)
    inner = {tuple(inner_automorphism(g, a).tolist()) for a in range(g.n)}
    assert len(inner) * center(g).order == g.n, "|Inn| * |Z| != |G|"
    perms = np.array(sorted(inner), dtype=np.int64)
    for row in perms:
        assert tuple(row.tolist()) in aut._index, "inner automorphism missing from Aut"
    gens: list[Homomorphism] = []
    have = {tuple(range(g.n))}
    for row in perms:
        key = tuple(row.tolist())
        if key in have:
            continue
        gens.append(Homomorphism(g, g, key))
        have = _perm_closure(have | {key}, g.n)
        if len(have) == len(perms):
            break
    inn = AutomorphismGroup(g, gens, len(perms), perms)
    assert aut.order % inn.order == 0
    return inn, aut.order // inn.order
