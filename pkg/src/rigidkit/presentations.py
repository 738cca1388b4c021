"""Free-group words, group presentations and Todd-Coxeter coset enumeration.

Words are tuples of (generator index, exponent) with exponents +-1, kept
freely reduced. The enumerator is Felsch-style: it defines the lowest
undefined (coset, letter) entry, then processes a deduction queue to
exhaustion before defining again; coincidences merge through union-find.
Coset numbering of a completed table is normalized to breadth-first
order from the subgroup coset, so regular representations are
reproducible.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import finitefield as ff
from .cayley import CayleyGroup, make_group
from .errors import BadParameters, CosetLimitExceeded, Unsupported

Word = tuple[tuple[int, int], ...]

DEFAULT_MAX_COSETS = 2**20


def free_reduce(word) -> Word:
    out: list[tuple[int, int]] = []
    for g, e in word:
        if e not in (1, -1):
            raise BadParameters("word exponents must be +1 or -1")
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def invert_word(word: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def concat(*words: Word) -> Word:
    return free_reduce([ge for w in words for ge in w])


def word_str(word: Word, names) -> str:
    if not word:
        return "e"
    return "*".join(n if e == 1 else f"{n}^-1" for n, e in ((names[g], e) for g, e in word))


def parse_letter_word(s: str, names) -> Word:
    """Parse single-letter generator syntax; uppercase letters are inverses."""
    index = {n: i for i, n in enumerate(names)}
    out = []
    for ch in s:
        if ch in index:
            out.append((index[ch], 1))
        elif ch.lower() in index:
            out.append((index[ch.lower()], -1))
        else:
            raise BadParameters(f"unknown generator letter {ch!r}")
    return free_reduce(out)


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        m = len(self.generators)
        if len(set(self.generators)) != m:
            raise BadParameters("duplicate generator names")
        for rel in self.relators:
            if rel != free_reduce(rel):
                raise BadParameters("relators must be freely reduced")
            for g, _ in rel:
                if not 0 <= g < m:
                    raise BadParameters("relator uses an undeclared generator")

    def gen_index(self, name: str) -> int:
        return self.generators.index(name)


def presentation_from_json(payload) -> Presentation:
    """{"generators": ["a","b"], "relators": ["aaa","abAB"]}; uppercase inverts."""
    if isinstance(payload, str):
        with open(payload, "r", encoding="utf-8") as f:
            payload = json.load(f)
    names = tuple(payload["generators"])
    rels = tuple(parse_letter_word(r, names) for r in payload["relators"])
    return Presentation(names, rels)


def _w(pairs) -> Word:
    return free_reduce(pairs)


# ---------------------------------------------------------------------------
# built-in presentations
# ---------------------------------------------------------------------------


def builtin_presentation(name: str, n: int = 0, allow_large: bool = False) -> Presentation:
    """The transcribed presentations: sym, stilde, alt, atilde (2<=n<=6), sl3f2.

    atilde:7 / stilde:7 / alt:7 / sym:7 are reachable only with
    allow_large=True; nothing is asserted about them by the default suite.
    """
    limit = 7 if allow_large else 6
    if name == "sl3f2":
        return _steinberg_prime(3, 2, prefix="s")
    if name not in ("sym", "stilde", "alt", "atilde"):
        raise Unsupported(f"no built-in presentation named {name!r}")
    if not 2 <= n <= limit:
        raise Unsupported(f"{name}:{n} outside the supported range 2..{limit}")
    if name == "sym":
        return _sym_presentation(n)
    if name == "stilde":
        return _stilde_presentation(n)
    if name == "alt":
        return _alt_presentation(n)
    return _atilde_presentation(n)


def _sym_presentation(n: int) -> Presentation:
    # generators (ab) for unordered pairs; (ab)^2 = e and (ab)(bc)(ab) = (ac)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    names = tuple(f"({a}{b})" for a, b in pairs)
    gi = {frozenset(p): i for i, p in enumerate(pairs)}

    def g(a, b):
        return gi[frozenset((a, b))]

    rels: list[Word] = [_w([(i, 1), (i, 1)]) for i in range(len(pairs))]
    for a, b, c in itertools.permutations(range(1, n + 1), 3):
        rels.append(_w([(g(a, b), 1), (g(b, c), 1), (g(a, b), 1), (g(a, c), -1)]))
    return Presentation(names, tuple(dict.fromkeys(rels)))


def _stilde_presentation(n: int) -> Presentation:
    # generators z and [ab] for ordered pairs; [ab] = z[ba], [ab]^2 = e,
    # [ab][bc][ab] = z[ac], z central with z^2 = e
    pairs = list(itertools.permutations(range(1, n + 1), 2))
    names = ("z",) + tuple(f"[{a}{b}]" for a, b in pairs)
    gi = {p: i + 1 for i, p in enumerate(pairs)}
    z = 0
    rels: list[Word] = [_w([(z, 1), (z, 1)])]
    for p in pairs:
        i = gi[p]
        rels.append(_w([(z, 1), (i, 1), (z, -1), (i, -1)]))
        rels.append(_w([(i, 1), (i, 1)]))
    for a, b in pairs:
        rels.append(_w([(gi[(a, b)], 1), (gi[(b, a)], -1), (z, -1)]))
    for a, b, c in itertools.permutations(range(1, n + 1), 3):
        rels.append(
            _w([(gi[(a, b)], 1), (gi[(b, c)], 1), (gi[(a, b)], 1), (gi[(a, c)], -1), (z, -1)])
        )
    return Presentation(names, tuple(dict.fromkeys(rels)))


def _triple_gens(n: int):
    triples = list(itertools.permutations(range(1, n + 1), 3))
    return triples, {t: i for i, t in enumerate(triples)}


def _alt_presentation(n: int) -> Presentation:
    if n < 4:
        raise Unsupported("the 3-cycle presentation needs n >= 4")
    triples, gi = _triple_gens(n)
    names = tuple(f"s({a}{b}{c})" for a, b, c in triples)

    def g(a, b, c):
        return gi[(a, b, c)]

    rels: list[Word] = []
    for a, b, c in triples:
        rels.append(_w([(g(a, b, c), 1), (g(b, c, a), -1)]))
        rels.append(_w([(g(a, b, c), 1)] * 3))
        rels.append(_w([(g(a, b, c), 1), (g(c, b, a), 1)]))
    for a, b, c, d in itertools.permutations(range(1, n + 1), 4):
        rels.append(_w([(g(c, b, d), 1), (g(b, a, d), 1), (g(a, b, c), 1)]))
    return Presentation(names, tuple(dict.fromkeys(rels)))


def _atilde_presentation(n: int) -> Presentation:
    if n < 4:
        raise Unsupported("the 3-cycle presentation needs n >= 4")
    triples, gi = _triple_gens(n)
    names = ("z",) + tuple(f"s({a}{b}{c})" for a, b, c in triples)
    z = 0

    def g(a, b, c):
        return gi[(a, b, c)] + 1

    rels: list[Word] = [_w([(z, 1), (z, 1)])]
    for a, b, c in triples:
        i = g(a, b, c)
        rels.append(_w([(z, 1), (i, 1), (z, -1), (i, -1)]))
        rels.append(_w([(i, 1), (g(b, c, a), -1)]))
        rels.append(_w([(i, 1)] * 3))
        rels.append(_w([(i, 1), (g(c, b, a), 1)]))
    for a, b, c, d in itertools.permutations(range(1, n + 1), 4):
        rels.append(_w([(g(c, b, d), 1), (g(b, a, d), 1), (g(a, b, c), 1), (z, -1)]))
    return Presentation(names, tuple(dict.fromkeys(rels)))


def steinberg_presentation(n: int, q: int, prefix: str = "t") -> Presentation:
    """SL_n over GF(q), n >= 3, by root elements t_ij(x) with commutator relations."""
    if n < 3:
        raise Unsupported("the root-element presentation needs n >= 3")
    from .arith import factorize

    (p, k), = factorize(q).items()
    F = ff.field(p, k)
    return _steinberg(n, F, prefix)


def _steinberg_prime(n: int, q: int, prefix: str) -> Presentation:
    F = ff.field(q, 1)
    return _steinberg(n, F, prefix)


def _steinberg(n: int, F: ff.FieldSpec, prefix: str) -> Presentation:
    q = F.q
    gens = [(i, j, x) for i in range(1, n + 1) for j in range(1, n + 1) if i != j
            for x in range(1, q)]
    gi = {t: idx for idx, t in enumerate(gens)}

    def nm(i, j, x):
        return f"{prefix}{i}{j}" if q == 2 else f"{prefix}{i}{j}({x})"

    names = tuple(nm(*t) for t in gens)
    rels: list[Word] = []
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    # additivity within a root subgroup: t_ij(x) t_ij(y) = t_ij(x+y)
    for i, j in pairs:
        for x in range(1, q):
            for y in range(1, q):
                s = F.add(x, y)
                w = [(gi[(i, j, x)], 1), (gi[(i, j, y)], 1)]
                if s:
                    w.append((gi[(i, j, s)], -1))
                rels.append(_w(w))
    # chain commutators [t_ij(a), t_jk(b)] = t_ik(ab)
    for i, j, kk in itertools.permutations(range(1, n + 1), 3):
        for a in range(1, q):
            for b in range(1, q):
                rels.append(_w([
                    (gi[(i, j, a)], 1), (gi[(j, kk, b)], 1),
                    (gi[(i, j, a)], -1), (gi[(j, kk, b)], -1),
                    (gi[(i, kk, F.mul(a, b))], -1),
                ]))
    # commuting pairs [t_ij(a), t_kr(b)] = e when j != k and i != r
    for i, j in pairs:
        for kk, r in pairs:
            if j == kk or i == r:
                continue
            for a in range(1, q):
                for b in range(1, q):
                    rels.append(_w([
                        (gi[(i, j, a)], 1), (gi[(kk, r, b)], 1),
                        (gi[(i, j, a)], -1), (gi[(kk, r, b)], -1),
                    ]))
    return Presentation(names, tuple(dict.fromkeys(r for r in rels if r)))


# ---------------------------------------------------------------------------
# Todd-Coxeter enumeration
# ---------------------------------------------------------------------------


@dataclass
class ToddCoxeterResult:
    order: int
    group: CayleyGroup
    generator_images: dict[str, int]


def _letters(word: Word) -> tuple[int, ...]:
    return tuple(2 * g + (0 if e == 1 else 1) for g, e in word)


def _inv_letter(letter: int) -> int:
    return letter ^ 1


class _Enumerator:
    def __init__(self, ngens: int, relators, max_cosets: int):
        self.ngens = ngens
        self.width = 2 * ngens
        self.max_cosets = max_cosets
        self.tab: list[list[int]] = [[-1] * self.width]
        self.parent = [0]
        self.live = 1
        self.deductions: deque[tuple[int, int]] = deque()
        # rotations of each relator grouped by initial letter
        self.variants: list[list[tuple[int, ...]]] = [[] for _ in range(self.width)]
        for rel in relators:
            seq = _letters(rel)
            if not seq:
                continue
            for t in range(len(seq)):
                rot = seq[t:] + seq[:t]
                self.variants[rot[0]].append(rot)
        for l in range(self.width):
            self.variants[l] = list(dict.fromkeys(self.variants[l]))

    # union-find ------------------------------------------------------------

    def find(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    # table handling ---------------------------------------------------------

    def _new_coset(self) -> int:
        if len(self.tab) >= self.max_cosets:
            raise CosetLimitExceeded(f"coset table exceeded {self.max_cosets} rows")
        self.tab.append([-1] * self.width)
        self.parent.append(len(self.tab) - 1)
        self.live += 1
        return len(self.tab) - 1

    def _lookup(self, c: int, l: int) -> int:
        t = self.tab[c][l]
        if t < 0:
            return -1
        t2 = self.find(t)
        if t2 != t:
            self.tab[c][l] = t2
        return t2

    def _set_edge(self, a: int, l: int, b: int) -> None:
        """Record a --l--> b and its mirror, queuing coincidences on clashes."""
        a, b = self.find(a), self.find(b)
        cur = self._lookup(a, l)
        if cur == b:
            return
        if cur >= 0:
            self._coincide(cur, b)
            return
        self.tab[a][l] = b
        self.deductions.append((a, l))
        back = self._lookup(b, _inv_letter(l))
        if back < 0:
            self.tab[b][_inv_letter(l)] = a
            self.deductions.append((b, _inv_letter(l)))
        elif back != a:
            self._coincide(back, a)

    # coincidences ------------------------------------------------------------

    def _coincide(self, a: int, b: int) -> None:
        queue = deque([(a, b)])
        while queue:
            x, y = queue.popleft()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            if x > y:
                x, y = y, x
            self.parent[y] = x
            self.live -= 1
            row = self.tab[y]
            for l in range(self.width):
                c = row[l]
                if c < 0:
                    continue
                row[l] = -1
                c = self.find(c)
                d = self._lookup(x, l)
                if d < 0:
                    self.tab[x][l] = c
                    self.deductions.append((x, l))
                    back = self._lookup(c, _inv_letter(l))
                    if back < 0:
                        self.tab[c][_inv_letter(l)] = x
                        self.deductions.append((c, _inv_letter(l)))
                    elif back != x:
                        queue.append((back, x))
                elif d != c:
                    queue.append((d, c))

    # scanning ----------------------------------------------------------------

    def _scan(self, seq: tuple[int, ...], start: int) -> None:
        start = self.find(start)
        f, i = start, 0
        L = len(seq)
        while i < L:
            nxt = self._lookup(f, seq[i])
            if nxt < 0:
                break
            f, i = nxt, i + 1
        if i == L:
            if f != start:
                self._coincide(f, start)
            return
        b, j = start, L - 1
        while j >= i:
            nxt = self._lookup(b, _inv_letter(seq[j]))
            if nxt < 0:
                break
            b, j = nxt, j - 1
        if j < i:
            self._coincide(f, b)
        elif j == i:
            self._set_edge(f, seq[i], b)

    def _process_deductions(self) -> None:
        while self.deductions:
            c, l = self.deductions.popleft()
            c = self.find(c)
            for seq in self.variants[l]:
                self._scan(seq, c)

    # main loop -----------------------------------------------------------------

    def run(self) -> None:
        self._process_deductions()
        ci, li = 0, 0
        while True:
            # advance to the lowest undefined live entry
            while ci < len(self.tab):
                if self.find(ci) != ci:
                    ci, li = ci + 1, 0
                    continue
                while li < self.width and self.tab[ci][li] >= 0:
                    li += 1
                if li < self.width:
                    break
                ci, li = ci + 1, 0
            if ci >= len(self.tab):
                return  # table complete
            new = self._new_coset()
            self._set_edge(ci, li, new)
            self._process_deductions()

    # extraction ------------------------------------------------------------------

    def normalized(self) -> tuple[list[list[int]], int]:
        """Live coset table renumbered breadth-first from the base coset."""
        base = self.find(0)
        order_map = {base: 0}
        bfs = [base]
        for c in bfs:
            for l in range(self.width):
                t = self._lookup(c, l)
                if t >= 0 and t not in order_map:
                    order_map[t] = len(order_map)
                    bfs.append(t)
        if len(order_map) != self.live:
            raise BadParameters("coset graph is not connected")
        out = [[-1] * self.width for _ in range(self.live)]
        for c in bfs:
            for l in range(self.width):
                t = self._lookup(c, l)
                if t < 0:
                    raise BadParameters("incomplete coset table")
                out[order_map[c]][l] = order_map[t]
        return out, 0


def todd_coxeter(pres: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> ToddCoxeterResult:
    """Enumerate cosets of the trivial subgroup; materialize the regular rep."""
    enum = _Enumerator(len(pres.generators), pres.relators, max_cosets)
    enum.run()
    coset_tab, base = enum.normalized()
    n = len(coset_tab)
    width = 2 * len(pres.generators)
    letter_perm = np.array(coset_tab, dtype=np.int64).T  # (width, n)

    # shortest positive words labelling each coset, breadth-first, generator order
    word_of: list[tuple[int, ...] | None] = [None] * n
    word_of[base] = ()
    bfs = [base]
    for c in bfs:
        for g in range(len(pres.generators)):
            t = coset_tab[c][2 * g]
            if word_of[t] is None:
                word_of[t] = word_of[c] + (g,)
                bfs.append(t)

    table = np.empty((n, n), dtype=np.int32)
    idx = np.arange(n)
    for j in range(n):
        perm = idx
        for g in word_of[j]:
            perm = letter_perm[2 * g][perm]
        table[:, j] = perm

    labels = ["e" if not w else "*".join(pres.generators[g] for g in w) for w in word_of]
    gen_images = {name: int(coset_tab[base][2 * g]) for g, name in enumerate(pres.generators)}
    meta = {
        "kind": "presented",
        "presentation": pres,
        "generators": gen_images,
        "generator_indices": sorted(set(gen_images.values())),
    }
    group = make_group(n, table, base, labels=labels, name="presented", meta=meta)
    ok, bad = check_relators(pres, group, gen_images)
    assert ok, f"regular representation violates relator {word_str(bad, pres.generators)}"
    return ToddCoxeterResult(n, group, gen_images)


# ---------------------------------------------------------------------------
# evaluating words and relators in a concrete group
# ---------------------------------------------------------------------------


def evaluate_word(word: Word, group: CayleyGroup, images) -> int:
    """Image of a word under generator-index -> element-index assignments."""
    acc = group.identity
    for g, e in word:
        x = images[g] if e == 1 else group.inv(images[g])
        acc = group.mul(acc, x)
    return acc


def check_relators(pres: Presentation, target: CayleyGroup, images) -> tuple[bool, Word | None]:
    """True iff every relator maps to the identity; else the first violator.

    `images` maps generator names (or indices) to element indices.
    """
    if isinstance(images, dict):
        img = [None] * len(pres.generators)
        for key, val in images.items():
            idx = pres.gen_index(key) if isinstance(key, str) else int(key)
            img[idx] = int(val)
        if any(v is None for v in img):
            raise BadParameters("images must cover every generator")
    else:
        img = [int(v) for v in images]
    for rel in pres.relators:
        if evaluate_word(rel, target, img) != target.identity:
            return False, rel
    return True, None


# ---------------------------------------------------------------------------
# sections of a quotient homomorphism
# ---------------------------------------------------------------------------


def enumerate_sections(theta, pres_q: Presentation, gen_images_in_q: dict) -> list:
    """All homomorphisms s with theta o s = id, by fiber search over generators.

    `theta` is a surjective Homomorphism E -> Q and pres_q presents Q via
    the given generator images.
    """
    from .morphisms import Homomorphism, extend_homomorphism

    E, Q = theta.domain, theta.codomain
    gen_names = list(pres_q.generators)
    q_images = [int(gen_images_in_q[name]) for name in gen_names]
    imgs = np.asarray(theta.images)
    fibers = [np.nonzero(imgs == qi)[0].tolist() for qi in q_images]

    m = len(gen_names)
    by_assigned: list[list[Word]] = [[] for _ in range(m)]
    for rel in pres_q.relators:
        if rel:
            by_assigned[max(g for g, _ in rel)].append(rel)

    lifts = [-1] * m
    sections = []

    def backtrack(i: int) -> None:
        if i == m:
            gen_map: dict[int, int] = {}
            for qi, li in zip(q_images, lifts):
                if gen_map.setdefault(qi, li) != li:
                    return
            hom = extend_homomorphism(Q, E, gen_map)
            if hom is not None:
                composed = np.asarray(theta.images)[np.asarray(hom.images)]
                if np.array_equal(composed, np.arange(Q.n)):
                    sections.append(hom)
            return
        for cand in fibers[i]:
            lifts[i] = cand
            if all(
                evaluate_word(rel, E, lifts) == E.identity for rel in by_assigned[i]
            ):
                backtrack(i + 1)
        lifts[i] = -1

    backtrack(0)
    return sections
