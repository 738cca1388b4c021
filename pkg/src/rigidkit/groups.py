"""Constructors for the finite-group menagerie and structural invariants.

Groups are materialized as CayleyGroups with construction-specific
canonical element orders: permutations sorted lexicographically in
one-line notation, matrices sorted by their flattened code tuples,
quotient cosets represented by their least member, pairs (a, A) of the
affine groups sorted by (vector code, matrix index).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from . import finitefield as ff
from .arith import divisors, factorize, is_prime, p_part
from .cayley import (
    CayleyGroup,
    Subgroup,
    closure,
    generated_subgroup,
    group_from_table,
    make_group,
    subgroup,
)
from .errors import BadParameters, NotAnAutomorphism, PrimeDoesNotDivideOrder, TooLarge

MAX_ORDER = 2**14


# ---------------------------------------------------------------------------
# permutation utilities
# ---------------------------------------------------------------------------


def perm_cycle_label(perm: tuple[int, ...]) -> str:
    """Cycle notation on points 1..n, 'e' for the identity."""
    n = len(perm)
    seen = [False] * n
    parts = []
    for start in range(n):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen[nxt] = True
            nxt = perm[nxt]
        parts.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
    return "".join(parts) if parts else "e"


def perm_parity(perm: tuple[int, ...]) -> int:
    """0 for even, 1 for odd."""
    n = len(perm)
    seen = [False] * n
    parity = 0
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def _group_from_elements(elements, compose, labeler, name, meta=None) -> CayleyGroup:
    """Generic table builder from hashable element objects and a product map."""
    n = len(elements)
    if n > MAX_ORDER:
        raise TooLarge(f"{name}: order {n} exceeds the bound {MAX_ORDER}")
    index = {el: i for i, el in enumerate(elements)}
    if len(index) != n:
        raise BadParameters(f"{name}: duplicate elements in enumeration")
    table = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(elements):
        table[i] = [index[compose(a, b)] for b in elements]
    identity = _identity_index(table)
    labels = [labeler(el) for el in elements]
    return make_group(n, table, identity, labels=labels, name=name, meta=meta or {})


def _identity_index(table: np.ndarray) -> int:
    n = table.shape[0]
    idx = np.arange(n)
    for e in range(n):
        if np.array_equal(table[e], idx):
            return e
    raise BadParameters("no identity element")


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def cyclic(n: int) -> CayleyGroup:
    if n < 1:
        raise BadParameters("cyclic group needs n >= 1")
    if n > MAX_ORDER:
        raise TooLarge(f"cyclic:{n} exceeds the bound {MAX_ORDER}")
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return make_group(
        n, table.astype(np.int32), 0, labels=[str(i) for i in range(n)], name=f"cyclic:{n}"
    )


def sym(n: int) -> CayleyGroup:
    import math

    if n < 1:
        raise BadParameters("sym needs n >= 1")
    if math.factorial(n) > MAX_ORDER:
        raise TooLarge(f"sym:{n} has order {math.factorial(n)} > {MAX_ORDER}")
    elements = list(itertools.permutations(range(n)))

    def compose(a, b):  # (a b)(x) = a(b(x))
        return tuple(a[b[x]] for x in range(n))

    g = _group_from_elements(elements, compose, perm_cycle_label, f"sym:{n}",
                             meta={"kind": "sym", "points": n, "perms": elements})
    return g


def alt(n: int) -> CayleyGroup:
    import math

    if n < 1:
        raise BadParameters("alt needs n >= 1")
    if math.factorial(n) // 2 > MAX_ORDER:
        raise TooLarge(f"alt:{n} has order {math.factorial(n) // 2} > {MAX_ORDER}")
    elements = [p for p in itertools.permutations(range(n)) if perm_parity(p) == 0]

    def compose(a, b):
        return tuple(a[b[x]] for x in range(n))

    return _group_from_elements(elements, compose, perm_cycle_label, f"alt:{n}",
                                meta={"kind": "alt", "points": n, "perms": elements})


# -- matrix groups -----------------------------------------------------------


def _det(mat, F: ff.FieldSpec) -> int:
    """Determinant by Laplace expansion; matrices are tuples of code tuples."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return F.sub(F.mul(mat[0][0], mat[1][1]), F.mul(mat[0][1], mat[1][0]))
    total = 0
    for j in range(n):
        if mat[0][j] == 0:
            continue
        minor = tuple(row[:j] + row[j + 1 :] for row in mat[1:])
        term = F.mul(mat[0][j], _det(minor, F))
        total = F.add(total, term) if j % 2 == 0 else F.sub(total, term)
    return total


def _mat_mul(a, b, F: ff.FieldSpec):
    n = len(a)
    return tuple(
        tuple(
            _dot(a[i], tuple(b[k][j] for k in range(n)), F) for j in range(n)
        )
        for i in range(n)
    )


def _dot(u, v, F: ff.FieldSpec) -> int:
    acc = 0
    for x, y in zip(u, v):
        acc = F.add(acc, F.mul(x, y))
    return acc


def _mat_inv(mat, F: ff.FieldSpec):
    """Inverse by Gauss-Jordan over the field."""
    n = len(mat)
    a = [list(row) for row in mat]
    b = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise BadParameters("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        scale = F.inv(a[col][col])
        a[col] = [F.mul(scale, x) for x in a[col]]
        b[col] = [F.mul(scale, x) for x in b[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(a[r], a[col])]
                b[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(b[r], b[col])]
    return tuple(tuple(row) for row in b)


def _mat_label(mat) -> str:
    return "[" + ",".join("[" + ",".join(str(x) for x in row) + "]" for row in mat) + "]"


def sl_order(n: int, q: int) -> int:
    o = q ** (n * (n - 1) // 2)
    for i in range(2, n + 1):
        o *= q**i - 1
    return o


def _linear_group(n: int, q: int, dets: str) -> CayleyGroup:
    """Matrix group over GF(q): dets='one' for SL, 'nonzero' for GL."""
    if n < 1:
        raise BadParameters("matrix size must be >= 1")
    fac = factorize(q)
    if len(fac) != 1:
        raise BadParameters(f"{q} is not a prime power")
    (p, k), = fac.items()
    F = ff.field(p, k)
    expected = sl_order(n, q) * ((q - 1) if dets == "nonzero" else 1)
    if expected > MAX_ORDER:
        raise TooLarge(f"order {expected} exceeds the bound {MAX_ORDER}")
    mats = []
    for flat in itertools.product(range(q), repeat=n * n):
        mat = tuple(flat[i * n : (i + 1) * n] for i in range(n))
        d = _det(mat, F)
        if (d == 1) if dets == "one" else (d != 0):
            mats.append(mat)
    assert len(mats) == expected, "matrix count disagrees with the order formula"
    name = ("sl" if dets == "one" else "gl") + f":{n}:{q}"
    g = _matrix_group_from_mats(mats, F, name)
    return g


def _matrix_group_from_mats(mats, F: ff.FieldSpec, name: str) -> CayleyGroup:
    """Vectorized Cayley table over matrix code arrays using the field tables."""
    m = len(mats)
    n = len(mats[0])
    arr = np.array(mats, dtype=np.int16)  # (m, n, n)
    index = {mat: i for i, mat in enumerate(mats)}
    mul_t, add_t = F._mul, F._add
    table = np.empty((m, m), dtype=np.int32)
    flat_index = {}
    for i, mat in enumerate(mats):
        flat_index[bytes(np.array(mat, dtype=np.int16).tobytes())] = i
    for i in range(m):
        a = arr[i]  # (n, n)
        acc = None
        for k in range(n):
            t = mul_t[a[:, k][None, :, None], arr[:, k, :][:, None, :]]  # (m, n, n)
            acc = t if acc is None else add_t[acc, t]
        prods = np.ascontiguousarray(acc.astype(np.int16)).reshape(m, -1)
        table[i] = [flat_index[row.tobytes()] for row in prods]
    identity = _identity_index(table)
    labels = [_mat_label(mat) for mat in mats]
    meta = {"kind": "matrix", "matrices": mats, "field": F, "index": index, "dim": n}
    return make_group(m, table, identity, labels=labels, name=name, meta=meta)


def sl(n: int, q: int) -> CayleyGroup:
    return _linear_group(n, q, "one")


def gl(n: int, q: int) -> CayleyGroup:
    return _linear_group(n, q, "nonzero")


def quotient_group(g: CayleyGroup, normal_members, name: str | None = None) -> CayleyGroup:
    """Quotient by a normal subgroup; cosets represented by least member."""
    mem = sorted(int(x) for x in set(normal_members))
    sub = subgroup(g, mem)  # validates the subgroup axioms
    mset = set(sub.members)
    inv = g.inverse
    for x in range(g.n):
        conj = set(g.table[g.table[x, mem], inv[x]].tolist())
        if conj != mset:
            raise BadParameters("subgroup is not normal")
    coset_min = np.full(g.n, -1, dtype=np.int64)
    reps = []
    for x in range(g.n):
        if coset_min[x] >= 0:
            continue
        coset = np.sort(g.table[x, mem])
        reps.append(int(coset[0]))
        coset_min[coset] = coset[0]
    reps.sort()
    rep_index = {r: i for i, r in enumerate(reps)}
    proj = np.array([rep_index[int(coset_min[x])] for x in range(g.n)], dtype=np.int32)
    m = len(reps)
    table = proj[g.table[np.ix_(reps, reps)]]
    labels = [g.label(r) for r in reps]
    meta = {
        "kind": "quotient",
        "parent": g,
        "projection": proj,
        "rep_of": np.array(reps, dtype=np.int64),
    }
    return make_group(m, table.astype(np.int32), int(proj[g.identity]),
                      labels=labels, name=name or f"{g.name}/N", meta=meta)


def psl(n: int, q: int) -> CayleyGroup:
    base = sl(n, q)
    z = center(base)
    g = quotient_group(base, z.members, name=f"psl:{n}:{q}")
    return g


def pgl(n: int, q: int) -> CayleyGroup:
    base = gl(n, q)
    z = center(base)
    g = quotient_group(base, z.members, name=f"pgl:{n}:{q}")
    return g


def vector_group(n: int, q: int) -> CayleyGroup:
    """The additive group of GF(q)^n; element i encodes its coordinate vector."""
    fac = factorize(q)
    if len(fac) != 1:
        raise BadParameters(f"{q} is not a prime power")
    (p, k), = fac.items()
    F = ff.field(p, k)
    m = q**n
    if m > MAX_ORDER:
        raise TooLarge(f"order {m} exceeds the bound {MAX_ORDER}")
    vecs = list(itertools.product(range(q), repeat=n))

    def compose(a, b):
        return tuple(F.add(x, y) for x, y in zip(a, b))

    def labeler(v):
        return "[" + ",".join(str(x) for x in v) + "]"

    return _group_from_elements(vecs, compose, labeler, f"vec:{n}:{q}",
                                meta={"kind": "vector", "field": F, "dim": n, "vectors": vecs})


def affine_sl(n: int, q: int) -> CayleyGroup:
    """GF(q)^n semidirect SL_n(GF(q)) with (a,A)(b,B) = (a + A b, AB)."""
    base = sl(n, q)
    F: ff.FieldSpec = base.meta["field"]
    m = q**n * base.n
    if m > MAX_ORDER:
        raise TooLarge(f"order {m} exceeds the bound {MAX_ORDER}")
    vecs = list(itertools.product(range(q), repeat=n))
    mats = base.meta["matrices"]
    elements = [(v, i) for v in vecs for i in range(base.n)]

    def apply_mat(mat, v):
        return tuple(_dot(row, v, F) for row in mat)

    def compose(x, y):
        (a, ai), (b, bi) = x, y
        vec = tuple(F.add(u, w) for u, w in zip(a, apply_mat(mats[ai], b)))
        return (vec, int(base.table[ai, bi]))

    def labeler(x):
        v, i = x
        return "([" + ",".join(str(c) for c in v) + "]|" + base.label(i) + ")"

    meta = {"kind": "affine", "field": F, "dim": n, "linear_part": base, "vectors": vecs}
    return _group_from_elements(elements, compose, labeler, f"affsl:{n}:{q}", meta=meta)


def direct_product(a: CayleyGroup, b: CayleyGroup) -> CayleyGroup:
    n = a.n * b.n
    if n > MAX_ORDER:
        raise TooLarge(f"order {n} exceeds the bound {MAX_ORDER}")
    ib, jb = np.divmod(np.arange(n), b.n)
    table = (a.table[np.ix_(ib, ib)] * b.n + b.table[np.ix_(jb, jb)]).astype(np.int32)
    labels = [f"({a.label(i)},{b.label(j)})" for i, j in zip(ib, jb)]
    meta = {"kind": "product", "factors": (a, b)}
    return make_group(n, table, a.identity * b.n + b.identity,
                      labels=labels, name=f"{a.name}+{b.name}", meta=meta)


def semidirect_product(normal: CayleyGroup, acting: CayleyGroup, action) -> CayleyGroup:
    """(n1,h1)(n2,h2) = (n1 * h1.n2, h1 h2) for an action by automorphisms.

    `action[h]` is a permutation array of the normal group's indices; each
    must be an automorphism and h -> action[h] a homomorphism.
    """
    acts = [np.asarray(action[h], dtype=np.int64) for h in range(acting.n)]
    for h, perm in enumerate(acts):
        _check_automorphism(normal, perm)
    for h1 in range(acting.n):
        for h2 in range(acting.n):
            if not np.array_equal(acts[h1][acts[h2]], acts[int(acting.table[h1, h2])]):
                raise NotAnAutomorphism("action is not a homomorphism")
    n = normal.n * acting.n
    if n > MAX_ORDER:
        raise TooLarge(f"order {n} exceeds the bound {MAX_ORDER}")
    elements = [(x, h) for x in range(normal.n) for h in range(acting.n)]

    def compose(e1, e2):
        (x1, h1), (x2, h2) = e1, e2
        return (int(normal.table[x1, acts[h1][x2]]), int(acting.table[h1, h2]))

    def labeler(e):
        x, h = e
        return f"({normal.label(x)},{acting.label(h)})"

    meta = {"kind": "semidirect", "factors": (normal, acting)}
    return _group_from_elements(elements, compose, labeler,
                                f"{normal.name}:by:{acting.name}", meta=meta)


def atilde(n: int, allow_large: bool = False) -> CayleyGroup:
    from .presentations import builtin_presentation, todd_coxeter

    pres = builtin_presentation("atilde", n, allow_large=allow_large)
    res = todd_coxeter(pres)
    g = res.group
    g.name = f"atilde:{n}"
    return g


def stilde(n: int, allow_large: bool = False) -> CayleyGroup:
    from .presentations import builtin_presentation, todd_coxeter

    pres = builtin_presentation("stilde", n, allow_large=allow_large)
    res = todd_coxeter(pres)
    g = res.group
    g.name = f"stilde:{n}"
    return g


def from_table_json(payload) -> CayleyGroup:
    """CayleyGroup from {"n": .., "table": [[..]], "labels": optional}."""
    if isinstance(payload, str):
        with open(payload, "r", encoding="utf-8") as f:
            payload = json.load(f)
    n = int(payload["n"])
    table = payload["table"]
    if len(table) != n:
        raise BadParameters("table size disagrees with n")
    return group_from_table(table, labels=payload.get("labels"), name=payload.get("name", "table"))


# -- spec-string construction -------------------------------------------------

_CONSTRUCTORS = {
    "cyclic": (cyclic, 1),
    "sym": (sym, 1),
    "alt": (alt, 1),
    "sl": (sl, 2),
    "gl": (gl, 2),
    "psl": (psl, 2),
    "pgl": (pgl, 2),
    "affsl": (affine_sl, 2),
    "atilde": (atilde, 1),
    "stilde": (stilde, 1),
    "vec": (vector_group, 2),
}


def construct(spec: str) -> CayleyGroup:
    """Build a group from a spec string such as sl:2:5, atilde:4, table:@file.

    A '+' joins factor specs into a direct product.
    """
    spec = spec.strip()
    if "+" in spec:
        parts = spec.split("+")
        g = construct(parts[0])
        for part in parts[1:]:
            g = direct_product(g, construct(part))
        return g
    if spec.startswith("table:@"):
        return from_table_json(spec[len("table:@"):])
    bits = spec.split(":")
    tag = bits[0]
    if tag not in _CONSTRUCTORS:
        raise BadParameters(f"unknown group spec {spec!r}")
    fn, arity = _CONSTRUCTORS[tag]
    args = bits[1:]
    if len(args) != arity:
        raise BadParameters(f"spec {spec!r} needs {arity} integer parameters")
    try:
        params = [int(x) for x in args]
    except ValueError as exc:
        raise BadParameters(f"non-integer parameter in {spec!r}") from exc
    return fn(*params)


# ---------------------------------------------------------------------------
# structural invariants
# ---------------------------------------------------------------------------


def center(g: CayleyGroup) -> Subgroup:
    mask = (g.table == g.table.T).all(axis=1)
    return subgroup(g, np.nonzero(mask)[0].tolist())


def commutator_elements(g: CayleyGroup) -> np.ndarray:
    """All values g h g^-1 h^-1, deduplicated (not yet closed)."""
    t, inv = g.table, g.inverse
    x = t[t, inv[:, None]]  # [a,b] = (ab) a^-1
    x = t[x, inv[None, :]]  # [a,b] = (ab) a^-1 b^-1  -- careful with convention
    return np.unique(x)


def derived_data(g: CayleyGroup) -> tuple[Subgroup, list[int], bool]:
    """(commutator subgroup, abelianization invariant factors, is_perfect)."""
    comms = commutator_elements(g)
    members = closure(g.table, comms.tolist(), identity=g.identity)
    comm = subgroup(g, members.tolist())
    is_perfect = comm.order == g.n
    if is_perfect:
        return comm, [], True
    quo = quotient_group(g, comm.members, name=f"{g.name}_ab")
    assert quo.is_abelian()
    factors = abelian_invariant_factors(quo)
    return comm, factors, False


def abelian_invariant_factors(g: CayleyGroup) -> list[int]:
    """Invariant factors d_1 | d_2 | ... | d_r of a finite abelian group."""
    if not g.is_abelian():
        raise BadParameters("invariant factors need an abelian group")
    factors: list[int] = []
    cur = g
    while cur.n > 1:
        orders = cur.element_orders()
        x = int(np.argmax(orders))
        d = int(orders[x])
        factors.append(d)
        cyc = generated_subgroup(cur, [x])
        cur = quotient_group(cur, cyc.members)
    factors.reverse()
    for a, b in zip(factors, factors[1:]):
        assert b % a == 0, "invariant factor chain broken"
    return factors


def sylow(g: CayleyGroup, p: int) -> tuple[int, Subgroup]:
    """Number of Sylow p-subgroups and one witness subgroup."""
    if not is_prime(p):
        raise BadParameters(f"{p} is not prime")
    if g.n % p != 0:
        raise PrimeDoesNotDivideOrder(f"{p} does not divide |G| = {g.n}")
    pk = p_part(g.n, p)
    witness = _find_sylow(g, p, pk)
    count = _count_conjugates(g, witness)
    assert count % p == 1, "Sylow congruence violated"
    assert (g.n // pk) % count == 0, "Sylow count does not divide the index"
    return count, subgroup(g, witness)


def _find_sylow(g: CayleyGroup, p: int, pk: int) -> list[int]:
    t, inv = g.table, g.inverse
    # start with a cyclic subgroup of order p
    for x in range(g.n):
        o = g.order_of(x)
        if o % p == 0:
            seed = g.power(x, o // p)
            break
    members = sorted(closure(t, [seed], identity=g.identity).tolist())
    while len(members) < pk:
        norm = _normalizer(g, members)
        mset = set(members)
        grown = False
        for x in norm:
            if x in mset:
                continue
            if g.power(x, p) in mset:
                members = sorted(closure(t, members + [x], identity=g.identity).tolist())
                grown = True
                break
        assert grown, "could not grow the p-subgroup (Sylow growth step failed)"
    return members


def _normalizer(g: CayleyGroup, members: list[int]) -> list[int]:
    t, inv = g.table, g.inverse
    mem = np.array(members, dtype=np.int64)
    mset = frozenset(members)
    out = []
    for x in range(g.n):
        conj = t[t[x, mem], inv[x]]
        if frozenset(conj.tolist()) == mset:
            out.append(x)
    return out


def _count_conjugates(g: CayleyGroup, members: list[int]) -> int:
    t, inv = g.table, g.inverse
    mem = np.array(members, dtype=np.int64)
    seen = set()
    for x in range(g.n):
        conj = t[t[x, mem], inv[x]]
        seen.add(frozenset(conj.tolist()))
    return len(seen)


def _check_automorphism(g: CayleyGroup, perm: np.ndarray) -> None:
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(g.n)):
        raise NotAnAutomorphism("map is not a permutation of the element set")
    if not np.array_equal(perm[g.table], g.table[np.ix_(perm, perm)]):
        raise NotAnAutomorphism("permutation does not preserve the multiplication table")


def is_automorphism(g: CayleyGroup, perm) -> bool:
    try:
        _check_automorphism(g, perm)
        return True
    except NotAnAutomorphism:
        return False


def fixed_point_subgroup(g: CayleyGroup, autos) -> Subgroup:
    """Common fixed points of a list of automorphisms (each verified)."""
    mask = np.ones(g.n, dtype=bool)
    idx = np.arange(g.n)
    for perm in autos:
        perm = np.asarray(perm, dtype=np.int64)
        _check_automorphism(g, perm)
        mask &= perm == idx
    return subgroup(g, np.nonzero(mask)[0].tolist())


def conjugacy_classes(g: CayleyGroup) -> list[np.ndarray]:
    t, inv = g.table, g.inverse
    assigned = np.full(g.n, -1, dtype=np.int64)
    classes = []
    for a in range(g.n):
        if assigned[a] >= 0:
            continue
        cls = np.unique(t[t[:, a], inv[np.arange(g.n)]])
        assigned[cls] = len(classes)
        classes.append(cls)
    return classes


@dataclass(frozen=True)
class ConjugacyProfile:
    """Isomorphism-invariant fingerprint: per-element (order, class size) pairs."""

    pairs: tuple[tuple[int, int], ...]
    center_order: int
    commutator_order: int


def conjugacy_profile(g: CayleyGroup) -> ConjugacyProfile:
    orders = g.element_orders()
    class_size = np.empty(g.n, dtype=np.int64)
    for cls in conjugacy_classes(g):
        class_size[cls] = len(cls)
    pairs = tuple(sorted((int(o), int(s)) for o, s in zip(orders, class_size)))
    comm = closure(g.table, commutator_elements(g).tolist(), identity=g.identity)
    return ConjugacyProfile(pairs, center(g).order, len(comm))


# ---------------------------------------------------------------------------
# matrix-group automorphisms (Ad of a linear map, field automorphisms)
# ---------------------------------------------------------------------------


def matrix_from_spec(g: CayleyGroup, spec) -> tuple:
    """Resolve a matrix description against a matrix-group's field.

    Accepts a nested list of integer codes (negatives reduced mod p for
    prime fields), 'diag:a,b,...' or 'elem:i:j' (identity + E_ij).
    """
    F, dim = _matrix_context(g)
    if isinstance(spec, str):
        if spec.startswith("diag:"):
            entries = [int(x) for x in spec[len("diag:"):].split(",")]
            if len(entries) != dim:
                raise BadParameters("diagonal length disagrees with the matrix size")
            vals = [_coerce_code(F, e) for e in entries]
            return tuple(
                tuple(vals[i] if i == j else 0 for j in range(dim)) for i in range(dim)
            )
        if spec.startswith("elem:"):
            i, j = (int(x) for x in spec[len("elem:"):].split(":"))
            if not (1 <= i <= dim and 1 <= j <= dim) or i == j:
                raise BadParameters("elem:i:j needs distinct 1-based indices")
            return tuple(
                tuple(1 if r == c else (1 if (r, c) == (i - 1, j - 1) else 0) for c in range(dim))
                for r in range(dim)
            )
        raise BadParameters(f"cannot parse matrix spec {spec!r}")
    return tuple(tuple(_coerce_code(F, x) for x in row) for row in spec)


def _coerce_code(F: ff.FieldSpec, x: int) -> int:
    if F.k == 1:
        return x % F.p
    if not 0 <= x < F.q:
        raise BadParameters(f"matrix entry {x} out of range for GF({F.q})")
    return x


def _matrix_context(g: CayleyGroup):
    meta = g.meta
    if meta.get("kind") == "matrix":
        return meta["field"], meta["dim"]
    if meta.get("kind") == "quotient":
        return _matrix_context(meta["parent"])
    if meta.get("kind") == "affine":
        return meta["field"], meta["dim"]
    raise BadParameters(f"{g.name} is not a matrix-based construction")


def ad_matrix(g: CayleyGroup, mat) -> np.ndarray:
    """The permutation of g given by conjugation with an invertible matrix.

    Works on sl/gl groups, their central quotients and affine groups,
    where conjugation acts as (a, A) -> (B a, B A B^-1).
    """
    mat = matrix_from_spec(g, mat)
    kind = g.meta.get("kind")
    if kind == "matrix":
        F = g.meta["field"]
        if _det(mat, F) == 0:
            raise BadParameters("conjugating matrix is singular")
        mi = _mat_inv(mat, F)
        index = g.meta["index"]
        perm = np.empty(g.n, dtype=np.int64)
        for i, m in enumerate(g.meta["matrices"]):
            perm[i] = index[_mat_mul(_mat_mul(mat, m, F), mi, F)]
        _check_automorphism(g, perm)
        return perm
    if kind == "quotient":
        parent = g.meta["parent"]
        proj, reps = g.meta["projection"], g.meta["rep_of"]
        pperm = ad_matrix(parent, mat)
        perm = proj[pperm[reps]]
        _check_automorphism(g, perm)
        return perm
    if kind == "affine":
        base = g.meta["linear_part"]
        F, dim = g.meta["field"], g.meta["dim"]
        if _det(mat, F) == 0:
            raise BadParameters("conjugating matrix is singular")
        mi = _mat_inv(mat, F)
        base_perm = ad_matrix(base, mat)
        vecs = g.meta["vectors"]
        vec_index = {v: i for i, v in enumerate(vecs)}
        nv = len(vecs)
        vperm = np.empty(nv, dtype=np.int64)
        for i, v in enumerate(vecs):
            vperm[i] = vec_index[tuple(_dot(row, v, F) for row in mat)]
        perm = np.empty(g.n, dtype=np.int64)
        for i in range(g.n):
            vi, bi = divmod(i, base.n)
            perm[i] = vperm[vi] * base.n + base_perm[bi]
        _check_automorphism(g, perm)
        return perm
    raise BadParameters(f"ad_matrix does not support {g.name}")


def inner_automorphism(g: CayleyGroup, a: int) -> np.ndarray:
    """x -> a x a^-1 as a permutation."""
    return g.table[g.table[a, np.arange(g.n)], g.inverse[a]]


def product_automorphism(g: CayleyGroup, perm_a, perm_b) -> np.ndarray:
    """Automorphism of a direct product acting factorwise."""
    a, b = g.meta["factors"]
    perm_a = np.asarray(perm_a, dtype=np.int64)
    perm_b = np.asarray(perm_b, dtype=np.int64)
    ib, jb = np.divmod(np.arange(g.n), b.n)
    perm = perm_a[ib] * b.n + perm_b[jb]
    _check_automorphism(g, perm)
    return perm
