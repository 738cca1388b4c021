"""Exact linear algebra over Z/m.

Z/m has zero divisors, so plain Gaussian elimination is unsound. All
composite-modulus work is routed through the prime-power case by CRT:
over the chain ring Z/p^a every nonzero scalar is unit * p^v, rows can
be normalized to a pivot of exactly p^v, and anything below a pivot is
divisible by it. Submodules of (Z/p^a)^w are held in a Howell-style
echelon basis: one pivot per column, plus the "shadow" p^(a-v) * row of
every stored row, which restores the property that any module element
supported past column j lies in the span of rows with pivots past j.
That property is what makes membership tests and kernel extraction by
block elimination sound; the tests verify it against brute-force span
enumeration on small moduli.

Prime-field kernels (for 1-cocycle systems) use a plain incremental
row-reduction basis, with Python-int bitsets as the GF(2) fast path.
"""

from __future__ import annotations

import numpy as np

from .arith import factorize


def val_p(x: int, p: int, a: int) -> int:
    """p-adic valuation of x mod p^a, with val(0) = a."""
    if x % p**a == 0:
        return a
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _unit_inv(u: int, m: int) -> int:
    return pow(u, -1, m)


class PrimePowerHowell:
    """Howell-style echelon basis for a submodule of (Z/p^a)^width."""

    def __init__(self, p: int, a: int, width: int):
        self.p = p
        self.a = a
        self.m = p**a
        self.width = width
        self.rows: dict[int, np.ndarray] = {}  # pivot column -> normalized row
        self.pivot_val: dict[int, int] = {}

    def insert(self, row) -> None:
        stack = [np.asarray(row, dtype=np.int64) % self.m]
        while stack:
            r = stack.pop()
            nz = np.nonzero(r)[0]
            while nz.size:
                j = int(nz[0])
                v = val_p(int(r[j]), self.p, self.a)
                if j in self.rows:
                    c = self.pivot_val[j]
                    if v >= c:
                        f = int(r[j]) // self.p**c
                        r = (r - f * self.rows[j]) % self.m
                    else:
                        old = self.rows[j]
                        self._store(j, r, v, stack)
                        stack.append(old)
                        break
                else:
                    self._store(j, r, v, stack)
                    break
                nz = np.nonzero(r)[0]

    def _store(self, j: int, r: np.ndarray, v: int, stack: list) -> None:
        u = int(r[j]) // self.p**v
        r = (r * _unit_inv(u, self.m)) % self.m
        self.rows[j] = r
        self.pivot_val[j] = v
        if v > 0:
            shadow = (r * self.p ** (self.a - v)) % self.m
            if shadow.any():
                stack.append(shadow)

    def size(self) -> int:
        """Number of elements of the spanned module."""
        out = 1
        for v in self.pivot_val.values():
            out *= self.p ** (self.a - v)
        return out

    def residue(self, vec) -> np.ndarray:
        """Reduce vec by the basis; zero iff vec lies in the span."""
        r = np.asarray(vec, dtype=np.int64) % self.m
        nz = np.nonzero(r)[0]
        while nz.size:
            j = int(nz[0])
            v = val_p(int(r[j]), self.p, self.a)
            if j not in self.rows or self.pivot_val[j] > v:
                return r
            f = int(r[j]) // self.p ** self.pivot_val[j]
            r = (r - f * self.rows[j]) % self.m
            nz = np.nonzero(r)[0]
        return r

    def contains(self, vec) -> bool:
        return not self.residue(vec).any()

    def basis_rows(self) -> list[np.ndarray]:
        return [self.rows[j] for j in sorted(self.rows)]


def row_space(rows, p: int, a: int, width: int) -> PrimePowerHowell:
    basis = PrimePowerHowell(p, a, width)
    for r in rows:
        basis.insert(r)
    return basis


def kernel_gens(rows, p: int, a: int, width: int) -> list[np.ndarray]:
    """Generators of {x : Rx = 0 over Z/p^a} for the row list R.

    The row space is compressed to a Howell basis first; the kernel is
    then read off a block elimination of [value | certificate] rows.
    """
    compressed = row_space(rows, p, a, width).basis_rows()
    r = len(compressed)
    if r == 0:
        return [np.eye(width, dtype=np.int64)[i] for i in range(width)]
    mat = np.stack(compressed)  # (r, width); kernel of x -> mat @ x
    aug = PrimePowerHowell(p, a, r + width)
    for i in range(width):
        row = np.zeros(r + width, dtype=np.int64)
        row[:r] = mat[:, i]
        row[r + i] = 1
        aug.insert(row)
    out = []
    for j in sorted(aug.rows):
        if j >= r:
            cert = aug.rows[j][r:]
            if cert.any():
                out.append(cert.copy())
    return out


def module_size(gens, p: int, a: int, width: int) -> int:
    return row_space(gens, p, a, width).size()


def smith_divisor_valuations(mat: np.ndarray, p: int, a: int) -> list[int]:
    """Diagonal p-valuations of the Smith form of mat over Z/p^a.

    Returns one valuation per column: the pivot valuation where a pivot
    exists, else a (a zero column of the diagonalized form).
    """
    m = p**a
    work = np.asarray(mat, dtype=np.int64).copy() % m
    rows, cols = work.shape
    vals: list[int] = []
    r = 0
    while r < min(rows, cols):
        sub = work[r:, r:]
        if not sub.any():
            break
        # entry of minimal p-valuation
        nz = sub != 0
        vv = np.full(sub.shape, a, dtype=np.int64)
        rem = sub.copy()
        for v in range(a):
            mask = nz & (rem % p != 0) & (vv == a)
            vv[mask] = v
            rem //= p
        i, j = np.unravel_index(np.argmin(np.where(nz, vv, a + 1)), sub.shape)
        v = int(vv[i, j])
        i, j = int(i) + r, int(j) + r
        work[[r, i]] = work[[i, r]]
        work[:, [r, j]] = work[:, [j, r]]
        u = int(work[r, r]) // p**v
        work[r] = (work[r] * _unit_inv(u, m)) % m
        piv = p**v
        col = work[r + 1 :, r]
        fac = col // piv  # exact: v is minimal
        work[r + 1 :] = (work[r + 1 :] - np.outer(fac, work[r])) % m
        rowv = work[r, r + 1 :]
        fac = rowv // piv
        work[:, r + 1 :] = (work[:, r + 1 :] - np.outer(work[:, r], fac)) % m
        vals.append(v)
        r += 1
    vals.extend([a] * (cols - len(vals)))
    return vals


def quotient_divisors(z_gens, b_gens, p: int, a: int, width: int) -> list[int]:
    """Elementary divisors (powers of p) of span(z_gens)/span(b_gens).

    Requires span(b) <= span(z); presented as relations among the z
    generators followed by a Smith form over Z/p^a.
    """
    z_list = [np.asarray(z, dtype=np.int64) for z in z_gens]
    s = len(z_list)
    if s == 0:
        return []
    aug = PrimePowerHowell(p, a, width + s)
    for i, z in enumerate(z_list):
        row = np.zeros(width + s, dtype=np.int64)
        row[:width] = z
        row[width + i] = 1
        aug.insert(row)
    for b in b_gens:
        row = np.zeros(width + s, dtype=np.int64)
        row[:width] = np.asarray(b, dtype=np.int64)
        aug.insert(row)
    relations = []
    for j in sorted(aug.rows):
        if j >= width:
            cert = aug.rows[j][width:]
            if cert.any():
                relations.append(cert)
    if not relations:
        return [a] * s
    rel = np.stack(relations)
    return smith_divisor_valuations(rel, p, a)


def quotient_divisor_list(z_gens, b_gens, p: int, a: int, width: int) -> list[int]:
    """Divisors p^v (v >= 1) of the quotient module, ascending.

    Each Smith valuation v gives a summand (Z/p^a)/(p^v) = Z/p^v;
    valuation 0 summands are trivial and dropped.
    """
    vals = quotient_divisors(z_gens, b_gens, p, a, width)
    return sorted(p**v for v in vals if v >= 1)


def crt_combine(per_prime: dict[int, list[int]]) -> list[int]:
    """Merge per-prime divisor chains into one chain d_1 | d_2 | ... ."""
    length = max((len(v) for v in per_prime.values()), default=0)
    out = []
    for i in range(length):
        d = 1
        for p, chain in per_prime.items():
            padded = [1] * (length - len(chain)) + sorted(chain)
            d *= padded[i]
        if d > 1:
            out.append(d)
    return out


# ---------------------------------------------------------------------------
# prime-field incremental kernels
# ---------------------------------------------------------------------------


class GF2Basis:
    """Row-reduction basis over GF(2) with Python-int bitset rows."""

    def __init__(self):
        self.rows: dict[int, int] = {}

    def reduce(self, row: int) -> int:
        while row:
            lead = (row & -row).bit_length() - 1
            piv = self.rows.get(lead)
            if piv is None:
                return row
            row ^= piv
        return 0

    def insert(self, row: int) -> bool:
        row = self.reduce(row)
        if row == 0:
            return False
        lead = (row & -row).bit_length() - 1
        self.rows[lead] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


class GFpBasis:
    """Row-reduction basis over GF(p), dense numpy rows."""

    def __init__(self, p: int, width: int):
        self.p = p
        self.width = width
        self.rows: dict[int, np.ndarray] = {}

    def reduce(self, row: np.ndarray) -> np.ndarray:
        row = np.asarray(row, dtype=np.int64) % self.p
        nz = np.nonzero(row)[0]
        while nz.size:
            lead = int(nz[0])
            piv = self.rows.get(lead)
            if piv is None:
                return row
            row = (row - int(row[lead]) * piv) % self.p
            nz = np.nonzero(row)[0]
        return row

    def insert(self, row) -> bool:
        row = self.reduce(row)
        if not row.any():
            return False
        lead = int(np.nonzero(row)[0][0])
        row = (row * pow(int(row[lead]), -1, self.p)) % self.p
        self.rows[lead] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def gfp_rank(rows, p: int, width: int) -> int:
    if p == 2:
        basis = GF2Basis()
        for r in rows:
            bits = 0
            arr = np.asarray(r, dtype=np.int64) % 2
            for j in np.nonzero(arr)[0]:
                bits |= 1 << int(j)
            basis.insert(bits)
        return basis.rank
    basis = GFpBasis(p, width)
    for r in rows:
        basis.insert(r)
    return basis.rank


def gfp_kernel_basis(rows, p: int, width: int) -> list[np.ndarray]:
    """Basis of the right kernel of the stacked rows over GF(p)."""
    mat = [np.asarray(r, dtype=np.int64) % p for r in rows]
    if not mat:
        return [np.eye(width, dtype=np.int64)[i] for i in range(width)]
    a = (np.stack(mat) % p).copy()
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        live = np.nonzero(a[r:, c])[0]
        if live.size == 0:
            continue
        piv = r + int(live[0])
        a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        mask = a[:, c] != 0
        mask[r] = False
        if mask.any():
            a[mask] = (a[mask] - np.outer(a[mask, c], a[r])) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for c in free:
        v = np.zeros(ncols, dtype=np.int64)
        v[c] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-a[i, c]) % p
        out.append(v)
    return out


def gfp_solve(rows, rhs, p: int, width: int) -> np.ndarray | None:
    """One solution of the stacked system over GF(p), or None."""
    mat = [np.asarray(r, dtype=np.int64) % p for r in rows]
    b = [int(x) % p for x in rhs]
    if not mat:
        return np.zeros(width, dtype=np.int64) if not any(b) else None
    a = np.concatenate([np.stack(mat), np.array(b, dtype=np.int64)[:, None]], axis=1) % p
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols - 1):
        live = np.nonzero(a[r:, c])[0]
        if live.size == 0:
            continue
        piv = r + int(live[0])
        a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        mask = a[:, c] != 0
        mask[r] = False
        if mask.any():
            a[mask] = (a[mask] - np.outer(a[mask, c], a[r])) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if a[i, -1] % p:
            return None
    x = np.zeros(ncols - 1, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = a[i, -1] % p
    return x


def prime_power_parts(m: int) -> dict[int, int]:
    return factorize(m)
