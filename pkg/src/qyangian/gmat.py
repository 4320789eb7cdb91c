"""Graded sparse matrices on an explicit basis with a parity vector.

SuperOp encodes operators on tensor powers of C^{N|N}; GMat is the flat
counterpart used wherever the carrier is not a plain tensor power (quotient
spaces, modules of the Sergeev algebra) and inside the evaluation engines.
Tensor products take their signs from the same parity-crossing rule as the
rest of the library.
"""

from __future__ import annotations

import itertools

from .exact_scalar import GaussRat, ONE, ZERO
from .super_linear import SuperOp, index_list, par_tuple, swap_sign


def _is_zero(v):
    z = getattr(v, "is_zero", None)
    return v == 0 if z is None else z()


class GMat:
    __slots__ = ("parities", "entries", "labels")

    def __init__(self, parities, entries=None, labels=None):
        self.parities = tuple(parities)
        self.entries = {}
        if entries:
            for k, v in entries.items():
                if not _is_zero(v):
                    self.entries[k] = v
        self.labels = labels

    @property
    def dim(self):
        return len(self.parities)

    @classmethod
    def identity(cls, parities):
        m = cls(parities)
        for k in range(len(m.parities)):
            m.entries[(k, k)] = ONE
        return m

    @classmethod
    def zeros(cls, parities):
        return cls(parities)

    @classmethod
    def from_superop(cls, op):
        basis = list(itertools.product(index_list(op.N), repeat=op.arity))
        pos = {t: k for k, t in enumerate(basis)}
        m = cls([par_tuple(t) for t in basis], labels=basis)
        for (r, c), v in op.entries.items():
            m.entries[(pos[r], pos[c])] = v
        return m

    def copy(self):
        m = GMat(self.parities, labels=self.labels)
        m.entries = dict(self.entries)
        return m

    def is_zero(self):
        return not self.entries

    def parity(self):
        p = None
        for r, c in self.entries:
            q = (self.parities[r] + self.parities[c]) & 1
            if p is None:
                p = q
            elif p != q:
                return None
        return 0 if p is None else p

    def parity_part(self, p):
        m = GMat(self.parities, labels=self.labels)
        for (r, c), v in self.entries.items():
            if (self.parities[r] + self.parities[c]) & 1 == p:
                m.entries[(r, c)] = v
        return m

    def _check(self, other):
        if self.parities != other.parities:
            raise ValueError("graded matrix basis mismatch")

    def __add__(self, other):
        self._check(other)
        m = self.copy()
        for k, v in other.entries.items():
            s = m.entries.get(k)
            t = v if s is None else s + v
            if _is_zero(t):
                m.entries.pop(k, None)
            else:
                m.entries[k] = t
        return m

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        m = GMat(self.parities, labels=self.labels)
        m.entries = {k: -v for k, v in self.entries.items()}
        return m

    def scale(self, c):
        if _is_zero(c):
            return GMat(self.parities, labels=self.labels)
        m = GMat(self.parities, labels=self.labels)
        m.entries = {k: v * c for k, v in self.entries.items()}
        return m

    def __mul__(self, other):
        if not isinstance(other, GMat):
            return self.scale(other)
        self._check(other)
        rows_b = {}
        for (r, c), v in other.entries.items():
            rows_b.setdefault(r, []).append((c, v))
        acc = {}
        for (r, m_), v in self.entries.items():
            hits = rows_b.get(m_)
            if not hits:
                continue
            for c, w in hits:
                key = (r, c)
                t = v * w
                s = acc.get(key)
                t = t if s is None else s + t
                if _is_zero(t):
                    acc.pop(key, None)
                else:
                    acc[key] = t
        out = GMat(self.parities, labels=self.labels)
        out.entries = acc
        return out

    __rmul__ = scale
    __matmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GMat):
            return NotImplemented
        return self.parities == other.parities and self.entries == other.entries

    def __hash__(self):
        return hash((self.parities, tuple(sorted(self.entries.items()))))

    def matvec(self, vec):
        """Apply to a sparse column vector dict index -> scalar."""
        out = {}
        for (r, c), v in self.entries.items():
            w = vec.get(c)
            if w is None:
                continue
            t = v * w
            s = out.get(r)
            t = t if s is None else s + t
            if _is_zero(t):
                out.pop(r, None)
            else:
                out[r] = t
        return out

    def supercommutator(self, other):
        out = GMat(self.parities, labels=self.labels)
        for pa in (0, 1):
            ap = self.parity_part(pa)
            if ap.is_zero():
                continue
            for pb in (0, 1):
                bp = other.parity_part(pb)
                if bp.is_zero():
                    continue
                term = ap * bp - (bp * ap).scale(ONE if swap_sign(pa, pb) > 0 else -ONE)
                out = out + term
        return out

    def inverse(self):
        n = self.dim
        a = [[ZERO] * n for _ in range(n)]
        for (r, c), v in self.entries.items():
            a[r][c] = v
        inv = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("singular graded matrix")
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            pc = a[col][col].inverse()
            a[col] = [x * pc for x in a[col]]
            inv[col] = [x * pc for x in inv[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
        out = GMat(self.parities, labels=self.labels)
        for i in range(n):
            for j in range(n):
                if inv[i][j]:
                    out.entries[(i, j)] = inv[i][j]
        return out

    def flat_entries(self):
        return self.dim, self.entries.items()

    def __str__(self):
        return f"GMat(dim={self.dim}, nnz={len(self.entries)})"

    __repr__ = __str__


def tensor(a, b):
    """Koszul tensor product of graded matrices."""
    db = b.dim
    parities = [(p + q) & 1 for p in a.parities for q in b.parities]
    out = GMat(parities)
    for (ra, ca), va in a.entries.items():
        pc = a.parities[ca]
        for (rb, cb), vb in b.entries.items():
            sign = swap_sign(pc, (b.parities[rb] + b.parities[cb]) & 1)
            v = va * vb
            out.entries[(ra * db + rb, ca * db + cb)] = v if sign > 0 else -v
    return out


def tensor_many(mats):
    it = iter(mats)
    acc = next(it)
    for m in it:
        acc = tensor(acc, m)
    return acc


def compose(a, b):
    """Product of raw entry dicts {(r,c): scalar} (maps between different
    graded bases, where GMat's same-basis check does not apply)."""
    rows_b = {}
    for (r, c), v in b.items():
        rows_b.setdefault(r, []).append((c, v))
    out = {}
    for (r, m), v in a.items():
        for c, w in rows_b.get(m, ()):
            key = (r, c)
            t = v * w
            s = out.get(key)
            t = t if s is None else s + t
            if _is_zero(t):
                out.pop(key, None)
            else:
                out[key] = t
    return out


def entries_full_rank(entries, dim):
    """True when the raw square entry dict has full rank."""
    from collections import defaultdict

    cols = defaultdict(dict)
    for (r, c), v in entries.items():
        cols[c][r] = v
    pivots = {}
    rank = 0
    for c in range(dim):
        r = dict(cols.get(c, {}))
        while r:
            lead = min(r)
            piv = pivots.get(lead)
            if piv is None:
                inv = r[lead].inverse()
                pivots[lead] = {k: v * inv for k, v in r.items()}
                rank += 1
                break
            f = r[lead]
            for k, v in piv.items():
                s = r.get(k)
                t = -(f * v) if s is None else s - f * v
                if t:
                    r[k] = t
                else:
                    r.pop(k, None)
    return rank == dim


def braid_map(par_factors, perm):
    """Signed permutation reordering tensor factors of a graded vector space.

    par_factors: one parity vector per factor; factor k moves to slot
    perm[k].  Returns (entries, out_parities): entries maps (row, col) flat
    indices to +-1 scalars, rows indexing the reordered space.
    """
    n = len(par_factors)
    dims = [len(p) for p in par_factors]
    new_dims = [0] * n
    new_par_factors = [None] * n
    for k in range(n):
        new_dims[perm[k]] = dims[k]
        new_par_factors[perm[k]] = par_factors[k]
    out_pars = [
        sum(new_par_factors[s][combo[s]] for s in range(n)) & 1
        for combo in itertools.product(*[range(d) for d in new_dims])
    ]

    def flat(combo, dd):
        f = 0
        for k, c in enumerate(combo):
            f = f * dd[k] + c
        return f

    entries = {}
    for combo in itertools.product(*[range(d) for d in dims]):
        target = [0] * n
        for k in range(n):
            target[perm[k]] = combo[k]
        sign = 1
        pars = [par_factors[k][combo[k]] for k in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j] and pars[i] and pars[j]:
                    sign = -sign
        entries[(flat(tuple(target), new_dims), flat(combo, dims))] = ONE if sign > 0 else -ONE
    return entries, out_pars
