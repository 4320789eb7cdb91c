"""Z2-graded tensor calculus on (C^{N|N})^{otimes n}.

Operators are sparse matrices in the standard basis e_i, i = 1..N,-1..-N,
with deg e_i = 0 for i > 0 and 1 for i < 0.  The matrix of a tensor product
of homogeneous operators carries the Koszul signs, so composition of stored
operators is plain sparse matrix multiplication; every sign in the library
is produced by the reordering routine `koszul_reorder_sign` or its two-item
shortcut `swap_sign`.
"""

from __future__ import annotations

import itertools
import json

from .exact_scalar import GaussRat, MINUS_ONE, ONE, RatFun, ZERO, parse_gaussrat


def parity(i):
    """Parity of the basis index i (0 for i > 0, 1 for i < 0)."""
    return 0 if i > 0 else 1


def par_tuple(t):
    return sum(1 for i in t if i < 0) & 1


def check_index(N, i):
    if i == 0 or abs(i) > N:
        raise IndexError(f"index {i} out of range for N={N}")
    return i


def index_list(N):
    return list(range(1, N + 1)) + list(range(-1, -N - 1, -1))


def koszul_reorder_sign(parities, perm):
    """Sign of reordering homogeneous factors: item k moves to slot perm[k].

    Counts inversions between odd items; this routine is the single source
    of truth for Koszul signs.
    """
    n = len(parities)
    sign = 1
    for k in range(n):
        for l in range(k + 1, n):
            if perm[k] > perm[l] and parities[k] and parities[l]:
                sign = -sign
    return sign


def swap_sign(p, q):
    """Sign for transposing two homogeneous items of parities p and q."""
    return koszul_reorder_sign((p & 1, q & 1), (1, 0))


def _unit_sign(row, col):
    # matrix entry of E_{r1 c1} (x) ... (x) E_{rn cn} at (row, col):
    # product over k < l of swap_sign(par(c_k), par(E_{r_l c_l}))
    sign = 1
    tail = 0  # parity sum of factors l > current, built right to left
    for k in range(len(row) - 1, -1, -1):
        if parity(col[k]) and (tail & 1):
            sign = -sign
        tail += parity(row[k]) + parity(col[k])
    return sign


class SuperOp:
    """Sparse even/odd operator on (C^{N|N})^{otimes n}.

    entries maps (row, col) multi-index pairs to GaussRat or RatFun scalars.
    """

    __slots__ = ("N", "arity", "entries")

    def __init__(self, N, arity, entries=None, declared_parity=None):
        self.N = N
        self.arity = arity
        self.entries = {}
        if entries:
            for (r, c), v in entries.items():
                if not _is_zero(v):
                    self.entries[(r, c)] = v
        if declared_parity is not None:
            p = self.parity()
            if p != declared_parity:
                raise ValueError(f"declared parity {declared_parity} but entries have parity {p}")

    # -- constructors ---------------------------------------------------
    @classmethod
    def zeros(cls, N, arity):
        return cls(N, arity)

    @classmethod
    def identity(cls, N, arity):
        op = cls(N, arity)
        for t in itertools.product(index_list(N), repeat=arity):
            op.entries[(t, t)] = ONE
        return op

    @classmethod
    def matrix_unit(cls, N, i, j):
        check_index(N, i)
        check_index(N, j)
        op = cls(N, 1)
        op.entries[((i,), (j,))] = ONE
        return op

    def copy(self):
        op = SuperOp(self.N, self.arity)
        op.entries = dict(self.entries)
        return op

    # -- structure ------------------------------------------------------
    def is_zero(self):
        return not self.entries

    def parity(self):
        """0/1 when all entries are parity-homogeneous, else None."""
        p = None
        for r, c in self.entries:
            q = (par_tuple(r) + par_tuple(c)) & 1
            if p is None:
                p = q
            elif p != q:
                return None
        return 0 if p is None else p

    def parity_part(self, p):
        op = SuperOp(self.N, self.arity)
        for (r, c), v in self.entries.items():
            if (par_tuple(r) + par_tuple(c)) & 1 == p:
                op.entries[(r, c)] = v
        return op

    def _check_compat(self, other):
        if self.N != other.N or self.arity != other.arity:
            raise ValueError("operator dimension/arity mismatch")

    # -- linear ops -------------------------------------------------------
    def __add__(self, other):
        self._check_compat(other)
        out = self.copy()
        for k, v in other.entries.items():
            s = out.entries.get(k)
            t = v if s is None else s + v
            if _is_zero(t):
                out.entries.pop(k, None)
            else:
                out.entries[k] = t
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = SuperOp(self.N, self.arity)
        out.entries = {k: -v for k, v in self.entries.items()}
        return out

    def scale(self, c):
        if _is_zero(c):
            return SuperOp(self.N, self.arity)
        out = SuperOp(self.N, self.arity)
        out.entries = {k: v * c for k, v in self.entries.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, SuperOp):
            return koszul_mul(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __matmul__(self, other):
        return koszul_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, SuperOp):
            return NotImplemented
        return self.N == other.N and self.arity == other.arity and self.entries == other.entries

    def __hash__(self):
        return hash((self.N, self.arity, tuple(sorted(self.entries.items()))))

    # -- unit-tensor decomposition ---------------------------------------
    def to_units(self):
        """Coefficients in the basis of Koszul tensor products of units."""
        return {(r, c): v * _unit_sign(r, c) if _unit_sign(r, c) < 0 else v
                for (r, c), v in self.entries.items()}

    @classmethod
    def from_units(cls, N, arity, units):
        op = cls(N, arity)
        for (r, c), v in units.items():
            s = _unit_sign(r, c)
            w = v if s > 0 else -v
            if not _is_zero(w):
                op.entries[(r, c)] = w
        return op

    def unit_coefficient(self, pairs):
        """Coefficient of E_{i1 j1} (x) ... (x) E_{in jn}; pairs = [(i,j),...]."""
        r = tuple(p[0] for p in pairs)
        c = tuple(p[1] for p in pairs)
        v = self.entries.get((r, c))
        if v is None:
            return ZERO
        return v * _unit_sign(r, c) if _unit_sign(r, c) < 0 else v

    def block(self, slot, i, j):
        """Operator B with X = sum_ij (E_ij in `slot`) tensor B, Koszul signs included."""
        out = SuperOp(self.N, self.arity - 1)
        units = {}
        e_par = (parity(i) + parity(j)) & 1
        for (r, c), v in self.to_units().items():
            if r[slot] != i or c[slot] != j:
                continue
            rr = r[:slot] + r[slot + 1:]
            cc = c[:slot] + c[slot + 1:]
            # move E_ij from the front past the factors in slots < slot
            sign = 1
            if e_par:
                crossed = sum(parity(r[k]) + parity(c[k]) for k in range(slot)) & 1
                sign = swap_sign(e_par, crossed) if crossed else 1
            units[(rr, cc)] = v if sign > 0 else -v
        return SuperOp.from_units(self.N, self.arity - 1, _accumulate(units))

    # -- entry transforms ---------------------------------------------
    def map_entries(self, fn):
        out = SuperOp(self.N, self.arity)
        for k, v in self.entries.items():
            w = fn(v)
            if not _is_zero(w):
                out.entries[k] = w
        return out

    def evaluate(self, subs):
        return self.map_entries(lambda v: v.evaluate(subs) if isinstance(v, RatFun) else v)

    def to_ratfun(self, variables):
        def lift(v):
            if isinstance(v, RatFun):
                return v
            return RatFun.const(v, variables)
        return self.map_entries(lift)

    # -- dense/serialization helpers -------------------------------------
    def basis(self):
        return list(itertools.product(index_list(self.N), repeat=self.arity))

    def dense(self):
        b = self.basis()
        pos = {t: k for k, t in enumerate(b)}
        n = len(b)
        m = [[ZERO] * n for _ in range(n)]
        for (r, c), v in self.entries.items():
            m[pos[r]][pos[c]] = v
        return m

    def dumps(self):
        ents = sorted(self.entries.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        return json.dumps(
            {
                "N": self.N,
                "arity": self.arity,
                "parity": self.parity(),
                "entries": [
                    [list(r), list(c), v.to_json() if isinstance(v, RatFun) else str(v)]
                    for (r, c), v in ents
                ],
            },
            sort_keys=True,
        )

    @classmethod
    def loads(cls, text):
        obj = json.loads(text)
        op = cls(obj["N"], obj["arity"])
        for r, c, v in obj["entries"]:
            val = RatFun.from_json(v) if isinstance(v, dict) else parse_gaussrat(v)
            op.entries[(tuple(r), tuple(c))] = val
        return op

    def __str__(self):
        ents = sorted(self.entries.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        bits = [f"{r}->{c}: {v}" for (r, c), v in ents]
        return f"SuperOp(N={self.N}, arity={self.arity}; " + "; ".join(bits) + ")"

    # -- exact inverse (dense Gauss-Jordan) -------------------------------
    def inverse(self):
        b = self.basis()
        pos = {t: k for k, t in enumerate(b)}
        n = len(b)
        a = [[ZERO] * n for _ in range(n)]
        for (r, c), v in self.entries.items():
            a[pos[r]][pos[c]] = v
        inv = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("operator is singular")
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
        out = SuperOp(self.N, self.arity)
        for i in range(n):
            for j in range(n):
                if inv[i][j]:
                    out.entries[(b[i], b[j])] = inv[i][j]
        return out


def _is_zero(v):
    z = getattr(v, "is_zero", None)
    return v == 0 if z is None else z()


def _accumulate(pairs):
    out = {}
    for k, v in pairs.items():
        s = out.get(k)
        t = v if s is None else s + v
        if _is_zero(t):
            out.pop(k, None)
        else:
            out[k] = t
    return out


# ----------------------------------------------------------------------
# products, tensors and embeddings
# ----------------------------------------------------------------------


def koszul_mul(a, b):
    """Composition of stored operators.

    The Koszul convention is absorbed into the matrices when tensors are
    built, so composition is plain sparse matrix multiplication.
    """
    a._check_compat(b)
    rows_b = {}
    for (r, c), v in b.entries.items():
        rows_b.setdefault(r, []).append((c, v))
    acc = {}
    for (r, m), v in a.entries.items():
        hits = rows_b.get(m)
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
    out = SuperOp(a.N, a.arity)
    out.entries = acc
    return out


def koszul_tensor(a, b):
    """Matrix of a (x) b with the sign (-1)^{deg X' deg Y} convention.

    Works entrywise, so non-homogeneous operands are handled by their
    homogeneous entry components.
    """
    if a.N != b.N:
        raise ValueError("tensor factors over different N")
    out = SuperOp(a.N, a.arity + b.arity)
    for (ra, ca), va in a.entries.items():
        pa = par_tuple(ca)
        for (rb, cb), vb in b.entries.items():
            sign = swap_sign(pa, (par_tuple(rb) + par_tuple(cb)) & 1)
            v = va * vb
            out.entries[(ra + rb, ca + cb)] = v if sign > 0 else -v
    return out


def tensor_many(ops):
    it = iter(ops)
    acc = next(it)
    for op in it:
        acc = koszul_tensor(acc, op)
    return acc


def embed(x, positions, n):
    """X_{p1...pm}: distribute the factors of x to the given slots of n.

    Computed entrywise by simulating the action of the ordered product
    iota_{p1}(X1)...iota_{pm}(Xm) on basis vectors; all signs are produced
    by parity crossing counts.
    """
    m = x.arity
    positions = list(positions)
    if len(positions) != m:
        raise ValueError("positions must match the operator arity")
    if len(set(positions)) != m or any(p < 1 or p > n for p in positions):
        raise ValueError("positions must be distinct and within range")
    slots = [p - 1 for p in positions]
    others = [k for k in range(n) if k not in slots]
    idx = index_list(x.N)
    out = SuperOp(x.N, n)
    units = x.to_units()
    acc = {}
    for (rm, cm), v in units.items():
        # factor k: E_{rm[k], cm[k]} applied at slot slots[k], right to left
        for fill in itertools.product(idx, repeat=len(others)):
            col = [0] * n
            for k, s in enumerate(slots):
                col[s] = cm[k]
            for k, o in enumerate(others):
                col[o] = fill[k]
            cur = list(col)
            sign = 1
            for k in range(m - 1, -1, -1):
                s = slots[k]
                ep = (parity(rm[k]) + parity(cm[k])) & 1
                if ep and (sum(parity(cur[q]) for q in range(s)) & 1):
                    sign = -sign
                cur[s] = rm[k]
            key = (tuple(cur), tuple(col))
            t = v if sign > 0 else -v
            sacc = acc.get(key)
            t = t if sacc is None else sacc + t
            if _is_zero(t):
                acc.pop(key, None)
            else:
                acc[key] = t
    # the simulation produces genuine matrix entries (basis-vector action)
    out.entries = acc
    return out


def permute_slots(x, perm):
    """Apply the algebra isomorphism permuting tensor slots (slot k -> perm[k])."""
    out_units = {}
    for (r, c), v in x.to_units().items():
        pars = [(parity(r[k]) + parity(c[k])) & 1 for k in range(x.arity)]
        sign = koszul_reorder_sign(pars, perm)
        nr = [0] * x.arity
        nc = [0] * x.arity
        for k in range(x.arity):
            nr[perm[k]] = r[k]
            nc[perm[k]] = c[k]
        key = (tuple(nr), tuple(nc))
        t = v if sign > 0 else -v
        s = out_units.get(key)
        t = t if s is None else s + t
        out_units[key] = t
    return SuperOp.from_units(x.N, x.arity, _accumulate(out_units))


def theta(x):
    """Swap the two tensor factors of an arity-2 operator, with Koszul sign."""
    if x.arity != 2:
        raise ValueError("theta acts on arity-2 operators")
    return permute_slots(x, (1, 0))


def eta_slot(x, slot=0):
    """E_ij -> E_{-i,-j} applied in one tensor slot."""
    units = {}
    for (r, c), v in x.to_units().items():
        nr = r[:slot] + (-r[slot],) + r[slot + 1:]
        nc = c[:slot] + (-c[slot],) + c[slot + 1:]
        units[(nr, nc)] = v
    return SuperOp.from_units(x.N, x.arity, units)


def eta_all(x):
    out = x
    for s in range(x.arity):
        out = eta_slot(out, s)
    return out


def tau_slot(x, slot=0):
    """E_ij -> E_ji * (-1)^{par(i)(par(j)+1)} applied in one tensor slot."""
    units = {}
    for (r, c), v in x.to_units().items():
        i, j = r[slot], c[slot]
        sign = -1 if parity(i) and not parity(j) else 1  # (-1)^{par(i)(par(j)+1)}
        nr = r[:slot] + (j,) + r[slot + 1:]
        nc = c[:slot] + (i,) + c[slot + 1:]
        t = v if sign > 0 else -v
        s = units.get((nr, nc))
        units[(nr, nc)] = t if s is None else s + t
    return SuperOp.from_units(x.N, x.arity, _accumulate(units))


def supercommutator(a, b):
    """[a,b] = ab - (-1)^{deg a deg b} ba, splitting non-homogeneous factors."""
    out = SuperOp(a.N, a.arity)
    for pa in (0, 1):
        ap = a.parity_part(pa)
        if ap.is_zero():
            continue
        for pb in (0, 1):
            bp = b.parity_part(pb)
            if bp.is_zero():
                continue
            term = koszul_mul(ap, bp) - koszul_mul(bp, ap).scale(
                ONE if swap_sign(pa, pb) > 0 else MINUS_ONE
            )
            out = out + term
    return out


# ----------------------------------------------------------------------
# distinguished elements
# ----------------------------------------------------------------------


def op_P(N):
    """P = sum E_ij (x) E_ji (-1)^{par j}."""
    op = SuperOp(N, 2)
    for i in index_list(N):
        for j in index_list(N):
            u = koszul_tensor(SuperOp.matrix_unit(N, i, j), SuperOp.matrix_unit(N, j, i))
            op = op + (u if parity(j) == 0 else -u)
    return op


def op_J(N):
    """J = sum E_{i,-i} (-1)^{par i}; odd, squares to -1."""
    op = SuperOp(N, 1)
    for i in index_list(N):
        op.entries[((i,), (-i,))] = ONE if parity(i) == 0 else MINUS_ONE
    return op


def op_Q(N):
    """Q = (id (x) tau)(P) = sum E_ij (x) E_ij (-1)^{par i par j}."""
    return tau_slot(op_P(N), 1)


def op_E(N):
    """Identity of End(C^{N|N}) written as sum of diagonal units."""
    return SuperOp.identity(N, 1)


def op_F(N, i, j):
    """F_ij = E_ij + E_{-i,-j}, the defining image of the queer algebra."""
    return SuperOp.matrix_unit(N, i, j) + SuperOp.matrix_unit(N, -i, -j)


def constants(N):
    return {
        "P": op_P(N),
        "J": op_J(N),
        "Q": op_Q(N),
        "E": op_E(N),
        "F": {(i, j): op_F(N, i, j) for i in index_list(N) for j in index_list(N)},
    }
