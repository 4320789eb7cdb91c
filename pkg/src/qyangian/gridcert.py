"""Certified equality of operator-valued rational functions on integer grids.

A check compares two factored operator products at every point of a
degree-bounded grid.  Two interchangeable evaluation backends exist:

* ``exact``   - sparse arithmetic over the Gaussian rationals;
* ``modular`` - residues modulo several word-sized primes with a rigorous
  magnitude bound, so agreement modulo all the primes proves exact equality
  (available when every scalar involved is rational).

The backend is chosen per check; the environment variable
``QYANGIAN_BACKEND`` (``auto``/``exact``/``modular``) overrides the choice.
Modular evaluation uses scipy sparse int64 kernels and falls back to the
exact path when scipy is unavailable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import gcd

from .exact_scalar import GaussRat, make_grid
from .gmat import GMat

try:
    import numpy as _np
    import scipy.sparse as _sp

    _HAVE_SCIPY = True
except Exception:  # pragma: no cover
    _HAVE_SCIPY = False

_MAX_MODULAR_DIM = 4096  # keeps int64 row accumulation below 2**63


@dataclass
class CheckResult:
    name: str
    ok: bool
    witness: dict | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def backend_choice(requested, dim, rational_only):
    env = os.environ.get("QYANGIAN_BACKEND", "").strip().lower()
    if env in ("exact", "modular"):
        requested = env
    if requested == "exact":
        return "exact"
    if requested == "modular":
        return "modular" if (_HAVE_SCIPY and rational_only and dim <= _MAX_MODULAR_DIM) else "exact"
    return "modular" if (_HAVE_SCIPY and rational_only and 128 <= dim <= _MAX_MODULAR_DIM) else "exact"


# ----------------------------------------------------------------------
# primes for the modular backend
# ----------------------------------------------------------------------

_MOD_PRIMES = []


def _is_prime(n):
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def modular_prime(k):
    while len(_MOD_PRIMES) <= k:
        c = (_MOD_PRIMES[-1] if _MOD_PRIMES else (1 << 25) + 1) - 2
        while not _is_prime(c):
            c -= 2
        _MOD_PRIMES.append(c)
    return _MOD_PRIMES[k]


class PrimeUnusable(Exception):
    def __init__(self, p):
        self.p = p


def _rational_only(m):
    return all(isinstance(v, GaussRat) and v.b == 0 for v in m.entries.values())


class _ModMat:
    """Integer matrix over a common denominator, stored modulo each prime."""

    __slots__ = ("mats", "den", "bound", "pattern", "dim")

    def __init__(self, mats, den, bound, pattern, dim):
        self.mats = mats
        self.den = den
        self.bound = bound
        self.pattern = pattern
        self.dim = dim

    @classmethod
    def from_gmat(cls, m, primes):
        dim = m.dim
        den = 1
        for v in m.entries.values():
            den = den * v.d // gcd(den, v.d)
        rows, cols, vals = [], [], []
        bound = 1
        for (r, c), v in m.entries.items():
            rows.append(r)
            cols.append(c)
            iv = v.a * (den // v.d)
            vals.append(iv)
            bound = max(bound, abs(iv))
        mats = []
        for p in primes:
            if den % p == 0:
                raise PrimeUnusable(p)
            data = _np.array([x % p for x in vals], dtype=_np.int64)
            mats.append(_sp.csr_matrix((data, (rows, cols)), shape=(dim, dim), dtype=_np.int64))
        pat = _sp.csr_matrix((_np.ones(len(vals), dtype=_np.int64), (rows, cols)), shape=(dim, dim))
        return cls(mats, den, bound, pat, dim)

    def matmul(self, other, primes):
        mats = []
        for p, a, b in zip(primes, self.mats, other.mats):
            c = a @ b
            if c.nnz:
                c.data %= p
                c.eliminate_zeros()
            mats.append(c)
        maxrow = int(self.pattern.getnnz(axis=1).max()) if self.pattern.nnz else 0
        bound = max(1, maxrow) * self.bound * other.bound
        pat = self.pattern @ other.pattern
        if pat.nnz:
            pat.data[:] = 1
        return _ModMat(mats, self.den * other.den, bound, pat, self.dim)


def _mod_product(factors, primes):
    acc = None
    for f in factors:
        m = _ModMat.from_gmat(f, primes)
        acc = m if acc is None else acc.matmul(m, primes)
    return acc


def _exact_product(factors):
    acc = None
    for f in factors:
        acc = f if acc is None else acc * f
    return acc


def _compare_modular(lhs_factors, rhs_factors, nprimes_start=3):
    """Prove exact equality of two factored rational matrices via residues.

    Equality modulo primes whose product exceeds twice the magnitude bound
    of the cross-multiplied difference is a proof of exact equality; any
    disagreeing residue disproves it.
    """
    k = nprimes_start
    skip = 0
    while True:
        primes = [modular_prime(skip + t) for t in range(k)]
        try:
            L = _mod_product(lhs_factors, primes)
            R = _mod_product(rhs_factors, primes)
        except PrimeUnusable:
            skip += 1
            continue
        bound = L.bound * R.den + R.bound * L.den
        for p, a, b in zip(primes, L.mats, R.mats):
            d = a * (R.den % p) - b * (L.den % p)
            if d.nnz:
                d.data %= p
                if (d.data != 0).any():
                    return False
        prod = 1
        for p in primes:
            prod *= p
        if prod > 2 * bound:
            return True
        k += max(1, ((2 * bound) // prod).bit_length() // 24 + 1)


def _as_gmats(factors):
    out = []
    for f in factors:
        out.append(f if isinstance(f, GMat) else GMat.from_superop(f))
    return out


def certify_op_identity(
    name,
    lhs_builder,
    rhs_builder,
    var_names,
    bounds,
    avoid=None,
    backend="auto",
):
    """Certify LHS(point) == RHS(point) on a full degree-bounded grid.

    Builders map a point dict to a list of factors (GMat or SuperOp) whose
    ordered product is the side value.  bounds[v]+1 grid values per variable
    must dominate the numerator degree of the cross-multiplied difference;
    `avoid` skips denominator zeros by shifting the whole grid.
    """
    var_names = list(var_names)
    if avoid is None:
        avoid = lambda pt: False
    points = make_grid(var_names, bounds, avoid) if var_names else [{}]
    probe = points[0]
    lf = _as_gmats(lhs_builder(probe))
    rf = _as_gmats(rhs_builder(probe))
    rational = all(_rational_only(f) for f in lf + rf)
    mode = backend_choice(backend, lf[0].dim, rational)

    for pt in points:
        lfs = _as_gmats(lhs_builder(pt))
        rfs = _as_gmats(rhs_builder(pt))
        if mode == "modular" and all(_rational_only(f) for f in lfs + rfs):
            if _compare_modular(lfs, rfs):
                continue
        L = _exact_product(lfs)
        R = _exact_product(rfs)
        diff = L - R
        if not diff.is_zero():
            key = min(diff.entries)
            lab = L.labels or (lf[0].labels if lf else None)
            ent = [list(lab[key[0]]), list(lab[key[1]])] if lab else list(key)
            return CheckResult(
                name,
                False,
                witness={
                    "point": {v: str(x) for v, x in pt.items()},
                    "entry": ent,
                    "value": str(diff.entries[key]),
                },
                detail={"backend": mode, "grid_points": len(points)},
            )
    return CheckResult(name, True, detail={"backend": mode, "grid_points": len(points)})
