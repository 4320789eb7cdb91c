"""The Drinfeld-type functor from Sergeev-algebra modules to Yangian modules.

An AnModule is a finite-dimensional graded module given by exact generator
matrices; the functor forms hyperoctahedral coinvariants of the tensor
product with (C^{N|N})^{(x) n} and pushes the Jucys-Murphy-type action
down to the quotient.  The two constructions of the generating matrix (the
ordered product of spectral factors in the polynomial generators, and the
one-line sum over the non-commuting generators) are both realized and
compared on the quotient.
"""

from __future__ import annotations

import itertools
import random

from .exact_scalar import GaussRat, I_UNIT, MINUS_ONE, ONE, ZERO, make_grid
from .gmat import GMat, tensor
from .gridcert import CheckResult
from .sergeev import (
    AnElement,
    HnElement,
    adjacent_word,
    an_mul,
    hn_basis,
    hn_mul,
    gamma,
    gamma_x_image,
    perm_id,
    perm_inv,
    perm_mul,
    transposition,
    y_generators,
)
from .super_linear import SuperOp, embed, index_list, op_J, op_P, par_tuple, parity
from .yangian import assemble_aux, aux_block, insert_mid


# ----------------------------------------------------------------------
# A_n modules
# ----------------------------------------------------------------------


class AnModule:
    """Graded module over the affine Sergeev algebra, by generator matrices."""

    def __init__(self, n, parities, w_mats, c_mats, x_mats, check=True):
        self.n = n
        self.parities = tuple(parities)
        self.w_mats = list(w_mats)  # adjacent transpositions s_1..s_{n-1}
        self.c_mats = list(c_mats)
        self.x_mats = list(x_mats)
        if check:
            res = self.check_relations()
            if not res.ok:
                raise ValueError(f"generator matrices violate the relations: {res.witness}")

    @property
    def dim(self):
        return len(self.parities)

    def perm_mat(self, w):
        acc = GMat.identity(self.parities)
        for q in adjacent_word(w):
            acc = acc * self.w_mats[q - 1]
        return acc

    def apply(self, el):
        """Matrix of an AnElement in PBW normal form."""
        acc = GMat(self.parities)
        for (c, w, s), v in el.terms.items():
            m = GMat.identity(self.parities)
            for p in c:
                m = m * self.c_mats[p - 1]
            m = m * self.perm_mat(w)
            for p in range(1, self.n + 1):
                for _ in range(s[p - 1]):
                    m = m * self.x_mats[p - 1]
            acc = acc + m.scale(v)
        return acc

    def check_relations(self, name="an-module-relations"):
        n = self.n
        one = GMat.identity(self.parities)

        def bad(w):
            return CheckResult(name, False, witness=w)

        for p in range(n):
            if self.c_mats[p].parity() != 1:
                return bad({"relation": "c-parity", "p": p + 1})
            if self.x_mats[p].parity() != 0:
                return bad({"relation": "x-parity", "p": p + 1})
            if self.c_mats[p] * self.c_mats[p] != -one:
                return bad({"relation": "c^2", "p": p + 1})
            for q in range(n):
                if p != q:
                    if self.c_mats[p] * self.c_mats[q] != -(self.c_mats[q] * self.c_mats[p]):
                        return bad({"relation": "cc", "p": p + 1, "q": q + 1})
                if self.x_mats[p] * self.x_mats[q] != self.x_mats[q] * self.x_mats[p]:
                    return bad({"relation": "xx", "p": p + 1, "q": q + 1})
            cx = self.x_mats[p] * self.c_mats[p]
            if cx != -(self.c_mats[p] * self.x_mats[p]):
                return bad({"relation": "xc", "p": p + 1})
        for q in range(n - 1):
            w = self.w_mats[q]
            if w.parity() != 0:
                return bad({"relation": "w-parity", "q": q + 1})
            if w * w != one:
                return bad({"relation": "w^2", "q": q + 1})
            if q + 1 < n - 1:
                w2 = self.w_mats[q + 1]
                if w * w2 * w != w2 * w * w2:
                    return bad({"relation": "braid", "q": q + 1})
            for q2 in range(n - 1):
                if abs(q2 - q) >= 2 and self.w_mats[q2] * w != w * self.w_mats[q2]:
                    return bad({"relation": "ww", "q": q + 1, "q2": q2 + 1})
            for p in range(n):
                tgt = p if p not in (q, q + 1) else (q + 1 if p == q else q)
                if w * self.c_mats[p] * w != self.c_mats[tgt]:
                    return bad({"relation": "wcw", "p": p + 1, "q": q + 1})
                lhs = self.x_mats[p] * w
                if p == q:
                    rhs = w * self.x_mats[q + 1] - one - self.c_mats[q] * self.c_mats[q + 1]
                elif p == q + 1:
                    rhs = w * self.x_mats[q] + one - self.c_mats[q] * self.c_mats[q + 1]
                else:
                    rhs = w * self.x_mats[p]
                if lhs != rhs:
                    return bad({"relation": "xw", "p": p + 1, "q": q + 1})
        return CheckResult(name, True)


def principal_series(zs):
    """The module induced from the character x_p -> z_p; carrier H_n."""
    zs = [z if isinstance(z, GaussRat) else GaussRat(z) for z in zs]
    n = len(zs)
    basis = hn_basis(n)
    pos = {b: k for k, b in enumerate(basis)}
    pars = [len(c) & 1 for (c, _w) in basis]

    def act(gen_el):
        m = GMat(pars)
        for k, (c, w) in enumerate(basis):
            prod = an_mul(gen_el, AnElement(n, {(c, w, (0,) * n): ONE}))
            for (c2, w2, s2), v in prod.terms.items():
                coeff = v
                for p in range(n):
                    if s2[p]:
                        coeff = coeff * zs[p] ** s2[p]
                key = (pos[(c2, w2)], k)
                cur = m.entries.get(key)
                t = coeff if cur is None else cur + coeff
                if t:
                    m.entries[key] = t
                else:
                    m.entries.pop(key, None)
        return m

    w_mats = [act(AnElement.w(n, q, q + 1)) for q in range(1, n)]
    c_mats = [act(AnElement.c(n, p)) for p in range(1, n + 1)]
    x_mats = [act(AnElement.x(n, p)) for p in range(1, n + 1)]
    return AnModule(n, pars, w_mats, c_mats, x_mats)


def gamma0_pullback(M, n):
    """A_n acting on (C^{M|M})^{(x) n} through gamma_0 and the Hecke-Clifford
    matrix representation (the y generators act by zero)."""
    basis = list(itertools.product(index_list(M), repeat=n))
    pars = [par_tuple(t) for t in basis]
    P = op_P(M)
    J = op_J(M)
    w_mats = [GMat.from_superop(embed(P, [q, q + 1], n)) for q in range(1, n)]
    c_mats = [GMat.from_superop(embed(J, [p], n)) for p in range(1, n + 1)]

    def hmat(h):
        acc = GMat(pars)
        for (c, w), v in h.terms.items():
            m = GMat.identity(pars)
            for p in c:
                m = m * c_mats[p - 1]
            for q in adjacent_word(w):
                m = m * w_mats[q - 1]
            acc = acc + m.scale(v)
        return acc

    x_mats = [hmat(gamma_x_image(n, 0, p)) for p in range(1, n + 1)]
    return AnModule(n, pars, w_mats, c_mats, x_mats)


def conjugated_module(mod, g):
    """Equivalent module with generators g M g^{-1}; g must be even."""
    gi = g.inverse()
    conj = lambda m: g * m * gi
    return AnModule(
        mod.n,
        mod.parities,
        [conj(m) for m in mod.w_mats],
        [conj(m) for m in mod.c_mats],
        [conj(m) for m in mod.x_mats],
    )


# ----------------------------------------------------------------------
# coinvariants
# ----------------------------------------------------------------------


def hash_matrix(m):
    return tuple(sorted((k, v.a, v.b, v.d) for k, v in m.entries.items()))


class RowReducer:
    """Incremental reduced row echelon form over the Gaussian rationals."""

    def __init__(self):
        self.pivots = {}  # leading key -> row dict (leading coeff 1)

    def reduce(self, vec):
        """Eliminate every pivot coordinate (the rows are kept fully
        reduced, so elimination introduces only non-pivot keys)."""
        r = dict(vec)
        while True:
            hits = [k for k in r if k in self.pivots]
            if not hits:
                return r
            for k in hits:
                f = r.pop(k, None)
                if not f:
                    continue
                for kk, v in self.pivots[k].items():
                    if kk == k:
                        continue
                    s = r.get(kk)
                    t = -(f * v) if s is None else s - f * v
                    if t:
                        r[kk] = t
                    else:
                        r.pop(kk, None)

    def add(self, vec):
        r = self.reduce(vec)
        if not r:
            return False
        lead = min(r)
        inv = r[lead].inverse()
        row = {k: v * inv for k, v in r.items()}
        # full reduction: eliminate the new pivot from the existing rows
        for piv in self.pivots.values():
            f = piv.get(lead)
            if f is None:
                continue
            for k, v in row.items():
                s = piv.get(k)
                t = -(f * v) if s is None else s - f * v
                if t:
                    piv[k] = t
                else:
                    piv.pop(k, None)
        self.pivots[lead] = row
        return True


class CoinvariantSpace:
    """Quotient of the ambient space by the span of (alpha(g) - 1) images.

    The section sends the quotient basis to the ambient unit vectors on the
    non-pivot coordinates (pivots are the lexicographically least columns of
    the reduced span)."""

    def __init__(self, ambient_pars, alpha_gens):
        self.ambient_pars = tuple(ambient_pars)
        self.alpha_gens = alpha_gens
        red = RowReducer()
        dim = len(self.ambient_pars)
        for g in alpha_gens:
            for col in range(dim):
                vec = {r: v for (r, c), v in g.entries.items() if c == col}
                cur = vec.get(col)
                vec[col] = (cur if cur is not None else ZERO) - ONE
                if not vec[col]:
                    vec.pop(col)
                if vec:
                    red.add(vec)
        self.reducer = red
        pivots = set(red.pivots)
        self.nonpivots = [k for k in range(dim) if k not in pivots]
        self.vpars = tuple(self.ambient_pars[k] for k in self.nonpivots)
        self._vpos = {k: t for t, k in enumerate(self.nonpivots)}
        self._projector = None

    def group_projector(self):
        """Group-averaging idempotent onto the invariants (pi is unchanged
        by composing with it, and its image gives the invariant section)."""
        if self._projector is None:
            if not self.alpha_gens:
                self._projector = GMat.identity(self.ambient_pars)
            else:
                seen = {}
                ident = GMat.identity(self.ambient_pars)
                frontier = [ident]
                seen[hash_matrix(ident)] = ident
                while frontier:
                    new = []
                    for m in frontier:
                        for g in self.alpha_gens:
                            prod = m * g
                            key = hash_matrix(prod)
                            if key not in seen:
                                seen[key] = prod
                                new.append(prod)
                    frontier = new
                acc = GMat(self.ambient_pars)
                for m in seen.values():
                    acc = acc + m
                self._projector = acc.scale(GaussRat(1, 0, len(seen)))
        return self._projector

    def invariant_section_vec(self, t):
        """Section with invariant image: average the unit representative."""
        e = self.group_projector()
        return {r: v for (r, c), v in e.entries.items() if c == self.nonpivots[t]}

    @property
    def dim(self):
        return len(self.nonpivots)

    def project_vec(self, vec):
        r = self.reducer.reduce(vec)
        return {self._vpos[k]: v for k, v in r.items()}

    def section_vec(self, t):
        return {self.nonpivots[t]: ONE}

    def induce(self, op):
        """Matrix of the induced quotient map (caller guarantees the span is
        preserved, e.g. because op commutes with the group action)."""
        m = GMat(self.vpars)
        cols = {}
        for (r, c), v in op.entries.items():
            cols.setdefault(c, {})[r] = v
        for t, amb in enumerate(self.nonpivots):
            col = cols.get(amb)
            if not col:
                continue
            for r, v in self.project_vec(col).items():
                m.entries[(r, t)] = v
        return m

    def annihilates_span(self, op, sample=None):
        """Check op(span) stays in the span (projection of images of pivot
        rows vanishes); with `sample`, only that many pivot rows are tried."""
        rows = list(self.reducer.pivots.values())
        if sample is not None:
            rows = rows[:sample]
        for row in rows:
            img = {}
            for amb, coef in row.items():
                for (r, c), v in op.entries.items():
                    if c != amb:
                        continue
                    t = img.get(r)
                    u = v * coef if t is None else t + v * coef
                    if u:
                        img[r] = u
                    else:
                        img.pop(r, None)
            if self.project_vec(img):
                return False
        return True


def hyperoctahedral_action(N, mod):
    """The alpha action on (C^{N|N})^{(x) n} (x) U; transpositions act by
    the flip tensored with the module action, the sign-flip generators by
    J_p (x) c_p times sqrt(-1)."""
    n = mod.n
    P = op_P(N)
    J = op_J(N)
    gens = []
    for q in range(1, n):
        gens.append(tensor(GMat.from_superop(embed(P, [q, q + 1], n)), mod.w_mats[q - 1]))
    for p in range(1, n + 1):
        gens.append(
            tensor(GMat.from_superop(embed(J, [p], n)), mod.c_mats[p - 1]).scale(I_UNIT)
        )
    ident = GMat.identity(gens[0].parities) if gens else None
    for k, g in enumerate(gens):
        if ident is not None and g * g != ident:
            raise ValueError(f"alpha generator {k} does not square to one")
    # group-action sanity beyond squares: braid and mixed relations
    nw = n - 1
    for q in range(nw):
        for p in range(n):
            tgt = p if p not in (q, q + 1) else (q + 1 if p == q else q)
            if gens[q] * gens[nw + p] * gens[q] != gens[nw + tgt]:
                raise ValueError("alpha is not a hyperoctahedral action")
    for p in range(n):
        for q in range(p + 1, n):
            zp, zq = gens[nw + p], gens[nw + q]
            if zp * zq != zq * zp:
                raise ValueError("sign-flip generators do not commute")
    return gens


def coinvariants(N, mod):
    if mod.n == 0:
        return CoinvariantSpace(mod.parities, [])
    gens = hyperoctahedral_action(N, mod)
    pars = gens[0].parities
    return CoinvariantSpace(pars, gens)


# ----------------------------------------------------------------------
# the functor
# ----------------------------------------------------------------------


def _minpoly(m):
    """Exact minimal polynomial (list of coefficients, monic) of a GMat."""
    dim = m.dim
    red = RowReducer()
    powers = [GMat.identity(m.parities)]
    vecs = []
    while True:
        cur = powers[-1]
        vec = {r * dim + c: v for (r, c), v in cur.entries.items()}
        res = red.reduce(vec)
        if not res:
            # current power is a combination of the previous ones: solve
            k = len(powers) - 1
            rows = []
            for j in range(k):
                pw = powers[j]
                rows.append({r * dim + c: v for (r, c), v in pw.entries.items()})
            target = {r * dim + c: v for (r, c), v in powers[-1].entries.items()}
            coeffs = _solve_combination(rows, target)
            return [-c for c in coeffs] + [ONE]
        red.add(vec)
        vecs.append(vec)
        powers.append(cur * m)


def _solve_combination(rows, target):
    """Solve sum_j a_j rows[j] == target exactly (assumes solvable)."""
    keys = sorted({k for r in rows for k in r} | set(target))
    aug = []
    for k in keys:
        aug.append([r.get(k, ZERO) for r in rows] + [target.get(k, ZERO)])
    ncols = len(rows)
    pivots = []
    rr = 0
    for c in range(ncols):
        piv = next((r for r in range(rr, len(aug)) if aug[r][c]), None)
        if piv is None:
            pivots.append(None)
            continue
        aug[rr], aug[piv] = aug[piv], aug[rr]
        inv = aug[rr][c].inverse()
        aug[rr] = [x * inv for x in aug[rr]]
        for r in range(len(aug)):
            if r != rr and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[rr])]
        pivots.append(rr)
        rr += 1
    out = []
    for c in range(ncols):
        out.append(aug[pivots[c]][ncols] if pivots[c] is not None else ZERO)
    return out


def _poly_mod(a, b):
    """Remainder of univariate coefficient lists (low to high)."""
    a = list(a)
    db = len(b) - 1
    while len(b) > 1 and not b[-1]:
        b = b[:-1]
        db -= 1
    while len(a) - 1 >= db and any(a):
        while a and not a[-1]:
            a.pop()
        if len(a) - 1 < db:
            break
        f = a[-1] / b[-1]
        shift = len(a) - 1 - db
        for k in range(db + 1):
            a[shift + k] = a[shift + k] - f * b[k]
        a.pop()
    while a and not a[-1]:
        a.pop()
    return a


def _pair_den_degree(mp):
    """Degree of lcm(m(u), m(-u)) for a monic coefficient list."""
    m_neg = [c if k % 2 == 0 else -c for k, c in enumerate(mp)]
    a, b = list(mp), m_neg
    while any(b):
        a, b = b, _poly_mod(a, b)
    gdeg = len(a) - 1 if a else 0
    return 2 * (len(mp) - 1) - gdeg


class Resolvent:
    """(u -+ X)^{-1} = g(u, X)/m(+-u) from the exact minimal polynomial."""

    def __init__(self, x):
        self.x = x
        self.mp = _minpoly(x)  # monic coefficients, low to high
        self.deg = len(self.mp) - 1
        self.pair_deg = _pair_den_degree(self.mp)
        self.powers = [GMat.identity(x.parities)]
        for _ in range(self.deg - 1):
            self.powers.append(self.powers[-1] * x)

    def m_at(self, u):
        acc = ZERO
        for k, c in enumerate(self.mp):
            acc = acc + c * u ** k
        return acc

    def inverse_at(self, u):
        """(u - X)^{-1}; divide-free numerator g(u,X) = (m(u)-m(X))/(u-X)."""
        mu = self.m_at(u)
        if not mu:
            raise ZeroDivisionError("u hits the spectrum")
        # g(u, t) = sum_{k>=1} m_k (u^{k-1} + u^{k-2} t + ... + t^{k-1})
        acc = GMat(self.x.parities)
        for k in range(1, self.deg + 1):
            mk = self.mp[k]
            if not mk:
                continue
            for j in range(k):
                acc = acc + self.powers[j].scale(mk * u ** (k - 1 - j))
        return acc.scale(mu.inverse())

    def avoid(self, u):
        return not self.m_at(u)


class YqnModule:
    """Yangian module on the coinvariant space of an A_n module."""

    def __init__(self, N, mod, s_max=5):
        self.N = N
        self.mod = mod
        self.n = mod.n
        self.coin = coinvariants(N, mod)
        self.carrier_pars = self.coin.vpars
        self.s_max = s_max
        self._ymats = None
        self._table = {}
        self._ambient_coeff_cache = {}
        self._res_x = None
        self._res_y = None
        self._vfactor_data = None
        self._build_tables(s_max)

    # ---- the one-line (non-commuting generator) construction ----------
    def _y_mats(self):
        if self._ymats is None:
            ys = y_generators(self.n) if self.n else []
            self._ymats = [self.mod.apply(y) for y in ys]
        return self._ymats

    def ambient_coefficient(self, i, j, s):
        """Operator on the tensor (x) module space giving the level s+1
        generator before projection."""
        key = (i, j, s)
        hit = self._ambient_coeff_cache.get(key)
        if hit is not None:
            return hit
        N, n = self.N, self.n
        ymats = self._y_mats()
        sgn = ONE if parity(j) else MINUS_ONE  # (-1)^{par j + 1}
        acc = None
        for p in range(1, n + 1):
            a = GMat.from_superop(embed(SuperOp.matrix_unit(N, j, i), [p], n))
            b = GMat.from_superop(embed(SuperOp.matrix_unit(N, -j, -i), [p], n))
            eop = a + (b if s % 2 == 0 else -b)
            ypow = GMat.identity(self.mod.parities)
            for _ in range(s):
                ypow = ypow * ymats[p - 1]
            term = tensor(eop, ypow)
            acc = term if acc is None else acc + term
        out = (acc if acc is not None else GMat(self.coin.ambient_pars)).scale(sgn)
        self._ambient_coeff_cache[key] = out
        return out

    def _build_tables(self, s_max):
        if self.n == 0:
            return
        for s in range(1, s_max + 1):
            for i in index_list(self.N):
                for j in index_list(self.N):
                    amb = self.ambient_coefficient(i, j, s - 1)
                    self._table[(i, j, s)] = self.coin.induce(amb)

    def table(self, i, j, s):
        if self.n == 0:
            return GMat(self.carrier_pars)
        if (i, j, s) not in self._table:
            self._table[(i, j, s)] = self.coin.induce(self.ambient_coefficient(i, j, s - 1))
        return self._table[(i, j, s)]

    # ---- closed form on the quotient ----------------------------------
    def _resolvents(self):
        if self._res_y is None:
            self._res_y = [Resolvent(m) for m in self._y_mats()]
            self._res_x = [Resolvent(m) for m in self.mod.x_mats]
        return self._res_x, self._res_y

    def _vfactor_parts(self):
        """Induced matrices of P_{1,p+1} (x) y_p^k and (P J J)_{1,p+1} (x) y_p^k
        on aux (x) V, precomputed once."""
        if self._vfactor_data is None:
            N, n = self.N, self.n
            _, res_y = self._resolvents()
            P = op_P(N)
            data = []
            for p in range(1, n + 1):
                eP = GMat.from_superop(embed(P, [1, p + 1], n + 1))
                ePJJ = GMat.from_superop(embed(_pjj_op(N), [1, p + 1], n + 1))
                terms_m = []
                terms_p = []
                for k in range(res_y[p - 1].deg):
                    ypow = res_y[p - 1].powers[k]
                    terms_m.append(self._induce_aux(tensor(eP, ypow)))
                    terms_p.append(self._induce_aux(tensor(ePJJ, ypow)))
                data.append((terms_m, terms_p, res_y[p - 1]))
            self._vfactor_data = data
        return self._vfactor_data

    def _induce_aux(self, op):
        """Induce an operator on aux (x) (tensor (x) U) to aux (x) V."""
        blocks = {}
        amb_pars = self.coin.ambient_pars
        for i in index_list(self.N):
            for j in index_list(self.N):
                b = aux_block(op, self.N, amb_pars, i, j)
                if b.is_zero():
                    continue
                blocks[(i, j)] = self.coin.induce(b)
        return assemble_aux(blocks, self.N, self.carrier_pars)

    def t_v_matrix(self, u):
        """T(u) on aux (x) V via the one-line construction."""
        data = self._vfactor_parts()
        idx_pars = [(parity(i) + p) & 1 for i in index_list(self.N) for p in self.carrier_pars]
        acc = GMat.identity(idx_pars)
        for (terms_m, terms_p, res) in data:
            mu = res.m_at(u)
            mneg = res.m_at(-u)
            # (u - Y)^{-1} = sum_j coeff_j(u) Y^j / m(u)
            inv_mu = mu.inverse()
            inv_mneg = mneg.inverse()
            for j in range(res.deg):
                cm = ZERO
                cp = ZERO
                for k in range(j + 1, res.deg + 1):
                    mk = res.mp[k]
                    if not mk:
                        continue
                    cm = cm + mk * u ** (k - 1 - j)
                    cp = cp + mk * (-u) ** (k - 1 - j)
                acc = acc + terms_m[j].scale(cm * inv_mu).scale(MINUS_ONE)
                # (u + Y)^{-1} = -(-u - Y)^{-1}
                acc = acc + terms_p[j].scale(cp * inv_mneg).scale(MINUS_ONE)
        return acc

    def t_factor_gmats(self, u, slot=1, extra_aux=1):
        m = self.t_v_matrix(u)
        if extra_aux == 1:
            return [m]
        if slot == 1:
            return [insert_mid(m, self.N, tuple(parity(i) for i in index_list(self.N)), self.carrier_pars)]
        aux_pars = [parity(i) for i in index_list(self.N)]
        return [tensor(GMat.identity(aux_pars), m)]

    def tinv_factor_gmats(self, u, slot=1, extra_aux=1):
        facs = self.t_factor_gmats(u, slot, extra_aux)
        return [f.inverse() for f in reversed(facs)]

    def t_series(self, order, slot=1, extra_aux=1):
        from .exact_scalar import TruncSeries

        blocks0 = {}
        idx = index_list(self.N)
        coeffs = []
        base_pars = None
        for s in range(order):
            if s == 0:
                m = assemble_aux(
                    {(i, i): GMat.identity(self.carrier_pars) for i in idx},
                    self.N,
                    self.carrier_pars,
                )
            else:
                m = assemble_aux(
                    {
                        (i, j): self.table(i, j, s)
                        for i in idx
                        for j in idx
                        if not self.table(i, j, s).is_zero()
                    },
                    self.N,
                    self.carrier_pars,
                )
            if extra_aux == 2:
                if slot == 1:
                    m = insert_mid(m, self.N, tuple(parity(i) for i in idx), self.carrier_pars)
                else:
                    m = tensor(GMat.identity([parity(i) for i in idx]), m)
            coeffs.append(m)
        return TruncSeries("u", coeffs, order)

    # metadata for grid bounds
    @property
    def u_num_deg(self):
        _, res_y = self._resolvents()
        return sum(r.pair_deg for r in res_y)

    @property
    def uinv_num_deg(self):
        return self.u_num_deg * (self.coin.dim * 2)  # generous; rarely used

    def avoid_u(self, x):
        _, res_y = self._resolvents()
        return any(r.avoid(x) or r.avoid(-x) for r in res_y)

    def avoid_u_spectral(self, x):
        res_x, res_y = self._resolvents()
        return any(r.avoid(x) or r.avoid(-x) for r in list(res_x) + list(res_y))


def _pjj_op(N):
    P = op_P(N)
    J = op_J(N)
    from .super_linear import koszul_mul, koszul_tensor

    JJ = koszul_mul(
        koszul_tensor(J, SuperOp.identity(N, 1)), koszul_tensor(SuperOp.identity(N, 1), J)
    )
    return koszul_mul(P, JJ)


def functor_apply(N, mod, s_max=5):
    return YqnModule(N, mod, s_max=s_max)


# ----------------------------------------------------------------------
# the two constructions agree on the quotient (with commutation checks)
# ----------------------------------------------------------------------


def check_commutation_with_action(vrep, s_max=3, name="drinfeld-coefficients-commute"):
    """Every one-line coefficient operator commutes with the hyperoctahedral
    generators on the ambient space."""
    if vrep.n == 0:
        return CheckResult(name, True)
    gens = vrep.coin.alpha_gens
    for s in range(s_max):
        for i in index_list(vrep.N):
            for j in index_list(vrep.N):
                amb = vrep.ambient_coefficient(i, j, s)
                for k, g in enumerate(gens):
                    if amb * g != g * amb:
                        return CheckResult(
                            name, False, witness={"generator": [i, j, s + 1], "alpha_gen": k}
                        )
    return CheckResult(name, True)


def check_two_constructions(vrep, name="drinfeld-two-forms-agree"):
    """The ordered product over the commuting generators and the one-line
    form over the non-commuting ones agree on coinvariants, exactly in u.

    The ideal separating the two forms is annihilated by composition with
    the group-averaging idempotent, so the ambient comparison is
    (A(u) - B(u)) (1 (x) E) == 0; the one-line form composed with the
    section is additionally tied to the quotient closed form."""
    N, n = vrep.N, vrep.n
    if n == 0:
        return CheckResult(name, True)
    res_x, res_y = vrep._resolvents()
    embP = [GMat.from_superop(embed(op_P(N), [1, p + 1], n + 1)) for p in range(1, n + 1)]
    embPJJ = [GMat.from_superop(embed(_pjj_op(N), [1, p + 1], n + 1)) for p in range(1, n + 1)]
    aux_pars = [parity(i) for i in index_list(N)]
    e_proj = tensor(GMat.identity(aux_pars), vrep.coin.group_projector())

    bound = sum(r.pair_deg for r in res_x) + sum(r.pair_deg for r in res_y) + 2
    pts = make_grid(
        ["u"],
        {"u": bound},
        lambda pt: vrep.avoid_u_spectral(pt["u"]),
    )
    ident = _ident_mixed(vrep, n)
    ymats = vrep._y_mats()
    for pt in pts:
        u = pt["u"]
        prod = None
        bform = ident
        for p in range(1, n + 1):
            minv = res_x[p - 1].inverse_at(u)
            pinv = res_x[p - 1].inverse_at(-u).scale(MINUS_ONE)
            f = (
                ident
                + tensor(embP[p - 1], minv).scale(MINUS_ONE)
                + tensor(embPJJ[p - 1], pinv)
            )
            prod = f if prod is None else prod * f
            yminv = res_y[p - 1].inverse_at(u)
            ypinv = res_y[p - 1].inverse_at(-u).scale(MINUS_ONE)
            bform = bform + tensor(embP[p - 1], yminv).scale(MINUS_ONE) + tensor(
                embPJJ[p - 1], ypinv
            )
        if not ((prod - bform) * e_proj).is_zero():
            return CheckResult(name, False, witness={"point": str(u)})
        # the quotient closed form is the induced one-line form
        if vrep._induce_aux(bform) != vrep.t_v_matrix(u):
            return CheckResult(
                name, False, witness={"point": str(u), "reason": "quotient closed form"}
            )
    return CheckResult(name, True, detail={"grid_points": len(pts)})


def _ident_mixed(vrep, n):
    full = [
        (par_tuple(t) + q) & 1
        for t in itertools.product(index_list(vrep.N), repeat=n + 1)
        for q in vrep.mod.parities
    ]
    return GMat.identity(full)


# ----------------------------------------------------------------------
# the induction product of modules
# ----------------------------------------------------------------------


def _shuffles(n, np):
    """Minimal-length coset representatives of S_{n+n'}/(S_n x S_n')."""
    total = n + np
    out = []
    for left_targets in itertools.combinations(range(1, total + 1), n):
        right_targets = [q for q in range(1, total + 1) if q not in left_targets]
        w = list(left_targets) + list(right_targets)
        out.append(tuple(w))
    return out


def _coset_factor(w, n, np):
    """w = sigma * h with sigma a shuffle and h in S_n x S_n'."""
    total = n + np
    left_vals = sorted(w[:n])
    right_vals = sorted(w[n:])
    sigma = tuple(left_vals + right_vals)
    h = perm_mul(perm_inv(sigma), w)
    return sigma, h


def odot(N_unused, modL, modR):
    """Induced module of A_{n+n'} from modL (x) modR; basis indexed by
    (shuffle, basis of U, basis of U')."""
    n, np = modL.n, modR.n
    total = n + np
    shuffles = _shuffles(n, np)
    spos = {s: k for k, s in enumerate(shuffles)}
    dL, dR = modL.dim, modR.dim
    pars = []
    for s in shuffles:
        for a in range(dL):
            for b in range(dR):
                pars.append((modL.parities[a] + modR.parities[b]) & 1)

    def flat(si, a, b):
        return (si * dL + a) * dR + b

    def act(gen_el):
        m = GMat(pars)
        for si, sig in enumerate(shuffles):
            prod = an_mul(gen_el, AnElement(total, {((), sig, (0,) * total): ONE}))
            for (c2, w2, s2), v in prod.terms.items():
                sigma2, h = _coset_factor(w2, n, np)
                # rewrite c2 * sigma2 * h * x^{s2} = sigma2 * (sigma2^{-1} c2 sigma2) h x^{s2}
                from .sergeev import cliff_permute

                c3, sgn = cliff_permute(c2, perm_inv(sigma2))
                coeff = v if sgn > 0 else -v
                # split the subalgebra element (c3, h, s2) into left/right parts
                cL = tuple(p for p in c3 if p <= n)
                cR = tuple(p - n for p in c3 if p > n)
                hL = h[:n]
                hR = tuple(q - n for q in h[n:])
                sL = s2[:n]
                sR = tuple(s2[n:])
                # Koszul: moving the right Clifford part past nothing (the
                # split is order-preserving); the action on b picks up the
                # sign (-1)^{deg b * deg(right part)} handled below
                eL = AnElement(n, {(cL, hL, sL): ONE})
                eR = AnElement(np, {(cR, hR, sR): ONE})
                mL = modL.apply(eL)
                mR = modR.apply(eR)
                pR = len(cR) & 1
                for (ra, ca), va in mL.entries.items():
                    saL = modL.parities[ca]
                    for (rb, cb), vb in mR.entries.items():
                        sign = -1 if pR and saL else 1
                        w = coeff * va * vb
                        key = (flat(spos[sigma2], ra, rb), flat(si, ca, cb))
                        t = m.entries.get(key)
                        w2_ = (w if sign > 0 else -w)
                        t = w2_ if t is None else t + w2_
                        if t:
                            m.entries[key] = t
                        else:
                            m.entries.pop(key, None)
        return m

    w_mats = [act(AnElement.w(total, q, q + 1)) for q in range(1, total)]
    c_mats = [act(AnElement.c(total, p)) for p in range(1, total + 1)]
    x_mats = [act(AnElement.x(total, p)) for p in range(1, total + 1)]
    return AnModule(total, pars, w_mats, c_mats, x_mats)


def module_equivalence(modA, modB, seed=0):
    """Find an even invertible intertwiner g with g a = b g on all
    generators (as raw matrices between the two bases), or None."""
    from .gmat import compose, entries_full_rank

    if modA.n != modB.n or modA.dim != modB.dim:
        return None
    gensA = modA.w_mats + modA.c_mats + modA.x_mats
    gensB = modB.w_mats + modB.c_mats + modB.x_mats
    d = modA.dim
    # solve g A = B g for all generators; unknowns g[r][c]
    red = RowReducer()
    rows = []
    # build constraint matrix rows indexed by (gen, r, c)
    unknowns = d * d
    cols = {}
    for gi, (A, B) in enumerate(zip(gensA, gensB)):
        for r in range(d):
            for c in range(d):
                row = {}
                # (gA)[r,c] = sum_k g[r,k] A[k,c] ; (Bg)[r,c] = sum_k B[r,k] g[k,c]
                for (k, c2), v in A.entries.items():
                    if c2 == c:
                        row[r * d + k] = row.get(r * d + k, ZERO) + v
                for (r2, k), v in B.entries.items():
                    if r2 == r:
                        row[k * d + c] = row.get(k * d + c, ZERO) - v
                row = {k: v for k, v in row.items() if v}
                if row:
                    rows.append(row)
    # nullspace via RREF
    basis = _nullspace(rows, unknowns)
    if not basis:
        return None
    rng = random.Random(seed)
    for _ in range(40):
        g = {}
        for vec in basis:
            coef = GaussRat(rng.randint(-3, 3))
            if not coef:
                continue
            for k, v in vec.items():
                r, c = divmod(k, d)
                if (modA.parities[c] + modB.parities[r]) & 1:
                    continue  # keep the intertwiner even
                t = g.get((r, c))
                u = v * coef if t is None else t + v * coef
                if u:
                    g[(r, c)] = u
                else:
                    g.pop((r, c), None)
        if not entries_full_rank(g, d):
            continue
        if all(compose(g, A.entries) == compose(B.entries, g) for A, B in zip(gensA, gensB)):
            return g
    return None


def _nullspace(rows, nunknowns):
    red = RowReducer()
    for row in rows:
        red.add(row)
    pivots = set(red.pivots)
    free = [k for k in range(nunknowns) if k not in pivots]
    out = []
    for f in free:
        vec = {f: ONE}
        for lead, row in red.pivots.items():
            v = row.get(f)
            if v:
                vec[lead] = -v
        out.append(vec)
    return out


# ----------------------------------------------------------------------
# the functor on a single evaluation point reproduces the evaluation
# representation (matrix for matrix under the canonical quotient map)
# ----------------------------------------------------------------------


def check_single_point(N, z, s_max=4, name="drinfeld-single-point"):
    """F_N of the one-point principal series is the evaluation
    representation: the canonical map class(a (x) 1) -> a intertwines the
    generator tables on the nose, and dim V = 2N."""
    from .yangian import direct_eval_table

    from .gmat import compose, entries_full_rank

    mod = principal_series([z])
    vrep = functor_apply(N, mod, s_max=s_max)
    if vrep.coin.dim != 2 * N:
        return CheckResult(name, False, witness={"dim": vrep.coin.dim})
    # the canonical map: e_a (x) (unit of H_1) -> its class in V
    basis = list(itertools.product(index_list(N), repeat=1))
    one_pos = next(k for k, (c, w) in enumerate(hn_basis(1)) if not c)
    g = {}
    for col, t in enumerate(basis):
        amb = {col * mod.dim + one_pos: ONE}
        for r, v in vrep.coin.project_vec(amb).items():
            g[(r, col)] = v
    if not entries_full_rank(g, 2 * N):
        return CheckResult(name, False, witness={"reason": "canonical map not invertible"})
    for i in index_list(N):
        for j in index_list(N):
            for s in range(1, s_max + 1):
                lhs = compose(vrep.table(i, j, s).entries, g)
                rhs = compose(g, direct_eval_table(N, z, i, j, s).entries)
                if lhs != rhs:
                    return CheckResult(name, False, witness={"generator": [i, j, s]})
    return CheckResult(name, True)


# ----------------------------------------------------------------------
# the induction product matches the coproduct composition
# ----------------------------------------------------------------------


def coproduct_table(vL, vR, i, j, s):
    """Coproduct composition of the two factor tables on V (x) V'."""
    from .super_linear import parity as par_idx

    N = vL.N
    idL = GMat.identity(vL.carrier_pars)
    idR = GMat.identity(vR.carrier_pars)
    pars_in = [(p + q) & 1 for p in vL.carrier_pars for q in vR.carrier_pars]
    acc = GMat(pars_in)
    for k in index_list(N):
        sgn = -1 if ((par_idx(i) + par_idx(k)) & 1) and ((par_idx(j) + par_idx(k)) & 1) else 1
        for a in range(s + 1):
            b = s - a
            t1 = idL if (a == 0 and i == k) else (vL.table(i, k, a) if a else None)
            t2 = idR if (b == 0 and k == j) else (vR.table(k, j, b) if b else None)
            if t1 is None or t2 is None:
                continue
            term = tensor(t1, t2)
            acc = acc + (term if sgn > 0 else -term)
    return acc


def check_odot_functor(N, modL, modR, fit_bound=2, s_max=4, seed=11, name="drinfeld-odot-intertwiner"):
    """F_N(U (.) U') is equivalent to F_N(U) (x) F_N(U') (coproduct action).

    The carrier identification of the proof (restrict an invariant
    representative to the identity-coset slice and pull the slice back
    through the reordering map) is certified to be a degree-0 isomorphism
    of carriers.  The representation equivalence is certified by an exact
    intertwiner: it is solved from the generator levels up to fit_bound and
    then verified on all levels up to s_max, so the higher levels are held
    out of the fit.
    """
    from .gmat import compose, entries_full_rank
    from .sergeev import cliff_permute  # noqa: F401  (odot already imported)

    n, np = modL.n, modR.n
    big = odot(N, modL, modR)
    vbig = functor_apply(N, big, s_max=s_max)
    vL = functor_apply(N, modL, s_max=s_max)
    vR = functor_apply(N, modR, s_max=s_max)
    dprod = vL.coin.dim * vR.coin.dim
    if vbig.coin.dim != dprod:
        return CheckResult(
            name, False, witness={"dims": [vbig.coin.dim, vL.coin.dim, vR.coin.dim]}
        )
    basisL = list(itertools.product(index_list(N), repeat=n))
    basisR = list(itertools.product(index_list(N), repeat=np))
    posL = {t: k for k, t in enumerate(basisL)}
    posR = {t: k for k, t in enumerate(basisR)}
    shuffle_one = _shuffles(n, np).index(perm_id(n + np))
    dL, dR = modL.dim, modR.dim
    dbigU = big.dim
    basisBig = list(itertools.product(index_list(N), repeat=n + np))
    pars_in = [(p + q) & 1 for p in vL.carrier_pars for q in vR.carrier_pars]

    # carrier-level isomorphism from the proof's reordering map
    psi = {}
    for t in range(vbig.coin.dim):
        vec = vbig.coin.invariant_section_vec(t)
        acc = {}
        for key, v in vec.items():
            tb, ub = divmod(key, dbigU)
            si, rem = divmod(ub, dL * dR)
            if si != shuffle_one:
                continue
            bL, bR = divmod(rem, dR)
            tbig = basisBig[tb]
            aL, aR = tbig[:n], tbig[n:]
            sign = -1 if (par_tuple(aR) & 1) and (modL.parities[bL] & 1) else 1
            kk = (posL[aL] * dL + bL, posR[aR] * dR + bR)
            acc[kk] = v if sign > 0 else -v
        for (kL, kR), v in acc.items():
            for rl, a in vL.coin.project_vec({kL: ONE}).items():
                for rr, b in vR.coin.project_vec({kR: ONE}).items():
                    key2 = (rl * vR.coin.dim + rr, t)
                    cur = psi.get(key2)
                    w = v * a * b
                    w = w if cur is None else cur + w
                    if w:
                        psi[key2] = w
                    else:
                        psi.pop(key2, None)
    if not entries_full_rank(psi, vbig.coin.dim):
        return CheckResult(name, False, witness={"reason": "carrier map not invertible"})
    for (r, c), _v in psi.items():
        if (pars_in[r] + vbig.carrier_pars[c]) & 1:
            return CheckResult(name, False, witness={"reason": "carrier map not even"})

    # representation equivalence: solve on the low levels, verify on all
    idxs = index_list(N)
    pairs_fit = [
        (coproduct_table(vL, vR, i, j, s), vbig.table(i, j, s))
        for i in idxs
        for j in idxs
        for s in range(1, fit_bound + 1)
    ]
    g = _intertwiner_search(pairs_fit, pars_in, vbig.carrier_pars, seed=seed)
    if g is None:
        return CheckResult(name, False, witness={"reason": "no invertible even intertwiner"})
    for i in idxs:
        for j in idxs:
            for s in range(1, s_max + 1):
                a = coproduct_table(vL, vR, i, j, s)
                b = vbig.table(i, j, s)
                if compose(g, a.entries) != compose(b.entries, g):
                    return CheckResult(
                        name,
                        False,
                        witness={"generator": [i, j, s], "reason": "held-out level fails"},
                    )
    return CheckResult(name, True, detail={"fit_levels": fit_bound, "verified_levels": s_max})


def _intertwiner_search(pairs, pars_in, pars_out, seed=0, rounds=60):
    """Invertible even g with g a = b g for all pairs (a, b), or None."""
    from .gmat import compose, entries_full_rank

    d = len(pars_in)
    rows = []
    for (A, B) in pairs:
        acols = {}
        for (k, c), v in A.entries.items():
            acols.setdefault(c, []).append((k, v))
        brows = {}
        for (r, k), v in B.entries.items():
            brows.setdefault(r, []).append((k, v))
        for r in range(d):
            for c in range(d):
                row = {}
                for k, v in acols.get(c, ()):
                    row[r * d + k] = row.get(r * d + k, ZERO) + v
                for k, v in brows.get(r, ()):
                    row[k * d + c] = row.get(k * d + c, ZERO) - v
                row = {k: v for k, v in row.items() if v}
                if row:
                    rows.append(row)
    basis = _nullspace(rows, d * d)
    if not basis:
        return None
    rng = random.Random(seed)
    for _ in range(rounds):
        g = {}
        for vec in basis:
            coef = GaussRat(rng.randint(-3, 3))
            if not coef:
                continue
            for k, v in vec.items():
                r, c = divmod(k, d)
                if (pars_out[r] + pars_in[c]) & 1:
                    continue
                t = g.get((r, c))
                u = v * coef if t is None else t + v * coef
                if u:
                    g[(r, c)] = u
                else:
                    g.pop((r, c), None)
        if g and entries_full_rank(g, d):
            if all(compose(g, A.entries) == compose(B.entries, g) for A, B in pairs):
                return g
    return None


# ----------------------------------------------------------------------
# abstract-coefficient commutation (operators valued in the Sergeev algebra)
# ----------------------------------------------------------------------


def _tan_mul(x, y, n):
    """Product in End((C^{N|N})^{(x)n}) (x) A_n for dicts ankey -> SuperOp."""
    out = {}
    for (ka, A) in x.items():
        da = len(ka[0]) & 1
        ea = AnElement(n, {ka: ONE})
        for (kb, B) in y.items():
            pb = B.parity()
            if pb is None:
                raise ValueError("non-homogeneous operator coefficient")
            sgn = -1 if (pb & 1) and (da & 1) else 1
            prod = an_mul(ea, AnElement(n, {kb: ONE}))
            AB = A * B
            if AB.is_zero():
                continue
            for kc, vc in prod.terms.items():
                coeff = vc if sgn > 0 else -vc
                cur = out.get(kc)
                term = AB.scale(coeff)
                out[kc] = term if cur is None else cur + term
    return {k: v for k, v in out.items() if not v.is_zero()}


def check_prop_5_2b_symbolic(N, n, s_max=3, name="drinfeld-coefficients-commute-symbolic"):
    """The one-line coefficients, as operators valued in the abstract
    Sergeev algebra, commute with the flip (x) transposition and the odd
    (x) Clifford elements."""
    ys = y_generators(n)
    P = op_P(N)
    J = op_J(N)
    gens = []
    for p in range(1, n):
        for q in range(p + 1, n + 1):
            gens.append({((), transposition(n, p, q), (0,) * n): embed(P, [p, q], n)})
    for p in range(1, n + 1):
        gens.append({((p,), perm_id(n), (0,) * n): embed(J, [p], n)})
    for s in range(s_max):
        for i in index_list(N):
            for j in index_list(N):
                coeff = {}
                for p in range(1, n + 1):
                    e1 = embed(SuperOp.matrix_unit(N, j, i), [p], n)
                    e2 = embed(SuperOp.matrix_unit(N, -j, -i), [p], n)
                    eop = e1 + (e2 if s % 2 == 0 else e2.scale(MINUS_ONE))
                    eop = eop.scale(ONE if parity(j) else MINUS_ONE)
                    ypow = AnElement.one(n)
                    for _ in range(s):
                        ypow = an_mul(ypow, ys[p - 1])
                    for k, v in ypow.terms.items():
                        cur = coeff.get(k)
                        term = eop.scale(v)
                        coeff[k] = term if cur is None else cur + term
                coeff = {k: v for k, v in coeff.items() if not v.is_zero()}
                for gk, g in enumerate(gens):
                    lhs = _tan_mul(coeff, g, n)
                    rhs = _tan_mul(g, coeff, n)
                    keys = set(lhs) | set(rhs)
                    for k in keys:
                        a = lhs.get(k)
                        b = rhs.get(k)
                        if (a is None) != (b is None) or (a is not None and a != b):
                            return CheckResult(
                                name,
                                False,
                                witness={"generator": [i, j, s + 1], "alpha_gen": gk},
                            )
    return CheckResult(name, True)


# ----------------------------------------------------------------------
# functoriality smoke test
# ----------------------------------------------------------------------


def check_functoriality(N, mod, g, s_max=3, name="drinfeld-functoriality"):
    """Conjugated module matrices give an intertwinable Yangian module."""
    from .gmat import compose, entries_full_rank

    if g.parity() != 0:
        raise ValueError("conjugating map must be even")
    mod2 = conjugated_module(mod, g)
    v1 = functor_apply(N, mod, s_max=s_max)
    v2 = functor_apply(N, mod2, s_max=s_max)
    if v1.coin.dim != v2.coin.dim:
        return CheckResult(name, False, witness={"dims": [v1.coin.dim, v2.coin.dim]})
    # the ambient intertwiner 1 (x) g descends to the quotients
    d = mod.dim
    w = {}
    for t in range(v1.coin.dim):
        amb = v1.coin.nonpivots[t]
        a, b = divmod(amb, d)
        img = {}
        for (r, c), v in g.entries.items():
            if c == b:
                img[a * d + r] = v
        for r, v in v2.coin.project_vec(img).items():
            w[(r, t)] = v
    if not entries_full_rank(w, v1.coin.dim):
        return CheckResult(name, False, witness={"reason": "induced map not invertible"})
    for i in index_list(N):
        for j in index_list(N):
            for s in range(1, s_max + 1):
                if compose(w, v1.table(i, j, s).entries) != compose(
                    v2.table(i, j, s).entries, w
                ):
                    return CheckResult(name, False, witness={"generator": [i, j, s]})
    return CheckResult(name, True)


# ----------------------------------------------------------------------
# graded irreducibility
# ----------------------------------------------------------------------


def _span_closure(gens, parities, max_dim=None):
    """Basis of the unital algebra generated by the matrices (as a list of
    row-dicts); deterministic order."""
    d = len(parities)
    red = RowReducer()
    basis = []

    def vec_of(m):
        return {r * d + c: v for (r, c), v in m.entries.items()}

    def try_add(m):
        v = vec_of(m)
        if red.add(dict(v)):
            basis.append(m)
            return True
        return False

    try_add(GMat.identity(parities))
    for g in gens:
        try_add(g)
    frontier = list(basis)
    while frontier:
        new = []
        for m in frontier:
            for g in gens:
                for prod in (m * g,):
                    if try_add(prod):
                        new.append(prod)
        frontier = new
        if max_dim is not None and len(basis) >= max_dim:
            break
    return basis


def _commutant(gens, parities):
    """Basis of {X : Xg = gX for all g} as vectors."""
    d = len(parities)
    rows = []
    for g in gens:
        for r in range(d):
            for c in range(d):
                row = {}
                for (k, c2), v in g.entries.items():
                    if c2 == c:
                        row[r * d + k] = row.get(r * d + k, ZERO) + v
                for (r2, k), v in g.entries.items():
                    if r2 == r:
                        row[k * d + c] = row.get(k * d + c, ZERO) - v
                row = {k: v for k, v in row.items() if v}
                if row:
                    rows.append(row)
    return _nullspace(rows, d * d)


def _spin(vec, gens, parities):
    """Smallest invariant subspace containing vec; returns basis row dicts."""
    red = RowReducer()
    basis = []
    frontier = [vec]
    red.add(dict(vec))
    basis.append(vec)
    while frontier:
        new = []
        for v in frontier:
            for g in gens:
                img = g.matvec(v)
                if img and red.add(dict(img)):
                    basis.append(img)
                    new.append(img)
        frontier = new
    return basis


def irreducibility_test(vrep, s_bound=3, seed=2024, max_rounds=24, name="irreducibility"):
    """Decide graded irreducibility of the module.

    Returns a CheckResult whose detail carries either a Burnside-type
    witness (the acting algebra spans everything the graded Schur lemma
    allows) or a verified invariant-subspace certificate; inconclusive runs
    are reported as such, never as irreducible.
    """
    gens = []
    for i in index_list(vrep.N):
        for j in index_list(vrep.N):
            for s in range(1, s_bound + 1):
                t = vrep.table(i, j, s)
                if not t.is_zero():
                    gens.append(t)
    parities = vrep.carrier_pars
    d = len(parities)
    rng = random.Random(seed)

    # certificate search: spin homogeneous basis vectors and random vectors
    def certificate_from(vec):
        basis = _spin(vec, gens, parities)
        if 0 < len(basis) < d:
            # verify closure exactly and gradedness
            red = RowReducer()
            for b in basis:
                red.add(dict(b))
            for b in basis:
                for g in gens:
                    img = g.matvec(b)
                    if red.reduce(img):
                        return None
            return basis
        return None

    seeds = [{k: ONE} for k in range(d)]
    for _ in range(max_rounds):
        v = {}
        p = rng.choice((0, 1))
        for k in range(d):
            if parities[k] == p and rng.random() < 0.7:
                c = rng.randint(-3, 3)
                if c:
                    v[k] = GaussRat(c)
        if v:
            seeds.append(v)
    for vec in seeds:
        cert = certificate_from(vec)
        if cert:
            return CheckResult(
                name,
                True,
                detail={
                    "verdict": "reducible",
                    "certificate_dim": len(cert),
                    "certificate": [
                        {str(k): str(v) for k, v in b.items()} for b in cert
                    ],
                },
            )

    # witness search: Burnside span of the acting algebra
    alg = _span_closure(gens, parities, max_dim=d * d + 1)
    dim_alg = len(alg)
    if dim_alg == d * d:
        return CheckResult(
            name, True, detail={"verdict": "irreducible", "witness": "full-matrix-algebra"}
        )
    if 2 * dim_alg == d * d:
        comm = _commutant(gens, parities)
        if len(comm) == 2:
            # need an invertible odd element in the commutant
            for vec in comm:
                m = GMat(parities)
                for k, v in vec.items():
                    m.entries[divmod(k, d)] = v
                if m.parity() == 1:
                    try:
                        m.inverse()
                        return CheckResult(
                            name,
                            True,
                            detail={
                                "verdict": "irreducible",
                                "witness": "queer-centralizer-algebra",
                            },
                        )
                    except ZeroDivisionError:
                        pass
    return CheckResult(
        name, False, detail={"verdict": "inconclusive", "algebra_dim": dim_alg}
    )


class DirectSumModule:
    """V (+) V with the same table action on both summands (the reducible
    control for the irreducibility tester)."""

    def __init__(self, vrep):
        self.base = vrep
        self.N = vrep.N
        self.carrier_pars = tuple(vrep.carrier_pars) + tuple(vrep.carrier_pars)

    def table(self, i, j, s):
        t = self.base.table(i, j, s)
        d = len(self.base.carrier_pars)
        m = GMat(self.carrier_pars)
        for (r, c), v in t.entries.items():
            m.entries[(r, c)] = v
            m.entries[(r + d, c + d)] = v
        return m
