"""The Hecke-Clifford group algebra H_n and the degenerate affine Sergeev
algebra A_n.

Elements are exact linear combinations of normal-form basis words: a
Clifford monomial with strictly increasing indices, a permutation in
one-line notation, and (for A_n) a polynomial-generator exponent vector on
the right.  Multiplication rewrites to that form; the composition
convention is (v*w)(p) = v(w(p)).
"""

from __future__ import annotations

import itertools

from .exact_scalar import GaussRat, MINUS_ONE, ONE
from .gmat import GMat
from .super_linear import SuperOp, embed, koszul_mul, op_F, op_J, op_P, index_list


# ----------------------------------------------------------------------
# permutations (one-line tuples, 1-based values)
# ----------------------------------------------------------------------


def perm_id(n):
    return tuple(range(1, n + 1))


def perm_mul(v, w):
    """(v*w)(p) = v(w(p))."""
    return tuple(v[w[p] - 1] for p in range(len(w)))


def perm_inv(w):
    out = [0] * len(w)
    for p, q in enumerate(w, start=1):
        out[q - 1] = p
    return tuple(out)


def transposition(n, p, q):
    w = list(range(1, n + 1))
    w[p - 1], w[q - 1] = q, p
    return tuple(w)


def adjacent_word(w):
    """Reduced word (q_1,...,q_m) with w = s_{q_1} * ... * s_{q_m}."""
    n = len(w)
    u = list(w)
    rev = []
    while True:
        for q in range(n - 1):
            if u[q] > u[q + 1]:
                u[q], u[q + 1] = u[q + 1], u[q]
                rev.append(q + 1)
                break
        else:
            break
    return tuple(reversed(rev))


# ----------------------------------------------------------------------
# Clifford monomials
# ----------------------------------------------------------------------


def cliff_mul(a, b):
    """Product of increasing Clifford monomials; c_p^2 = -1."""
    out = list(a)
    sign = 1
    for x in b:
        k = len(out)
        while k > 0 and out[k - 1] > x:
            k -= 1
            sign = -sign
        if k > 0 and out[k - 1] == x:
            out.pop(k - 1)
            sign = -sign
        else:
            out.insert(k, x)
    return tuple(out), sign


def cliff_permute(c, w):
    """w c_A w^{-1}: apply w to the indices and resort."""
    vals = [w[p - 1] for p in c]
    sign = 1
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if vals[i] > vals[j]:
                sign = -sign
    return tuple(sorted(vals)), sign


# ----------------------------------------------------------------------
# H_n
# ----------------------------------------------------------------------


class HnElement:
    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[k] = v

    @classmethod
    def one(cls, n):
        return cls(n, {((), perm_id(n)): ONE})

    @classmethod
    def c(cls, n, p):
        return cls(n, {((p,), perm_id(n)): ONE})

    @classmethod
    def w(cls, n, p, q):
        return cls(n, {((), transposition(n, p, q)): ONE})

    @classmethod
    def perm(cls, n, w):
        return cls(n, {((), tuple(w)): ONE})

    def _chk(self, other):
        if self.n != other.n:
            raise ValueError("algebra size mismatch")

    def __add__(self, other):
        self._chk(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            s = t.get(k)
            u = v if s is None else s + v
            if u:
                t[k] = u
            else:
                t.pop(k, None)
        return HnElement(self.n, t)

    def __sub__(self, other):
        return self + other.scale(MINUS_ONE)

    def __neg__(self):
        return self.scale(MINUS_ONE)

    def scale(self, c):
        return HnElement(self.n, {k: v * c for k, v in self.terms.items()} if c else {})

    def __mul__(self, other):
        if not isinstance(other, HnElement):
            return self.scale(other)
        return hn_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, HnElement) and self.n == other.n and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def parity(self):
        p = None
        for (c, _w) in self.terms:
            q = len(c) & 1
            if p is None:
                p = q
            elif p != q:
                return None
        return 0 if p is None else p

    def __str__(self):
        bits = [f"({v})c{list(c)}w{list(w)}" for (c, w), v in sorted(self.terms.items())]
        return " + ".join(bits) if bits else "0"

    __repr__ = __str__


def hn_mul(a, b):
    a._chk(b)
    out = {}
    for (ca, wa), va in a.terms.items():
        for (cb, wb), vb in b.terms.items():
            cb2, s1 = cliff_permute(cb, wa)
            cc, s2 = cliff_mul(ca, cb2)
            key = (cc, perm_mul(wa, wb))
            coeff = va * vb
            if s1 * s2 < 0:
                coeff = -coeff
            s = out.get(key)
            t = coeff if s is None else s + coeff
            if t:
                out[key] = t
            else:
                out.pop(key, None)
    return HnElement(a.n, out)


def hn_basis(n):
    cs = []
    for r in range(n + 1):
        cs.extend(itertools.combinations(range(1, n + 1), r))
    return [(c, w) for c in cs for w in itertools.permutations(range(1, n + 1))]


# ----------------------------------------------------------------------
# A_n in PBW form: clifford * permutation * x-monomial
# ----------------------------------------------------------------------


class AnElement:
    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[k] = v

    @classmethod
    def one(cls, n):
        return cls(n, {((), perm_id(n), (0,) * n): ONE})

    @classmethod
    def c(cls, n, p):
        return cls(n, {((p,), perm_id(n), (0,) * n): ONE})

    @classmethod
    def w(cls, n, p, q):
        return cls(n, {((), transposition(n, p, q), (0,) * n): ONE})

    @classmethod
    def x(cls, n, p):
        e = [0] * n
        e[p - 1] = 1
        return cls(n, {((), perm_id(n), tuple(e)): ONE})

    @classmethod
    def from_hn(cls, h):
        zero = (0,) * h.n
        return cls(h.n, {(c, w, zero): v for (c, w), v in h.terms.items()})

    def _chk(self, other):
        if self.n != other.n:
            raise ValueError("algebra size mismatch")

    def __add__(self, other):
        self._chk(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            s = t.get(k)
            u = v if s is None else s + v
            if u:
                t[k] = u
            else:
                t.pop(k, None)
        return AnElement(self.n, t)

    def __sub__(self, other):
        return self + other.scale(MINUS_ONE)

    def __neg__(self):
        return self.scale(MINUS_ONE)

    def scale(self, c):
        return AnElement(self.n, {k: v * c for k, v in self.terms.items()} if c else {})

    def __mul__(self, other):
        if not isinstance(other, AnElement):
            return self.scale(other)
        return an_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, AnElement) and self.n == other.n and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def parity(self):
        p = None
        for (c, _w, _s) in self.terms:
            q = len(c) & 1
            if p is None:
                p = q
            elif p != q:
                return None
        return 0 if p is None else p

    def x_degree(self):
        return max((sum(s) for (_c, _w, s) in self.terms), default=0)

    def __str__(self):
        bits = [
            f"({v})c{list(c)}w{list(w)}x{list(s)}"
            for (c, w, s), v in sorted(self.terms.items())
        ]
        return " + ".join(bits) if bits else "0"

    __repr__ = __str__


def _left_cliff(n, cm, elem):
    out = {}
    for (c, w, s), v in elem.terms.items():
        cc, sgn = cliff_mul(cm, c)
        key = (cc, w, s)
        coeff = v if sgn > 0 else -v
        t = out.get(key)
        t = coeff if t is None else t + coeff
        if t:
            out[key] = t
        else:
            out.pop(key, None)
    return AnElement(n, out)


def _left_perm(n, u, elem):
    out = {}
    for (c, w, s), v in elem.terms.items():
        cc, sgn = cliff_permute(c, u)
        key = (cc, perm_mul(u, w), s)
        coeff = v if sgn > 0 else -v
        t = out.get(key)
        t = coeff if t is None else t + coeff
        if t:
            out[key] = t
        else:
            out.pop(key, None)
    return AnElement(n, out)


def _x_past_word(n, p, word):
    """x_p * s_{q_1}...s_{q_m} in normal form: list of (cliff, perm, xexp, sign)."""
    if not word:
        e = [0] * n
        e[p - 1] = 1
        return [((), perm_id(n), tuple(e), 1)]
    q, rest = word[0], word[1:]
    sigma = transposition(n, q, q + 1)
    rest_perm = perm_id(n)
    for r in rest:
        rest_perm = perm_mul(rest_perm, transposition(n, r, r + 1))
    out = []
    if p != q and p != q + 1:
        sub = _x_past_word(n, p, rest)
    elif p == q:
        sub = _x_past_word(n, q + 1, rest)
        # corrections: -(1 + c_q c_{q+1}) * rest
        out.append(((), rest_perm, (0,) * n, -1))
        out.append(((q, q + 1), rest_perm, (0,) * n, -1))
    else:
        sub = _x_past_word(n, q, rest)
        # corrections: +(1 - c_q c_{q+1}) * rest
        out.append(((), rest_perm, (0,) * n, 1))
        out.append(((q, q + 1), rest_perm, (0,) * n, -1))
    for (c, w, s, sgn) in sub:
        cc, s1 = cliff_permute(c, sigma)
        out.append((cc, perm_mul(sigma, w), s, sgn * s1))
    return out


def _left_x(n, p, elem):
    out = AnElement(n)
    for (c, w, s), v in elem.terms.items():
        coeff = -v if p in c else v
        word = adjacent_word(w)
        for (c2, w2, s2, sgn) in _x_past_word(n, p, word):
            cc, s3 = cliff_mul(c, c2)
            key = (cc, w2, tuple(a + b for a, b in zip(s2, s)))
            cf = coeff if sgn * s3 > 0 else -coeff
            t = out.terms.get(key)
            t = cf if t is None else t + cf
            if t:
                out.terms[key] = t
            else:
                out.terms.pop(key, None)
    return out


def an_mul(a, b):
    a._chk(b)
    acc = AnElement(a.n)
    for (c, w, s), v in a.terms.items():
        cur = b
        for p in range(a.n, 0, -1):
            for _ in range(s[p - 1]):
                cur = _left_x(a.n, p, cur)
        cur = _left_perm(a.n, w, cur)
        cur = _left_cliff(a.n, c, cur)
        acc = acc + cur.scale(v)
    return acc


def an_normal_form(n, word):
    """Normal form of a product of generator tokens ("c",p)/("w",q)/("x",p)."""
    acc = AnElement.one(n)
    for kind, p in reversed(word):
        if kind == "c":
            acc = _left_cliff(n, (p,), acc)
        elif kind == "w":
            acc = _left_perm(n, transposition(n, p, p + 1), acc)
        elif kind == "x":
            acc = _left_x(n, p, acc)
        else:
            raise ValueError(f"unknown generator {kind}")
    return acc


# ----------------------------------------------------------------------
# the embeddings gamma_m and the y generators
# ----------------------------------------------------------------------


def gamma_x_image(n, m, p):
    """gamma_m(x_p) = sum_{r < m+p} (1 + c_{m+p} c_r) w_{m+p, r} in H_{m+n}."""
    N = m + n
    acc = HnElement(N)
    for r in range(1, m + p):
        t = HnElement.w(N, m + p, r)
        acc = acc + t + hn_mul(hn_mul(HnElement.c(N, m + p), HnElement.c(N, r)), t)
    return acc


def gamma(m, a):
    """The homomorphism A_n -> H_{m+n}."""
    n = a.n
    N = m + n
    out = HnElement(N)
    ximg = {p: gamma_x_image(n, m, p) for p in range(1, n + 1)}
    for (c, w, s), v in a.terms.items():
        img = HnElement.one(N)
        for p in c:
            img = hn_mul(img, HnElement.c(N, m + p))
        shifted = tuple(range(1, m + 1)) + tuple(m + q for q in w)
        img = hn_mul(img, HnElement.perm(N, shifted))
        for p in range(1, n + 1):
            for _ in range(s[p - 1]):
                img = hn_mul(img, ximg[p])
        out = out + img.scale(v)
    return out


def y_generators(n):
    ys = []
    for p in range(1, n + 1):
        y = AnElement.x(n, p)
        for q in range(1, p):
            t = AnElement.w(n, p, q)
            y = y - t - an_mul(an_mul(AnElement.c(n, p), AnElement.c(n, q)), t)
        ys.append(y)
    return ys


def check_y_relations(n, name="sergeev-y-relations"):
    """Conjugation, Clifford commutation and the bracket relation for y."""
    ys = y_generators(n)
    # conjugation by every transposition: w y_p w^{-1} = y_{w(p)}
    for p in range(1, n):
        w = AnElement.w(n, p, p + 1)
        for q in range(1, n + 1):
            tgt = q if q not in (p, p + 1) else (p + 1 if q == p else p)
            if an_mul(an_mul(w, ys[q - 1]), w) != ys[tgt - 1]:
                return __bad(name, {"relation": "conjugation", "p": p, "q": q})
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            cq = AnElement.c(n, q)
            lhs = an_mul(ys[p - 1], cq)
            rhs = an_mul(cq, ys[p - 1])
            if (p == q and lhs != -rhs) or (p != q and lhs != rhs):
                return __bad(name, {"relation": "clifford", "p": p, "q": q})
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            if p == q:
                continue
            w = AnElement.w(n, p, q)
            yp, yq = ys[p - 1], ys[q - 1]
            lhs = an_mul(w, an_mul(yp, yq) - an_mul(yq, yp))
            cc = an_mul(AnElement.c(n, p), AnElement.c(n, q))
            rhs = yp - yq + an_mul(cc, yp + yq)
            if lhs != rhs:
                return __bad(name, {"relation": "bracket", "p": p, "q": q})
    from .gridcert import CheckResult

    return CheckResult(name, True)


def __bad(name, witness):
    from .gridcert import CheckResult

    return CheckResult(name, False, witness=witness)


def check_defining_relations(n, name="sergeev-defining-relations"):
    """All relations between w, c, x hold after normal-form rewriting."""
    from .gridcert import CheckResult

    one = AnElement.one(n)
    cs = [AnElement.c(n, p) for p in range(1, n + 1)]
    xs = [AnElement.x(n, p) for p in range(1, n + 1)]
    for p in range(1, n + 1):
        if an_mul(cs[p - 1], cs[p - 1]) != -one:
            return __bad(name, {"relation": "c^2", "p": p})
        for q in range(1, n + 1):
            if p != q and an_mul(cs[p - 1], cs[q - 1]) != -an_mul(cs[q - 1], cs[p - 1]):
                return __bad(name, {"relation": "cc", "p": p, "q": q})
            if an_mul(xs[p - 1], xs[q - 1]) != an_mul(xs[q - 1], xs[p - 1]):
                return __bad(name, {"relation": "xx", "p": p, "q": q})
    for q in range(1, n):
        sq = AnElement.w(n, q, q + 1)
        if an_mul(sq, sq) != one:
            return __bad(name, {"relation": "w^2", "q": q})
        for p in range(1, n + 1):
            lhs = an_mul(xs[p - 1], sq)
            if p == q:
                rhs = an_mul(sq, xs[q]) - one - an_mul(cs[q - 1], cs[q])
            elif p == q + 1:
                rhs = an_mul(sq, xs[q - 1]) + one - an_mul(cs[q - 1], cs[q])
            else:
                rhs = an_mul(sq, xs[p - 1])
            if lhs != rhs:
                return __bad(name, {"relation": "xw", "p": p, "q": q})
            lc = an_mul(xs[p - 1], cs[p - 1])
            if lc != -an_mul(cs[p - 1], xs[p - 1]):
                return __bad(name, {"relation": "xc", "p": p})
        for pq in range(1, n):
            spq = AnElement.w(n, pq, pq + 1)
            if abs(pq - q) >= 2 and an_mul(sq, spq) != an_mul(spq, sq):
                return __bad(name, {"relation": "ww-commute", "p": pq, "q": q})
        if q + 1 < n:
            s2 = AnElement.w(n, q + 1, q + 2)
            if an_mul(an_mul(sq, s2), sq) != an_mul(an_mul(s2, sq), s2):
                return __bad(name, {"relation": "braid", "q": q})
    # conjugation of clifford generators
    for q in range(1, n):
        sq = AnElement.w(n, q, q + 1)
        for p in range(1, n + 1):
            tgt = p if p not in (q, q + 1) else (q + 1 if p == q else q)
            if an_mul(an_mul(sq, cs[p - 1]), sq) != cs[tgt - 1]:
                return __bad(name, {"relation": "wcw", "p": p, "q": q})
    return CheckResult(name, True)


def check_gamma(n, m_list=(0, 1, 2), name="sergeev-gamma"):
    """gamma_m respects every defining relation and kills the y generators
    at m = 0."""
    from .gridcert import CheckResult

    ys = y_generators(n)
    for y in ys:
        if not gamma(0, y).is_zero():
            return __bad(name, {"relation": "gamma0-kernel"})
    cs = [AnElement.c(n, p) for p in range(1, n + 1)]
    xs = [AnElement.x(n, p) for p in range(1, n + 1)]
    gens = cs + xs + [AnElement.w(n, q, q + 1) for q in range(1, n)]
    for m in m_list:
        for a in gens:
            for b in gens:
                if gamma(m, an_mul(a, b)) != hn_mul(gamma(m, a), gamma(m, b)):
                    return __bad(name, {"relation": "homomorphism", "m": m})
    return CheckResult(name, True)


# ----------------------------------------------------------------------
# matrix representation of H_n on (C^{N|N})^{(x) n}
# ----------------------------------------------------------------------


def hn_matrix_rep(N, n, h):
    """Image of an H_n element under w_pq -> P_pq, c_p -> J_p."""
    P = op_P(N)
    J = op_J(N)
    acc = SuperOp(N, n)
    for (c, w), v in h.terms.items():
        img = SuperOp.identity(N, n)
        for p in c:
            img = koszul_mul(img, embed(J, [p], n))
        for q in adjacent_word(w):
            img = koszul_mul(img, embed(P, [q, q + 1], n))
        acc = acc + img.scale(v)
    return acc


def check_hn_matrix_rep(N, n, name="hn-matrix-rep"):
    """The assignment is a homomorphism on a spanning family and its image
    supercommutes with the diagonal queer-algebra action."""
    from .gridcert import CheckResult
    from .super_linear import supercommutator

    gens = [HnElement.c(n, p) for p in range(1, n + 1)] + [
        HnElement.w(n, q, q + 1) for q in range(1, n)
    ]
    for a in gens:
        for b in gens:
            lhs = hn_matrix_rep(N, n, hn_mul(a, b))
            rhs = koszul_mul(hn_matrix_rep(N, n, a), hn_matrix_rep(N, n, b))
            if lhs != rhs:
                return __bad(name, {"relation": "homomorphism"})
    for i in index_list(N):
        for j in index_list(N):
            f = op_F(N, i, j)
            diag = SuperOp(N, n)
            for p in range(1, n + 1):
                diag = diag + embed(f, [p], n)
            for a in gens:
                if not supercommutator(hn_matrix_rep(N, n, a), diag).is_zero():
                    return __bad(name, {"relation": "supercommutant", "f": [i, j]})
    return CheckResult(name, True)


# ----------------------------------------------------------------------
# exact rank / PBW independence
# ----------------------------------------------------------------------


def exact_rank(rows):
    """Rank of sparse rows (dicts key -> GaussRat) over the Gaussian field."""
    pivots = {}
    rank = 0
    for row in rows:
        r = dict(row)
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
        # zero rows contribute nothing
    return rank


def pbw_independence_check(n, degree, name="sergeev-pbw-independence"):
    """gamma_m images of the normal-form monomials of x-degree <= degree are
    linearly independent in H_{m+n} for m = degree."""
    from .gridcert import CheckResult

    m = degree
    rows = []
    exps = [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]
    for (c, w) in hn_basis(n):
        for e in exps:
            el = AnElement(n, {(c, w, e): ONE})
            img = gamma(m, el)
            rows.append({k: v for k, v in img.terms.items()})
    rank = exact_rank(rows)
    ok = rank == len(rows)
    return CheckResult(name, ok, None if ok else {"rank": rank, "rows": len(rows)})
