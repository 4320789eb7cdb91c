"""Exact coefficient arithmetic.

Gaussian rationals, sparse multivariate polynomials over them, rational
functions kept in reduced-by-content form, and truncated power series whose
coefficients may be scalars or operators.  Rational-function identities are
decided by `identity_certify`, which evaluates the cross-multiplied
difference on a deterministic integer grid sized by a degree bound.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


class GridExhausted(Exception):
    """Raised when no usable evaluation grid avoids the denominators."""


def _gcd3(a, b, c):
    return gcd(gcd(abs(a), abs(b)), abs(c))


class GaussRat:
    """Gaussian rational (a + b*i)/d with d > 0 and gcd(a, b, d) = 1."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=1):
        if isinstance(a, Fraction):
            b2 = b if isinstance(b, Fraction) else Fraction(b)
            d2 = a.denominator * b2.denominator // gcd(a.denominator, b2.denominator)
            a, b, d = a.numerator * (d2 // a.denominator), b2.numerator * (d2 // b2.denominator), d * d2
        if d == 0:
            raise ZeroDivisionError("GaussRat with zero denominator")
        if d < 0:
            a, b, d = -a, -b, -d
        g = _gcd3(a, b, d)
        if g > 1:
            a, b, d = a // g, b // g, d // g
        self.a, self.b, self.d = a, b, d

    # -- constructors -------------------------------------------------
    @classmethod
    def _raw(cls, a, b, d):
        self = object.__new__(cls)
        self.a, self.b, self.d = a, b, d
        return self

    @classmethod
    def _norm(cls, a, b, d):
        if d < 0:
            a, b, d = -a, -b, -d
        g = _gcd3(a, b, d)
        if g > 1:
            a, b, d = a // g, b // g, d // g
        self = object.__new__(cls)
        self.a, self.b, self.d = a, b, d
        return self

    @classmethod
    def from_fraction(cls, fr):
        return cls._raw(fr.numerator, 0, fr.denominator)

    # -- field structure ----------------------------------------------
    @property
    def re(self):
        return Fraction(self.a, self.d)

    @property
    def im(self):
        return Fraction(self.b, self.d)

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __add__(self, other):
        if not isinstance(other, GaussRat):
            if isinstance(other, int):
                other = GaussRat._raw(other, 0, 1)
            else:
                return NotImplemented
        d1, d2 = self.d, other.d
        if d1 == d2:
            return GaussRat._norm(self.a + other.a, self.b + other.b, d1)
        return GaussRat._norm(self.a * d2 + other.a * d1, self.b * d2 + other.b * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat._raw(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-other if isinstance(other, GaussRat) else GaussRat._raw(-other, 0, 1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GaussRat):
            if isinstance(other, int):
                return GaussRat._norm(self.a * other, self.b * other, self.d)
            return NotImplemented
        if self.b == 0 and other.b == 0:
            return GaussRat._norm(self.a * other.a, 0, self.d * other.d)
        return GaussRat._norm(
            self.a * other.a - self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.d * other.d,
        )

    __rmul__ = __mul__

    def inverse(self):
        n = self.a * self.a + self.b * self.b
        if n == 0:
            raise ZeroDivisionError("inverse of zero GaussRat")
        return GaussRat._norm(self.a * self.d, -self.b * self.d, n)

    def __truediv__(self, other):
        if isinstance(other, int):
            return GaussRat._norm(self.a, self.b, self.d * other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        r = ONE
        base = self
        while k:
            if k & 1:
                r = r * base
            base = base * base
            k >>= 1
        return r

    def conj(self):
        return GaussRat._raw(self.a, -self.b, self.d)

    def __eq__(self, other):
        if isinstance(other, GaussRat):
            return self.a == other.a and self.b == other.b and self.d == other.d
        if isinstance(other, int):
            return self.b == 0 and self.d == 1 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.d))
        return hash((self.a, self.b, self.d))

    # -- serialization -------------------------------------------------
    def __str__(self):
        # componentwise, lowest terms, explicit sign on the imaginary part
        def comp(n):
            g = gcd(abs(n), self.d) or 1
            return f"{n // g}/{self.d // g}"

        if self.b == 0:
            return comp(self.a)
        s = comp(self.a) if self.a else "0/1"
        t = comp(self.b)
        if not t.startswith("-"):
            t = "+" + t
        return f"{s}{t}*i"

    def __repr__(self):
        return f"GaussRat({self})"

    def sort_key(self):
        return (self.a * 2 * self.d, self.b * 2 * self.d)  # arbitrary but total


ZERO = GaussRat._raw(0, 0, 1)
ONE = GaussRat._raw(1, 0, 1)
MINUS_ONE = GaussRat._raw(-1, 0, 1)
I_UNIT = GaussRat._raw(0, 1, 1)


def parse_gaussrat(text):
    """Parse "a/b", "a/b+c/d*i" or plain integers/fractions."""
    text = text.strip().replace(" ", "")
    if not text:
        raise ValueError("empty scalar")
    # split into signed components
    parts = []
    cur = ""
    for k, ch in enumerate(text):
        if ch in "+-" and k > 0 and text[k - 1] not in "+-/*":
            parts.append(cur)
            cur = ch
        else:
            cur += ch
    parts.append(cur)
    re = Fraction(0)
    im = Fraction(0)
    for p in parts:
        if p.endswith("*i") or p.endswith("i"):
            body = p[:-2] if p.endswith("*i") else p[:-1]
            if body in ("", "+"):
                im += 1
            elif body == "-":
                im -= 1
            else:
                im += Fraction(body)
        else:
            re += Fraction(p)
    den = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
    return GaussRat._norm(re.numerator * (den // re.denominator), im.numerator * (den // im.denominator), den)


# ----------------------------------------------------------------------
# sparse multivariate polynomials, graded-lexicographic canonical order
# ----------------------------------------------------------------------


def _grlex_key(exps):
    return (sum(exps), exps)


class Poly:
    """Multivariate polynomial over GaussRat; variables stored sorted by name."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms):
        variables = tuple(variables)
        if list(variables) != sorted(variables):
            order = sorted(range(len(variables)), key=lambda k: variables[k])
            remap = {old: new for new, old in enumerate(order)}
            variables = tuple(sorted(variables))
            terms = {
                tuple(e[order[k]] for k in range(len(order))): c for e, c in terms.items()
            }
        self.vars = variables
        self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def zero(cls, variables=()):
        return cls(variables, {})

    @classmethod
    def const(cls, c, variables=()):
        c = c if isinstance(c, GaussRat) else GaussRat(c)
        variables = tuple(variables)
        if not c:
            return cls(variables, {})
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, name, variables=None):
        variables = tuple(variables) if variables is not None else (name,)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): ONE})

    def is_zero(self):
        return not self.terms

    def _aligned(self, other):
        if self.vars == other.vars:
            return self, other
        allv = tuple(sorted(set(self.vars) | set(other.vars)))
        return self.extend(allv), other.extend(allv)

    def extend(self, allv):
        if self.vars == tuple(allv):
            return self
        pos = [allv.index(v) for v in self.vars]
        n = len(allv)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for k, p in enumerate(pos):
                ne[p] = e[k]
            terms[tuple(ne)] = c
        return Poly(allv, terms)

    def __add__(self, other):
        if isinstance(other, (int, GaussRat)):
            other = Poly.const(other, self.vars)
        a, b = self._aligned(other)
        t = dict(a.terms)
        for e, c in b.terms.items():
            s = t.get(e)
            t[e] = c if s is None else s + c
        return Poly(a.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, GaussRat)):
            other = Poly.const(other, self.vars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, GaussRat)):
            c = other if isinstance(other, GaussRat) else GaussRat(other)
            if not c:
                return Poly(self.vars, {})
            return Poly(self.vars, {e: v * c for e, v in self.terms.items()})
        a, b = self._aligned(other)
        t = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                c = c1 * c2
                s = t.get(e)
                t[e] = c if s is None else s + c
        return Poly(a.vars, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        r = Poly.const(ONE, self.vars)
        base = self
        while k:
            if k & 1:
                r = r * base
            base = base * base
            k >>= 1
        return r

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items(), key=lambda t: _grlex_key(t[0])))))

    def degree(self, name):
        if name not in self.vars or not self.terms:
            return 0
        k = self.vars.index(name)
        return max(e[k] for e in self.terms)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def evaluate(self, subs):
        """Full evaluation; subs maps every variable name to a GaussRat."""
        vals = [subs[v] for v in self.vars]
        acc = ZERO
        powcache = [dict() for _ in vals]

        def pw(k, n):
            c = powcache[k].get(n)
            if c is None:
                c = vals[k] ** n
                powcache[k][n] = c
            return c

        for e, c in self.terms.items():
            t = c
            for k, n in enumerate(e):
                if n:
                    t = t * pw(k, n)
            acc = acc + t
        return acc

    def subs_neg(self, names):
        """Substitute x -> -x for each variable name given."""
        ks = [self.vars.index(v) for v in names if v in self.vars]
        terms = {}
        for e, c in self.terms.items():
            s = sum(e[k] for k in ks)
            terms[e] = c if s % 2 == 0 else -c
        return Poly(self.vars, terms)

    def rename(self, mapping):
        return Poly(tuple(mapping.get(v, v) for v in self.vars), dict(self.terms))

    def leading(self):
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def primitive(self):
        """Return (content, primitive) with content * primitive == self.

        The primitive part has coprime Gaussian-integer coefficients and a
        leading coefficient with positive real part (positive imaginary part
        when the real part vanishes).
        """
        if not self.terms:
            return ONE, self
        lcm_d = 1
        for c in self.terms.values():
            lcm_d = lcm_d * c.d // gcd(lcm_d, c.d)
        g = 0
        for c in self.terms.values():
            m = lcm_d // c.d
            g = gcd(g, gcd(abs(c.a * m), abs(c.b * m)))
        content = GaussRat._norm(g, 0, lcm_d)
        prim = Poly(self.vars, {e: c / content for e, c in self.terms.items()})
        _, lead = prim.leading()
        if lead.a < 0 or (lead.a == 0 and lead.b < 0):
            prim = -prim
            content = -content
        return content, prim

    def divmod_poly(self, g):
        """Graded-lex long division; intended for binomial divisors."""
        if g.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        f = self.extend(tuple(sorted(set(self.vars) | set(g.vars))))
        g = g.extend(f.vars)
        ge, gc = g.leading()
        q = Poly(f.vars, {})
        r = f
        while not r.is_zero():
            re_, rc = r.leading()
            diff = tuple(x - y for x, y in zip(re_, ge))
            if any(d < 0 for d in diff):
                break
            t = Poly(f.vars, {diff: rc / gc})
            q = q + t
            r = r - t * g
        return q, r

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"{v}^{n}" if n > 1 else v for v, n in zip(self.vars, e) if n
            )
            bits.append(f"({c}){('*' + mono) if mono else ''}")
        return " + ".join(bits)

    __repr__ = __str__

    def to_json(self):
        return {
            "vars": list(self.vars),
            "terms": {",".join(map(str, e)): str(c) for e, c in self.sorted_terms()},
        }

    @classmethod
    def from_json(cls, obj):
        vars_ = tuple(obj["vars"])
        terms = {}
        for key, val in obj["terms"].items():
            e = tuple(int(x) for x in key.split(",")) if key else ()
            terms[e] = parse_gaussrat(val)
        return cls(vars_, terms)


# ----------------------------------------------------------------------
# rational functions, reduced by content only
# ----------------------------------------------------------------------


class DenominatorZero(ZeroDivisionError):
    pass


class RatFun:
    """Quotient of polynomials; the denominator is kept primitive."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = Poly.const(ONE, num.vars)
        if den.is_zero():
            raise ZeroDivisionError("RatFun with zero denominator")
        num, den = num._aligned(den)
        if num.is_zero():
            den = Poly.const(ONE, num.vars)
        else:
            c, den = den.primitive()
            num = num * c.inverse()
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c, variables=()):
        return cls(Poly.const(c, variables))

    @classmethod
    def variable(cls, name, variables=None):
        return cls(Poly.variable(name, variables))

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_one(self):
        return self.num == self.den

    def _coerce(self, other):
        if isinstance(other, RatFun):
            return other
        if isinstance(other, Poly):
            return RatFun(other)
        return RatFun(Poly.const(other, self.num.vars))

    def __add__(self, other):
        other = self._coerce(other)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        r = object.__new__(RatFun)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, GaussRat)):
            r = object.__new__(RatFun)
            r.num, r.den = self.num * other, self.den
            if r.num.is_zero():
                r.den = Poly.const(ONE, r.num.vars)
            return r
        other = self._coerce(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero RatFun")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def evaluate(self, subs):
        d = self.den.evaluate(subs)
        if not d:
            raise DenominatorZero(f"denominator vanishes at {subs}")
        return self.num.evaluate(subs) * d.inverse()

    def subs_neg(self, names):
        return RatFun(self.num.subs_neg(names), self.den.subs_neg(names))

    def __eq__(self, other):
        """Structural equality of the reduced representation only."""
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den.total_degree() == 0 and self.den == Poly.const(ONE, self.den.vars):
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(Poly.from_json(obj["num"]), Poly.from_json(obj["den"]))


# ----------------------------------------------------------------------
# deterministic evaluation grids
# ----------------------------------------------------------------------

_PRIMES = [2, 3, 5, 7]


def nth_prime(k):
    while len(_PRIMES) <= k:
        c = _PRIMES[-1] + 2
        while True:
            if all(c % p for p in _PRIMES if p * p <= c):
                _PRIMES.append(c)
                break
            c += 2
    return _PRIMES[k]


def prime_stream(start_index, stride):
    k = start_index
    while True:
        yield nth_prime(k)
        k += stride


def make_grid(var_names, bounds, avoid, max_shifts=80):
    """Integer grid with bounds[v]+1 values per variable.

    Values come from disjoint prime streams, one per variable, and the whole
    grid is shifted upward until no point annihilates a denominator (`avoid`
    is a predicate on substitution dicts returning True when the point must
    be skipped).  Deterministic; raises GridExhausted after max_shifts.
    """
    names = list(var_names)
    nv = len(names)
    for shift in range(max_shifts):
        lists = []
        for k, v in enumerate(names):
            vals, idx = [], k + shift * nv
            while len(vals) < bounds[v] + 1:
                vals.append(GaussRat(nth_prime(idx)))
                idx += nv
            lists.append(vals)
        points = [dict(zip(names, combo)) for combo in itertools.product(*lists)]
        if not any(avoid(pt) for pt in points):
            return points
    raise GridExhausted("no grid avoids the denominators; shift limit reached")


def identity_certify(f, g, degree_bound, max_shifts=80):
    """Decide f == g as rational functions.

    The cross-multiplied difference num_f*den_g - num_g*den_f is evaluated
    on an integer grid with degree_bound+1 points per variable (degree_bound
    may be an int or a per-variable dict and must dominate the true degrees).
    """
    names = sorted(set(f.num.vars) | set(f.den.vars) | set(g.num.vars) | set(g.den.vars))
    if not names:
        return (f.num.terms.get((), ZERO)) * (g.den.terms.get((), ONE)) == (
            g.num.terms.get((), ZERO)
        ) * (f.den.terms.get((), ONE))
    if isinstance(degree_bound, int):
        bounds = {v: degree_bound for v in names}
    else:
        bounds = dict(degree_bound)
    diff = f.num * g.den - g.num * f.den

    def avoid(pt):
        return (not f.den.evaluate(pt)) or (not g.den.evaluate(pt))

    for pt in make_grid(names, bounds, avoid, max_shifts):
        if diff.evaluate(pt):
            return False
    return True


# ----------------------------------------------------------------------
# truncated series
# ----------------------------------------------------------------------


def _is_zero_coeff(c):
    z = getattr(c, "is_zero", None)
    return c == 0 if z is None else z()


class TruncSeries:
    """Truncated series sum_k c_k x^(+-k), k < order.

    Coefficients are GaussRat scalars or operators supporting +, *, and
    inverse().  Arithmetic propagates the truncation order as the minimum
    of the operand orders.
    """

    __slots__ = ("var", "desc", "order", "coeffs")

    def __init__(self, var, coeffs, order=None, desc=True):
        self.var = var
        self.desc = desc
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs)
        if len(coeffs) < order:
            raise ValueError("missing coefficients below the truncation order")
        self.order = order
        self.coeffs = coeffs[:order]

    @classmethod
    def one(cls, var, order, desc=True):
        return cls(var, [ONE] + [ZERO] * (order - 1), order, desc)

    def coeff(self, k):
        if k >= self.order:
            raise IndexError(f"coefficient {k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def _check(self, other):
        if self.var != other.var or self.desc != other.desc:
            raise ValueError("series variable/direction mismatch")

    def __add__(self, other):
        self._check(other)
        n = min(self.order, other.order)
        return TruncSeries(self.var, [self.coeffs[k] + other.coeffs[k] for k in range(n)], n, self.desc)

    def __sub__(self, other):
        self._check(other)
        n = min(self.order, other.order)
        return TruncSeries(self.var, [self.coeffs[k] - other.coeffs[k] for k in range(n)], n, self.desc)

    def __neg__(self):
        return TruncSeries(self.var, [-c for c in self.coeffs], self.order, self.desc)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries(self.var, [c * other for c in self.coeffs], self.order, self.desc)
        self._check(other)
        n = min(self.order, other.order)
        out = []
        for k in range(n):
            acc = None
            for j in range(k + 1):
                t = self.coeffs[j] * other.coeffs[k - j]
                acc = t if acc is None else acc + t
            out.append(acc)
        return TruncSeries(self.var, out, n, self.desc)

    def scale(self, c):
        return TruncSeries(self.var, [x * c for x in self.coeffs], self.order, self.desc)

    def invert(self):
        """Two-sided inverse up to the truncation order."""
        c0 = self.coeffs[0]
        inv0 = getattr(c0, "inverse", None)
        if inv0 is None or (isinstance(c0, GaussRat) and c0.is_zero()):
            raise ZeroDivisionError("series has no invertible constant term")
        t0 = c0.inverse()
        out = [t0]
        for k in range(1, self.order):
            acc = None
            for j in range(1, k + 1):
                t = self.coeffs[j] * out[k - j]
                acc = t if acc is None else acc + t
            out.append(-(t0 * acc) if acc is not None else t0 * ZERO)
        return TruncSeries(self.var, out, self.order, self.desc)

    def derivative(self):
        """d/dx for descending series in x^{-1} (or ascending in x)."""
        out = []
        if self.desc:
            out.append(self.coeffs[0] * ZERO)
            for k in range(1, self.order):
                out.append(self.coeffs[k - 1] * GaussRat(-(k - 1)))
        else:
            for k in range(self.order - 1):
                out.append(self.coeffs[k + 1] * GaussRat(k + 1))
            out.append(self.coeffs[-1] * ZERO)
        return TruncSeries(self.var, out, self.order, self.desc)

    def subs_neg(self):
        """x -> -x."""
        return TruncSeries(
            self.var,
            [c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)],
            self.order,
            self.desc,
        )

    def is_zero(self):
        return all(_is_zero_coeff(c) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return all(self.coeffs[k] == other.coeffs[k] for k in range(n))

    def __str__(self):
        e = "^-" if self.desc else "^"
        bits = [f"({c})*{self.var}{e}{k}" for k, c in enumerate(self.coeffs) if not _is_zero_coeff(c)]
        return " + ".join(bits) if bits else "0"

    __repr__ = __str__


def series_invert(s):
    return s.invert()
