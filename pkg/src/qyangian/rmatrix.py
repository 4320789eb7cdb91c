"""The rational R-matrix, the twisted classical r-matrix, and their checks.

All identities here are certified exactly: matrices are built symbolically
with rational-function entries in the spectral variables and compared
entrywise through the grid certifier.
"""

from __future__ import annotations

import itertools

from .exact_scalar import (
    GaussRat,
    I_UNIT,
    MINUS_ONE,
    ONE,
    Poly,
    RatFun,
    ZERO,
    make_grid,
)
from .gridcert import CheckResult
from .super_linear import (
    SuperOp,
    embed,
    eta_slot,
    index_list,
    koszul_mul,
    koszul_tensor,
    op_F,
    op_J,
    op_P,
    parity,
    permute_slots,
    supercommutator,
    tau_slot,
)

_CACHE = {}


def _pair_ops(N):
    """P and P J1 J2 as numeric arity-2 operators (cached)."""
    if N not in _CACHE:
        P = op_P(N)
        J = op_J(N)
        J1J2 = koszul_mul(koszul_tensor(J, SuperOp.identity(N, 1)),
                          koszul_tensor(SuperOp.identity(N, 1), J))
        _CACHE[N] = (P, koszul_mul(P, J1J2))
    return _CACHE[N]


def numeric_R(N, a, b):
    """R(a, b) at scalar arguments; requires a != +-b."""
    P, PJJ = _pair_ops(N)
    one = SuperOp.identity(N, 2)
    return one + P.scale((a - b).inverse()).scale(MINUS_ONE) + PJJ.scale((a + b).inverse())


def symbolic_R(N, uname="u", vname="v", flip_second_sum=False):
    """R(u, v) built from the double-sum form; the negative control flips
    the sign of the (u+v) sum."""
    variables = tuple(sorted((uname, vname)))
    u = RatFun.variable(uname, variables)
    v = RatFun.variable(vname, variables)
    duv = (u - v).inverse()
    suv = (u + v).inverse()
    acc = SuperOp.identity(N, 2).to_ratfun(variables)
    for i in index_list(N):
        for j in index_list(N):
            sgn = MINUS_ONE if parity(j) else ONE
            t1 = koszul_tensor(SuperOp.matrix_unit(N, i, j), SuperOp.matrix_unit(N, j, i))
            t2 = koszul_tensor(SuperOp.matrix_unit(N, i, j), SuperOp.matrix_unit(N, -j, -i))
            acc = acc + t1.to_ratfun(variables).scale(duv * sgn).scale(MINUS_ONE)
            c2 = suv * sgn
            acc = acc + t2.to_ratfun(variables).scale(c2 if flip_second_sum else -c2)
    return acc


def symbolic_R_pjj(N, uname="u", vname="v"):
    """R(u, v) = 1 - P/(u-v) + P J1 J2/(u+v), the closed form."""
    variables = tuple(sorted((uname, vname)))
    u = RatFun.variable(uname, variables)
    v = RatFun.variable(vname, variables)
    P, PJJ = _pair_ops(N)
    one = SuperOp.identity(N, 2).to_ratfun(variables)
    return (
        one
        + P.to_ratfun(variables).scale((u - v).inverse()).scale(MINUS_ONE)
        + PJJ.to_ratfun(variables).scale((u + v).inverse())
    )


def build_R(N, check=True):
    """The rational R-matrix; both displayed forms are built and compared."""
    r1 = symbolic_R(N)
    if check:
        r2 = symbolic_R_pjj(N)
        res = entrywise_equal("r-matrix-two-forms", r1, r2)
        if not res.ok:
            raise AssertionError(f"the two forms of R disagree: {res.witness}")
    return r1


# ----------------------------------------------------------------------
# entrywise certification of symbolic operator identities
# ----------------------------------------------------------------------


def _entry_bounds(f, g):
    names = sorted(set(f.num.vars) | set(f.den.vars) | set(g.num.vars) | set(g.den.vars))
    return names, {
        v: max(
            f.num.degree(v) + g.den.degree(v),
            g.num.degree(v) + f.den.degree(v),
        )
        + 1
        for v in names
    }


def entrywise_equal(name, A, B, floor_bound=4):
    """Certify A == B entrywise via grid evaluation of cross-differences.

    Bounds are taken per entry from the actual numerator/denominator degrees
    (with one unit of slack), never below floor_bound.
    """
    keys = set(A.entries) | set(B.entries)
    zero = RatFun.const(ZERO)
    for key in sorted(keys):
        f = A.entries.get(key, zero)
        g = B.entries.get(key, zero)
        names, bounds = _entry_bounds(f, g)
        bounds = {v: max(b, floor_bound) for v, b in bounds.items()}
        diff = f.num * g.den - g.num * f.den
        if diff.is_zero():
            continue
        if not names:
            return CheckResult(name, False, witness={"entry": [list(key[0]), list(key[1])]})

        def avoid(pt):
            return (not f.den.evaluate(pt)) or (not g.den.evaluate(pt))

        for pt in make_grid(names, bounds, avoid):
            if diff.evaluate(pt):
                return CheckResult(
                    name,
                    False,
                    witness={
                        "entry": [list(key[0]), list(key[1])],
                        "point": {v: str(x) for v, x in pt.items()},
                    },
                )
    return CheckResult(name, True)


def entrywise_zero(name, A, floor_bound=4):
    return entrywise_equal(name, A, SuperOp(A.N, A.arity), floor_bound)


# ----------------------------------------------------------------------
# quantum Yang-Baxter and the symmetry identities
# ----------------------------------------------------------------------


def _rename_entries(op, mapping):
    return op.map_entries(
        lambda v: RatFun(v.num.rename(mapping), v.den.rename(mapping))
    )


def check_qybe(N, mutated=False):
    """R12(u,v) R13(u,w) R23(v,w) == R23 R13 R12, exact in three variables."""
    Ruv = symbolic_R(N, flip_second_sum=mutated)
    Ruw = _rename_entries(Ruv, {"v": "w"})
    Rvw = _rename_entries(Ruv, {"u": "v", "v": "w"})
    r12 = embed(Ruv, [1, 2], 3)
    r13 = embed(Ruw, [1, 3], 3)
    r23 = embed(Rvw, [2, 3], 3)
    lhs = koszul_mul(koszul_mul(r12, r13), r23)
    rhs = koszul_mul(koszul_mul(r23, r13), r12)
    return entrywise_equal("qybe", lhs, rhs)


def _neg_vars(op, names):
    return op.map_entries(lambda v: v.subs_neg(names))


def check_unitarity(N):
    """R(u,v) R(-u,-v) == (1 - 1/(u-v)^2 - 1/(u+v)^2) * id."""
    R = symbolic_R(N)
    Rneg = _neg_vars(R, ["u", "v"])
    lhs = koszul_mul(R, Rneg)
    variables = ("u", "v")
    u = RatFun.variable("u", variables)
    v = RatFun.variable("v", variables)
    scal = RatFun.const(ONE, variables) - ((u - v) * (u - v)).inverse() - ((u + v) * (u + v)).inverse()
    rhs = SuperOp.identity(N, 2).to_ratfun(variables).scale(scal)
    return entrywise_equal("unitarity", lhs, rhs)


def check_bar_unitarity(N):
    """Rbar(u,v) Rbar(-u,-v) == id for Rbar = (id (x) tau) R."""
    R = symbolic_R(N)
    Rbar = tau_slot(R, 1)
    lhs = koszul_mul(Rbar, _neg_vars(Rbar, ["u", "v"]))
    rhs = SuperOp.identity(N, 2).to_ratfun(("u", "v"))
    return entrywise_equal("unitarity-bar", lhs, rhs)


def check_eta_covariance(N):
    """(eta (x) id) R(u,v) == R(-u,v) and (id (x) eta) R(u,v) == R(u,-v)."""
    R = symbolic_R(N)
    r1 = entrywise_equal("eta-covariance-left", eta_slot(R, 0), _neg_vars(R, ["u"]))
    if not r1.ok:
        return r1
    r2 = entrywise_equal("eta-covariance-right", eta_slot(R, 1), _neg_vars(R, ["v"]))
    if not r2.ok:
        return r2
    both = entrywise_equal(
        "eta-covariance-both", eta_slot(eta_slot(R, 0), 1), _neg_vars(R, ["u", "v"])
    )
    return CheckResult("eta-covariance", both.ok, both.witness)


# ----------------------------------------------------------------------
# classical r-matrix
# ----------------------------------------------------------------------


def build_classical_r(N, uname="u", vname="v"):
    """r(u,v) = sum E_ij (x) E_ji (-1)^par(j)/(u-v) + sum E_ij (x) E_{-j,-i} (-1)^par(j)/(u+v)."""
    variables = tuple(sorted((uname, vname)))
    u = RatFun.variable(uname, variables)
    v = RatFun.variable(vname, variables)
    duv = (u - v).inverse()
    suv = (u + v).inverse()
    acc = SuperOp(N, 2).to_ratfun(variables)
    for i in index_list(N):
        for j in index_list(N):
            sgn = MINUS_ONE if parity(j) else ONE
            t1 = koszul_tensor(SuperOp.matrix_unit(N, i, j), SuperOp.matrix_unit(N, j, i))
            t2 = koszul_tensor(SuperOp.matrix_unit(N, i, j), SuperOp.matrix_unit(N, -j, -i))
            acc = acc + t1.to_ratfun(variables).scale(duv * sgn)
            acc = acc + t2.to_ratfun(variables).scale(suv * sgn)
    return acc


def twisted_r(K, omega, order, uname="u", vname="v"):
    """r(u,v) = sum_m (id (x) omega^m)(K) / (u - zeta^m v) for an involution-
    power twist; requires omega^{(x)2}(K) == zeta K with zeta a primitive
    `order`-th root of unity in the Gaussian rationals."""
    if order == 1:
        zeta = ONE
    elif order == 2:
        zeta = MINUS_ONE
    elif order == 4:
        zeta = I_UNIT
    else:
        raise ValueError("only twist orders 1, 2, 4 are available over Q(i)")
    k2 = omega(omega(K, 0), 1)
    if k2 != K.scale(zeta):
        raise ValueError("omega^{(x)2}(K) != zeta K; the twist hypothesis fails")
    variables = tuple(sorted((uname, vname)))
    u = RatFun.variable(uname, variables)
    v = RatFun.variable(vname, variables)
    acc = SuperOp(K.N, 2).to_ratfun(variables)
    term = K
    zp = ONE
    for _ in range(order):
        acc = acc + term.to_ratfun(variables).scale((u - v * zp).inverse())
        term = omega(term, 1)
        zp = zp * zeta
    return acc


def check_classical_constructions(N):
    """twisted_r(P, eta, 2) reproduces the classical r, and R = 1 - r."""
    r1 = build_classical_r(N)
    r2 = twisted_r(op_P(N), eta_slot, 2)
    res = entrywise_equal("classical-r-two-forms", r1, r2)
    if not res.ok:
        return res
    R = symbolic_R(N)
    one = SuperOp.identity(N, 2).to_ratfun(("u", "v"))
    res = entrywise_equal("r-matrix-is-one-minus-classical", R, one - r1)
    return res


def check_antisymmetry(N, r=None):
    """r12(u,v) + r21(v,u) == 0."""
    r = r if r is not None else build_classical_r(N)
    r21 = permute_slots(r, (1, 0))
    r21 = r21.map_entries(lambda f: RatFun(
        f.num.rename({"u": "v", "v": "u"}), f.den.rename({"u": "v", "v": "u"})
    ))
    return entrywise_zero("antisymmetry", r + r21)


def check_cybe(N, r=None, name="cybe"):
    """[r12, r13] + [r12, r23] + [r13, r23] == 0 with supercommutators."""
    ruv = r if r is not None else build_classical_r(N)
    ruw = _rename_entries(ruv, {"v": "w"})
    rvw = _rename_entries(ruv, {"u": "v", "v": "w"})
    r12 = embed(ruv, [1, 2], 3)
    r13 = embed(ruw, [1, 3], 3)
    r23 = embed(rvw, [2, 3], 3)
    s = (
        supercommutator(r12, r13)
        + supercommutator(r12, r23)
        + supercommutator(r13, r23)
    )
    return entrywise_zero(name, s)


def check_untwisted_cybe(N):
    """The base case r = P/(u-v) also satisfies the classical equation."""
    variables = ("u", "v")
    u = RatFun.variable("u", variables)
    v = RatFun.variable("v", variables)
    r = op_P(N).to_ratfun(variables).scale((u - v).inverse())
    return check_cybe(N, r=r, name="cybe-untwisted")


# ----------------------------------------------------------------------
# the co-supercommutator lands in the twisted current algebra
# ----------------------------------------------------------------------


def check_cosupercommutator_range(N, s_max=2):
    """phi(F_ij u^s) = [X1(u) + X2(v), r(u,v)] is polynomial and twisted-
    invariant in each slot (eta with u -> -u), for the spanning set."""
    variables = ("u", "v")
    r = build_classical_r(N)
    u = Poly.variable("u", variables)
    v = Poly.variable("v", variables)
    den_parts = [u - v, u + v]
    for i in index_list(N):
        for j in index_list(N):
            for s in range(s_max + 1):
                # spanning element of the twisted algebra: E_ij u^s + E_{-i,-j} (-u)^s
                def gen_at(var_poly):
                    a = SuperOp.matrix_unit(N, i, j).to_ratfun(variables).scale(RatFun(var_poly ** s))
                    b = SuperOp.matrix_unit(N, -i, -j).to_ratfun(variables).scale(
                        RatFun(var_poly ** s) * (MINUS_ONE if s % 2 else ONE)
                    )
                    return a + b

                x1 = embed(gen_at(u), [1], 2)
                x2 = embed(gen_at(v), [2], 2)
                phi = supercommutator(x1 + x2, r)
                # entries must be polynomial: denominators divide out
                poly_entries = {}
                for key, val in phi.entries.items():
                    num, den = val.num, val.den
                    for part in den_parts:
                        while True:
                            dq, drem = den.divmod_poly(part)
                            if not drem.is_zero():
                                break
                            q, rem = num.divmod_poly(part)
                            if not rem.is_zero():
                                return CheckResult(
                                    "cosupercommutator-range",
                                    False,
                                    witness={"generator": [i, j, s], "entry": list(map(list, key))},
                                )
                            num, den = q, dq
                    if den.total_degree() != 0:
                        return CheckResult(
                            "cosupercommutator-range",
                            False,
                            witness={"generator": [i, j, s], "entry": list(map(list, key)),
                                     "reason": "entry not polynomial"},
                        )
                    c = den.terms.get((0,) * len(den.vars), ONE)
                    poly_entries[key] = RatFun(num * c.inverse())
                phi_poly = SuperOp(N, 2)
                phi_poly.entries = poly_entries
                # twisted invariance slot by slot
                inv1 = eta_slot(phi_poly, 0).map_entries(lambda f: f.subs_neg(["u"]))
                inv2 = eta_slot(phi_poly, 1).map_entries(lambda f: f.subs_neg(["v"]))
                for tag, other in (("slot-1", inv1), ("slot-2", inv2)):
                    res = entrywise_equal("cosupercommutator-range", phi_poly, other)
                    if not res.ok:
                        res.witness = dict(res.witness or {})
                        res.witness.update({"generator": [i, j, s], "slot": tag})
                        return res
    return CheckResult("cosupercommutator-range", True)


def run_all(N, negative_controls=False):
    checks = [
        lambda: entrywise_equal("r-matrix-two-forms", symbolic_R(N), symbolic_R_pjj(N)),
        lambda: check_qybe(N),
        lambda: check_unitarity(N),
        lambda: check_bar_unitarity(N),
        lambda: check_eta_covariance(N),
        lambda: check_classical_constructions(N),
        lambda: check_antisymmetry(N),
        lambda: check_cybe(N),
        lambda: check_untwisted_cybe(N),
        lambda: check_cosupercommutator_range(N),
    ]
    results = [c() for c in checks]
    if negative_controls:
        bad = check_qybe(N, mutated=True)
        results.append(
            CheckResult("qybe-negative-control", not bad.ok, bad.witness, {"expected_fail": True})
        )
    return results
