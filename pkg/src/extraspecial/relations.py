"""Solvers and identity checks built on restriction tuples.

* ``solve_f``: the relation z^(n) + sum_i (-1)^(n-i) z^(i) f_i = 0, solved
  directly and cross-checked against preimages of kappa_i^iota.
* ``solve_eta``: z^(n-1) = y_2n * eta + sum_{i<=n-2} h_i z^(i), plus the
  closed expression for eta built from the rank n-1 solutions.
* ``verify_kappa_recursion``: kappa_{n,r}^iota in terms of rank n-1 data.
* ``verify_gamma_identities``: additivity of V in its last argument and
  the norm identity for Z_r.
* ``check_subgroup_restriction``: restriction of kappa^R to a maximal
  subgroup, expanded in w.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import GlobalConfig
from .dickson import dickson_Q, mui_expansion
from .linalg import graded_solve, nullspace
from .model import ClassTuple, ExtraspecialModel, MultiIndex
from .poly import (MultiPoly, VariableContext, format_poly,
                   multiplication_matrix)
from .quotient import GradedQuotient
from .steenrod import norm_of_restriction


def _sgn(k: int, f):
    return f if k % 2 == 0 else -f


def _block_system(blocks: list[tuple[MultiPoly, int, int]], nvars: int, d: int, p: int):
    """Columns g * m (times sign) for each (g, k, sign) block, monomials m of degree k
    in ascending order.  Returns the matrix and the per-block column slices."""
    cols, slices, start = [], [], 0
    for g, k, sign in blocks:
        M = multiplication_matrix(g, k)[::-1].T * sign
        cols.append(M % p)
        slices.append(slice(start, start + M.shape[1]))
        start += M.shape[1]
    return np.concatenate(cols, axis=1), slices


def _poly_from_ascending(ctx, p, k, x):
    return MultiPoly.from_vector(ctx, p, k, np.asarray(x)[::-1])


@lru_cache(maxsize=None)
def model_for(p: int, n: int, degree_cap: int = 64) -> ExtraspecialModel:
    return ExtraspecialModel(GlobalConfig(p=p, n=n, degree_cap=degree_cap))


@lru_cache(maxsize=None)
def quotient_for(p: int, n: int, degree_cap: int = 64) -> GradedQuotient:
    return GradedQuotient(model_for(p, n, degree_cap))


# ---------------------------------------------------------------------------
# f

@dataclass
class FSolution:
    p: int
    n: int
    f: list[MultiPoly]
    normal_forms: list[MultiPoly]
    witnesses: list[MultiPoly | None]
    kernel_dim: int
    identity_holds: bool
    timings: dict = field(default_factory=dict)

    @property
    def routes_agree(self) -> list[bool]:
        return [w is not None and w == nf for w, nf in zip(self.witnesses, self.normal_forms)]

    @property
    def passed(self) -> bool:
        return self.identity_holds and all(self.routes_agree)

    def to_json(self):
        return {"p": self.p, "n": self.n,
                "f": [format_poly(g) for g in self.f],
                "normal_forms": [format_poly(g) for g in self.normal_forms],
                "routes_agree": self.routes_agree, "kernel_dim": self.kernel_dim,
                "identity_holds": self.identity_holds}


class UnsolvableRelation(ArithmeticError):
    def __init__(self, msg, certificate):
        super().__init__(msg)
        self.certificate = certificate


def solve_f(model: ExtraspecialModel, quotient: GradedQuotient | None = None,
            cross_check: bool = True) -> FSolution:
    """Solve for f_0..f_{n-1} with ydeg f_i = iota (p^n - p^i).

    The returned f_i is the particular solution with free variables zero
    (ascending monomials within each block); it is exact for n = 1, where the
    solution is unique.  ``normal_forms`` reduces each f_i modulo the ideal,
    and ``witnesses`` are the independent preimages of kappa_i^iota.
    """
    p, n, io = model.p, model.n, model.iota
    quotient = quotient or GradedQuotient(model)
    D = io * p ** n + 1
    model.config.check_degree(D)
    t0 = time.perf_counter()
    z = [model.z_poly(i) for i in range(n + 1)]
    degs = [io * (p ** n - p ** i) for i in range(n)]
    blocks = [(z[i], degs[i], (-1) ** (n - i)) for i in range(n)]
    A, slices = _block_system(blocks, 2 * n, D, p)
    b = (-z[n]).to_vector(D)
    sol = graded_solve(A, b, p, kernel=True)
    if not sol.consistent:
        raise UnsolvableRelation("no solution for the f relation", sol.certificate.tolist())
    f = [_poly_from_ascending(model.ambient, p, degs[i], sol.x[slices[i]]) for i in range(n)]
    t1 = time.perf_counter()
    total = z[n]
    for i in range(n):
        total = total + _sgn(n - i, z[i] * f[i])
    nfs = [quotient.normal_form(g) for g in f]
    witnesses: list = [None] * n
    if cross_check:
        for i in range(n):
            w = model.membership(model.char_class(i) ** io)
            witnesses[i] = w.poly if w.found else None
    t2 = time.perf_counter()
    return FSolution(p, n, f, nfs, witnesses, int(sol.kernel.shape[0]), total.is_zero(),
                     {"solve_ms": round(1000 * (t1 - t0)), "cross_check_ms": round(1000 * (t2 - t1))})


@lru_cache(maxsize=None)
def solved_f(p: int, n: int) -> tuple[MultiPoly, ...]:
    """Cached f_{n,0..n-1} (particular solutions); n = 0 gives the empty tuple."""
    if n == 0:
        return ()
    return tuple(solve_f(model_for(p, n), quotient_for(p, n), cross_check=False).f)


def f_with_top(p: int, n: int, ctx: VariableContext) -> list[MultiPoly]:
    """[f_{n,0}, ..., f_{n,n-1}, 1] promoted into ctx by variable name."""
    out = [g.embed(ctx) for g in solved_f(p, n)]
    return out + [MultiPoly.constant(ctx, p, 1)]


# ---------------------------------------------------------------------------
# eta

def phi_poly(model: ExtraspecialModel) -> MultiPoly:
    n, p = model.n, model.p
    a, b = model.ambient_var(2 * n - 1), model.ambient_var(2 * n)
    return a if p == 2 else a ** p - a * b ** (p - 1)


def eta_formula(model: ExtraspecialModel) -> MultiPoly:
    """(-1)^(n-1) [phi f_{n-1,0} + sum_{i=1}^{n-1} (-1)^i (y^(iota p^i) - y b^(iota p^i - 1)) f_{n-1,i}]
    with y = y_{2n-1}, b = y_{2n} and f_{n-1,n-1} = 1."""
    n, p, io = model.n, model.p, model.iota
    F = f_with_top(p, n - 1, model.ambient)
    a, b = model.ambient_var(2 * n - 1), model.ambient_var(2 * n)
    X = phi_poly(model) * F[0]
    for i in range(1, n):
        q = io * p ** i
        X = X + _sgn(i, (a ** q - a * b ** (q - 1)) * F[i])
    return _sgn(n - 1, X)


@dataclass
class EtaSolution:
    p: int
    n: int
    eta: MultiPoly
    h: list[MultiPoly]
    eta_normal_form: MultiPoly
    kernel_eta: list[MultiPoly]
    unique_exact: bool
    unique_modulo_ideal: bool
    formula: MultiPoly
    formula_equals_solution: bool
    formula_solves_relation: bool
    formula_equal_modulo_ideal: bool

    @property
    def formula_level(self) -> str:
        if self.formula_equals_solution:
            return "exact"
        if self.formula_solves_relation:
            return "solves-relation"
        if self.formula_equal_modulo_ideal:
            return "modulo-ideal"
        return "none"

    @property
    def passed(self) -> bool:
        return self.unique_modulo_ideal and self.formula_level != "none"

    def to_json(self):
        return {"p": self.p, "n": self.n, "eta": format_poly(self.eta),
                "h": [format_poly(g) for g in self.h],
                "eta_normal_form": format_poly(self.eta_normal_form),
                "unique_exact": self.unique_exact,
                "unique_modulo_ideal": self.unique_modulo_ideal,
                "kernel_eta": [format_poly(g) for g in self.kernel_eta],
                "formula": format_poly(self.formula), "formula_level": self.formula_level,
                "formula_equals_solution": self.formula_equals_solution,
                "formula_solves_relation": self.formula_solves_relation,
                "formula_equal_modulo_ideal": self.formula_equal_modulo_ideal}


def solve_eta(model: ExtraspecialModel, quotient: GradedQuotient | None = None) -> EtaSolution:
    p, n, io = model.p, model.n, model.iota
    quotient = quotient or GradedQuotient(model)
    E = io * p ** (n - 1)
    model.config.check_degree(E + 1)
    z = [model.z_poly(i) for i in range(n)]
    y2n = model.ambient_var(2 * n)
    blocks = [(y2n, E, 1)] + [(z[i], E + 1 - z[i].homogeneous_degree, 1) for i in range(n - 1)]
    A, slices = _block_system(blocks, 2 * n, E + 1, p)
    sol = graded_solve(A, z[n - 1].to_vector(E + 1), p, kernel=True)
    if not sol.consistent:
        raise UnsolvableRelation("no solution for the eta relation", sol.certificate.tolist())
    amb = model.ambient
    eta = _poly_from_ascending(amb, p, E, sol.x[slices[0]])
    h = [_poly_from_ascending(amb, p, blocks[k][1], sol.x[slices[k]]) for k in range(1, n)]
    K = sol.kernel
    kernel_eta = []
    if K.shape[0]:
        Keta = K[:, slices[0]]
        nz = Keta[np.any(Keta, axis=1)]
        if nz.shape[0]:
            for row in nullspace(nullspace(nz, p), p):  # a basis of the span
                kernel_eta.append(_poly_from_ascending(amb, p, E, row))
    lower = GradedQuotient(model, generators=z[:n - 1]) if n > 1 else None

    def lower_in_ideal(g):
        if g.is_zero():
            return True
        return lower.in_ideal(g) if lower is not None else False

    F = eta_formula(model)
    residual = z[n - 1] - y2n * F
    return EtaSolution(
        p, n, eta, h, quotient.normal_form(eta), kernel_eta,
        unique_exact=not kernel_eta,
        unique_modulo_ideal=all(lower_in_ideal(g) for g in kernel_eta),
        formula=F,
        formula_equals_solution=F == eta,
        formula_solves_relation=lower_in_ideal(residual),
        formula_equal_modulo_ideal=quotient.normal_form(F) == quotient.normal_form(eta),
    )


# ---------------------------------------------------------------------------
# recursion for kappa^iota

@dataclass
class CheckReport:
    claim: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {"claim": self.claim, "passed": self.passed, **self.details}


def _difference_json(model, diff):
    if diff is None:
        return None
    k, a, b = diff
    return {"lagrangian": model.lagrangians[k].to_json(), "expected": format_poly(b),
            "got": format_poly(a)}


def _recursion_parts(model: ExtraspecialModel, ctx=None):
    """Inflated building blocks: F_i (f_{n-1,i}, F_{n-1} = 1), Y = y_2n, X = y_{2n-1}, Phi."""
    p, n = model.p, model.n
    F = [model.inflate(g, ctx) for g in f_with_top(p, n - 1, model.ambient)]
    Y = model.inflate(model.ambient_var(2 * n), ctx)
    X = model.inflate(model.ambient_var(2 * n - 1), ctx)
    Phi = model.inflate(phi_poly(model), ctx)
    return F, Y, X, Phi


def verify_kappa_recursion(model: ExtraspecialModel, r: int) -> CheckReport:
    """kappa_{n,r}^iota = F_{r-1}^p + F_r S^(p-1) + F_r B^(p-1), where
    S = sum_i (-1)^i F_i Y^(iota p^i) and
    B = F_0 Phi + sum_{i>=1} (-1)^i F_i (X^(iota p^i) - X Y^(iota p^i - 1)).

    Also reports whether the variant without the factor F_r on the last
    term holds.
    """
    p, n, io = model.p, model.n, model.iota
    if n < 2 or not 0 <= r <= n - 1:
        raise ValueError("need n >= 2 and 0 <= r <= n-1")
    F, Y, X, Phi = _recursion_parts(model)
    S = model.constant(0)
    for i in range(n):
        S = S + _sgn(i, F[i] * Y ** (io * p ** i))
    B = F[0] * Phi
    for i in range(1, n):
        q = io * p ** i
        B = B + _sgn(i, F[i] * (X ** q - X * Y ** (q - 1)))
    prev = F[r - 1] ** p if r >= 1 else model.constant(0)
    Bp = B ** (p - 1)
    rhs = prev + F[r] * S ** (p - 1) + F[r] * Bp
    variant = prev + F[r] * S ** (p - 1) + Bp
    lhs = model.char_class(r) ** io
    diff = rhs.first_difference(lhs)
    mismatched = sum(a != b for a, b in zip(rhs.entries, lhs.entries))
    return CheckReport("kappa recursion", diff is None, {
        "p": p, "n": n, "r": r, "ydeg": lhs.ydeg, "lagrangians": len(model.lagrangians),
        "mismatched_lagrangians": mismatched,
        "first_difference": _difference_json(model, diff),
        "variant_without_factor_holds": variant == lhs})


# ---------------------------------------------------------------------------
# additivity and the norm identity

def _v_product(p: int, n: int, x: MultiPoly) -> MultiPoly:
    """prod over lambda in F_p^n of (lambda . t + x), t the first n variables of x's context."""
    import itertools
    ctx = x.ctx
    out = MultiPoly.constant(ctx, p, 1)
    for lam in itertools.product(range(p), repeat=n):
        form = x
        for j, c in enumerate(lam):
            if c:
                form = form + MultiPoly.var(ctx, p, j).scale(c)
        out = out * form
    return out


def z_relation_poly(model: ExtraspecialModel, r: int) -> MultiPoly:
    """Z_r in the ambient ring: kappa_{n-1,i}^iota replaced by f_{n-1,i}, y = y_2n."""
    p, n, io = model.p, model.n, model.iota
    F = f_with_top(p, n - 1, model.ambient)
    y = model.ambient_var(2 * n)
    first = MultiPoly.zero(model.ambient, p)
    for i in range(r, n):
        first = first + _sgn(i, F[i] ** p * y ** (io * (p ** (i + 1) - p ** (r + 1))))
    mid = MultiPoly.zero(model.ambient, p)
    for i in range(r + 1, n):
        mid = mid + _sgn(i, F[i] * y ** (io * (p ** i - p ** (r + 1))))
    full = MultiPoly.zero(model.ambient, p)
    for i in range(n):
        full = full + _sgn(i, F[i] * y ** (io * p ** i))
    return first - mid * full ** (p - 1)


def _adapted_basis(L, p: int):
    """Rows: a basis of L inside x_2n = 0, then a vector of L with x_2n = 1."""
    from .symplectic import canonical_basis
    B = L.basis
    col = B[:, -1] % p
    k = int(np.flatnonzero(col)[0])
    a = (B[k] * pow(int(col[k]), p - 2, p)) % p
    others = [(B[j] - col[j] * a) % p for j in range(B.shape[0]) if j != k]
    H = canonical_basis(np.array(others), p) if others else np.zeros((0, B.shape[1]), dtype=np.int64)
    return np.vstack([H, a[None]]), H.shape[0]


def verify_gamma_identities(model: ExtraspecialModel, rs: list[int] | None = None) -> CheckReport:
    """(a) V(L, c+u) - V(L, c) equals (-1)^n sum_s (-1)^s kappa_{n,s} u^(p^s) entrywise,
    with V taken as the product over the linear forms of L.
    (b) For r <= n-2, with Z_r as in ``z_relation_poly``: on Lagrangians inside
    x_2n = 0, (-1)^r Z_r restricts to Q_{n-1,r}^(iota p) of the first n-1
    coordinates; on the others, in a basis adapted to x_2n = 0, it restricts to the
    norm of Q_{n-1,r}^iota with the last coordinate as norm variable.
    """
    p, n, io = model.p, model.n, model.iota
    ctx = model.local_context(["c1", "u1"])
    c = MultiPoly.var(ctx, p, "c1")
    u = MultiPoly.var(ctx, p, "u1")
    lhs_entry = _v_product(p, n, c + u) - _v_product(p, n, c)
    rhs = model.constant(0, ctx)
    for s in range(n + 1):
        rhs = rhs + _sgn(s, model.char_class(s, ctx) * model.adjoined("u1", ctx) ** (p ** s))
    rhs = _sgn(n, rhs)
    lhs = ClassTuple(model, ctx, [lhs_entry] * len(model.lagrangians))
    additivity = lhs == rhs
    details = {"p": p, "n": n, "additivity": additivity, "norm_identity": []}
    ok = additivity
    rs = list(range(max(n - 1, 0))) if rs is None else rs
    local = model.local_context()
    for r in rs:
        Z = _sgn(r, z_relation_poly(model, r))
        q_prev = dickson_Q(p, n - 1, r, local) ** io
        inside = outside = mismatched = 0
        bad = None
        for L in model.lagrangians:
            if not np.any(L.basis[:, -1] % p):
                inside += 1
                got = L.restriction(local)(Z)
                want = q_prev ** p
            else:
                outside += 1
                basis, _ = _adapted_basis(L, p)
                got = L.restriction(local, basis=basis)(Z)
                want = norm_of_restriction(q_prev, variable=local.names[n - 1])
            if got != want:
                mismatched += 1
                if bad is None:
                    bad = {"lagrangian": L.to_json(), "expected": format_poly(want),
                           "got": format_poly(got)}
        details["norm_identity"].append({"r": r, "inside_hyperplane": inside, "outside": outside,
                                         "mismatched_lagrangians": mismatched,
                                         "passed": bad is None, "first_difference": bad})
        ok = ok and bad is None
    return CheckReport("gamma identities", ok, details)


# ---------------------------------------------------------------------------
# restriction to a maximal subgroup

def check_subgroup_restriction(model: ExtraspecialModel, R: MultiIndex) -> CheckReport:
    """Restriction of kappa^R to the subgroup K over x_2n = 0, for odd p.

    h*(K) is modelled by tuples over the rank n-1 Lagrangians in t1..t_{n-1}
    and w1, with psi = V(t, w).  Checks (a) expanding in a formal symbol for
    psi, the top power psi^((p-1) s_R) carries kappa^R_{n-1} (r_{n-1} dropped)
    and no power below psi^((p-1) r_0) occurs, and in w the top degree is
    p^(n-1) (p-1) s_R with the same coefficient; (b) if p does not divide s_R,
    the coefficient of w^(p^(n-1)((p-1)s_R - 1) + p^i) is
    s_R (-1)^(i+n) kappa^R_{n-1} kappa_{n-1,i} for i <= n-2; (c) on each
    Lagrangian B' + <e_{2n-1}> of rank n, setting w = t_n recovers kappa^R.
    """
    p, n = model.p, model.n
    if p == 2 or n < 2:
        raise ValueError("defined for odd p and n >= 2")
    if R.n != n:
        raise ValueError(f"exponent sequence must have length {n}")
    sub = model_for(p, n - 1)
    m = n - 1
    sR = R.s_R
    kR = MultiPoly.constant(VariableContext.local(m), p, 1)
    for j in range(m):
        kR = kR * dickson_Q(p, m, j) ** R.r[j]

    def restricted_product(ctx, psi):
        Qs = [dickson_Q(p, m, j, ctx) for j in range(m)] + [MultiPoly.constant(ctx, p, 1)]
        out = MultiPoly.constant(ctx, p, 1)
        for j in range(n):
            prev = Qs[j - 1].frobenius() if j >= 1 else MultiPoly.zero(ctx, p)
            out = out * (prev + Qs[j] * psi ** (p - 1)) ** R.r[j]
        return out

    # (a) formal symbol
    fctx = VariableContext.local(m, ["z1"])
    formal = restricted_product(fctx, MultiPoly.var(fctx, p, "z1"))
    by_power = formal.coefficients_in("z1")
    powers = sorted(by_power)
    top_formal = max(powers)
    shape_formal = (top_formal == (p - 1) * sR
                    and by_power[top_formal] == kR.embed(fctx)
                    and min(powers) >= (p - 1) * R.r[0]
                    and all(k % (p - 1) == 0 for k in powers))
    # (a) in w
    wctx = VariableContext.local(m, ["w1"])
    w = MultiPoly.var(wctx, p, "w1")
    psi = mui_expansion(p, m, w)
    expanded = restricted_product(wctx, psi)
    by_w = expanded.coefficients_in("w1")
    top_w = max(by_w)
    shape_w = top_w == p ** m * (p - 1) * sR and by_w[top_w] == kR.embed(wctx)
    # (b)
    coeff_checks = []
    if sR % p:
        for i in range(n - 1):
            e = p ** m * ((p - 1) * sR - 1) + p ** i
            want = (kR * dickson_Q(p, m, i)).embed(wctx).scale(sR * (-1) ** (i + n))
            coeff_checks.append({"i": i, "exponent": e, "passed": by_w.get(e, MultiPoly.zero(wctx, p)) == want})
    # (c)
    full = VariableContext.local(n)
    specialized = expanded.embed(full, {"w1": f"t{n}"})
    direct = model.char_class_product(R)
    index = {L.key: k for k, L in enumerate(model.lagrangians)}
    matched = 0
    consistent = True
    for Bp in sub.lagrangians:
        rows = np.zeros((n, 2 * n), dtype=np.int64)
        rows[:m, :2 * m] = Bp.basis
        rows[m, 2 * m] = 1
        k = index.get(tuple(int(x) for x in rows.ravel()))
        if k is None:
            consistent = False
            continue
        matched += 1
        consistent = consistent and specialized == direct.entries[k]
    details = {"p": p, "n": n, "R": list(R.r), "s_R": sR,
               "formal_top_power": top_formal, "formal_shape": shape_formal,
               "w_degree": top_w, "w_shape": shape_w,
               "coefficient_checks": coeff_checks,
               "consistency_lagrangians": matched, "consistency": consistent}
    ok = shape_formal and shape_w and all(c["passed"] for c in coeff_checks) and consistent
    return CheckReport("subgroup restriction", ok, details)

