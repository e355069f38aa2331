"""Steenrod operations on polynomial generators and the norm of a restricted class.

Every variable is treated as a generator of the lowest even-type degree
(degree 1 for p = 2, degree 2 for odd p), so the total operation sends each
variable y to y + y^p and is a ring homomorphism.  The Bockstein kills all
such generators and is omitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial

from .dickson import dickson_Q
from .poly import MultiPoly, VariableContext


@lru_cache(maxsize=None)
def _binom_mod(n: int, k: int, p: int) -> int:
    return comb(n, k) % p


def _compositions(exps, i, p):
    """Tuples k with sum k = i, 0 <= k_j <= e_j and every C(e_j, k_j) nonzero mod p."""
    out = []
    v = len(exps)
    tails = [0] * (v + 1)
    for j in range(v - 1, -1, -1):
        tails[j] = tails[j + 1] + exps[j]

    def rec(j, left, acc, coeff):
        if j == v:
            if left == 0:
                out.append((tuple(acc), coeff))
            return
        for k in range(max(0, left - tails[j + 1]), min(exps[j], left) + 1):
            b = _binom_mod(exps[j], k, p)
            if b:
                acc.append(k)
                rec(j + 1, left - k, acc, coeff * b % p)
                acc.pop()

    rec(0, i, [], 1)
    return out


def steenrod_operation(i: int, f: MultiPoly) -> MultiPoly:
    """Sq^i (p = 2) or P^i (odd p) applied to f."""
    if i < 0:
        raise ValueError("operation index must be non-negative")
    p = f.p
    if i == 0:
        return f
    t: dict = {}
    for m, c in f.terms.items():
        for k, b in _compositions(m, i, p):
            mm = tuple(e + kj * (p - 1) for e, kj in zip(m, k))
            t[mm] = (t.get(mm, 0) + b * c) % p
    return MultiPoly(f.ctx, p, {m: c for m, c in t.items() if c})


def total_operation(f: MultiPoly) -> MultiPoly:
    """Sum of all operations: y -> y + y^p on every variable."""
    d = f.degree()
    out = MultiPoly.zero(f.ctx, f.p)
    for i in range(max(d, 0) + 1):
        out = out + steenrod_operation(i, f)
    return out


@dataclass(frozen=True)
class NormContext:
    """Degree bookkeeping for the norm from an index-p subgroup.

    ``ydeg`` is the polynomial degree of the input; ``q`` its cohomological
    degree.  ``literal_scalar`` is (-1)^(h q) h!, the constant in front of the
    textbook odd-prime sum; ``scalar`` is the constant actually used, chosen so
    a generator y maps to y^p - v^(p-1) y.
    """

    p: int
    ydeg: int
    q: int = field(init=False)
    h: int = field(init=False)
    literal_scalar: int = field(init=False)
    scalar: int = field(init=False)

    def __post_init__(self):
        p, d = self.p, self.ydeg
        q = d if p == 2 else 2 * d
        h = (p - 1) // 2
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "h", h)
        lit = 1 if p == 2 else ((-1) ** (h * q) * factorial(h)) % p
        object.__setattr__(self, "literal_scalar", lit)
        object.__setattr__(self, "scalar", 1 if p == 2 else (-1) ** d % p)

    @property
    def variable(self) -> str:
        return "u1" if self.p == 2 else "v1"


def norm_of_restriction(f: MultiPoly, *, normalization: str = "generator",
                        variable: str | None = None) -> MultiPoly:
    """Norm of the class f from an index-p subgroup, in f's variables plus u1 (p=2) or v1.

    p = 2:   sum_i Sq^i(f) u^(d-i).
    odd p:   c * sum_i (-1)^i P^i(f) v^((d-i)(p-1)), with c = (-1)^d under the
             default normalization and c = (-1)^(hq) h! under ``"literal"``.
    If ``variable`` names an existing variable of f's context it is used as
    the norm variable (and is itself acted on by the operations).
    """
    if not f.is_homogeneous():
        raise ValueError("norm needs a homogeneous input")
    p = f.p
    d = max(f.homogeneous_degree or 0, 0)
    nc = NormContext(p, d)
    name = variable or nc.variable
    if name in f.ctx.names:
        ctx = f.ctx
    else:
        ctx = f.ctx.extend([name])
        f = f.embed(ctx)
    u = MultiPoly.var(ctx, p, name)
    if normalization == "generator":
        c = nc.scalar
    elif normalization == "literal":
        c = nc.literal_scalar
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    out = MultiPoly.zero(ctx, p)
    if f.is_zero():
        return out
    step = 1 if p == 2 else p - 1
    for i in range(d + 1):
        term = steenrod_operation(i, f) * (u ** ((d - i) * step))
        out = out + (term if i % 2 == 0 or p == 2 else -term)
    return out.scale(c)


@dataclass
class NormDicksonReport:
    p: int
    n: int
    r: int
    holds: bool
    lhs: MultiPoly
    rhs: MultiPoly

    @property
    def discrepancy(self) -> MultiPoly:
        return self.lhs - self.rhs

    def to_json(self):
        from .poly import format_poly
        return {"p": self.p, "n": self.n, "r": self.r, "holds": self.holds,
                "discrepancy": format_poly(self.discrepancy)}


def norm_dickson_check(p: int, n: int, r: int, *, lift_shift: MultiPoly | None = None) -> NormDicksonReport:
    """Norm of Q_{n,r} from the hyperplane x = 0 of an (n+1)-dimensional space.

    Coordinates t1..tn live on the hyperplane and x = t_{n+1}.  The left side
    is (-1)^r N(Q_{n,r}), with the norm variable set to x; ``lift_shift`` (a
    polynomial g) replaces the lift by Q_{n,r} + x*g.  The right side is the
    closed Dickson expression in Q_{n,i} and x.
    """
    if not 0 <= r <= n - 1 and not (n == 1 and r == 0):
        raise ValueError("need 0 <= r <= n-1")
    ctx = VariableContext.local(n + 1)
    x = MultiPoly.var(ctx, p, n)
    Q = [dickson_Q(p, n, i, ctx) for i in range(n + 1)]
    lift = Q[r]
    if lift_shift is not None:
        lift = lift + x * lift_shift
    lhs = norm_of_restriction(lift, variable=ctx.names[n])
    if r % 2:
        lhs = -lhs

    def sgn(i, g):
        return g if i % 2 == 0 else -g

    first = MultiPoly.zero(ctx, p)
    for i in range(r, n + 1):
        first = first + sgn(i, Q[i].frobenius() * x ** (p ** (i + 1) - p ** (r + 1)))
    mid = MultiPoly.zero(ctx, p)
    for i in range(r + 1, n + 1):
        mid = mid + sgn(i, Q[i] * x ** (p ** i - p ** (r + 1)))
    full = MultiPoly.zero(ctx, p)
    for i in range(n + 1):
        full = full + sgn(i, Q[i] * x ** (p ** i))
    rhs = first - mid * full ** (p - 1)
    return NormDicksonReport(p, n, r, lhs == rhs, lhs, rhs)
