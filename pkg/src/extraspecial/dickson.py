"""Dickson and Mui invariants over F_p."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .config import DegreeCapError
from .poly import MultiPoly, VariableContext


def _lin_form(ctx, p, coeffs):
    t = {}
    for i, c in enumerate(coeffs):
        if c % p:
            e = [0] * ctx.count
            e[i] = 1
            t[tuple(e)] = c % p
    return MultiPoly(ctx, p, t)


class DicksonTable:
    """Memoized Q_{m,s} and V_{m+1} for one prime.

    Q is defined by the recursion Q_{m,s} = Q_{m-1,s} V_m^{p-1} + Q_{m-1,s-1}^p
    with Q_{m,m} = 1 and Q_{m-1,-1} = 0.  Polynomials live in t1..t_m (Q) and
    t1..t_{m+1} (V).
    """

    def __init__(self, p: int, degree_cap: int | None = None):
        self.p = p
        self.degree_cap = degree_cap
        self.Q: dict[tuple[int, int], MultiPoly] = {}
        self.V: dict[int, MultiPoly] = {}

    def _cap(self, d):
        if self.degree_cap is not None and d > self.degree_cap:
            raise DegreeCapError(f"degree {d} exceeds cap {self.degree_cap}")

    def q(self, m: int, s: int) -> MultiPoly:
        if not 0 <= s <= m:
            raise ValueError(f"need 0 <= s <= m, got m={m}, s={s}")
        p = self.p
        self._cap(p ** m - p ** s)
        key = (m, s)
        if key not in self.Q:
            ctx = VariableContext.local(m)
            if s == m:
                val = MultiPoly.constant(ctx, p, 1)
            else:
                val = self.q(m - 1, s).embed(ctx) * (self.v(m).embed(ctx) ** (p - 1))
                if s > 0:
                    val = val + self.q(m - 1, s - 1).embed(ctx).frobenius()
            assert val.homogeneous_degree == p ** m - p ** s
            self.Q[key] = val
        return self.Q[key]

    def v(self, m_plus_1: int) -> MultiPoly:
        """V_{m+1}(t1..t_{m+1}); the product for m <= 2, the expansion beyond."""
        m = m_plus_1 - 1
        if m < 0:
            raise ValueError("V needs at least one variable")
        self._cap(self.p ** m)
        if m_plus_1 not in self.V:
            val = self.v_product(m_plus_1) if m <= 2 else self.v_expansion(m_plus_1)
            assert val.homogeneous_degree == self.p ** m
            self.V[m_plus_1] = val
        return self.V[m_plus_1]

    def v_product(self, m_plus_1: int) -> MultiPoly:
        p, m = self.p, m_plus_1 - 1
        ctx = VariableContext.local(m_plus_1)
        out = MultiPoly.constant(ctx, p, 1)
        for lam in itertools.product(range(p), repeat=m):
            out = out * _lin_form(ctx, p, lam + (1,))
        return out

    def v_expansion(self, m_plus_1: int) -> MultiPoly:
        m = m_plus_1 - 1
        ctx = VariableContext.local(m_plus_1)
        return self.expansion(m, MultiPoly.var(ctx, self.p, m), ctx)

    def expansion(self, m: int, x: MultiPoly, ctx: VariableContext | None = None) -> MultiPoly:
        """(-1)^m sum_s (-1)^s Q_{m,s} x^(p^s), with Q in the first m variables of ctx."""
        p = self.p
        ctx = ctx or x.ctx
        out = MultiPoly.zero(ctx, p)
        for s in range(m + 1):
            term = self.q(m, s).embed(ctx, _first_vars(m, ctx)) * x.frobenius(s)
            out = out + (term if (m + s) % 2 == 0 else -term)
        return out

    def euler_product(self, m: int) -> MultiPoly:
        """Product of all nonzero linear forms in t1..t_m."""
        p = self.p
        self._cap(p ** m - 1)
        ctx = VariableContext.local(m)
        out = MultiPoly.constant(ctx, p, 1)
        for lam in itertools.product(range(p), repeat=m):
            if any(lam):
                out = out * _lin_form(ctx, p, lam)
        return out


def _first_vars(m: int, ctx: VariableContext) -> dict:
    return {f"t{i}": ctx.names[i - 1] for i in range(1, m + 1)}


@lru_cache(maxsize=None)
def table(p: int) -> DicksonTable:
    return DicksonTable(p)


def dickson_Q(p: int, m: int, s: int, ctx: VariableContext | None = None) -> MultiPoly:
    f = table(p).q(m, s)
    return f if ctx is None else f.embed(ctx, _first_vars(m, ctx))


def mui_V(p: int, m_plus_1: int, ctx: VariableContext | None = None) -> MultiPoly:
    f = table(p).v(m_plus_1)
    return f if ctx is None else f.embed(ctx, _first_vars(m_plus_1, ctx))


def mui_expansion(p: int, m: int, x: MultiPoly) -> MultiPoly:
    """V(t1..t_m, x) for an arbitrary polynomial x in a context whose first m variables are the t's."""
    return table(p).expansion(m, x)


def euler_product(p: int, m: int) -> MultiPoly:
    return table(p).euler_product(m)


@dataclass
class ExpansionReport:
    p: int
    m: int
    holds: bool
    sign: int | None
    euler_sign: int | None

    def to_json(self):
        return {"p": self.p, "m": self.m, "holds": self.holds, "sign": self.sign,
                "euler_sign": self.euler_sign}


def _scalar_between(f: MultiPoly, g: MultiPoly) -> int | None:
    """The c in F_p^* with f = c*g, if any."""
    if f.is_zero() or g.is_zero():
        return 1 if f.is_zero() and g.is_zero() else None
    m, c = next(iter(g.terms.items()))
    a = f.coefficient(m)
    if not a:
        return None
    k = a * pow(c, f.p - 2, f.p) % f.p
    return k if f == g.scale(k) else None


def check_v_expansion(p: int, m: int) -> ExpansionReport:
    """Compare the product V_{m+1} with its alternating Dickson expansion.

    Also records the scalar e with euler_product(m) = e * Q_{m,0}.
    """
    t = table(p)
    direct = t.v_product(m + 1)
    expanded = t.v_expansion(m + 1)
    sign = _scalar_between(direct, expanded)
    euler = _scalar_between(t.euler_product(m), t.q(m, 0))
    return ExpansionReport(p, m, direct == expanded, sign, euler)


def v_additivity(p: int, m: int) -> bool:
    """V(t, X+Y) == V(t, X) + V(t, Y) with X, Y adjoined."""
    ctx = VariableContext.local(m, ("x1", "x2"))
    X = MultiPoly.var(ctx, p, "x1")
    Y = MultiPoly.var(ctx, p, "x2")
    return mui_expansion(p, m, X + Y) == mui_expansion(p, m, X) + mui_expansion(p, m, Y)
