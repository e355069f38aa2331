"""Classes modulo nilpotents as tuples of restrictions to maximal subspaces.

A class is stored as one polynomial per Lagrangian L, written in local
coordinates t1..tn of L (the echelon basis of L) and optionally in adjoined
variables: c1 (central class), u1 (an extra degree-one class), w1, or z1 (a
formal symbol).  Arithmetic is entrywise.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import GlobalConfig
from .dickson import dickson_Q, mui_expansion
from .linalg import graded_solve
from .poly import (LinearSubstitution, MultiPoly, VariableContext, _basis,
                   format_poly, monomial_basis)
from .symplectic import Lagrangian, SymplecticSpace, enumerate_lagrangians


def parallel_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Map preserving input order; a thread pool only when threads > 1."""
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ----------------------------------------------------------------------------
# exponent sequences

@dataclass(frozen=True)
class MultiIndex:
    """An exponent sequence (r_0, ..., r_{n-1}) for products of characteristic classes."""

    r: tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(int(x) for x in self.r))
        if any(x < 0 for x in self.r) or not self.r:
            raise ValueError(f"bad exponent sequence {self.r}")

    @classmethod
    def parse(cls, text: str, p: int, n: int | None = None) -> "MultiIndex":
        parts = [s for s in re.split(r"[,\s]+", text.strip().strip("()")) if s]
        if not parts:
            raise ValueError("empty exponent sequence")
        r = tuple(int(s) for s in parts)
        if n is not None and len(r) != n:
            raise ValueError(f"expected {n} exponents, got {len(r)}")
        return cls(r, p)

    @property
    def n(self) -> int:
        return len(self.r)

    @property
    def s_R(self) -> int:
        return sum(self.r)

    @property
    def ydeg(self) -> int:
        p, n = self.p, self.n
        return sum(ri * (p ** n - p ** i) for i, ri in enumerate(self.r))

    @property
    def r0_at_least_two(self) -> bool:
        return self.r[0] >= 2

    @property
    def p_divisible_tail(self) -> bool:
        return self.r[0] == 0 and all(x % self.p == 0 for x in self.r[1:])

    @property
    def lies_in_T(self) -> bool:
        """The combinatorial membership criterion (always true for p = 2)."""
        return self.p == 2 or self.r0_at_least_two or self.p_divisible_tail

    @property
    def is_free_generator(self) -> bool:
        """Tail entries in [0, p) and r_0 = 3, or r_0 = 2 with a nonzero tail."""
        tail = self.r[1:]
        if any(x >= self.p for x in tail):
            return False
        return self.r[0] == 3 or (self.r[0] == 2 and any(tail))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.r, other.r)), self.p)

    def __str__(self):
        return "(" + ",".join(map(str, self.r)) + ")"

    def to_json(self):
        return {"r": list(self.r), "s_R": self.s_R, "ydeg": self.ydeg,
                "r0_at_least_two": self.r0_at_least_two,
                "p_divisible_tail": self.p_divisible_tail,
                "lies_in_T": self.lies_in_T}


def decide_membership_combinatorial(R: MultiIndex) -> bool:
    return R.lies_in_T


def enumerate_R(p: int, n: int, d_max: int, which: str = "all") -> list[MultiIndex]:
    """Exponent sequences with ydeg <= d_max, sorted by (ydeg, r)."""
    degs = [p ** n - p ** i for i in range(n)]
    out = []

    def rec(i, left, acc):
        if i == n:
            out.append(MultiIndex(tuple(acc), p))
            return
        for k in range(left // degs[i] + 1):
            rec(i + 1, left - k * degs[i], acc + [k])

    rec(0, d_max, [])
    if which == "prime":
        out = [R for R in out if R.lies_in_T]
    elif which == "free":
        out = [R for R in out if R.is_free_generator]
    elif which != "all":
        raise ValueError(f"unknown filter {which!r}")
    return sorted(out, key=lambda R: (R.ydeg, R.r))


# ----------------------------------------------------------------------------
# restriction tuples

class ClassTuple:
    """One polynomial per Lagrangian, all in a common local context."""

    __slots__ = ("model", "ctx", "entries")

    def __init__(self, model: "ExtraspecialModel", ctx: VariableContext, entries):
        self.model = model
        self.ctx = ctx
        self.entries = tuple(entries)
        if len(self.entries) != len(model.lagrangians):
            raise ValueError("one entry per Lagrangian required")

    @property
    def p(self):
        return self.model.p

    def _other(self, other):
        if isinstance(other, ClassTuple):
            if other.model is not self.model or other.ctx != self.ctx:
                raise ValueError("tuples live in different contexts")
            return other.entries
        if isinstance(other, int):
            c = MultiPoly.constant(self.ctx, self.p, other)
            return (c,) * len(self.entries)
        raise TypeError(f"cannot combine a class tuple with {type(other).__name__}")

    def _make(self, entries):
        return ClassTuple(self.model, self.ctx, entries)

    def __add__(self, other):
        return self._make(a + b for a, b in zip(self.entries, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._make(a - b for a, b in zip(self.entries, self._other(other)))

    def __neg__(self):
        return self._make(-a for a in self.entries)

    def __mul__(self, other):
        return self._make(a * b for a, b in zip(self.entries, self._other(other)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return self._make(a ** e for a in self.entries)

    def map(self, fn) -> "ClassTuple":
        return self._make(fn(a) for a in self.entries)

    def __eq__(self, other):
        return (isinstance(other, ClassTuple) and other.model is self.model
                and other.ctx == self.ctx and other.entries == self.entries)

    def __hash__(self):
        return hash(self.entries)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    @property
    def ydeg(self):
        degs = {e.homogeneous_degree for e in self.entries if not e.is_zero()}
        if not degs:
            return None
        if len(degs) > 1 or None in degs:
            raise ValueError("tuple is not homogeneous")
        return degs.pop()

    def first_difference(self, other: "ClassTuple"):
        """(index, mine, theirs) at the first Lagrangian where the entries differ, else None."""
        for k, (a, b) in enumerate(zip(self.entries, self._other(other))):
            if a != b:
                return k, a, b
        return None

    def to_json(self):
        return [{"lagrangian": L.to_json(), "entry": format_poly(e)}
                for L, e in zip(self.model.lagrangians, self.entries)]


@dataclass
class Witness:
    """f with restriction(f) equal to the requested tuple, in normal form."""

    poly: MultiPoly
    degree: int
    found = True

    def to_json(self):
        return {"result": "IN_T", "witness": format_poly(self.poly)}


@dataclass
class NotInT:
    """No preimage: ``certificate`` pairs rows of the restriction system with
    coefficients v such that v kills every restricted monomial but not the target."""

    certificate: list
    degree: int
    found = False

    def to_json(self):
        return {"result": "NOT_IN_T", "certificate": self.certificate}


class ExtraspecialModel:
    """Restriction tuples for the rank-n form space over F_p."""

    def __init__(self, config: GlobalConfig | None = None, *, p: int | None = None, n: int | None = None):
        if config is None:
            config = GlobalConfig(p=p or 2, n=n or 1)
        self.config = config
        self.p = config.p
        self.n = config.n
        self.iota = config.inflation_power
        self.space = SymplecticSpace(self.n, self.p)
        self.lagrangians: list[Lagrangian] = enumerate_lagrangians(self.space)
        self.ambient = VariableContext.ambient(2 * self.n)
        self._restrictions: dict = {}
        self._stacked: dict = {}

    # contexts
    def local_context(self, adjoined: Sequence[str] = ()) -> VariableContext:
        return VariableContext.local(self.n, adjoined)

    def restriction(self, L: Lagrangian, ctx: VariableContext) -> LinearSubstitution:
        key = (L.key, ctx)
        if key not in self._restrictions:
            self._restrictions[key] = L.restriction(ctx)
        return self._restrictions[key]

    def _tuple(self, ctx, entries):
        return ClassTuple(self, ctx, entries)

    # builders
    def ambient_var(self, i: int) -> MultiPoly:
        """y_i, 1-based."""
        return MultiPoly.var(self.ambient, self.p, i - 1)

    def z_poly(self, r: int) -> MultiPoly:
        p, n = self.p, self.n
        self.config.check_degree(self.iota * p ** r + 1)
        y = [None] + [self.ambient_var(i) for i in range(1, 2 * n + 1)]
        out = MultiPoly.zero(self.ambient, p)
        if p == 2 and r == 0:
            for i in range(1, n + 1):
                out = out + y[2 * i] * y[2 * i - 1]
            return out
        q = self.iota * p ** r
        for i in range(1, n + 1):
            out = out + y[2 * i - 1] ** q * y[2 * i] - y[2 * i - 1] * y[2 * i] ** q
        return out

    def inflate(self, f: MultiPoly, ctx: VariableContext | None = None) -> ClassTuple:
        ctx = ctx or self.local_context()
        if f.ctx != self.ambient:
            raise ValueError("inflate expects a polynomial in the ambient y variables")
        entries = parallel_map(lambda L: self.restriction(L, ctx)(f), self.lagrangians,
                               self.config.threads)
        return self._tuple(ctx, entries)

    def constant(self, c: int, ctx: VariableContext | None = None) -> ClassTuple:
        ctx = ctx or self.local_context()
        return self._tuple(ctx, [MultiPoly.constant(ctx, self.p, c)] * len(self.lagrangians))

    def adjoined(self, name: str, ctx: VariableContext) -> ClassTuple:
        v = MultiPoly.var(ctx, self.p, name)
        return self._tuple(ctx, [v] * len(self.lagrangians))

    def char_class(self, i: int, ctx: VariableContext | None = None) -> ClassTuple:
        """Restricts to Q_{n,i} of every Lagrangian (1 for i = n, 0 for i < 0)."""
        ctx = ctx or self.local_context()
        if i < 0:
            return self.constant(0, ctx)
        self.config.check_degree(self.p ** self.n - self.p ** i)
        q = dickson_Q(self.p, self.n, i, ctx)
        return self._tuple(ctx, [q] * len(self.lagrangians))

    def char_class_product(self, R: MultiIndex | Sequence[int], ctx: VariableContext | None = None) -> ClassTuple:
        if not isinstance(R, MultiIndex):
            R = MultiIndex(tuple(R), self.p)
        if R.n != self.n:
            raise ValueError(f"exponent sequence has length {R.n}, expected {self.n}")
        self.config.check_degree(R.ydeg)
        ctx = ctx or self.local_context()
        out = MultiPoly.constant(ctx, self.p, 1)
        for i, ri in enumerate(R.r):
            if ri:
                out = out * dickson_Q(self.p, self.n, i, ctx) ** ri
        return self._tuple(ctx, [out] * len(self.lagrangians))

    def central_class(self, ctx: VariableContext | None = None, var: str = "c1") -> ClassTuple:
        """Restricts to V(L, c) = product of (l + c) over the linear forms l on L."""
        ctx = ctx or self.local_context([var])
        c = MultiPoly.var(ctx, self.p, var)
        self.config.check_degree(self.p ** self.n)
        val = mui_expansion(self.p, self.n, c)
        return self._tuple(ctx, [val] * len(self.lagrangians))

    # membership
    def restriction_matrix(self, d: int) -> np.ndarray:
        """Stacked degree-d restriction maps; rows (Lagrangian, local monomial desc),
        columns ambient monomials in descending order."""
        self.config.check_degree(d)
        if d not in self._stacked:
            ctx = self.local_context()
            blocks = parallel_map(lambda L: self.restriction(L, ctx).degree_matrix(d),
                                  self.lagrangians, self.config.threads)
            self._stacked[d] = np.concatenate(blocks, axis=0)
        return self._stacked[d]

    def restriction_rank(self, d: int) -> int:
        from .linalg import rank
        return rank(self.restriction_matrix(d), self.p)

    def membership(self, tau: ClassTuple) -> Witness | NotInT:
        """Find f in F_p[y] restricting to tau, normalized modulo the kernel.

        Columns are ordered ascending, so the solution with free variables set
        to zero is supported on the standard monomials of the kernel: the
        normal form of any preimage.
        """
        if tau.ctx != self.local_context():
            raise ValueError("membership expects tuples without adjoined variables")
        d = tau.ydeg
        if d is None:
            return Witness(MultiPoly.zero(self.ambient, self.p), 0)
        A = self.restriction_matrix(d)[:, ::-1]
        b = np.concatenate([e.to_vector(d) for e in tau.entries])
        sol = graded_solve(A, b, self.p, kernel=False)
        if sol.consistent:
            x = sol.x[::-1]
            return Witness(MultiPoly.from_vector(self.ambient, self.p, d, x), d)
        local = monomial_basis(self.n, d)
        cert = []
        for k in np.flatnonzero(sol.certificate):
            li, mi = divmod(int(k), len(local))
            cert.append({"lagrangian": li, "monomial": list(local[mi]),
                         "coefficient": int(sol.certificate[k])})
        return NotInT(cert, d)

    def check_certificate(self, tau: ClassTuple, result: NotInT) -> bool:
        """v A = 0 and v b != 0 for the stored certificate."""
        d = result.degree
        A = self.restriction_matrix(d).astype(np.int64)
        b = np.concatenate([e.to_vector(d) for e in tau.entries])
        v = np.zeros(A.shape[0], dtype=np.int64)
        nloc = len(_basis(self.n, d))
        for item in result.certificate:
            idx = _basis(self.n, d).index(tuple(item["monomial"]))
            v[item["lagrangian"] * nloc + idx] = item["coefficient"]
        return not np.any((v @ A) % self.p) and int(v @ b) % self.p != 0
