"""Sparse multivariate polynomials over F_p.

A polynomial is an immutable map from exponent tuples to coefficients in
[1, p).  Monomials are compared in graded reverse-lexicographic order with
x1 > x2 > ... > xv; every listing of terms or monomials in this package is in
descending order.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DegreeCapError


class ContextMismatch(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, msg: str, position: int):
        super().__init__(f"{msg} at position {position}")
        self.position = position


@dataclass(frozen=True)
class VariableContext:
    """An ordered list of variable names.

    Core variables (y_i or t_j) come first; adjoined ones (c, u, v, w, x
    families) always sort after them.
    """

    names: tuple[str, ...]
    kind: str = "ambient"

    def __post_init__(self):
        for name in self.names:
            if not re.fullmatch(r"[a-z][0-9]+", name):
                raise ValueError(f"bad variable name {name!r}")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")

    @classmethod
    def ambient(cls, count: int) -> "VariableContext":
        return cls(tuple(f"y{i}" for i in range(1, count + 1)), "ambient")

    @classmethod
    def local(cls, count: int, adjoined: Sequence[str] = ()) -> "VariableContext":
        names = tuple(f"t{i}" for i in range(1, count + 1))
        names += tuple(a if a[-1].isdigit() else a + "1" for a in adjoined)
        return cls(names, "local" if not adjoined else "mixed")

    @property
    def count(self) -> int:
        return len(self.names)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.names

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ContextMismatch(f"unknown variable {name!r}") from None

    def extend(self, extra: Sequence[str]) -> "VariableContext":
        extra = tuple(a if a[-1].isdigit() else a + "1" for a in extra if
                      (a if a[-1].isdigit() else a + "1") not in self.names)
        return VariableContext(self.names + extra, "mixed" if extra else self.kind)


def grevlex_key(exps: Sequence[int]):
    return (sum(exps), tuple(-e for e in reversed(exps)))


@lru_cache(maxsize=None)
def _basis(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    if nvars == 0:
        return ((),) if d == 0 else ()
    out = []

    def rec(prefix, left, k):
        if k == nvars - 1:
            out.append(prefix + (left,))
            return
        for e in range(left, -1, -1):
            rec(prefix + (e,), left - e, k + 1)

    rec((), d, 0)
    out.sort(key=grevlex_key, reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def _index(nvars: int, d: int) -> dict:
    return {m: i for i, m in enumerate(_basis(nvars, d))}


def monomial_basis(ctx: VariableContext | int, d: int, cap: int | None = None):
    """All monomials of total degree d, descending in graded reverse-lex order."""
    if cap is not None and d > cap:
        raise DegreeCapError(f"degree {d} exceeds cap {cap}")
    nvars = ctx if isinstance(ctx, int) else ctx.count
    if d < 0:
        return []
    return list(_basis(nvars, d))


def _frob_exps(e: tuple, q: int) -> tuple:
    return tuple(x * q for x in e)


class MultiPoly:
    """Immutable sparse polynomial over F_p in a fixed variable context."""

    __slots__ = ("ctx", "p", "_t", "_hdeg")

    def __init__(self, ctx: VariableContext, p: int, terms: Mapping | Iterable = (), *, _clean=False):
        self.ctx = ctx
        self.p = p
        if _clean:
            self._t = terms
        else:
            t: dict = {}
            items = terms.items() if isinstance(terms, Mapping) else terms
            v = ctx.count
            for m, c in items:
                m = tuple(int(e) for e in m)
                if len(m) != v or min(m, default=0) < 0:
                    raise ValueError(f"bad exponent vector {m} for {v} variables")
                t[m] = (t.get(m, 0) + int(c)) % p
            self._t = {m: c for m, c in t.items() if c}
        self._hdeg = Ellipsis

    # construction helpers
    @classmethod
    def zero(cls, ctx, p):
        return cls(ctx, p, {}, _clean=True)

    @classmethod
    def constant(cls, ctx, p, c=1):
        c %= p
        return cls(ctx, p, {(0,) * ctx.count: c} if c else {}, _clean=True)

    @classmethod
    def var(cls, ctx, p, name_or_index, power=1):
        i = ctx.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        e = [0] * ctx.count
        e[i] = power
        return cls(ctx, p, {tuple(e): 1}, _clean=True)

    @classmethod
    def from_vector(cls, ctx, p, d, vec):
        basis = _basis(ctx.count, d)
        vec = np.asarray(vec)
        nz = np.flatnonzero(vec % p)
        return cls(ctx, p, {basis[i]: int(vec[i]) % p for i in nz}, _clean=True)

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._t)

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def _check(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly.constant(self.ctx, self.p, int(other))
        if other.ctx != self.ctx or other.p != self.p:
            raise ContextMismatch(f"context mismatch: {self.ctx.names}/{self.p} vs {other.ctx.names}/{other.p}")
        return other

    def __eq__(self, other):
        if isinstance(other, int):
            other = MultiPoly.constant(self.ctx, self.p, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.p == other.p and self._t == other._t

    def __hash__(self):
        return hash((self.ctx, self.p, frozenset(self._t.items())))

    def __add__(self, other):
        other = self._check(other)
        p = self.p
        t = dict(self._t)
        for m, c in other._t.items():
            s = (t.get(m, 0) + c) % p
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return MultiPoly(self.ctx, p, t, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return MultiPoly(self.ctx, p, {m: p - c for m, c in self._t.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int):
        c %= self.p
        if not c:
            return MultiPoly.zero(self.ctx, self.p)
        p = self.p
        return MultiPoly(self.ctx, p, {m: (a * c) % p for m, a in self._t.items()}, _clean=True)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._check(other)
        p = self.p
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        t: dict = {}
        get = t.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple([x + y for x, y in zip(ma, mb)])
                t[m] = get(m, 0) + ca * cb
        return MultiPoly(self.ctx, p, {m: c % p for m, c in t.items() if c % p}, _clean=True)

    __rmul__ = __mul__

    def frobenius(self, k: int = 1):
        """f -> f^(p^k): monomials raised to the p^k-th power, coefficients fixed."""
        q = self.p ** k
        return MultiPoly(self.ctx, self.p, {_frob_exps(m, q): c for m, c in self._t.items()}, _clean=True)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        p = self.p
        result = MultiPoly.constant(self.ctx, p, 1)
        k = 0
        while e:
            e, digit = divmod(e, p)
            if digit:
                base = self.frobenius(k) if k else self
                acc = MultiPoly.constant(self.ctx, p, 1)
                while digit:
                    if digit & 1:
                        acc = acc * base
                    digit >>= 1
                    if digit:
                        base = base * base
                result = result * acc
            k += 1
        return result

    # degree information
    def degree(self) -> int:
        return max((sum(m) for m in self._t), default=-1)

    @property
    def homogeneous_degree(self):
        """Common total degree of all terms, or None; the zero polynomial gives None."""
        if self._hdeg is Ellipsis:
            degs = {sum(m) for m in self._t}
            self._hdeg = degs.pop() if len(degs) == 1 else None
        return self._hdeg

    def is_homogeneous(self) -> bool:
        return not self._t or self.homogeneous_degree is not None

    def homogeneous_part(self, d: int):
        return MultiPoly(self.ctx, self.p, {m: c for m, c in self._t.items() if sum(m) == d}, _clean=True)

    def degree_in(self, var) -> int:
        i = self.ctx.index(var) if isinstance(var, str) else var
        return max((m[i] for m in self._t), default=-1)

    def coefficient(self, mono: Sequence[int]) -> int:
        return self._t.get(tuple(mono), 0)

    def coefficients_in(self, var) -> dict:
        """Split f = sum_k g_k * var^k; returns {k: g_k} with g_k free of var."""
        i = self.ctx.index(var) if isinstance(var, str) else var
        out: dict = {}
        for m, c in self._t.items():
            k = m[i]
            mm = m[:i] + (0,) + m[i + 1:]
            out.setdefault(k, {})[mm] = c
        return {k: MultiPoly(self.ctx, self.p, t, _clean=True) for k, t in out.items()}

    def sorted_terms(self):
        return sorted(self._t.items(), key=lambda mc: grevlex_key(mc[0]), reverse=True)

    def to_vector(self, d: int | None = None) -> np.ndarray:
        """Coefficients on the degree-d monomial basis (f must be homogeneous of degree d)."""
        if d is None:
            d = self.homogeneous_degree
            if d is None:
                if self._t:
                    raise ValueError("polynomial is not homogeneous")
                d = 0
        idx = _index(self.ctx.count, d)
        v = np.zeros(len(idx), dtype=np.int64)
        for m, c in self._t.items():
            try:
                v[idx[m]] = c
            except KeyError:
                raise ValueError(f"term of degree {sum(m)} in a degree-{d} vector") from None
        return v

    # context changes
    def embed(self, ctx: VariableContext, mapping: dict | None = None):
        """Rename/promote variables into a larger context (by name unless mapped)."""
        mapping = mapping or {}
        pos = [ctx.index(mapping.get(name, name)) for name in self.ctx.names]
        t = {}
        for m, c in self._t.items():
            e = [0] * ctx.count
            for i, x in zip(pos, m):
                e[i] += x
            t[tuple(e)] = c
        return MultiPoly(ctx, self.p, t, _clean=True)

    def substitute(self, s: "LinearSubstitution"):
        return substitute_linear(self, s)

    def evaluate_vars(self, values: dict, target: VariableContext | None = None):
        """Substitute polynomials for variables.

        ``values`` maps variable names to MultiPoly objects in ``target``
        (default: this context); unmapped variables are carried over by name.
        """
        target = target or self.ctx
        p = self.p
        imgs = []
        for name in self.ctx.names:
            if name in values:
                g = values[name]
                if not isinstance(g, MultiPoly):
                    g = MultiPoly.constant(target, p, int(g))
                imgs.append(g)
            else:
                imgs.append(MultiPoly.var(target, p, name))
        cache: list[dict] = [{} for _ in imgs]
        out = MultiPoly.zero(target, p)
        for m, c in self._t.items():
            term = MultiPoly.constant(target, p, c)
            for i, e in enumerate(m):
                if e:
                    if e not in cache[i]:
                        cache[i][e] = imgs[i] ** e
                    term = term * cache[i][e]
            out = out + term
        return out

    def __repr__(self):
        return f"MultiPoly({format_poly(self)!r}, p={self.p})"

    def __str__(self):
        return format_poly(self)


# ----------------------------------------------------------------------------
# text and JSON formats

def _format_mono(names, m):
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(f: MultiPoly) -> str:
    if f.is_zero():
        return "0"
    out = []
    for m, c in f.sorted_terms():
        mono = _format_mono(f.ctx.names, m)
        if not mono:
            out.append(str(c))
        elif c == 1:
            out.append(mono)
        else:
            out.append(f"{c}*{mono}")
    return " + ".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([a-z][0-9]+)|(\^)|(\*)|(\+)|(-))")


def _tokenize(text):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = mt.lastindex
        start = mt.start(kind)
        toks.append((kind, mt.group(kind), start))
        pos = mt.end()
    toks.append((0, "", len(text)))
    return toks


def parse_poly(text: str, ctx: VariableContext, p: int) -> MultiPoly:
    """Parse the grammar  poly := [sign] term (('+'|'-') term)*,
    term := coeff | [coeff '*'] factor ('*' factor)*, factor := var ['^' exp].
    """
    toks = _tokenize(text)
    i = 0
    terms: dict = {}

    def peek():
        return toks[i]

    def take(kind, what):
        nonlocal i
        k, val, pos = toks[i]
        if k != kind:
            raise ParseError(f"expected {what}, got {val or 'end of input'!r}", pos)
        i += 1
        return val, pos

    def factor(expo):
        name, pos = take(2, "variable")
        try:
            j = ctx.index(name)
        except ContextMismatch:
            raise ParseError(f"unknown variable {name!r}", pos) from None
        e = 1
        if peek()[0] == 3:
            take(3, "'^'")
            e = int(take(1, "exponent")[0])
        expo[j] += e

    def term(sign):
        coeff = 1
        expo = [0] * ctx.count
        if peek()[0] == 1:
            coeff = int(take(1, "coefficient")[0])
            if peek()[0] != 4:
                return coeff * sign, expo
            take(4, "'*'")
        factor(expo)
        while peek()[0] == 4:
            take(4, "'*'")
            factor(expo)
        return coeff * sign, expo

    sign = 1
    if peek()[0] in (5, 6):
        sign = 1 if peek()[0] == 5 else -1
        i += 1
    while True:
        c, e = term(sign)
        key = tuple(e)
        terms[key] = terms.get(key, 0) + c
        k, val, pos = peek()
        if k == 0:
            break
        if k not in (5, 6):
            raise ParseError(f"expected '+' or '-', got {val!r}", pos)
        sign = 1 if k == 5 else -1
        i += 1
    return MultiPoly(ctx, p, terms)


def poly_to_json(f: MultiPoly) -> dict:
    return {"vars": list(f.ctx.names),
            "terms": [{"m": list(m), "c": c} for m, c in f.sorted_terms()]}


def poly_from_json(obj: dict | str, p: int, kind: str = "ambient") -> MultiPoly:
    if isinstance(obj, str):
        obj = json.loads(obj)
    ctx = VariableContext(tuple(obj["vars"]), kind)
    return MultiPoly(ctx, p, [(t["m"], t["c"]) for t in obj["terms"]])


def poly_arith(op: str, *args):
    """Dispatch 'add', 'mul' or 'pow' over MultiPoly operands."""
    if op == "add":
        out = args[0]
        for g in args[1:]:
            out = out + g
        return out
    if op == "mul":
        out = args[0]
        for g in args[1:]:
            out = out * g
        return out
    if op == "pow":
        f, e = args
        return f ** e
    raise ValueError(f"unknown operation {op!r}")


# ----------------------------------------------------------------------------
# linear substitutions

class LinearSubstitution:
    """Ring map sending each source variable to a linear form in the target variables.

    ``matrix[i, j]`` is the coefficient of target variable j in the image of
    source variable i.
    """

    __slots__ = ("source", "target", "matrix", "p", "_tower")

    def __init__(self, source: VariableContext, target: VariableContext, matrix, p: int):
        M = np.mod(np.asarray(matrix, dtype=np.int64), p)
        if M.shape != (source.count, target.count):
            raise ValueError(f"substitution matrix has shape {M.shape}, expected "
                             f"{(source.count, target.count)}")
        M.setflags(write=False)
        self.source, self.target, self.matrix, self.p = source, target, M, p
        self._tower = None

    @classmethod
    def from_images(cls, source, target, images: Sequence[MultiPoly], p):
        M = np.zeros((source.count, target.count), dtype=np.int64)
        for i, img in enumerate(images):
            if img.ctx != target:
                raise ContextMismatch("image outside the target context")
            for m, c in img.terms.items():
                if sum(m) != 1:
                    raise ValueError("images must be linear forms")
                M[i, m.index(1)] = c
        return cls(source, target, M, p)

    @property
    def images(self) -> list[MultiPoly]:
        out = []
        for row in self.matrix:
            t = {}
            for j, c in enumerate(row):
                if c:
                    e = [0] * self.target.count
                    e[j] = 1
                    t[tuple(e)] = int(c)
            out.append(MultiPoly(self.target, self.p, t, _clean=True))
        return out

    def then(self, other: "LinearSubstitution") -> "LinearSubstitution":
        """The substitution 'apply self, then other'."""
        if other.source != self.target or other.p != self.p:
            raise ContextMismatch("substitutions do not compose")
        return LinearSubstitution(self.source, other.target, self.matrix @ other.matrix, self.p)

    def __eq__(self, other):
        return (isinstance(other, LinearSubstitution) and self.source == other.source
                and self.target == other.target and self.p == other.p
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.source, self.target, self.p, self.matrix.tobytes()))

    def __call__(self, f: MultiPoly) -> MultiPoly:
        return substitute_linear(f, self)

    def degree_matrix(self, d: int) -> np.ndarray:
        """Matrix (target degree-d basis x source degree-d basis) of the induced map."""
        if self._tower is None:
            self._tower = SubstitutionTower(self.matrix, self.p)
        return self._tower.matrix(d)


def substitute_linear(f: MultiPoly, s: LinearSubstitution) -> MultiPoly:
    if f.ctx != s.source or f.p != s.p:
        raise ContextMismatch(f"cannot substitute into {s.source.names} a polynomial in {f.ctx.names}")
    p = s.p
    by_deg: dict = {}
    for m, c in f.terms.items():
        by_deg.setdefault(sum(m), []).append((m, c))
    out = MultiPoly.zero(s.target, p)
    for d, items in by_deg.items():
        ndense = len(_basis(s.source.count, d))
        if len(items) * 8 > ndense and d > 2:
            vec = np.zeros(ndense, dtype=np.int64)
            idx = _index(s.source.count, d)
            for m, c in items:
                vec[idx[m]] = c
            img = (s.degree_matrix(d).astype(np.int64) @ vec) % p
            out = out + MultiPoly.from_vector(s.target, p, d, img)
        else:
            out = out + _substitute_sparse(items, s)
    return out


def _substitute_sparse(items, s):
    p = s.p
    images = s.images
    powers = [{0: MultiPoly.constant(s.target, p, 1), 1: img} for img in images]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            cache[e] = images[i] ** e
        return cache[e]

    acc: dict = {}
    for m, c in items:
        term = MultiPoly.constant(s.target, p, c)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
                if term.is_zero():
                    break
        for mm, cc in term.terms.items():
            acc[mm] = (acc.get(mm, 0) + cc) % p
    return MultiPoly(s.target, p, {m: c for m, c in acc.items() if c}, _clean=True)


@lru_cache(maxsize=None)
def _shift_map(nvars: int, d: int) -> np.ndarray:
    """shift[j, k] = index in the degree-(d+1) basis of (basis_d[k] * x_j)."""
    nxt = _index(nvars, d + 1)
    out = np.empty((nvars, len(_basis(nvars, d))), dtype=np.int64)
    for k, m in enumerate(_basis(nvars, d)):
        for j in range(nvars):
            e = list(m)
            e[j] += 1
            out[j, k] = nxt[tuple(e)]
    return out


@lru_cache(maxsize=None)
def _parent_map(nvars: int, d: int):
    """For each degree-d monomial: its first variable i and the index of m / x_i."""
    prev = _index(nvars, d - 1)
    var = np.empty(len(_basis(nvars, d)), dtype=np.int64)
    parent = np.empty_like(var)
    for k, m in enumerate(_basis(nvars, d)):
        i = next(j for j, e in enumerate(m) if e)
        e = list(m)
        e[i] -= 1
        var[k] = i
        parent[k] = prev[tuple(e)]
    return var, parent


class SubstitutionTower:
    """Degree-by-degree matrices of a linear substitution, built by the recursion
    M_d[:, x_i * m] = (l_i) * M_{d-1}[:, m], where l_i is the image of x_i."""

    def __init__(self, matrix: np.ndarray, p: int, keep: bool = True):
        self.A = np.asarray(matrix, dtype=np.int64) % p
        self.p = p
        self.keep = keep
        self._mats = {0: np.ones((1, 1), dtype=np.int8)}
        self._top = 0

    def matrix(self, d: int) -> np.ndarray:
        if d in self._mats:
            return self._mats[d]
        sv, tv = self.A.shape
        p = self.p
        start = max(k for k in self._mats if k <= d)
        M = self._mats[start].astype(np.int64)
        for k in range(start + 1, d + 1):
            var, parent = _parent_map(sv, k)
            shift = _shift_map(tv, k - 1)
            new = np.zeros((len(_basis(tv, k)), len(var)), dtype=np.int64)
            for i in range(sv):
                cols = np.flatnonzero(var == i)
                if cols.size == 0:
                    continue
                P = M[:, parent[cols]]
                for j in range(tv):
                    a = self.A[i, j]
                    if a:
                        new[np.ix_(shift[j], cols)] += a * P
            M = new % p
            if self.keep:
                self._mats[k] = M.astype(np.int8)
        self._mats[d] = M.astype(np.int8)
        return self._mats[d]


def multiplication_matrix(g: MultiPoly, k: int) -> np.ndarray:
    """Rows are the degree-(deg g + k) coefficient vectors of g * m, for m over
    the degree-k monomials (descending)."""
    dg = g.homogeneous_degree
    if dg is None:
        raise ValueError("multiplier must be homogeneous and nonzero")
    nv = g.ctx.count
    target = _index(nv, dg + k)
    mult = _basis(nv, k)
    out = np.zeros((len(mult), len(target)), dtype=np.int64)
    rows = np.arange(len(mult))
    for e, c in g.terms.items():
        cols = [target[tuple(a + b for a, b in zip(e, m))] for m in mult]
        out[rows, cols] = c
    return out
