"""The form space F_p^{2n}, its maximal isotropic (p odd) or singular (p = 2)
subspaces, and generators of the groups preserving the form."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import prod

import numpy as np

from .linalg import rank, rref
from .poly import LinearSubstitution, VariableContext


@dataclass(frozen=True)
class SymplecticSpace:
    """F_p^{2n} with b(x, y) = sum_i x_{2i-1} y_{2i} - x_{2i} y_{2i-1}.

    For p = 2 it also carries q(x) = sum_i x_{2i-1} x_{2i}, whose polarization is b.
    """

    n: int
    p: int

    @cached_property
    def gram(self) -> np.ndarray:
        J = np.zeros((2 * self.n, 2 * self.n), dtype=np.int64)
        for i in range(self.n):
            J[2 * i, 2 * i + 1] = 1
            J[2 * i + 1, 2 * i] = self.p - 1
        J.setflags(write=False)
        return J

    @property
    def dim(self) -> int:
        return 2 * self.n

    def form(self, x, y) -> int:
        return int(np.asarray(x) @ self.gram @ np.asarray(y)) % self.p

    def quad(self, x) -> int:
        x = np.asarray(x)
        return int(sum(x[2 * i] * x[2 * i + 1] for i in range(self.n))) % self.p

    def is_totally_isotropic(self, rows) -> bool:
        B = np.asarray(rows, dtype=np.int64).reshape(-1, self.dim)
        if np.any((B @ self.gram @ B.T) % self.p):
            return False
        if self.p == 2:
            return all(self.quad(r) == 0 for r in B)
        return True

    def expected_lagrangian_count(self) -> int:
        if self.p == 2:
            return 2 * prod(2 ** i + 1 for i in range(1, self.n))
        return prod(self.p ** i + 1 for i in range(1, self.n + 1))

    def ambient_context(self) -> VariableContext:
        return VariableContext.ambient(2 * self.n)


def canonical_basis(rows, p: int) -> np.ndarray:
    R, piv = rref(np.asarray(rows, dtype=np.int64), p)
    return R[:len(piv)]


@dataclass(frozen=True, eq=False)
class Lagrangian:
    """A maximal isotropic/singular subspace, stored by its reduced echelon basis."""

    space: SymplecticSpace
    key: tuple

    @classmethod
    def from_rows(cls, space: SymplecticSpace, rows) -> "Lagrangian":
        B = canonical_basis(rows, space.p)
        if B.shape[0] != space.n:
            raise ValueError("rows do not span an n-dimensional subspace")
        if not space.is_totally_isotropic(B):
            raise ValueError("subspace is not totally isotropic/singular")
        return cls(space, tuple(int(x) for x in B.ravel()))

    @property
    def basis(self) -> np.ndarray:
        return np.array(self.key, dtype=np.int64).reshape(self.space.n, self.space.dim)

    def __eq__(self, other):
        return isinstance(other, Lagrangian) and self.space == other.space and self.key == other.key

    def __hash__(self):
        return hash((self.space, self.key))

    def __repr__(self):
        return f"Lagrangian({self.basis.tolist()})"

    def restriction(self, target: VariableContext | None = None, basis=None) -> LinearSubstitution:
        """y_i -> sum_j B[j, i] t_j, restricting ambient polynomials to this subspace.

        ``basis`` may replace the canonical echelon basis by any other basis of
        the same subspace; ``target`` may carry extra adjoined variables after
        t1..tn.
        """
        B = self.basis if basis is None else np.asarray(basis, dtype=np.int64)
        n = self.space.n
        target = target or VariableContext.local(n)
        M = np.zeros((self.space.dim, target.count), dtype=np.int64)
        M[:, :n] = B.T
        return LinearSubstitution(self.space.ambient_context(), target, M, self.space.p)

    def contains(self, v) -> bool:
        B = self.basis
        return rank(np.vstack([B, np.asarray(v).reshape(1, -1)]), self.space.p) == self.space.n

    def to_json(self):
        return self.basis.tolist()


def _pivot_patterns(n, dim):
    from itertools import combinations
    return list(combinations(range(dim), n))


@lru_cache(maxsize=None)
def _enumerate(n: int, p: int) -> tuple:
    space = SymplecticSpace(n, p)
    dim = 2 * n
    J = space.gram
    found = []
    for pivots in _pivot_patterns(n, dim):
        # depth-first over rows: each row is e_pivot plus free entries to its right
        free_cols = [[c for c in range(pv + 1, dim) if c not in pivots] for pv in pivots]

        def rec(j, rows):
            if j == n:
                found.append(tuple(int(x) for x in np.concatenate(rows)))
                return
            cols = free_cols[j]
            for vals in np.ndindex(*([p] * len(cols))):
                r = np.zeros(dim, dtype=np.int64)
                r[pivots[j]] = 1
                r[cols] = vals
                if p == 2 and space.quad(r):
                    continue
                if any((r @ J @ prev) % p for prev in rows):
                    continue
                rec(j + 1, rows + [r])

        rec(0, [])
    found.sort()
    return tuple(Lagrangian(space, k) for k in found)


def enumerate_lagrangians(space: SymplecticSpace) -> list[Lagrangian]:
    """All maximal isotropic (p odd) or singular (p = 2) subspaces, sorted by echelon matrix."""
    return list(_enumerate(space.n, space.p))


def transvection(space: SymplecticSpace, v) -> np.ndarray:
    """Matrix of w -> w + b(w, v) v acting on column vectors."""
    v = np.asarray(v, dtype=np.int64).reshape(-1, 1)
    return (np.eye(space.dim, dtype=np.int64) + v @ (v.T @ space.gram.T)) % space.p


def sp_generators(space: SymplecticSpace) -> list[np.ndarray]:
    """Transvections at the standard basis vectors and at e_{2i-1} + e_{2j-1}."""
    dim = space.dim
    vecs = [np.eye(dim, dtype=np.int64)[k] for k in range(dim)]
    for i in range(space.n):
        for j in range(i + 1, space.n):
            v = np.zeros(dim, dtype=np.int64)
            v[2 * i] = v[2 * j] = 1
            vecs.append(v)
    gens = [transvection(space, v) for v in vecs]
    for g in gens:
        assert preserves_form(space, g)
    return gens


def isometry_generators(space: SymplecticSpace) -> list[np.ndarray]:
    """Generators of the group acting on the quotient ring.

    For odd p this is the symplectic group.  For p = 2 the ring relation of
    degree 2 is the quadratic form itself, so the group is its orthogonal
    group: transvections in every non-singular vector, plus, when those
    generate a proper subgroup (only for n = 2), the swap of the two
    hyperbolic planes.
    """
    if space.p != 2:
        return sp_generators(space)
    dim = space.dim
    gens = []
    for v in np.ndindex(*([2] * dim)):
        v = np.array(v, dtype=np.int64)
        if v.any() and space.quad(v) == 1:
            gens.append(transvection(space, v))
    if space.n == 2:
        swap = np.zeros((4, 4), dtype=np.int64)
        swap[[0, 1, 2, 3], [2, 3, 0, 1]] = 1
        gens.append(swap)
    for g in gens:
        assert preserves_quadratic(space, g)
    return gens


def preserves_form(space: SymplecticSpace, g) -> bool:
    g = np.asarray(g, dtype=np.int64)
    return bool(np.array_equal((g.T @ space.gram @ g) % space.p, space.gram % space.p))


def preserves_quadratic(space: SymplecticSpace, g) -> bool:
    if not preserves_form(space, g):
        return False
    g = np.asarray(g, dtype=np.int64)
    return all(space.quad(g[:, k]) == space.quad(np.eye(space.dim, dtype=np.int64)[k])
               for k in range(space.dim))


def validate_symplectic(space: SymplecticSpace, obj) -> bool:
    """Isotropy/singularity for a subspace (Lagrangian or k x 2n rows with k <= n),
    or form preservation for a 2n x 2n matrix."""
    if isinstance(obj, Lagrangian):
        return space.is_totally_isotropic(obj.basis)
    M = np.asarray(obj, dtype=np.int64) % space.p
    if M.ndim != 2 or M.shape[1] != space.dim:
        raise ValueError(f"expected {space.dim} columns, got shape {M.shape}")
    if M.shape[0] == space.dim:
        return preserves_form(space, M)
    if M.shape[0] > space.n:
        return False
    return space.is_totally_isotropic(M)


def pullback_substitution(space: SymplecticSpace, g) -> LinearSubstitution:
    """y_i -> sum_j g[i, j] y_j."""
    g = np.asarray(g, dtype=np.int64) % space.p
    if rank(g, space.p) != space.dim:
        raise ValueError("singular matrix")
    ctx = space.ambient_context()
    return LinearSubstitution(ctx, ctx, g, space.p)


def act_on_lagrangian(g, L: Lagrangian) -> Lagrangian:
    """Image g(L) of the subspace under the column-vector action."""
    return Lagrangian.from_rows(L.space, (L.basis @ np.asarray(g).T) % L.space.p)


def group_order(gens, p: int, limit: int = 200_000) -> int:
    """Order of the group generated by the given matrices, by breadth-first closure."""
    dim = gens[0].shape[0]
    ident = np.eye(dim, dtype=np.int8)
    seen = {ident.tobytes()}
    frontier = ident[None]
    G = np.stack(gens).astype(np.int64)
    while frontier.shape[0]:
        prods = np.einsum("gij,fjk->gfik", G, frontier.astype(np.int64)) % p
        prods = prods.reshape(-1, dim, dim).astype(np.int8)
        new = []
        for m in prods:
            k = m.tobytes()
            if k not in seen:
                seen.add(k)
                new.append(m)
        if len(seen) > limit:
            raise RuntimeError("group larger than the closure limit")
        frontier = np.array(new, dtype=np.int8).reshape(-1, dim, dim)
    return len(seen)


def symplectic_group_order(n: int, p: int) -> int:
    return p ** (n * n) * prod(p ** (2 * i) - 1 for i in range(1, n + 1))
