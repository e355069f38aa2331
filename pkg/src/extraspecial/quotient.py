"""The graded quotient of F_p[y_1..y_2n] by the ideal generated by the z^(r), r < n.

Each degree slice of the ideal is echelonized with columns in descending
monomial order; pivot columns are leading monomials and the remaining
(standard) monomials give a basis of the quotient.  Echelon data can be
persisted in an on-disk cache keyed by (p, n, d) and the generators.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import rank, rref
from .model import ExtraspecialModel, MultiIndex, enumerate_R
from .poly import MultiPoly, _basis, format_poly, multiplication_matrix
from .symplectic import isometry_generators, pullback_substitution

CACHE_VERSION = 1


@dataclass
class IdealSlice:
    """Echelon data for one degree: ``reduced[k]`` holds the standard-monomial
    part of the reduced row whose leading monomial is ``pivots[k]``."""

    d: int
    pivots: np.ndarray
    std: np.ndarray
    reduced: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def quotient_dimension(self) -> int:
        return len(self.std)


class GradedQuotient:
    def __init__(self, model: ExtraspecialModel, generators: list[MultiPoly] | None = None,
                 cache_dir: Path | str | None = None):
        self.model = model
        self.p = model.p
        self.nvars = 2 * model.n
        self.gens = generators if generators is not None else [model.z_poly(r) for r in range(model.n)]
        self.gen_degrees = [g.homogeneous_degree for g in self.gens]
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._slices: dict[int, IdealSlice] = {}
        digest = "|".join(format_poly(g) for g in self.gens)
        self._tag = hashlib.sha256(digest.encode()).hexdigest()[:16]

    # ------------------------------------------------------------------ slices
    def ideal_matrix(self, d: int) -> np.ndarray:
        """Rows g_j * m for every generator g_j and monomial m of degree d - deg g_j."""
        rows = [multiplication_matrix(g, d - dg) for g, dg in zip(self.gens, self.gen_degrees)
                if dg is not None and dg <= d]
        if not rows:
            return np.zeros((0, len(_basis(self.nvars, d))), dtype=np.int64)
        return np.concatenate(rows, axis=0)

    def _cache_path(self, d: int) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"ideal-p{self.p}-n{self.model.n}-d{d}-{self._tag}.npz"

    def _load(self, d: int) -> IdealSlice | None:
        path = self._cache_path(d)
        if path is None or not path.exists():
            return None
        try:
            with np.load(path) as data:
                meta = json.loads(str(data["meta"]))
                if (meta.get("version") != CACHE_VERSION or meta.get("p") != self.p
                        or meta.get("n") != self.model.n or meta.get("d") != d
                        or meta.get("order") != "grevlex" or meta.get("tag") != self._tag):
                    return None
                return IdealSlice(d, data["pivots"], data["std"], data["reduced"])
        except (OSError, ValueError, KeyError):
            return None

    def _store(self, s: IdealSlice) -> None:
        path = self._cache_path(s.d)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        meta = json.dumps({"version": CACHE_VERSION, "p": self.p, "n": self.model.n, "d": s.d,
                           "order": "grevlex", "tag": self._tag})
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".npz")
        os.close(fd)
        np.savez_compressed(tmp, meta=np.array(meta), pivots=s.pivots, std=s.std,
                            reduced=s.reduced.astype(np.int8))
        os.replace(tmp, path)

    def slice(self, d: int) -> IdealSlice:
        self.model.config.check_degree(d)
        if d in self._slices:
            return self._slices[d]
        s = self._load(d)
        if s is None:
            A = self.ideal_matrix(d)
            ncols = A.shape[1]
            if A.shape[0]:
                R, piv = rref(A, self.p)
            else:
                R, piv = np.zeros((0, ncols), dtype=np.int64), []
            piv = np.asarray(piv, dtype=np.int64)
            std = np.setdiff1d(np.arange(ncols), piv)
            s = IdealSlice(d, piv, std, R[:len(piv)][:, std].astype(np.int8))
            self._store(s)
        self._slices[d] = s
        return s

    # ------------------------------------------------------------ normal forms
    def reduce_vectors(self, d: int, V: np.ndarray) -> np.ndarray:
        """Standard-monomial coordinates of the classes of the columns of V."""
        s = self.slice(d)
        V = np.asarray(V, dtype=np.int64)
        out = V[s.std]
        if s.rank:
            out = out - s.reduced.astype(np.int64).T @ V[s.pivots]
        return out % self.p

    def coordinates(self, f: MultiPoly, d: int | None = None) -> np.ndarray:
        d = f.homogeneous_degree if d is None else d
        if d is None:
            raise ValueError("normal form needs a homogeneous polynomial")
        return self.reduce_vectors(d, f.to_vector(d))

    def normal_form(self, f: MultiPoly) -> MultiPoly:
        if f.is_zero():
            return f
        d = f.homogeneous_degree
        if d is None:
            out = MultiPoly.zero(f.ctx, self.p)
            for k in sorted({sum(m) for m in f.terms}):
                out = out + self.normal_form(f.homogeneous_part(k))
            return out
        s = self.slice(d)
        full = np.zeros(len(_basis(self.nvars, d)), dtype=np.int64)
        full[s.std] = self.coordinates(f, d)
        return MultiPoly.from_vector(f.ctx, self.p, d, full)

    def in_ideal(self, f: MultiPoly) -> bool:
        return self.normal_form(f).is_zero()

    def hilbert_dimension(self, d: int) -> int:
        if d < 0:
            return 0
        return self.slice(d).quotient_dimension

    def standard_monomials(self, d: int) -> list[tuple]:
        b = _basis(self.nvars, d)
        return [b[i] for i in self.slice(d).std]

    # --------------------------------------------------------- presentation
    def presentation_check(self, d_max: int) -> "PresentationReport":
        """Kernel of restriction to all Lagrangians equals the ideal, degree by degree.

        The generators restrict to zero, so the ideal lies in the kernel; the
        two then agree when their dimensions do.
        """
        model = self.model
        gens_vanish = all(model.inflate(g).is_zero() for g in self.gens)
        rows = []
        for d in range(d_max + 1):
            total = len(_basis(self.nvars, d))
            res_rank = model.restriction_rank(d)
            ideal_rank = self.slice(d).rank
            rows.append({"d": d, "monomials": total, "ideal_rank": ideal_rank,
                         "kernel_dim": total - res_rank, "quotient_dim": total - ideal_rank,
                         "agree": total - res_rank == ideal_rank})
        return PresentationReport(gens_vanish, rows)

    # ----------------------------------------------------------- group action
    def group_generators(self):
        return isometry_generators(self.model.space)

    def action_matrix(self, g, d: int) -> np.ndarray:
        """Matrix of the pullback by g on the degree-d slice, in standard coordinates."""
        s = self.slice(d)
        P = pullback_substitution(self.model.space, g).degree_matrix(d).astype(np.int64)
        return self.reduce_vectors(d, P[:, s.std])

    def fixed_space(self, d: int, gens=None) -> np.ndarray:
        """Rows form a basis of the simultaneous fixed vectors (standard coordinates)."""
        from .linalg import nullspace
        gens = self.group_generators() if gens is None else gens
        h = self.hilbert_dimension(d)
        if h == 0:
            return np.zeros((0, 0), dtype=np.int64)
        eye = np.eye(h, dtype=np.int64)
        stack = np.concatenate([(self.action_matrix(g, d) - eye) % self.p for g in gens], axis=0)
        return nullspace(stack, self.p)

    def invariant_dimension(self, d: int, gens=None) -> int:
        if self.hilbert_dimension(d) == 0:
            return 0
        return int(self.fixed_space(d, gens).shape[0])

    # ------------------------------------------------------ invariant basis
    def verify_invariant_basis(self, d_max: int, free_check: bool | None = None) -> "InvariantReport":
        """Products of characteristic classes (over the admissible exponent
        sequences) give a basis of the invariants in each degree <= d_max.

        With ``free_check`` (default: odd p) also checks that products of
        the free generators with monomials in kappa_0^2, kappa_i^p span the
        invariants and are independent.
        """
        model = self.model
        p = self.p
        gens = self.group_generators()
        which = "all" if p == 2 else "prime"
        Rs = enumerate_R(p, model.n, d_max, which)
        free_check = (p != 2) if free_check is None else free_check
        free_by_deg = self._free_products(d_max) if free_check else {}
        rows = []
        failures = []
        witness_cache: dict = {}

        def coords_of(R):
            if R.r not in witness_cache:
                w = model.membership(model.char_class_product(R))
                if not w.found:
                    witness_cache[R.r] = None
                else:
                    witness_cache[R.r] = self.coordinates(w.poly, R.ydeg) if R.ydeg else np.ones(1, dtype=np.int64)
            return witness_cache[R.r]

        for d in range(d_max + 1):
            here = [R for R in Rs if R.ydeg == d]
            h = self.hilbert_dimension(d)
            inv_dim = self.invariant_dimension(d, gens) if h else 0
            vecs = []
            fixed_ok = True
            for R in here:
                x = coords_of(R)
                if x is None:
                    failures.append({"d": d, "R": list(R.r), "reason": "no preimage"})
                    fixed_ok = False
                    continue
                vecs.append(x)
                for g in gens:
                    if np.any((self.action_matrix(g, d) @ x - x) % p):
                        fixed_ok = False
                        failures.append({"d": d, "R": list(R.r), "reason": "not invariant"})
                        break
            rk = rank(np.array(vecs), p) if vecs else 0
            row = {"d": d, "count": len(here), "rank": rk, "invariant_dim": inv_dim,
                   "fixed": fixed_ok, "independent": rk == len(here),
                   "count_matches": len(here) == inv_dim}
            if free_check:
                prods = free_by_deg.get(d, [])
                fv = [coords_of(R) for R in prods]
                ok = all(v is not None for v in fv)
                frk = rank(np.array(fv), p) if fv and ok else 0
                row["free_products"] = len(prods)
                row["free_ok"] = ok and frk == len(prods) == inv_dim
            rows.append(row)
            if not (row["independent"] and row["count_matches"]):
                failures.append({"d": d, "reason": "count or independence", "row": row})
            if free_check and not row["free_ok"]:
                failures.append({"d": d, "reason": "free-module spot check", "row": row})
        return InvariantReport(rows, failures)

    def _free_products(self, d_max: int) -> dict[int, list[MultiIndex]]:
        """Exponent sequences of (kappa_0^2)^a0 * prod (kappa_i^p)^ai * g with g = 1
        or a free generator, grouped by degree."""
        p, n = self.p, self.model.n
        base_steps = [MultiIndex(tuple(2 if j == 0 else 0 for j in range(n)), p)]
        base_steps += [MultiIndex(tuple(p if j == i else 0 for j in range(n)), p) for i in range(1, n)]
        seeds = [MultiIndex((0,) * n, p)] + enumerate_R(p, n, d_max, "free")
        out: dict[int, list[MultiIndex]] = {}

        def rec(k, acc: MultiIndex):
            if acc.ydeg > d_max:
                return
            if k == len(base_steps):
                out.setdefault(acc.ydeg, []).append(acc)
                return
            step = base_steps[k]
            while acc.ydeg <= d_max:
                rec(k + 1, acc)
                acc = acc + step

        for g in seeds:
            rec(0, g)
        return out


@dataclass
class PresentationReport:
    generators_vanish: bool
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.generators_vanish and all(r["agree"] for r in self.rows)

    def to_json(self):
        return {"generators_vanish": self.generators_vanish, "degrees": self.rows}


@dataclass
class InvariantReport:
    rows: list
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures and all(r["fixed"] for r in self.rows)

    def to_json(self):
        return {"degrees": self.rows, "failures": self.failures}
