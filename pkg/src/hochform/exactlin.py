"""Exact sparse linear algebra over the rationals.

Every rank, kernel, homology and solve computation in the package funnels
through this module.  Arithmetic is `fractions.Fraction` throughout: results
are exact, there are no tolerances anywhere.  Pivots are chosen by sparsity
(fewest nonzeros in the pivot row/column), never by magnitude, and ties are
broken by index so that all outputs are deterministic.

All values are immutable after construction; the functions below are pure
and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class SparseMat:
    """Immutable sparse matrix: entries maps (row, col) -> nonzero Fraction."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        assert rows >= 0 and cols >= 0
        clean = {}
        for (i, j), v in (entries or {}).items():
            assert 0 <= i < rows and 0 <= j < cols, (i, j, rows, cols)
            v = Fraction(v)
            if v:
                clean[(i, j)] = v
        self.rows = rows
        self.cols = cols
        self.entries = clean

    @classmethod
    def from_rows(cls, rows_list, cols=None) -> "SparseMat":
        """Build from a list of dense rows (lists) or sparse rows (dicts)."""
        nrows = len(rows_list)
        if cols is None:
            cols = 0
            for r in rows_list:
                cols = max(cols, max(r.keys(), default=-1) + 1 if isinstance(r, dict) else len(r))
        entries = {}
        for i, r in enumerate(rows_list):
            items = r.items() if isinstance(r, dict) else enumerate(r)
            for j, v in items:
                if v:
                    entries[(i, j)] = Fraction(v)
        return cls(nrows, cols, entries)

    @classmethod
    def identity(cls, n: int) -> "SparseMat":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    def row(self, i: int) -> dict:
        return {j: v for (r, j), v in self.entries.items() if r == i}

    def sparse_rows(self) -> list:
        rows = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def transpose(self) -> "SparseMat":
        return SparseMat(self.cols, self.rows,
                         {(j, i): v for (i, j), v in self.entries.items()})

    def matvec(self, x) -> list:
        assert len(x) == self.cols
        out = [ZERO] * self.rows
        for (i, j), v in self.entries.items():
            out[i] += v * x[j]
        return out

    def matmul(self, other: "SparseMat") -> "SparseMat":
        assert self.cols == other.rows
        orows = other.sparse_rows()
        prod = {}
        for (i, k), v in self.entries.items():
            for j, w in orows[k].items():
                key = (i, j)
                s = prod.get(key, ZERO) + v * w
                if s:
                    prod[key] = s
                elif key in prod:
                    del prod[key]
        return SparseMat(self.rows, other.cols, prod)

    def is_zero(self) -> bool:
        return not self.entries

    def __repr__(self):
        return "SparseMat(%d, %d, nnz=%d)" % (self.rows, self.cols, len(self.entries))


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^ambient_dim given by a reduced-row-echelon basis.

    basis is a tuple of sparse coordinate vectors (dict col -> Fraction);
    pivot columns are strictly increasing and each pivot entry is 1.
    """
    ambient_dim: int
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, vec) -> bool:
        v = dict((j, Fraction(c)) for j, c in
                 (vec.items() if isinstance(vec, dict) else enumerate(vec)) if c)
        for b in self.basis:
            p = min(b.keys())
            if p in v:
                c = v[p] / b[p]
                for j, w in b.items():
                    s = v.get(j, ZERO) - c * w
                    if s:
                        v[j] = s
                    elif j in v:
                        del v[j]
        return not v


def _rref(rows: list, ncols: int):
    """In-place reduced row echelon form of a list of sparse row dicts.

    Returns (pivots, reduced_rows): pivot column list (increasing) and the
    corresponding normalized rows.  Pivot choice: among the remaining rows,
    lowest available column, then the sparsest row (index tiebreak).
    """
    work = [dict(r) for r in rows if r]
    done = []        # (pivot_col, row) pairs
    while work:
        pc = min(min(r.keys()) for r in work)
        cands = [r for r in work if min(r.keys()) == pc]
        cands.sort(key=lambda r: (len(r), work.index(r)))
        piv = cands[0]
        work.remove(piv)
        inv = ONE / piv[pc]
        piv = {j: v * inv for j, v in piv.items()}
        nxt = []
        for r in work:
            c = r.get(pc)
            if c:
                r = _axpy(r, -c, piv)
            if r:
                nxt.append(r)
        work = nxt
        done.append((pc, piv))
    done.sort(key=lambda t: t[0])
    # back-substitute to full reduction
    for idx in range(len(done) - 1, -1, -1):
        pc, row = done[idx]
        for k in range(idx):
            c = done[k][1].get(pc)
            if c:
                done[k] = (done[k][0], _axpy(done[k][1], -c, row))
    pivots = [pc for pc, _ in done]
    return pivots, [r for _, r in done]


def _axpy(r: dict, c: Fraction, p: dict) -> dict:
    out = dict(r)
    for j, v in p.items():
        s = out.get(j, ZERO) + c * v
        if s:
            out[j] = s
        elif j in out:
            del out[j]
    return out


def rank_kernel(m: SparseMat):
    """Rank of m and its right kernel {x : m x = 0} as a Subspace.

    rank + kernel.dim == m.cols, and every kernel basis vector is an exact
    solution.  Kernel basis is in reduced echelon form (one basis vector per
    free column, pivot normalized to 1).
    """
    pivots, rows = _rref(m.sparse_rows(), m.cols)
    rank = len(pivots)
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    basis = []
    for f in free:
        vec = {f: ONE}
        for pc, row in zip(pivots, rows):
            c = row.get(f)
            if c:
                vec[pc] = -c
        basis.append(vec)
    # store the kernel in reduced echelon form (pivots strictly increasing)
    _, basis = _rref(basis, m.cols)
    kernel = Subspace(m.cols, tuple(basis))
    assert rank + kernel.dim == m.cols
    return rank, kernel


def rank(m: SparseMat) -> int:
    return rank_kernel(m)[0]


def homology_dim(d_in: SparseMat, d_out: SparseMat) -> int:
    """dim ker(d_out) - rank(d_in) for a two-step complex  . --d_in--> . --d_out--> .

    Rejects inputs with d_out . d_in != 0: that always signals a broken
    differential upstream, not a data condition.
    """
    if d_out.cols != d_in.rows:
        raise ValueError("middle dimensions disagree: %d vs %d" % (d_out.cols, d_in.rows))
    if not d_out.matmul(d_in).is_zero():
        raise ValueError("not a complex: composite differential is nonzero")
    r_out, ker = rank_kernel(d_out)
    r_in = rank(d_in)
    h = ker.dim - r_in
    assert h >= 0
    return h


def solve_linear(m: SparseMat, rhs) -> Optional[list]:
    """Some exact solution x of m x = rhs, or None when inconsistent."""
    assert len(rhs) == m.rows
    aug = m.sparse_rows()
    rcol = m.cols
    for i, b in enumerate(rhs):
        if b:
            aug[i] = dict(aug[i])
            aug[i][rcol] = Fraction(b)
    pivots, rows = _rref(aug, m.cols + 1)
    x = [ZERO] * m.cols
    for pc, row in zip(pivots, rows):
        if pc == rcol:
            return None          # row (0 ... 0 | 1): inconsistent
        x[pc] = row.get(rcol, ZERO)
    assert m.matvec(x) == [Fraction(b) for b in rhs]
    return x
