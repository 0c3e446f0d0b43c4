"""Graded free modules, graded matrices between them, Poincare series,
and degreewise linear algebra over the rationals.

A free module records the internal degree of each generator together with a
bookkeeping label.  The generator of R<d> sits in internal degree -d and
contributes q^{-d} to the graded rank, so graded rank reads off generator
degrees directly: rank = sum q^{deg(gen)}.

A homomorphism of degree k maps a generator of degree s to an element of
degree s+k, so the matrix entry at (target i, source j) is homogeneous of
internal degree  source_deg(j) - target_deg(i) + k  (or zero).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import linalg
from .ring import GradedPoly, PolyRing


class PoincareSeries:
    """Element of Z[q^{+-1}]: finite map exponent -> nonzero integer."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, int] = ()):
        self.coeffs = {int(e): int(c) for e, c in dict(coeffs).items() if c != 0}

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return PoincareSeries(out)

    def __eq__(self, other):
        return isinstance(other, PoincareSeries) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def shifted(self, j: int) -> "PoincareSeries":
        """Multiply by q^j (the class of <-j>)."""
        return PoincareSeries({e + j: c for e, c in self.coeffs.items()})

    def total(self) -> int:
        return sum(self.coeffs.values())

    def __str__(self):
        if not self.coeffs:
            return "0"
        pieces = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if e == 0:
                body = str(c)
            else:
                q = "q" if e == 1 else f"q^{e}"
                body = q if c == 1 else (f"-{q}" if c == -1 else f"{c}*{q}")
            pieces.append(body)
        text = pieces[0]
        for body in pieces[1:]:
            text += (" + " + body) if not body.startswith("-") else (" - " + body[1:])
        return text

    __repr__ = __str__

    def to_json(self) -> dict:
        return {str(e): self.coeffs[e] for e in sorted(self.coeffs)}


class GradedFreeModule:
    """Finite free graded module: a list of generator degrees plus labels."""

    __slots__ = ("ring", "degrees", "labels")

    def __init__(self, ring: PolyRing, degrees: Sequence[int],
                 labels: Optional[Sequence] = None):
        self.ring = ring
        self.degrees = tuple(int(d) for d in degrees)
        if labels is None:
            labels = tuple(f"g{i}" for i in range(len(self.degrees)))
        else:
            labels = tuple(labels)
        if len(labels) != len(self.degrees):
            raise ValueError("labels/degrees length mismatch")
        self.labels = labels

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def __eq__(self, other):
        return (isinstance(other, GradedFreeModule) and self.ring == other.ring
                and self.degrees == other.degrees)

    def __repr__(self):
        return f"Free({list(self.degrees)})"

    def graded_rank(self) -> PoincareSeries:
        out: dict = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return PoincareSeries(out)

    def shifted(self, j: int) -> "GradedFreeModule":
        """<j>: M<j>_k = M_{k+j}, so generator degrees drop by j."""
        return GradedFreeModule(self.ring, [d - j for d in self.degrees], self.labels)

    def dual(self) -> "GradedFreeModule":
        return GradedFreeModule(self.ring, [-d for d in self.degrees],
                                [_dual_label(l) for l in self.labels])

    def direct_sum(self, other: "GradedFreeModule") -> "GradedFreeModule":
        return GradedFreeModule(self.ring, self.degrees + other.degrees,
                                self.labels + other.labels)

    def tensor(self, other: "GradedFreeModule") -> "GradedFreeModule":
        degs = []
        labels = []
        for i, di in enumerate(self.degrees):
            for j, dj in enumerate(other.degrees):
                degs.append(di + dj)
                labels.append(_pair_label(self.labels[i], other.labels[j]))
        return GradedFreeModule(self.ring, degs, labels)

    def basis_of_degree(self, t: int) -> list:
        """Q-basis of the degree-t slice: pairs (generator index, exponent)."""
        out = []
        for i, d in enumerate(self.degrees):
            for e in self.ring.monomials_of_degree(t - d):
                out.append((i, e))
        return out


def _pair_label(a, b):
    la = a if isinstance(a, tuple) else (a,)
    lb = b if isinstance(b, tuple) else (b,)
    return la + lb


def _dual_label(l):
    return ("*", l) if not isinstance(l, tuple) else ("*",) + l


class GradedMatrix:
    """Sparse matrix of polynomials giving a degree-k homomorphism."""

    __slots__ = ("source", "target", "degree", "entries")

    def __init__(self, source: GradedFreeModule, target: GradedFreeModule,
                 degree: int, entries: Mapping[tuple, GradedPoly]):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.entries = {k: v for k, v in entries.items() if not v.is_zero()}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(source, target, degree=0):
        return GradedMatrix(source, target, degree, {})

    @staticmethod
    def identity(module, scale=None):
        ring = module.ring
        one = ring.one() if scale is None else scale
        return GradedMatrix(module, module,
                            one.homogeneous_degree() if scale is not None else 0,
                            {(i, i): one for i in range(module.rank)})

    @staticmethod
    def from_rows(source, target, degree, rows):
        entries = {}
        for i, row in enumerate(rows):
            for j, p in enumerate(row):
                if not (isinstance(p, GradedPoly) and p.is_zero()):
                    entries[(i, j)] = p
        return GradedMatrix(source, target, degree, entries)

    # -- health check --------------------------------------------------------

    def homogeneity_violations(self) -> list:
        bad = []
        for (i, j), p in self.entries.items():
            want = self.source.degrees[j] - self.target.degrees[i] + self.degree
            got = p.homogeneous_degree()
            if got is None or got != want:
                bad.append((i, j, want, got))
        return bad

    # -- algebra ---------------------------------------------------------------

    def entry(self, i, j) -> GradedPoly:
        return self.entries.get((i, j), self.source.ring.zero())

    def __add__(self, other):
        assert self.degree == other.degree
        entries = dict(self.entries)
        for k, v in other.entries.items():
            s = entries.get(k)
            s = v if s is None else s + v
            if s.is_zero():
                entries.pop(k, None)
            else:
                entries[k] = s
        return GradedMatrix(self.source, self.target, self.degree, entries)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c) -> "GradedMatrix":
        return GradedMatrix(self.source, self.target, self.degree,
                            {k: v * c for k, v in self.entries.items()})

    def __matmul__(self, other: "GradedMatrix") -> "GradedMatrix":
        """self after other: (self @ other): other.source -> self.target."""
        acc: dict = {}
        by_col: dict = {}
        for (i, j), p in self.entries.items():
            by_col.setdefault(j, []).append((i, p))
        for (k, j), q in other.entries.items():
            for i, p in by_col.get(k, ()):  # k = self column == other row
                key = (i, j)
                s = acc.get(key)
                pq = p * q
                acc[key] = pq if s is None else s + pq
        return GradedMatrix(other.source, self.target,
                            self.degree + other.degree, acc)

    def transpose(self) -> "GradedMatrix":
        return GradedMatrix(self.target.dual(), self.source.dual(), self.degree,
                            {(j, i): p for (i, j), p in self.entries.items()})

    def shifted(self, j_target: int, j_source: int) -> "GradedMatrix":
        """Same entries with source/target shifted; shifting the source by
        <j> raises the map degree by j, shifting the target lowers it."""
        return GradedMatrix(self.source.shifted(j_source),
                            self.target.shifted(j_target),
                            self.degree + j_source - j_target, self.entries)

    def mapped(self, fn) -> "GradedMatrix":
        """Apply fn to every entry (e.g. a ring substitution)."""
        new = {k: fn(v) for k, v in self.entries.items()}
        some = next(iter(new.values()), None)
        ring = some.ring if some is not None else self.source.ring
        src = GradedFreeModule(ring, self.source.degrees, self.source.labels)
        tgt = GradedFreeModule(ring, self.target.degrees, self.target.labels)
        return GradedMatrix(src, tgt, self.degree, new)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, GradedMatrix)
                and self.source == other.source and self.target == other.target
                and self.degree == other.degree and self.entries == other.entries)

    def permuted(self, target_perm, source_perm) -> "GradedMatrix":
        """Reindex: new entry (i, j) = old entry (target_perm[i], source_perm[j])."""
        inv_t = {old: new for new, old in enumerate(target_perm)}
        inv_s = {old: new for new, old in enumerate(source_perm)}
        src = GradedFreeModule(self.source.ring,
                               [self.source.degrees[k] for k in source_perm],
                               [self.source.labels[k] for k in source_perm])
        tgt = GradedFreeModule(self.target.ring,
                               [self.target.degrees[k] for k in target_perm],
                               [self.target.labels[k] for k in target_perm])
        return GradedMatrix(src, tgt, self.degree,
                            {(inv_t[i], inv_s[j]): p
                             for (i, j), p in self.entries.items()})

    @staticmethod
    def block(source, target, degree, blocks, row_modules, col_modules):
        """Assemble from a grid of (possibly None) matrices."""
        row_off = [0]
        for m in row_modules:
            row_off.append(row_off[-1] + m.rank)
        col_off = [0]
        for m in col_modules:
            col_off.append(col_off[-1] + m.rank)
        entries = {}
        for bi, row in enumerate(blocks):
            for bj, blk in enumerate(row):
                if blk is None:
                    continue
                for (i, j), p in blk.entries.items():
                    entries[(row_off[bi] + i, col_off[bj] + j)] = p
        return GradedMatrix(source, target, degree, entries)

    def kron(self, other: "GradedMatrix", sign_by_row=None) -> "GradedMatrix":
        """Kronecker product on tensor modules (self acts on the left factor)."""
        src = self.source.tensor(other.source)
        tgt = self.target.tensor(other.target)
        nr = other.target.rank
        nc = other.source.rank
        entries = {}
        for (i, j), p in self.entries.items():
            for (k, l), q in other.entries.items():
                entries[(i * nr + k, j * nc + l)] = p * q
        return GradedMatrix(src, tgt, self.degree + other.degree, entries)

    # -- degreewise linear algebra ------------------------------------------

    def slice_matrix(self, t: int):
        """Rational matrix of the induced map (source degree t) ->
        (target degree t + self.degree); returns (rows, src_basis, tgt_basis)
        with rows indexed by source basis elements (i.e. the transpose acts
        on coordinate columns -- callers only use ranks/kernels)."""
        ring = self.source.ring
        src_basis = self.source.basis_of_degree(t)
        tgt_basis = self.target.basis_of_degree(t + self.degree)
        tgt_index = {b: k for k, b in enumerate(tgt_basis)}
        by_col: dict = {}
        for (i, j), p in self.entries.items():
            by_col.setdefault(j, []).append((i, p))
        rows = []
        for (j, e) in src_basis:
            row: dict = {}
            for i, p in by_col.get(j, ()):
                for pe, c in p.terms.items():
                    me = tuple(a + b for a, b in zip(pe, e))
                    col = tgt_index.get((i, me))
                    if col is None:
                        continue
                    s = row.get(col, 0) + c
                    if s:
                        row[col] = s
                    else:
                        del row[col]
            rows.append(row)
        return rows, src_basis, tgt_basis


def degree_slice_rank(A: GradedMatrix, t: int) -> tuple:
    """(kernel dim, image dim) of the rational map induced by A in source
    degree t."""
    rows, src_basis, _ = A.slice_matrix(t)
    r = linalg.rank(rows)
    return (len(src_basis) - r, r)


def slice_homology_mod_w(A: Optional[GradedMatrix], B: Optional[GradedMatrix],
                         w: GradedPoly, t: int) -> int:
    """dim of ker(B)/im(A) in internal source degree t, computed over
    R = S/(w): both modules and maps are reduced modulo w (w acts on a free
    module by multiplication in each coordinate).  A feeds the slice, B
    leaves it; either may be None.  For w = 0 this is plain slice homology.

    Everything reduces to ranks: with W = image of multiplication by w in
    the middle slice V, W' likewise in the target slice V',
        dim ker(Bbar) = dim V - rank([B | W'-gen rows]) + rank(W') - dim W
        dim im(Abar)  = rank([A | W-gen rows]) - rank(W).
    """
    middle = B.source if B is not None else A.target
    ring = middle.ring
    dw = w.homogeneous_degree() if not w.is_zero() else None
    V = middle.basis_of_degree(t)
    dimV = len(V)
    if dimV == 0:
        return 0

    def w_rows(module, degree):
        if w.is_zero():
            return [], 0
        mult = GradedMatrix(module, module, dw,
                            {(i, i): w for i in range(module.rank)})
        rows, _, _ = mult.slice_matrix(degree - dw)
        r = linalg.rank(rows)
        return rows, r

    W_rows, rankW = w_rows(middle, t)

    if B is not None:
        B_rows, _, tgt_basis = B.slice_matrix(t)
        Wp_rows, rankWp = w_rows(B.target, t + B.degree)
        rank_B_stack = linalg.rank(B_rows + Wp_rows)
        dim_ker_bar = dimV - (rank_B_stack - rankWp) - rankW
    else:
        dim_ker_bar = dimV - rankW

    if A is not None:
        A_rows, _, _ = A.slice_matrix(t - A.degree)
        rank_A_stack = linalg.rank(A_rows + W_rows)
        dim_im_bar = rank_A_stack - rankW
    else:
        dim_im_bar = 0

    return dim_ker_bar - dim_im_bar


def poincare_from_json(data: Mapping) -> PoincareSeries:
    return PoincareSeries({int(k): int(v) for k, v in data.items()})
