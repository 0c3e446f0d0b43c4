"""The calculus of finite graded matrix factorizations.

A factorization of type (S, w) is a pair of free graded modules M0, M1 with
maps f: M0 -> M1 of internal degree d = deg(w) and g: M1 -> M0 of degree 0
satisfying gf = w id and fg = w id.  Shift, cone, tensor, the three
dualities, homomorphism factorizations, morphism/homotopy checks, unit
elimination and 2-periodic (folded) cohomology all live here.

Sign conventions are the source text's throughout:

    M[1]        =  M1<d> --(-g)--> M0 --(-f)--> M1<d>
    cone(a,b)   =  blocks (f' b; 0 -g) and (g' a; 0 -f)
    M (x) N     =  blocks (1(x)f' g(x)1; f(x)1 -1(x)g') etc., M-factor first
    M*          =  M0* --(-g^T)--> M1*<-d> --(f^T)--> M0*      (potential -w)
    M^wdual     =  M1*<-d> --(f^T)--> M0*<-d> --(g^T)-->       (potential  w)
    sigma(M)    =  (M0, M1, -f, g)                             (potential -w)
"""

from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .module import (GradedFreeModule, GradedMatrix, PoincareSeries,
                     slice_homology_mod_w)
from .ring import GradedPoly, PolyRing, parse_poly


class MatrixFactorization:
    __slots__ = ("ring", "potential", "d", "M0", "M1", "f", "g")

    def __init__(self, ring: PolyRing, potential: GradedPoly, d: int,
                 M0: GradedFreeModule, M1: GradedFreeModule,
                 f: GradedMatrix, g: GradedMatrix):
        self.ring = ring
        self.potential = potential
        self.d = int(d)
        self.M0 = M0
        self.M1 = M1
        self.f = f
        self.g = g

    def __repr__(self):
        return (f"MF(w={self.potential}, ranks {self.M0.rank}|{self.M1.rank})")

    def shifted(self, j: int) -> "MatrixFactorization":
        return shift_mf(self, 0, j)


def validate_mf(M: MatrixFactorization) -> list:
    """Empty list when M is a genuine factorization of its potential;
    otherwise human-readable violations."""
    out = []
    if not M.potential.is_zero():
        dw = M.potential.homogeneous_degree()
        if dw is None:
            out.append("potential is inhomogeneous")
        elif dw != M.d:
            out.append(f"potential degree {dw} != declared d={M.d}")
    if M.f.degree != M.d:
        out.append(f"f has degree {M.f.degree}, expected {M.d}")
    if M.g.degree != 0:
        out.append(f"g has degree {M.g.degree}, expected 0")
    for name, mat in (("f", M.f), ("g", M.g)):
        for (i, j, want, got) in mat.homogeneity_violations():
            out.append(f"{name}[{i},{j}] has degree {got}, expected {want}")
    gf = M.g @ M.f
    fg = M.f @ M.g
    wid0 = GradedMatrix(M.M0, M.M0, M.d,
                        {(i, i): M.potential for i in range(M.M0.rank)})
    wid1 = GradedMatrix(M.M1, M.M1, M.d,
                        {(i, i): M.potential for i in range(M.M1.rank)})
    if (gf - wid0).entries:
        out.append("g f != w id on M0")
    if (fg - wid1).entries:
        out.append("f g != w id on M1")
    return out


# -- basic constructors -------------------------------------------------------


def zero_mf(ring: PolyRing, potential: GradedPoly, d: int) -> MatrixFactorization:
    z = GradedFreeModule(ring, [], [])
    return MatrixFactorization(ring, potential, d, z, z,
                               GradedMatrix.zero(z, z, d), GradedMatrix.zero(z, z, 0))


def trivial_mf(ring: PolyRing, d: int) -> MatrixFactorization:
    """S -> 0 -> S of potential 0 (the tensor unit)."""
    m0 = GradedFreeModule(ring, [0], ["1"])
    m1 = GradedFreeModule(ring, [], [])
    return MatrixFactorization(ring, ring.zero(), d, m0, m1,
                               GradedMatrix.zero(m0, m1, d),
                               GradedMatrix.zero(m1, m0, 0))


def elementary_koszul(x: GradedPoly, y: GradedPoly,
                      d: Optional[int] = None) -> MatrixFactorization:
    """{x, y}: S --y--> S<-deg x> --x--> S of potential xy.

    When one entry is zero the potential degree cannot be inferred and must
    be passed explicitly.
    """
    ring = x.ring
    dx = x.homogeneous_degree()
    dy = y.homogeneous_degree()
    if dx is None or dy is None:
        raise ValueError("Koszul data must be homogeneous")
    if d is None:
        if x.is_zero() or y.is_zero():
            raise ValueError("zero entry: pass the potential degree d")
        d = dx + dy
    if x.is_zero():
        dx = d - dy if not y.is_zero() else dx
    m0 = GradedFreeModule(ring, [0], [("1",)])
    m1 = GradedFreeModule(ring, [dx], [("e",)])
    f = GradedMatrix(m0, m1, d, {(0, 0): y})
    g = GradedMatrix(m1, m0, 0, {(0, 0): x})
    return MatrixFactorization(ring, x * y, d, m0, m1, f, g)


def tensor_mf(M: MatrixFactorization, N: MatrixFactorization) -> MatrixFactorization:
    if M.ring != N.ring:
        raise ValueError("tensor over different rings")
    if M.d != N.d:
        raise ValueError(f"potential degrees differ: {M.d} vs {N.d}")
    ring, d = M.ring, M.d
    P00 = M.M0.tensor(N.M0)
    P11 = M.M1.tensor(N.M1).shifted(d)
    P01 = M.M0.tensor(N.M1)
    P10 = M.M1.tensor(N.M0)
    P0 = P00.direct_sum(P11)
    P1 = P01.direct_sum(P10)

    id_M0 = GradedMatrix.identity(M.M0)
    id_M1 = GradedMatrix.identity(M.M1)
    id_N0 = GradedMatrix.identity(N.M0)
    id_N1 = GradedMatrix.identity(N.M1)

    f_blocks = [
        [id_M0.kron(N.f), M.g.kron(id_N1)],
        [M.f.kron(id_N0), id_M1.kron(N.g).scaled(-1)],
    ]
    g_blocks = [
        [id_M0.kron(N.g), M.g.kron(id_N0)],
        [M.f.kron(id_N1), id_M1.kron(N.f).scaled(-1)],
    ]
    f = GradedMatrix.block(P0, P1, d, f_blocks, [P01, P10], [P00, P11])
    g = GradedMatrix.block(P1, P0, 0, g_blocks, [P00, P11], [P01, P10])
    return MatrixFactorization(ring, M.potential + N.potential, d, P0, P1, f, g)


def koszul_factorization(xs: Sequence[GradedPoly], ys: Sequence[GradedPoly],
                         ring: Optional[PolyRing] = None,
                         d: Optional[int] = None) -> MatrixFactorization:
    """{x, y} := (x){x_i, y_i}, potential sum x_i y_i, rank 2^{l-1}|2^{l-1}."""
    if len(xs) != len(ys):
        raise ValueError("length mismatch between the two sequences")
    if not xs:
        if d is None or ring is None:
            raise ValueError("empty Koszul data needs a ring and a degree")
        return trivial_mf(ring, d)
    pieces = [elementary_koszul(x, y, d) for x, y in zip(xs, ys)]
    degs = {p.d for p in pieces}
    if len(degs) != 1:
        raise ValueError(f"mixed potential degrees {sorted(degs)}")
    out = pieces[0]
    for p in pieces[1:]:
        out = tensor_mf(out, p)
    return out


def direct_sum_mf(M: MatrixFactorization, N: MatrixFactorization) -> MatrixFactorization:
    if M.ring != N.ring or M.d != N.d or (M.potential - N.potential).terms:
        raise ValueError("direct sum needs equal ring and potential")
    P0 = M.M0.direct_sum(N.M0)
    P1 = M.M1.direct_sum(N.M1)
    f = GradedMatrix.block(P0, P1, M.d, [[M.f, None], [None, N.f]],
                           [M.M1, N.M1], [M.M0, N.M0])
    g = GradedMatrix.block(P1, P0, 0, [[M.g, None], [None, N.g]],
                           [M.M0, N.M0], [M.M1, N.M1])
    return MatrixFactorization(M.ring, M.potential, M.d, P0, P1, f, g)


def shift_mf(M: MatrixFactorization, cohomological: int = 0,
             internal: int = 0) -> MatrixFactorization:
    """[cohomological] then <internal>; [2] literally equals <d>."""
    out = M
    k = cohomological
    while k > 0:
        out = MatrixFactorization(
            out.ring, out.potential, out.d,
            out.M1.shifted(out.d), out.M0,
            out.g.scaled(-1).shifted(0, out.d),
            out.f.scaled(-1).shifted(out.d, 0))
        k -= 1
    while k < 0:
        out = MatrixFactorization(
            out.ring, out.potential, out.d,
            out.M1, out.M0.shifted(-out.d),
            out.g.scaled(-1).shifted(-out.d, 0),
            out.f.scaled(-1).shifted(0, -out.d))
        k += 1
    if internal:
        j = internal
        out = MatrixFactorization(
            out.ring, out.potential, out.d,
            out.M0.shifted(j), out.M1.shifted(j),
            out.f.shifted(j, j), out.g.shifted(j, j))
    return out


def cone_mf(phi: "MFMorphism") -> MatrixFactorization:
    """cone(alpha, beta): blocks (f' beta; 0 -g) and (g' alpha; 0 -f) on
    N0 + M1<d>  <-->  N1 + M0."""
    bad = check_morphism(phi)
    if bad:
        raise ValueError("cone of an invalid morphism: " + "; ".join(bad))
    M, N = phi.source, phi.target
    d = M.d
    C0 = N.M0.direct_sum(M.M1.shifted(d))
    C1 = N.M1.direct_sum(M.M0)
    f_blocks = [
        [N.f, phi.beta.shifted(0, d)],
        [None, M.g.scaled(-1).shifted(0, d)],
    ]
    g_blocks = [
        [N.g, phi.alpha],
        [None, M.f.scaled(-1).shifted(d, 0)],
    ]
    f = GradedMatrix.block(C0, C1, d, f_blocks, [N.M1, M.M0], [N.M0, M.M1.shifted(d)])
    g = GradedMatrix.block(C1, C0, 0, g_blocks, [N.M0, M.M1.shifted(d)], [N.M1, M.M0])
    return MatrixFactorization(M.ring, M.potential, d, C0, C1, f, g)


def sigma_mf(M: MatrixFactorization) -> MatrixFactorization:
    return MatrixFactorization(M.ring, -1 * M.potential, M.d, M.M0, M.M1,
                               M.f.scaled(-1), M.g)


def dualize(M: MatrixFactorization, kind: str) -> MatrixFactorization:
    """kind 'star': hom(M, S), potential -w; 'wdual': the Gorenstein dual,
    potential w; 'sigma': sign change, potential -w."""
    if kind == "sigma":
        return sigma_mf(M)
    ft = M.f.transpose()   # M1* -> M0*, degree d
    gt = M.g.transpose()   # M0* -> M1*, degree 0
    if kind == "star":
        m0 = M.M0.dual()
        m1 = M.M1.dual().shifted(-M.d)
        f = gt.scaled(-1).shifted(-M.d, 0)
        g = ft.shifted(0, -M.d)
        return MatrixFactorization(M.ring, -1 * M.potential, M.d, m0, m1, f, g)
    if kind == "wdual":
        m0 = M.M1.dual().shifted(-M.d)
        m1 = M.M0.dual().shifted(-M.d)
        f = ft.shifted(-M.d, -M.d)
        g = gt.shifted(-M.d, -M.d)
        return MatrixFactorization(M.ring, M.potential, M.d, m0, m1, f, g)
    raise ValueError(f"unknown duality kind {kind!r}")


def hom_factorization(M: MatrixFactorization, N: MatrixFactorization) -> MatrixFactorization:
    """hom(M, N): potential w_N - w_M; for finitely generated M canonically
    isomorphic to M* (x) N."""
    if M.ring != N.ring:
        raise ValueError("hom over different rings")
    if M.d != N.d:
        raise ValueError("potential degrees differ")
    ring, d = M.ring, M.d
    H00 = M.M0.dual().tensor(N.M0)
    H11 = M.M1.dual().tensor(N.M1)
    H01 = M.M0.dual().tensor(N.M1)
    H10 = M.M1.dual().tensor(N.M0).shifted(-d)
    H0 = H00.direct_sum(H11)
    H1 = H01.direct_sum(H10)

    idM0s = GradedMatrix.identity(M.M0.dual())
    idM1s = GradedMatrix.identity(M.M1.dual())
    idN0 = GradedMatrix.identity(N.M0)
    idN1 = GradedMatrix.identity(N.M1)
    fT = M.f.transpose()
    gT = M.g.transpose()

    post_f = idM0s.kron(N.f)                    # phi -> f' o phi
    pre_f = fT.kron(idN1)                       # phi -> phi o f
    post_g01 = idM0s.kron(N.g)                  # phi -> g' o phi
    pre_g = gT.kron(idN0)                       # phi -> phi o g
    post_g11 = idM1s.kron(N.g)
    post_f10 = idM1s.kron(N.f)
    pre_f00 = fT.kron(idN0)

    f_blocks = [
        [post_f, pre_f.scaled(-1)],
        [pre_g.scaled(-1).shifted(-d, 0), post_g11.shifted(-d, 0)],
    ]
    g_blocks = [
        [post_g01, pre_f00.shifted(0, -d)],
        [gT.kron(idN1), post_f10.shifted(0, -d)],
    ]
    f = GradedMatrix.block(H0, H1, d, f_blocks, [H01, H10], [H00, H11])
    g = GradedMatrix.block(H1, H0, 0, g_blocks, [H00, H11], [H01, H10])
    return MatrixFactorization(ring, N.potential - M.potential, d, H0, H1, f, g)


# -- morphisms and homotopies -------------------------------------------------


class MFMorphism:
    __slots__ = ("source", "target", "alpha", "beta")

    def __init__(self, source, target, alpha: GradedMatrix, beta: GradedMatrix):
        self.source = source
        self.target = target
        self.alpha = alpha
        self.beta = beta

    def __sub__(self, other):
        return MFMorphism(self.source, self.target,
                          self.alpha - other.alpha, self.beta - other.beta)

    def compose(self, other: "MFMorphism") -> "MFMorphism":
        """self after other."""
        return MFMorphism(other.source, self.target,
                          self.alpha @ other.alpha, self.beta @ other.beta)


class MFHomotopy:
    __slots__ = ("D0", "D1")

    def __init__(self, D0: GradedMatrix, D1: GradedMatrix):
        self.D0 = D0
        self.D1 = D1


def identity_morphism(M: MatrixFactorization) -> MFMorphism:
    return MFMorphism(M, M, GradedMatrix.identity(M.M0), GradedMatrix.identity(M.M1))


def zero_morphism(M: MatrixFactorization, N: MatrixFactorization) -> MFMorphism:
    return MFMorphism(M, N, GradedMatrix.zero(M.M0, N.M0, 0),
                      GradedMatrix.zero(M.M1, N.M1, 0))


def mult_morphism(M: MatrixFactorization, h: GradedPoly) -> MFMorphism:
    """Multiplication by a homogeneous h as a morphism M -> M<deg h>."""
    k = h.homogeneous_degree()
    tgt = shift_mf(M, 0, k)
    alpha = GradedMatrix(M.M0, tgt.M0, 0,
                         {(i, i): h for i in range(M.M0.rank)})
    beta = GradedMatrix(M.M1, tgt.M1, 0,
                        {(i, i): h for i in range(M.M1.rank)})
    return MFMorphism(M, tgt, alpha, beta)


def direct_sum_morphism(p: MFMorphism, q: MFMorphism) -> MFMorphism:
    src = direct_sum_mf(p.source, q.source)
    tgt = direct_sum_mf(p.target, q.target)
    alpha = GradedMatrix.block(src.M0, tgt.M0, 0, [[p.alpha, None], [None, q.alpha]],
                               [p.target.M0, q.target.M0], [p.source.M0, q.source.M0])
    beta = GradedMatrix.block(src.M1, tgt.M1, 0, [[p.beta, None], [None, q.beta]],
                              [p.target.M1, q.target.M1], [p.source.M1, q.source.M1])
    return MFMorphism(src, tgt, alpha, beta)


def check_morphism(phi: MFMorphism) -> list:
    """Empty list iff both squares commute and all degrees are 0."""
    out = []
    M, N = phi.source, phi.target
    if phi.alpha.degree != 0 or phi.beta.degree != 0:
        out.append("morphism components must have degree 0")
    for name, mat in (("alpha", phi.alpha), ("beta", phi.beta)):
        for (i, j, want, got) in mat.homogeneity_violations():
            out.append(f"{name}[{i},{j}] has degree {got}, expected {want}")
    if ((N.f @ phi.alpha) - (phi.beta @ M.f)).entries:
        out.append("first square fails: f' alpha != beta f")
    if ((N.g @ phi.beta) - (phi.alpha @ M.g)).entries:
        out.append("second square fails: g' beta != alpha g")
    return out


def homotopy_certifies(phi: MFMorphism, H: MFHomotopy) -> bool:
    """True iff H exhibits phi as nullhomotopic."""
    M, N = phi.source, phi.target
    eq1 = (N.g @ H.D0) + (H.D1 @ M.f) - phi.alpha
    eq2 = (N.f @ H.D1) + (H.D0 @ M.g) - phi.beta
    return not eq1.entries and not eq2.entries


class _MatrixSolver:
    """Linear solver for families of unknown homogeneous matrices subject to
    equations  sum_k  A_k @ U_{i_k} @ B_k  =  C."""

    def __init__(self, ring: PolyRing):
        self.ring = ring
        self.nvars = 0
        self.unknowns = []          # per handle: dict (i,j) -> [(exp, var)]
        self.shapes = []
        self.rows: dict = {}        # (eq, i, j, exp) -> {var: coeff}
        self.rhs: dict = {}

    def unknown(self, source: GradedFreeModule, target: GradedFreeModule,
                degree: int):
        table: dict = {}
        for i in range(target.rank):
            for j in range(source.rank):
                want = source.degrees[j] - target.degrees[i] + degree
                if want < 0:
                    continue
                monos = self.ring.monomials_of_degree(want)
                if not monos:
                    continue
                slots = []
                for e in monos:
                    slots.append((e, self.nvars))
                    self.nvars += 1
                table[(i, j)] = slots
        handle = len(self.unknowns)
        self.unknowns.append(table)
        self.shapes.append((source, target, degree))
        return handle

    def add_term(self, eq, A: Optional[GradedMatrix], handle: int,
                 B: Optional[GradedMatrix], sign=1):
        """Accumulate sign * A @ U @ B into equation eq (A or B may be None
        meaning identity)."""
        table = self.unknowns[handle]
        a_by_col: dict = {}
        if A is not None:
            for (r, p), poly in A.entries.items():
                a_by_col.setdefault(p, []).append((r, poly))
        b_by_row: dict = {}
        if B is not None:
            for (q, c), poly in B.entries.items():
                b_by_row.setdefault(q, []).append((c, poly))
        for (p, q), slots in table.items():
            lefts = a_by_col.get(p, [(p, None)]) if A is not None else [(p, None)]
            rights = b_by_row.get(q, [(q, None)]) if B is not None else [(q, None)]
            if A is not None and p not in a_by_col:
                continue
            if B is not None and q not in b_by_row:
                continue
            for r, ap in lefts:
                for c, bp in rights:
                    if ap is None and bp is None:
                        prod = None
                    elif ap is None:
                        prod = bp
                    elif bp is None:
                        prod = ap
                    else:
                        prod = ap * bp
                    for e, var in slots:
                        if prod is None:
                            key = (eq, r, c, e)
                            row = self.rows.setdefault(key, {})
                            row[var] = row.get(var, 0) + sign
                        else:
                            for pe, pc in prod.terms.items():
                                me = tuple(x + y for x, y in zip(pe, e))
                                key = (eq, r, c, me)
                                row = self.rows.setdefault(key, {})
                                s = row.get(var, 0) + sign * pc
                                if s:
                                    row[var] = s
                                else:
                                    del row[var]

    def add_const(self, eq, C: GradedMatrix, sign=1):
        for (i, j), poly in C.entries.items():
            for e, c in poly.terms.items():
                key = (eq, i, j, e)
                self.rhs[key] = self.rhs.get(key, 0) - sign * c

    def solve(self):
        keys = sorted(set(self.rows) | set(self.rhs))
        rows = [self.rows.get(k, {}) for k in keys]
        rhs = [Fraction(self.rhs.get(k, 0)) for k in keys]
        sol = linalg.solve(rows, rhs, self.nvars)
        if sol is None:
            return None
        return [self._materialize(h, sol) for h in range(len(self.unknowns))]

    def solution_space(self):
        """(one solution or None, kernel basis); used by the equivalence
        search to sweep the affine space of morphisms."""
        keys = sorted(set(self.rows) | set(self.rhs))
        rows = [self.rows.get(k, {}) for k in keys]
        rhs = [Fraction(self.rhs.get(k, 0)) for k in keys]
        sol = linalg.solve(rows, rhs, self.nvars)
        if sol is None:
            return None, []
        null = linalg.kernel_basis(rows, self.nvars)
        return sol, null

    def _materialize(self, handle, values):
        source, target, degree = self.shapes[handle]
        entries = {}
        for (i, j), slots in self.unknowns[handle].items():
            terms = {}
            for e, var in slots:
                if values[var]:
                    terms[e] = values[var]
            if terms:
                entries[(i, j)] = GradedPoly(self.ring, terms)
        return GradedMatrix(source, target, degree, entries)

    def materialize_all(self, values):
        return [self._materialize(h, values) for h in range(len(self.unknowns))]


def find_homotopy(phi: MFMorphism, psi: Optional[MFMorphism] = None) -> Optional[MFHomotopy]:
    """A homotopy certifying phi ~ psi (psi defaults to 0), or None.

    Entries of D0, D1 are homogeneous of degrees forced by the generator
    degrees, so the search space is the full finite-dimensional one and
    None is a definitive negative for finite factorizations.
    """
    M, N = phi.source, phi.target
    diff = phi if psi is None else phi - psi
    solver = _MatrixSolver(M.ring)
    hD0 = solver.unknown(M.M0, N.M1, 0)
    hD1 = solver.unknown(M.M1, N.M0, -M.d)
    # g' D0 + D1 f = alpha
    solver.add_term("a", N.g, hD0, None)
    solver.add_term("a", None, hD1, M.f)
    solver.add_const("a", diff.alpha, sign=-1)
    # f' D1 + D0 g = beta
    solver.add_term("b", N.f, hD1, None)
    solver.add_term("b", None, hD0, M.g)
    solver.add_const("b", diff.beta, sign=-1)
    sol = solver.solve()
    if sol is None:
        return None
    H = MFHomotopy(sol[0], sol[1])
    assert homotopy_certifies(diff, H)
    return H


# -- unit elimination and fingerprints ---------------------------------------


def _drop_index(module: GradedFreeModule, idx: int) -> GradedFreeModule:
    keep = [k for k in range(module.rank) if k != idx]
    return GradedFreeModule(module.ring, [module.degrees[k] for k in keep],
                            [module.labels[k] for k in keep])


def _unit_pivot(mat: GradedMatrix):
    """First entry (row-major) that is a nonzero rational constant."""
    best = None
    for (i, j), p in mat.entries.items():
        c = p.constant_term()
        if c and p.is_constant():
            if best is None or (i, j) < best[0]:
                best = ((i, j), c)
    return best


def _eliminate_in_g(M: MatrixFactorization, i0: int, j0: int,
                    c: Fraction) -> MatrixFactorization:
    """Split off the contractible summand through the unit entry g[i0,j0]."""
    g, f = M.g, M.f
    # source basis change on M1 clears row i0 of g; rows of f change along.
    col_ops = {}
    for (i, j), p in list(g.entries.items()):
        if i == i0 and j != j0:
            col_ops[j] = p * (1 / c)
    if col_ops:
        g_entries = dict(g.entries)
        for j, lam in col_ops.items():
            for (i, jj), p in list(g.entries.items()):
                if jj != j0:
                    continue
                key = (i, j)
                cur = g_entries.get(key, M.ring.zero())
                val = cur - p * lam
                if val.is_zero():
                    g_entries.pop(key, None)
                else:
                    g_entries[key] = val
        g = GradedMatrix(g.source, g.target, g.degree, g_entries)
        f_entries = dict(f.entries)
        for j, lam in col_ops.items():
            for (jj, k), p in list(f.entries.items()):
                if jj != j:
                    continue
                key = (j0, k)
                cur = f_entries.get(key, M.ring.zero())
                val = cur + p * lam
                if val.is_zero():
                    f_entries.pop(key, None)
                else:
                    f_entries[key] = val
        f = GradedMatrix(f.source, f.target, f.degree, f_entries)
    # target basis change on M0 clears column j0 of g; columns of f change.
    row_ops = {}
    for (i, j), p in list(g.entries.items()):
        if j == j0 and i != i0:
            row_ops[i] = p * (1 / c)
    if row_ops:
        g_entries = dict(g.entries)
        for i, mu in row_ops.items():
            for (ii, j), p in list(g.entries.items()):
                if ii != i0:
                    continue
                key = (i, j)
                cur = g_entries.get(key, M.ring.zero())
                val = cur - mu * p
                if val.is_zero():
                    g_entries.pop(key, None)
                else:
                    g_entries[key] = val
        g = GradedMatrix(g.source, g.target, g.degree, g_entries)
        f_entries = dict(f.entries)
        for i, mu in row_ops.items():
            for (k, ii), p in list(f.entries.items()):
                if ii != i:
                    continue
                key = (k, i0)
                cur = f_entries.get(key, M.ring.zero())
                val = cur + p * mu
                if val.is_zero():
                    f_entries.pop(key, None)
                else:
                    f_entries[key] = val
        f = GradedMatrix(f.source, f.target, f.degree, f_entries)
    # the complementary blocks of f vanish identically now; drop the pair.
    for (k, ii) in f.entries:
        if ii == i0 and k != j0:
            raise AssertionError("f column not cleared; invariant broken")
        if k == j0 and ii != i0:
            raise AssertionError("f row not cleared; invariant broken")
    new_M0 = _drop_index(M.M0, i0)
    new_M1 = _drop_index(M.M1, j0)

    def strip(mat, quot_i, quot_j, src, tgt):
        entries = {}
        for (i, j), p in mat.entries.items():
            if i == quot_i or j == quot_j:
                continue
            ni = i - (1 if i > quot_i else 0)
            nj = j - (1 if j > quot_j else 0)
            entries[(ni, nj)] = p
        return GradedMatrix(src, tgt, mat.degree, entries)

    g2 = strip(g, i0, j0, new_M1, new_M0)
    f2 = strip(f, j0, i0, new_M0, new_M1)
    return MatrixFactorization(M.ring, M.potential, M.d, new_M0, new_M1, f2, g2)


def reduce_mf(M: MatrixFactorization) -> MatrixFactorization:
    """Homotopy-equivalent factorization with no constant entries left;
    deterministic (first unit in row-major order of g, then f) and
    idempotent."""
    cur = M
    while True:
        hit = _unit_pivot(cur.g)
        if hit is not None:
            (i0, j0), c = hit
            cur = _eliminate_in_g(cur, i0, j0, c)
            continue
        hit = _unit_pivot(cur.f)
        if hit is not None:
            (i0, j0), c = hit
            flipped = MatrixFactorization(cur.ring, cur.potential, cur.d,
                                          cur.M1, cur.M0, cur.g, cur.f)
            flipped = _eliminate_in_g(flipped, i0, j0, c)
            cur = MatrixFactorization(cur.ring, cur.potential, cur.d,
                                      flipped.M1, flipped.M0,
                                      flipped.g, flipped.f)
            continue
        return cur


class MFFingerprint:
    """Graded ranks of the unit-eliminated form.  Equal fingerprints are
    necessary but not sufficient for homotopy equivalence."""

    __slots__ = ("rank0", "rank1")

    def __init__(self, rank0: PoincareSeries, rank1: PoincareSeries):
        self.rank0 = rank0
        self.rank1 = rank1

    def __eq__(self, other):
        return (isinstance(other, MFFingerprint)
                and self.rank0 == other.rank0 and self.rank1 == other.rank1)

    def __repr__(self):
        return f"fingerprint(M0: {self.rank0}; M1: {self.rank1})"

    def to_json(self):
        return {"m0": self.rank0.to_json(), "m1": self.rank1.to_json()}


def fingerprint(M: MatrixFactorization) -> MFFingerprint:
    R = reduce_mf(M)
    return MFFingerprint(R.M0.graded_rank(), R.M1.graded_rank())


# -- folded 2-periodic cohomology --------------------------------------------


def folded_cohomology(M: MatrixFactorization, lo: int, hi: int):
    """Graded dimensions of the two cohomologies of the 2-periodic complex
    obtained from M over S/(w), in internal degrees lo..hi.

    H0 at degree t:  ker(f: M0_t -> M1_{t+d}) / im(g: M1_t -> M0_t)
    H1 at degree t:  ker(g: M1_t -> M0_t) / im(f: M0_{t-d} -> M1_t)
    """
    if hi < lo:
        raise ValueError("empty window")
    w = M.potential
    h0: dict = {}
    h1: dict = {}
    for t in range(lo, hi + 1):
        v0 = slice_homology_mod_w(M.g, M.f, w, t)
        if v0:
            h0[t] = v0
        v1 = slice_homology_mod_w(M.f, M.g, w, t)
        if v1:
            h1[t] = v1
    return PoincareSeries(h0), PoincareSeries(h1)


# -- normalization, equality, explicit equivalence ----------------------------


def _label_key(label):
    return json.dumps(label, default=str) if not isinstance(label, str) else label


def normalize_mf(M: MatrixFactorization) -> MatrixFactorization:
    """Sort generators by (degree, label); matrices follow by conjugation
    with the permutation (no signs involved)."""
    p0 = sorted(range(M.M0.rank),
                key=lambda i: (M.M0.degrees[i], _label_key(M.M0.labels[i]), i))
    p1 = sorted(range(M.M1.rank),
                key=lambda i: (M.M1.degrees[i], _label_key(M.M1.labels[i]), i))
    f = M.f.permuted(p1, p0)
    g = M.g.permuted(p0, p1)
    return MatrixFactorization(M.ring, M.potential, M.d, f.source, f.target, f, g)


def mf_equal(M: MatrixFactorization, N: MatrixFactorization,
             up_to_permutation: bool = True) -> bool:
    """Literal equality of normalized data; optionally also up to a
    degree-preserving permutation of generators when labels disagree."""
    if M.ring != N.ring or M.d != N.d or (M.potential - N.potential).terms:
        return False
    a, b = normalize_mf(M), normalize_mf(N)
    if (a.M0.degrees == b.M0.degrees and a.M1.degrees == b.M1.degrees
            and a.f.entries == b.f.entries and a.g.entries == b.g.entries):
        return True
    if not up_to_permutation:
        return False
    if sorted(a.M0.degrees) != sorted(b.M0.degrees) or \
            sorted(a.M1.degrees) != sorted(b.M1.degrees):
        return False
    return _permutation_match(a, b)


def _blocks_by_degree(degrees):
    blocks: dict = {}
    for i, d in enumerate(degrees):
        blocks.setdefault(d, []).append(i)
    return blocks

def _permutation_match(a: MatrixFactorization, b: MatrixFactorization,
                       budget: int = 200000) -> bool:
    """Search degree-preserving generator permutations making the matrices
    literally equal.  Sizes here are small (reduced or desk-scale objects)."""
    blocks0 = _blocks_by_degree(a.M0.degrees)
    blocks1 = _blocks_by_degree(a.M1.degrees)
    tblocks0 = _blocks_by_degree(b.M0.degrees)
    tblocks1 = _blocks_by_degree(b.M1.degrees)
    if set(blocks0) != set(tblocks0) or set(blocks1) != set(tblocks1):
        return False

    def perms_for(blocks, tblocks):
        degs = sorted(blocks)
        pools = [list(itertools.permutations(tblocks[d])) for d in degs]
        return degs, pools

    degs0, pools0 = perms_for(blocks0, tblocks0)
    degs1, pools1 = perms_for(blocks1, tblocks1)
    count = 1
    for p in pools0 + pools1:
        count *= len(p)
        if count > budget:
            return _randomized_iso_check(a, b)

    for choice0 in itertools.product(*pools0):
        perm0 = [0] * a.M0.rank
        for d, assignment in zip(degs0, choice0):
            for src, dst in zip(blocks0[d], assignment):
                perm0[src] = dst
        for choice1 in itertools.product(*pools1):
            perm1 = [0] * a.M1.rank
            for d, assignment in zip(degs1, choice1):
                for src, dst in zip(blocks1[d], assignment):
                    perm1[src] = dst
            ok = all(b.f.entry(perm1[i], perm0[j]) == p
                     for (i, j), p in a.f.entries.items()) \
                and len(a.f.entries) == len(b.f.entries) \
                and all(b.g.entry(perm0[i], perm1[j]) == p
                        for (i, j), p in a.g.entries.items()) \
                and len(a.g.entries) == len(b.g.entries)
            if ok:
                return True
    return False


def _randomized_iso_check(a, b):
    # fallback for implausibly large permutation groups: treat as unequal;
    # callers needing more use find_equivalence.
    return False


class EquivalenceCertificate:
    """Explicit homotopy-equivalence certificate: an isomorphism between
    the unit-eliminated forms, with exact two-sided inverse."""

    __slots__ = ("reduced_source", "reduced_target", "iso", "inverse")

    def __init__(self, reduced_source, reduced_target, iso, inverse):
        self.reduced_source = reduced_source
        self.reduced_target = reduced_target
        self.iso = iso
        self.inverse = inverse

    def verify(self) -> bool:
        if check_morphism(self.iso) or check_morphism(self.inverse):
            return False
        comp = self.inverse.compose(self.iso)
        ident = identity_morphism(self.reduced_source)
        if (comp.alpha - ident.alpha).entries or (comp.beta - ident.beta).entries:
            return False
        comp = self.iso.compose(self.inverse)
        ident = identity_morphism(self.reduced_target)
        return not (comp.alpha - ident.alpha).entries \
            and not (comp.beta - ident.beta).entries


def find_equivalence(M: MatrixFactorization, N: MatrixFactorization,
                     attempts: int = 64, seed: int = 7) -> Optional[EquivalenceCertificate]:
    """Search an explicit homotopy equivalence M ~ N.

    Both sides are unit-eliminated first; for reduced factorizations over a
    graded local ring homotopy equivalence is isomorphism, and a morphism is
    invertible iff its constant diagonal blocks are.  The space of morphisms
    is a finite-dimensional rational affine space, so we scan it for a
    member with invertible constant blocks and invert exactly.
    """
    A = reduce_mf(M)
    B = reduce_mf(N)
    if A.M0.graded_rank() != B.M0.graded_rank() or \
            A.M1.graded_rank() != B.M1.graded_rank():
        return None
    if A.M0.rank == 0 and A.M1.rank == 0:
        return EquivalenceCertificate(A, B, zero_morphism(A, B), zero_morphism(B, A))

    solver = _MatrixSolver(A.ring)
    ua = solver.unknown(A.M0, B.M0, 0)
    ub = solver.unknown(A.M1, B.M1, 0)
    solver.add_term("sq1", B.f, ua, None)
    solver.add_term("sq1", None, ub, A.f, sign=-1)
    solver.add_term("sq2", B.g, ub, None)
    solver.add_term("sq2", None, ua, A.g, sign=-1)
    base, null = solver.solution_space()
    if base is None:
        return None

    rng = random.Random(seed)
    nv = solver.nvars
    candidates = [base]
    if null:
        summed = [base[i] + sum(v[i] for v in null) for i in range(nv)]
        candidates.append(summed)
    for _ in range(attempts):
        vec = list(base)
        for v in null:
            c = Fraction(rng.randint(-3, 3))
            if c:
                for i in range(nv):
                    vec[i] += c * v[i]
        candidates.append(vec)

    for vec in candidates:
        alpha, beta = solver.materialize_all(vec)
        inv = _invert_iso(A, B, alpha, beta)
        if inv is None:
            continue
        iso = MFMorphism(A, B, alpha, beta)
        cert = EquivalenceCertificate(A, B, iso, inv)
        if cert.verify():
            return cert
    return None


def _constant_block_invertible(mat: GradedMatrix) -> bool:
    """Invertibility of a degree-0 map of graded free modules over the
    graded local ring: each equal-degree constant block must be invertible
    (the matrix is block triangular in degree order)."""
    src_blocks = _blocks_by_degree(mat.source.degrees)
    tgt_blocks = _blocks_by_degree(mat.target.degrees)
    if {d: len(v) for d, v in src_blocks.items()} != \
            {d: len(v) for d, v in tgt_blocks.items()}:
        return False
    for d, cols in src_blocks.items():
        rows_idx = tgt_blocks[d]
        rows = []
        for i in rows_idx:
            row = {}
            for cpos, j in enumerate(cols):
                p = mat.entry(i, j)
                c = p.constant_term()
                if c:
                    row[cpos] = c
            rows.append(row)
        if linalg.rank(rows) != len(cols):
            return False
    return True


def _invert_iso(A, B, alpha, beta):
    """Exact inverse morphism of (alpha, beta) when invertible, else None."""
    if not (_constant_block_invertible(alpha) and _constant_block_invertible(beta)):
        return None
    inv_alpha = _invert_graded(alpha)
    inv_beta = _invert_graded(beta)
    if inv_alpha is None or inv_beta is None:
        return None
    psi = MFMorphism(B, A, inv_alpha, inv_beta)
    if check_morphism(psi):
        return None
    return psi


def _invert_graded(mat: GradedMatrix) -> Optional[GradedMatrix]:
    """Inverse of a degree-0 isomorphism of graded free modules, computed
    degree block by degree block via graded back substitution."""
    src = mat.source
    tgt = mat.target
    n = src.rank
    if n != tgt.rank:
        return None
    ring = src.ring
    # unknown X with mat @ X = id;  X: tgt -> src of degree 0.
    solver = _MatrixSolver(ring)
    ux = solver.unknown(tgt, src, 0)
    solver.add_term("inv", mat, ux, None)
    ident = GradedMatrix.identity(tgt)
    solver.add_const("inv", ident, sign=-1)
    sol = solver.solve()
    if sol is None:
        return None
    X = sol[0]
    if ((mat @ X) - ident).entries:
        return None
    if ((X @ mat) - GradedMatrix.identity(src)).entries:
        return None
    return X


# -- serialization ------------------------------------------------------------


def mf_to_json(M: MatrixFactorization) -> dict:
    def entries(mat):
        return {f"{i},{j}": str(p) for (i, j), p in sorted(mat.entries.items())}

    return {
        "ring": {"variables": list(M.ring.names), "degrees": list(M.ring.degrees)},
        "potential": str(M.potential),
        "potential_degree": M.d,
        "m0_degrees": list(M.M0.degrees),
        "m1_degrees": list(M.M1.degrees),
        "f_entries": entries(M.f),
        "g_entries": entries(M.g),
    }


def mf_from_json(data: dict) -> MatrixFactorization:
    ring = PolyRing(data["ring"]["variables"], data["ring"]["degrees"])
    M0 = GradedFreeModule(ring, data["m0_degrees"])
    M1 = GradedFreeModule(ring, data["m1_degrees"])

    def read(raw, source, target, degree):
        entries = {}
        for key, text in raw.items():
            i, j = (int(x) for x in key.split(","))
            entries[(i, j)] = parse_poly(text, ring)
        return GradedMatrix(source, target, degree, entries)

    d = int(data["potential_degree"])
    f = read(data["f_entries"], M0, M1, d)
    g = read(data["g_entries"], M1, M0, 0)
    return MatrixFactorization(ring, parse_poly(data["potential"], ring), d,
                               M0, M1, f, g)
