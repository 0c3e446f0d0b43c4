"""Modules over the two-term Koszul dg-algebra K_w = (S<-d> --w--> S).

A K_w-module is a bounded complex of graded free modules together with a
square-zero nullhomotopy s for the multiplication by w:

    d: M^n -> M^{n+1}   internal degree 0,  d^2 = 0
    s: M^n -> M^{n-1}   internal degree d,  s^2 = 0,  ds + sd = w id.

fold / iota pass between such complexes and matrix factorizations; the
truncated Bar resolution gives the eventually 2-periodic free resolution
over S/(w); D is the componentwise duality matching the w-dual under fold.
"""

from __future__ import annotations

from typing import Dict, Optional

from .matfac import MatrixFactorization, MFMorphism
from .module import GradedFreeModule, GradedMatrix, slice_homology_mod_w
from .ring import GradedPoly, PolyRing


class KwModule:
    """terms: cohomological degree -> free module (bounded); diff[n]: n->n+1;
    s[n]: n->n-1."""

    __slots__ = ("ring", "potential", "d", "terms", "diff", "s")

    def __init__(self, ring: PolyRing, potential: GradedPoly, d: int,
                 terms: Dict[int, GradedFreeModule],
                 diff: Dict[int, GradedMatrix],
                 s: Dict[int, GradedMatrix]):
        self.ring = ring
        self.potential = potential
        self.d = int(d)
        self.terms = {n: m for n, m in terms.items() if m.rank}
        self.diff = {n: m for n, m in diff.items() if not m.is_zero()}
        self.s = {n: m for n, m in s.items() if not m.is_zero()}

    def term(self, n: int) -> GradedFreeModule:
        got = self.terms.get(n)
        if got is None:
            return GradedFreeModule(self.ring, [], [])
        return got

    def diff_at(self, n: int) -> GradedMatrix:
        got = self.diff.get(n)
        if got is None:
            return GradedMatrix.zero(self.term(n), self.term(n + 1), 0)
        return got

    def s_at(self, n: int) -> GradedMatrix:
        got = self.s.get(n)
        if got is None:
            return GradedMatrix.zero(self.term(n), self.term(n - 1), self.d)
        return got

    def degrees(self) -> list:
        return sorted(self.terms)

    def __repr__(self):
        ranks = {n: self.terms[n].rank for n in self.degrees()}
        return f"KwModule(w={self.potential}, ranks={ranks})"


class KwMorphism:
    __slots__ = ("source", "target", "maps")

    def __init__(self, source: KwModule, target: KwModule,
                 maps: Dict[int, GradedMatrix]):
        self.source = source
        self.target = target
        self.maps = {n: m for n, m in maps.items() if not m.is_zero()}

    def map_at(self, n: int) -> GradedMatrix:
        got = self.maps.get(n)
        if got is None:
            return GradedMatrix.zero(self.source.term(n), self.target.term(n), 0)
        return got


def validate_kw(M: KwModule) -> list:
    """The three defining identities as exact polynomial identities."""
    out = []
    lo = min(M.terms, default=0)
    hi = max(M.terms, default=0)
    for n in range(lo - 1, hi + 2):
        dmat = M.diff_at(n)
        if dmat.degree != 0:
            out.append(f"diff[{n}] has internal degree {dmat.degree}")
        for (i, j, want, got) in dmat.homogeneity_violations():
            out.append(f"diff[{n}][{i},{j}] degree {got}, expected {want}")
        smat = M.s_at(n)
        if smat.degree != M.d:
            out.append(f"s[{n}] has internal degree {smat.degree}, expected {M.d}")
        for (i, j, want, got) in smat.homogeneity_violations():
            out.append(f"s[{n}][{i},{j}] degree {got}, expected {want}")
        if (M.diff_at(n + 1) @ dmat).entries:
            out.append(f"d^2 != 0 out of degree {n}")
        if (M.s_at(n - 1) @ smat).entries:
            out.append(f"s^2 != 0 out of degree {n}")
        anti = (M.s_at(n + 1) @ dmat) + (M.diff_at(n - 1) @ smat)
        wid = GradedMatrix(M.term(n), M.term(n), M.d,
                           {(i, i): M.potential for i in range(M.term(n).rank)})
        if (anti - wid).entries:
            out.append(f"ds + sd != w id on degree {n}")
    return out


def validate_kw_morphism(phi: KwMorphism) -> list:
    out = []
    M, N = phi.source, phi.target
    lo = min(list(M.terms) + list(N.terms), default=0) - 1
    hi = max(list(M.terms) + list(N.terms), default=0) + 1
    for n in range(lo, hi + 1):
        f_n = phi.map_at(n)
        if ((N.diff_at(n) @ f_n) - (phi.map_at(n + 1) @ M.diff_at(n))).entries:
            out.append(f"does not commute with d at degree {n}")
        if ((N.s_at(n) @ f_n) - (phi.map_at(n - 1) @ M.s_at(n))).entries:
            out.append(f"does not commute with s at degree {n}")
    return out


# -- fold and iota -------------------------------------------------------------


def fold(M: KwModule) -> MatrixFactorization:
    """(+)_n M^{2n}<-nd>  <-->  (+)_n M^{2n-1}<-nd> with both maps d + s."""
    degs = M.degrees()
    if not degs:
        z = GradedFreeModule(M.ring, [], [])
        return MatrixFactorization(M.ring, M.potential, M.d, z, z,
                                   GradedMatrix.zero(z, z, M.d),
                                   GradedMatrix.zero(z, z, 0))
    evens = sorted((n for n in degs if n % 2 == 0), reverse=True)
    odds = sorted((n for n in degs if n % 2 != 0), reverse=True)
    even_mods = [M.term(n).shifted(-(n // 2) * M.d) for n in evens]
    odd_mods = [M.term(n).shifted(-((n + 1) // 2) * M.d) for n in odds]
    P0 = _dsum(M.ring, even_mods)
    P1 = _dsum(M.ring, odd_mods)
    e_pos = {n: k for k, n in enumerate(evens)}
    o_pos = {n: k for k, n in enumerate(odds)}
    e_off = _offsets(even_mods)
    o_off = _offsets(odd_mods)

    f_entries: dict = {}
    g_entries: dict = {}
    for n in degs:
        if n % 2 == 0:
            src_off = e_off[e_pos[n]]
            dmat = M.diff_at(n)     # n -> n+1 (odd)
            if n + 1 in o_pos:
                tgt = o_off[o_pos[n + 1]]
                for (i, j), p in dmat.entries.items():
                    f_entries[(tgt + i, src_off + j)] = p
            smat = M.s_at(n)        # n -> n-1 (odd)
            if n - 1 in o_pos:
                tgt = o_off[o_pos[n - 1]]
                for (i, j), p in smat.entries.items():
                    f_entries[(tgt + i, src_off + j)] = p
        else:
            src_off = o_off[o_pos[n]]
            dmat = M.diff_at(n)     # n -> n+1 (even)
            if n + 1 in e_pos:
                tgt = e_off[e_pos[n + 1]]
                for (i, j), p in dmat.entries.items():
                    g_entries[(tgt + i, src_off + j)] = p
            smat = M.s_at(n)
            if n - 1 in e_pos:
                tgt = e_off[e_pos[n - 1]]
                for (i, j), p in smat.entries.items():
                    g_entries[(tgt + i, src_off + j)] = p
    f = GradedMatrix(P0, P1, M.d, f_entries)
    g = GradedMatrix(P1, P0, 0, g_entries)
    return MatrixFactorization(M.ring, M.potential, M.d, P0, P1, f, g)


def _dsum(ring, mods):
    out = GradedFreeModule(ring, [], [])
    for m in mods:
        out = out.direct_sum(m)
    return out


def _offsets(mods):
    off = [0]
    for m in mods:
        off.append(off[-1] + m.rank)
    return off[:-1]


def fold_morphism(phi: KwMorphism) -> MFMorphism:
    """fold on morphisms: even components give alpha, odd give beta."""
    M, N = phi.source, phi.target
    FM, FN = fold(M), fold(N)

    def assemble(parity):
        degs_src = sorted((n for n in M.degrees() if n % 2 == parity), reverse=True)
        degs_tgt = sorted((n for n in N.degrees() if n % 2 == parity), reverse=True)
        src_mods = [M.term(n) for n in degs_src]
        tgt_mods = [N.term(n) for n in degs_tgt]
        src_off = dict(zip(degs_src, _offsets(src_mods)))
        tgt_off = dict(zip(degs_tgt, _offsets(tgt_mods)))
        entries = {}
        for n in degs_src:
            if n not in tgt_off:
                if phi.maps.get(n) is not None and phi.maps[n].entries:
                    raise ValueError("morphism hits a missing target term")
                continue
            comp = phi.map_at(n)
            for (i, j), p in comp.entries.items():
                entries[(tgt_off[n] + i, src_off[n] + j)] = p
        return entries

    alpha = GradedMatrix(FM.M0, FN.M0, 0, assemble(0))
    beta = GradedMatrix(FM.M1, FN.M1, 0, assemble(1))
    return MFMorphism(FM, FN, alpha, beta)


def iota(M: MatrixFactorization) -> KwModule:
    """Two-term module 0 -> M1 -> M0 -> 0 with d = g and s = f;
    fold(iota(M)) = M on the nose."""
    terms = {}
    if M.M1.rank:
        terms[-1] = M.M1
    if M.M0.rank:
        terms[0] = M.M0
    return KwModule(M.ring, M.potential, M.d, terms,
                    {-1: M.g}, {0: M.f})


# -- shifts, cones, tensor -----------------------------------------------------


def shift_kw(M: KwModule, k: int = 1) -> KwModule:
    """[k]: term n becomes old term n+k; both d and s pick up the sign
    (-1)^k (the module structure on M[1] twists the K_w-action)."""
    sign = -1 if k % 2 else 1
    terms = {n - k: m for n, m in M.terms.items()}
    diff = {n - k: m.scaled(sign) for n, m in M.diff.items()}
    s = {n - k: m.scaled(sign) for n, m in M.s.items()}
    return KwModule(M.ring, M.potential, M.d, terms, diff, s)


def shift_internal_kw(M: KwModule, j: int) -> KwModule:
    terms = {n: m.shifted(j) for n, m in M.terms.items()}
    diff = {n: m.shifted(j, j) for n, m in M.diff.items()}
    s = {n: m.shifted(j, j) for n, m in M.s.items()}
    return KwModule(M.ring, M.potential, M.d, terms, diff, s)


def cone_kw(phi: KwMorphism) -> KwModule:
    """cone(phi)^n = N^n + M^{n+1}, d = (d_N, phi; 0, -d_M), s likewise."""
    M, N = phi.source, phi.target
    degs = sorted(set(N.degrees()) | {n - 1 for n in M.degrees()})
    terms = {n: N.term(n).direct_sum(M.term(n + 1)) for n in degs}
    diff = {}
    s = {}
    for n in degs:
        tgt = terms.get(n + 1, GradedFreeModule(M.ring, [], []))
        blocks = [
            [N.diff_at(n), phi.map_at(n + 1)],
            [None, M.diff_at(n + 1).scaled(-1)],
        ]
        diff[n] = GradedMatrix.block(terms[n], tgt, 0, blocks,
                                     [N.term(n + 1), M.term(n + 2)],
                                     [N.term(n), M.term(n + 1)])
        tgt_s = terms.get(n - 1, GradedFreeModule(M.ring, [], []))
        blocks_s = [
            [N.s_at(n), GradedMatrix.zero(M.term(n + 1), N.term(n - 1), M.d)],
            [None, M.s_at(n + 1).scaled(-1)],
        ]
        s[n] = GradedMatrix.block(terms[n], tgt_s, M.d, blocks_s,
                                  [N.term(n - 1), M.term(n)],
                                  [N.term(n), M.term(n + 1)])
    return KwModule(M.ring, M.potential, M.d, terms, diff, s)


def tensor_kw(A: KwModule, B: KwModule) -> KwModule:
    """Tensor complex with d and s both spread by the Koszul rule
    (x (x) y |-> dx (x) y + (-1)^{|x|} x (x) dy); potential adds."""
    if A.ring != B.ring or A.d != B.d:
        raise ValueError("tensor_kw needs equal rings and potential degrees")
    ring, d = A.ring, A.d
    pairs: dict = {}
    for p in A.degrees():
        for q in B.degrees():
            pairs.setdefault(p + q, []).append((p, q))
    for n in pairs:
        pairs[n].sort(key=lambda pq: -pq[0])
    terms = {}
    offset = {}
    for n, pq in pairs.items():
        mods = [A.term(p).tensor(B.term(q)) for (p, q) in pq]
        terms[n] = _dsum(ring, mods)
        offset[n] = dict(zip(pq, _offsets(mods)))

    def build(n, delta, use_s):
        tgt_n = n + delta
        if tgt_n not in pairs:
            return None
        entries = {}
        for (p, q) in pairs[n]:
            src_off = offset[n][(p, q)]
            a_mod, b_mod = A.term(p), B.term(q)
            # act on the A factor
            amat = (A.s_at(p) if use_s else A.diff_at(p))
            key = (p + delta, q)
            if key in offset[tgt_n] and amat.entries:
                blk = amat.kron(GradedMatrix.identity(b_mod))
                tgt_off = offset[tgt_n][key]
                for (i, j), poly in blk.entries.items():
                    entries[(tgt_off + i, src_off + j)] = poly
            # act on the B factor, Koszul sign (-1)^p
            bmat = (B.s_at(q) if use_s else B.diff_at(q))
            key = (p, q + delta)
            if key in offset[tgt_n] and bmat.entries:
                sign = -1 if p % 2 else 1
                blk = GradedMatrix.identity(a_mod).kron(bmat.scaled(sign))
                tgt_off = offset[tgt_n][key]
                for (i, j), poly in blk.entries.items():
                    s_val = entries.get((tgt_off + i, src_off + j))
                    val = poly if s_val is None else s_val + poly
                    if val.is_zero():
                        entries.pop((tgt_off + i, src_off + j), None)
                    else:
                        entries[(tgt_off + i, src_off + j)] = val
        tgt = terms.get(tgt_n, GradedFreeModule(ring, [], []))
        deg = d if use_s else 0
        return GradedMatrix(terms[n], tgt, deg, entries)

    diff = {}
    s = {}
    for n in pairs:
        dmat = build(n, +1, use_s=False)
        if dmat is not None:
            diff[n] = dmat
        smat = build(n, -1, use_s=True)
        if smat is not None:
            s[n] = smat
    return KwModule(ring, A.potential + B.potential, d, terms, diff, s)


# -- Bar resolution ------------------------------------------------------------


def bar_truncate(M: KwModule, depth: int):
    """Truncated Bar resolution Q = K_w (x) S[t] (x) M with t-power <= depth,
    together with the comparison morphism Q -> M.

    Components are indexed by (h, k) with h in {0, -1} (the K_w factor,
    h = -1 meaning the generator s of internal degree d) and t-power k;
    the component (h, k) sits in cohomological degree h - 2k + *.
    The differential of 1 (x) t^k (x) m is
        1 (x) t^k (x) dm  -  s (x) t^{k-1} (x) m  +  1 (x) t^{k-1} (x) sm
    and of s (x) t^k (x) m is
        w (x) t^k (x) m  -  s (x) t^k (x) dm  -  s (x) t^{k-1} (x) sm;
    the module structure multiplies on the K_w factor.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    ring, d = M.ring, M.d
    degs = M.degrees()
    comps: dict = {}   # n -> list of (h, k, j)
    for j in degs:
        for k in range(depth + 1):
            for h in (0, -1):
                n = h - 2 * k + j
                comps.setdefault(n, []).append((h, k, j))
    for n in comps:
        comps[n].sort(key=lambda hkj: (hkj[1], -hkj[0], hkj[2]))

    def comp_module(h, k, j):
        # K^h contributes <-d> for h = -1 (its generator has degree d);
        # t^k contributes generator degree k d.
        extra = k * d + (d if h == -1 else 0)
        base = M.term(j)
        return GradedFreeModule(ring, [dd + extra for dd in base.degrees],
                                [(("s" if h == -1 else "1"), k, l)
                                 for l in base.labels])

    terms = {}
    offset = {}
    for n, lst in comps.items():
        mods = [comp_module(*hkj) for hkj in lst]
        terms[n] = _dsum(ring, mods)
        offset[n] = dict(zip(lst, _offsets(mods)))

    def place(entries, n_tgt, key_tgt, block, src_off):
        if key_tgt not in offset.get(n_tgt, {}):
            return
        tgt_off = offset[n_tgt][key_tgt]
        for (i, j), poly in block.entries.items():
            k = (tgt_off + i, src_off + j)
            cur = entries.get(k)
            val = poly if cur is None else cur + poly
            if val.is_zero():
                entries.pop(k, None)
            else:
                entries[k] = val

    diff = {}
    s = {}
    for n, lst in comps.items():
        d_entries: dict = {}
        s_entries: dict = {}
        for (h, k, j) in lst:
            src_off = offset[n][(h, k, j)]
            dmat = M.diff_at(j)
            smat = M.s_at(j)
            ident = GradedMatrix.identity(M.term(j))
            if h == 0:
                place(d_entries, n + 1, (0, k, j + 1), dmat, src_off)
                place(d_entries, n + 1, (-1, k - 1, j), ident.scaled(-1), src_off)
                place(d_entries, n + 1, (0, k - 1, j - 1), smat, src_off)
                # s-action: multiply by s in K_w
                place(s_entries, n - 1, (-1, k, j), ident, src_off)
            else:
                wmat = GradedMatrix(M.term(j), M.term(j), d,
                                    {(i, i): M.potential
                                     for i in range(M.term(j).rank)})
                place(d_entries, n + 1, (0, k, j), wmat, src_off)
                place(d_entries, n + 1, (-1, k, j + 1), dmat.scaled(-1), src_off)
                place(d_entries, n + 1, (-1, k - 1, j - 1), smat.scaled(-1), src_off)
                # s * s = 0: no s-action out of h = -1
        tgt = terms.get(n + 1, GradedFreeModule(ring, [], []))
        diff[n] = GradedMatrix(terms[n], tgt, 0, d_entries)
        tgt_s = terms.get(n - 1, GradedFreeModule(ring, [], []))
        s[n] = GradedMatrix(terms[n], tgt_s, d, s_entries)

    Q = KwModule(ring, M.potential, d, terms, diff, s)

    maps = {}
    for n, lst in comps.items():
        entries = {}
        for (h, k, j) in lst:
            if k != 0:
                continue
            src_off = offset[n][(h, k, j)]
            if h == 0 and j == n:
                for i in range(M.term(j).rank):
                    entries[(i, src_off + i)] = ring.one()
            elif h == -1 and j == n + 1:
                smat = M.s_at(j)
                for (i, jj), poly in smat.entries.items():
                    entries[(i, src_off + jj)] = poly
        maps[n] = GradedMatrix(terms[n], M.term(n), 0, entries)
    compare = KwMorphism(Q, M, maps)
    return Q, compare


# -- duality and the shift-swap ------------------------------------------------


def kw_dual(M: KwModule) -> KwModule:
    """D(M)^n = hom(M^{-(n+1)}, S)<-d> with d(f) = (-1)^{n+1} f d and
    s.f = (-1)^n f s; fold(D(M)) = wdual(fold(M))."""
    d = M.d
    terms = {}
    for j, mod in M.terms.items():
        n = -j - 1
        terms[n] = mod.dual().shifted(-d)
    diff = {}
    s = {}
    for n in sorted(terms):
        # d_D: D^n -> D^{n+1} is (-1)^{n+1} (d_M: M^{-n-2} -> M^{-n-1})^T
        dmat = M.diff_at(-n - 2)
        if dmat.entries:
            sign = -1 if (n + 1) % 2 else 1
            diff[n] = dmat.transpose().scaled(sign).shifted(-d, -d)
        # s_D: D^n -> D^{n-1} is (-1)^n (s_M: M^{-n} -> M^{-n-1})^T
        smat = M.s_at(-n)
        if smat.entries:
            sign = -1 if n % 2 else 1
            s[n] = smat.transpose().scaled(sign).shifted(-d, -d)
    return KwModule(M.ring, M.potential, d, terms, diff, s)


def swap_ds(M: KwModule) -> KwModule:
    """Swap the roles of s and d: T^n := M^{1-n}<nd>, d_T := s, s_T := d.
    The fold of the result is homotopy equivalent to fold(M)[1]."""
    d = M.d
    terms = {}
    for j, mod in M.terms.items():
        n = 1 - j
        terms[n] = mod.shifted(n * d)
    diff = {}
    s = {}
    for n in sorted(terms):
        j = 1 - n                      # T^n = M^j
        smat = M.s_at(j)               # M^j -> M^{j-1} = T^{n+1}
        if smat.entries:
            diff[n] = smat.shifted((n + 1) * d, n * d)
        dmat = M.diff_at(j)            # M^j -> M^{j+1} = T^{n-1}
        if dmat.entries:
            s[n] = dmat.shifted((n - 1) * d, n * d)
    return KwModule(M.ring, M.potential, d, terms, diff, s)


# -- degreewise homology of the underlying complex ------------------------------


def complex_homology_dim(M: KwModule, n: int, t: int,
                         modulo: Optional[GradedPoly] = None) -> int:
    """dim H^n of the underlying complex of M in internal degree t,
    optionally over S/(modulo)."""
    w = modulo if modulo is not None else M.ring.zero()
    return slice_homology_mod_w(M.diff_at(n - 1), M.diff_at(n), w, t)
