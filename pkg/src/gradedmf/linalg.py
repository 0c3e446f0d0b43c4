"""Sparse exact linear algebra over the rationals.

Rows are dicts mapping column index to a nonzero Fraction.  Everything here
is plain Gaussian elimination with a mild sparsity-aware pivot choice; exact
arithmetic keeps every rank and solution bit-exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional


def _eliminate(rows: list):
    """Forward elimination; returns (pivots, echelon) where pivots maps
    pivot column -> index into echelon.  Each echelon row is normalized to
    pivot coefficient 1 and reduced against all pivots known before it."""
    echelon: list = []
    pivots: dict = {}
    for row in rows:
        row = dict(row)
        while row:
            hit = None
            for c in row:
                if c in pivots:
                    hit = c
                    break
            if hit is None:
                break
            factor = row[hit]
            prow = echelon[pivots[hit]]
            for c, v in prow.items():
                s = row.get(c, 0) - factor * v
                if s:
                    row[c] = s
                else:
                    row.pop(c, None)
        if row:
            pc = min(row, key=lambda c: (abs(row[c].numerator) + row[c].denominator, c))
            pv = row[pc]
            row = {c: v / pv for c, v in row.items()}
            pivots[pc] = len(echelon)
            echelon.append(row)
    return pivots, echelon


def rank(rows: list) -> int:
    pivots, _ = _eliminate(rows)
    return len(pivots)


def solve(rows: list, rhs: list, nunknowns: int) -> Optional[list]:
    """One solution x of rows[i] . x = rhs[i], or None if inconsistent.

    Free unknowns are set to 0.  A row inserted into the echelon is reduced
    against all earlier pivots, so every foreign pivot column in it was
    discovered later; back substitution therefore runs in decreasing
    discovery order.
    """
    RHS = nunknowns  # sentinel column holding the right-hand side
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[RHS] = Fraction(b)
        aug.append(r)
    pivots, echelon = _eliminate(aug)
    if RHS in pivots:
        return None
    x = [Fraction(0)] * nunknowns
    for col, ridx in sorted(pivots.items(), key=lambda pc: pc[1], reverse=True):
        row = echelon[ridx]
        s = row.get(RHS, Fraction(0))
        for c, v in row.items():
            if c == col or c == RHS:
                continue
            s -= v * x[c]
        x[col] = s
    return x


def kernel_basis(rows: list, nunknowns: int) -> list:
    """Basis of the kernel of the matrix whose rows are given."""
    pivots, echelon = _eliminate(rows)
    free = [c for c in range(nunknowns) if c not in pivots]
    order = sorted(pivots.items(), key=lambda pc: pc[1], reverse=True)
    basis = []
    for fc in free:
        x = [Fraction(0)] * nunknowns
        x[fc] = Fraction(1)
        for col, ridx in order:
            row = echelon[ridx]
            s = Fraction(0)
            for c, v in row.items():
                if c != col:
                    s -= v * x[c]
            x[col] = s
        basis.append(x)
    return basis
