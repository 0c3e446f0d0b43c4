"""Symmetric-function utilities: elementary symmetric polynomials, the
determinant expressing a power sum in elementary symmetric generators, and
the telescoping coefficients that write a difference of power sums over the
symmetric-difference sequence.
"""

from __future__ import annotations

from itertools import combinations
from typing import Optional, Sequence

from .ring import GradedPoly, PolyRing, exact_div


def elementary_symmetric(ring: PolyRing, var_names: Sequence[str], l: int) -> GradedPoly:
    """l-th elementary symmetric polynomial in the named variables."""
    if l < 0 or l > len(var_names):
        raise ValueError(f"e_{l} undefined for {len(var_names)} variables")
    if l == 0:
        return ring.one()
    out = ring.zero()
    for combo in combinations(var_names, l):
        term = ring.one()
        for v in combo:
            term = term * ring.var(v)
        out = out + term
    return out


def _det(rows: list) -> GradedPoly:
    """Cofactor expansion along the first column (matrices here are almost
    lower-triangular, so this stays cheap)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    ring = rows[0][0].ring
    out = ring.zero()
    for i in range(n):
        a = rows[i][0]
        if a.is_zero():
            continue
        minor = [r[1:] for k, r in enumerate(rows) if k != i]
        sub = _det(minor)
        out = out + a * sub * ((-1) ** i)
    return out


def power_sum_elem(n: int, m: int, ring: Optional[PolyRing] = None,
                   names: Optional[Sequence[str]] = None) -> GradedPoly:
    """The polynomial P with P(e_1,...,e_m) = x_1^{n+1}+...+x_m^{n+1}.

    P is the (n+1) x (n+1) determinant

        | X_1  X_2  ...  X_n    (n+1) X_{n+1} |
        | 1    X_1  ...  X_{n-1}    n  X_n    |
        | 0    1    ...  X_{n-2} (n-1) X_{n-1}|
        | ...                                 |
        | 0    0    ...  X_1        2  X_2    |
        | 0    0    ...  1             X_1    |

    with X_l := 0 for l > m.  `names` are the generators standing for
    e_1..e_m (default "X1".."Xm" in a fresh ring with deg X_l = l).
    """
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    if ring is None:
        names = [f"X{l}" for l in range(1, m + 1)]
        ring = PolyRing(names, list(range(1, m + 1)))
    if names is None:
        names = list(ring.names[:m])

    def X(l):
        if 1 <= l <= m:
            return ring.var(names[l - 1])
        return ring.zero()

    size = n + 1
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            if j < size - 1:
                l = j - i + 1
                if l == 0:
                    row.append(ring.one())
                elif l < 0:
                    row.append(ring.zero())
                else:
                    row.append(X(l))
            else:
                l = size - i
                row.append(X(l) * l)
        rows.append(row)
    return _det(rows)


def star_coefficients(m: int, n: int, ring: Optional[PolyRing] = None,
                      x_names: Optional[Sequence[str]] = None,
                      y_names: Optional[Sequence[str]] = None) -> list:
    """Telescoping coefficients *_1..*_m with

        sum_i *_i (X_i - Y_i)  =  P(X_1..X_m) - P(Y_1..Y_m),

    where P is power_sum_elem(n, m):
        *_i = ( P(Y_1..Y_{i-1}, X_i..X_m) - P(Y_1..Y_i, X_{i+1}..X_m) )
              / (X_i - Y_i).
    Each quotient is verified exact; failure signals a bug, not bad input.
    """
    if ring is None:
        x_names = [f"X{l}" for l in range(1, m + 1)]
        y_names = [f"Y{l}" for l in range(1, m + 1)]
        degs = list(range(1, m + 1)) * 2
        ring = PolyRing(x_names + y_names, list(range(1, m + 1)) + list(range(1, m + 1)))
    if x_names is None or y_names is None:
        x_names = list(ring.names[:m])
        y_names = list(ring.names[m:2 * m])

    scratch_names = [f"_t{l}" for l in range(1, m + 1)]
    scratch = PolyRing(scratch_names,
                       [ring.degrees[ring.index(x_names[l])] for l in range(m)])
    P = power_sum_elem(n, m, scratch, scratch_names)

    def eval_at(args):
        return P.subs({scratch_names[l]: args[l] for l in range(m)}, target=ring)

    xs = [ring.var(nm) for nm in x_names]
    ys = [ring.var(nm) for nm in y_names]
    stars = []
    for i in range(m):
        top = eval_at(ys[:i] + xs[i:]) - eval_at(ys[:i + 1] + xs[i + 1:])
        q = exact_div(top, xs[i] - ys[i])
        if q is None:
            raise ArithmeticError("telescoping quotient failed to divide; "
                                  "this is a bug in the power-sum identity")
        stars.append(q)
    return stars
