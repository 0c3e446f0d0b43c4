"""Exact multivariate polynomial arithmetic over the rationals, with a
positive integer internal degree attached to every variable.

Polynomials are sparse dicts mapping exponent tuples to nonzero Fractions.
All values are immutable after construction; operations return fresh
objects.  Division is exact division only: `exact_div` reports failure by
returning None instead of computing any normal form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

Scalar = Union[int, Fraction]


class PolyRing:
    """A polynomial ring over Q with named variables of positive degree."""

    __slots__ = ("names", "degrees", "_index")

    def __init__(self, names: Sequence[str], degrees: Sequence[int]):
        names = tuple(names)
        degrees = tuple(int(d) for d in degrees)
        if len(names) != len(degrees):
            raise ValueError("names and degrees must have equal length")
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        if any(d < 1 for d in degrees):
            raise ValueError("variable degrees must be >= 1")
        self.names = names
        self.degrees = degrees
        self._index = {n: i for i, n in enumerate(names)}

    def __eq__(self, other):
        return (isinstance(other, PolyRing)
                and self.names == other.names
                and self.degrees == other.degrees)

    def __hash__(self):
        return hash((self.names, self.degrees))

    def __repr__(self):
        vars_ = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees))
        return f"PolyRing({vars_})"

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def one(self) -> "GradedPoly":
        return self.const(1)

    def const(self, c: Scalar) -> "GradedPoly":
        c = Fraction(c)
        if c == 0:
            return self.zero()
        return GradedPoly(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "GradedPoly":
        exp = [0] * self.nvars
        exp[self._index[name]] = 1
        return GradedPoly(self, {tuple(exp): Fraction(1)})

    def gens(self) -> list["GradedPoly"]:
        return [self.var(n) for n in self.names]

    def monomial_degree(self, exp: Sequence[int]) -> int:
        return sum(e * d for e, d in zip(exp, self.degrees))

    def monomials_of_degree(self, degree: int) -> list[tuple]:
        """All exponent tuples of internal degree `degree`, graded-lex order."""
        if degree < 0:
            return []
        return _monomials(self.degrees, degree)

    def extended(self, names: Sequence[str], degrees: Sequence[int]) -> "PolyRing":
        return PolyRing(self.names + tuple(names), self.degrees + tuple(degrees))


_MONOMIAL_CACHE: dict = {}


def _monomials(degrees: tuple, target: int) -> list[tuple]:
    key = (degrees, target)
    cached = _MONOMIAL_CACHE.get(key)
    if cached is not None:
        return cached
    if not degrees:
        out = [()] if target == 0 else []
    else:
        d0 = degrees[0]
        out = []
        for e in range(target // d0 + 1):
            for rest in _monomials(degrees[1:], target - e * d0):
                out.append((e,) + rest)
    _MONOMIAL_CACHE[key] = out
    return out


class GradedPoly:
    """Sparse polynomial with Fraction coefficients and no stored zeros."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple, Fraction]):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c != 0}

    # -- basic predicates ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous_degree(self) -> Optional[int]:
        """Common internal degree of all terms, or None if inhomogeneous.

        The zero polynomial counts as homogeneous of every degree and
        returns 0 by convention; use is_zero() to distinguish it.
        """
        deg = None
        for e in self.terms:
            d = self.ring.monomial_degree(e)
            if deg is None:
                deg = d
            elif d != deg:
                return None
        return 0 if deg is None else deg

    def is_homogeneous(self) -> bool:
        return self.homogeneous_degree() is not None

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def is_constant(self) -> bool:
        return all(all(x == 0 for x in e) for e in self.terms)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "GradedPoly"):
        if self.ring != other.ring:
            raise ValueError("mixed rings: %r vs %r" % (self.ring, other.ring))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return GradedPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.ring.zero()
            f = Fraction(other)
            return GradedPoly(self.ring, {e: c * f for e, c in self.terms.items()})
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        acc: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = acc.get(e, 0) + ca * cb
                if s:
                    acc[e] = s
                else:
                    del acc[e]
        return GradedPoly(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return isinstance(other, GradedPoly) and self.ring == other.ring \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # -- structure --------------------------------------------------------

    def degree_of(self, name: str) -> int:
        """Highest exponent of the named variable."""
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=0)

    def coefficients_in(self, name: str) -> dict:
        """Write self as a polynomial in `name`: exponent -> coefficient
        (a GradedPoly not involving `name`)."""
        i = self.ring.index(name)
        out: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: GradedPoly(self.ring, t) for k, t in out.items()}

    def subs(self, assignment: Mapping[str, "GradedPoly"],
             target: Optional[PolyRing] = None) -> "GradedPoly":
        """Ring map determined by `assignment`; unassigned variables must
        exist in the target ring and map to themselves."""
        if target is None:
            some = next(iter(assignment.values()), None)
            target = some.ring if some is not None else self.ring
        images = []
        for n in self.ring.names:
            if n in assignment:
                img = assignment[n]
                if img.ring != target:
                    raise ValueError("substitution image in wrong ring")
                images.append(img)
            else:
                images.append(target.var(n))
        out = target.zero()
        power_cache: list[dict] = [dict() for _ in images]

        def power(i, k):
            if k == 0:
                return target.one()
            got = power_cache[i].get(k)
            if got is None:
                got = power(i, k - 1) * images[i]
                power_cache[i][k] = got
            return got

        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    # -- division ---------------------------------------------------------

    def leading(self) -> tuple:
        """Leading (exponent, coefficient) in graded-lex order."""
        e = max(self.terms, key=lambda e: (self.ring.monomial_degree(e), e))
        return e, self.terms[e]

    # -- display ----------------------------------------------------------

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(),
                      key=lambda item: (self.ring.monomial_degree(item[0]), item[0]),
                      reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (f"{n}^{k}" if k > 1 else n)
                for n, k in zip(self.ring.names, e) if k)
            coeff = str(c)
            if mono:
                body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
            else:
                body = str(abs(c))
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        head_sign, head = pieces[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = __str__


def exact_div(f: GradedPoly, g: GradedPoly) -> Optional[GradedPoly]:
    """Quotient f/g when g divides f exactly, else None.

    Leading-term division in graded-lex order; for an exact multiple the
    remainder reaches zero, otherwise some leading term fails to divide.
    """
    if g.is_zero():
        return None
    ring = f.ring
    ge, gc = g.leading()
    quot: dict = {}
    rem = f
    while not rem.is_zero():
        re, rc = rem.leading()
        qe = tuple(a - b for a, b in zip(re, ge))
        if any(x < 0 for x in qe):
            return None
        qc = rc / gc
        quot[qe] = quot.get(qe, 0) + qc
        rem = rem - GradedPoly(ring, {qe: qc}) * g
    return GradedPoly(ring, quot)


# -- a small expression parser for CLI / file input ------------------------

class PolyParseError(ValueError):
    pass


def parse_poly(text: str, ring: PolyRing) -> GradedPoly:
    """Parse '+', '-', '*', '^', parentheses, integers and fractions a/b,
    and the ring's variable names."""
    tokens = _tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take():
        tok = peek()
        pos[0] += 1
        return tok

    def parse_sum():
        node = parse_product()
        while peek() in ("+", "-"):
            op = take()
            rhs = parse_product()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_product():
        node = parse_power()
        while True:
            tok = peek()
            if tok == "*":
                take()
                node = node * parse_power()
            elif tok == "/":
                take()
                denom = parse_power()
                if not denom.is_constant() or denom.is_zero():
                    raise PolyParseError("division only by nonzero constants")
                node = node * (1 / denom.constant_term())
            elif isinstance(tok, str) and tok not in ("+", "-", ")", "^", None) \
                    and tok != ")" and (tok == "(" or tok.isidentifier()):
                # implicit multiplication: 2x, x(y+1)
                node = node * parse_power()
            else:
                return node

    def parse_power():
        base = parse_atom()
        if peek() == "^":
            take()
            expo = take()
            if not isinstance(expo, int):
                raise PolyParseError("exponent must be an integer literal")
            base = base ** expo
        return base

    def parse_atom():
        tok = take()
        if tok == "(":
            node = parse_sum()
            if take() != ")":
                raise PolyParseError("unbalanced parentheses")
            return node
        if tok == "-":
            return -parse_atom()
        if tok == "+":
            return parse_atom()
        if isinstance(tok, int):
            return ring.const(tok)
        if isinstance(tok, str) and tok.isidentifier():
            if tok not in ring._index:
                raise PolyParseError(f"unknown variable {tok!r}")
            return ring.var(tok)
        raise PolyParseError(f"unexpected token {tok!r}")

    node = parse_sum()
    if pos[0] != len(tokens):
        raise PolyParseError(f"trailing input at token {peek()!r}")
    return node


def _tokenize(text: str) -> list:
    out: list = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(int(text[i:j]))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(text[i:j])
            i = j
        elif ch in "+-*/^()":
            out.append(ch)
            i += 1
        else:
            raise PolyParseError(f"bad character {ch!r}")
    return out
