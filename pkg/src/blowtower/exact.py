"""Exact univariate polynomial algebra over the rationals.

Coefficients are ``fractions.Fraction`` throughout; nothing in this module
touches floating point.  Polynomials are stored low degree first, so
``UniPoly([6, 4, 1])`` is ``b**2 + 4*b + 6``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import MathError

Rational = Fraction


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(value: Fraction) -> str:
    value = as_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class UniPoly:
    """Immutable univariate polynomial with rational coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "_coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> "UniPoly":
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "UniPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-as_rational(r), 1])
        return p

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def lc(self) -> Fraction:
        return self._coeffs[-1] if self._coeffs else Fraction(0)

    def __call__(self, x) -> Fraction:
        x = as_rational(x)
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == UniPoly([other])._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"UniPoly({[format_rational(c) for c in self._coeffs]})"

    def __str__(self) -> str:
        return self.pretty("b")

    def pretty(self, var: str = "b") -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self._coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if i == 0:
                body = format_rational(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def _coerce(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            return other
        return UniPoly([other])

    def __add__(self, other) -> "UniPoly":
        other = self._coerce(other)
        n = max(len(self._coeffs), len(other._coeffs))
        a = self._coeffs + (Fraction(0),) * (n - len(self._coeffs))
        b = other._coeffs + (Fraction(0),) * (n - len(other._coeffs))
        return UniPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self._coeffs)

    def __sub__(self, other) -> "UniPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "UniPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other._coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ValueError("negative power")
        result = UniPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other) -> tuple["UniPoly", "UniPoly"]:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._coeffs)
        dq = other.degree
        lc = other.lc()
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - dq - 1, -1, -1):
            c = rem[i + dq] / lc
            quot[i] = c
            if c:
                for j, d in enumerate(other._coeffs):
                    rem[i + j] -= c * d
        return UniPoly(quot), UniPoly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other) -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "UniPoly":
        return divmod(self, other)[1]

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self._coeffs) if i > 0)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lc = self.lc()
        return UniPoly(c / lc for c in self._coeffs)

    def scale(self, factor) -> "UniPoly":
        factor = as_rational(factor)
        return UniPoly(c * factor for c in self._coeffs)

    def valuation(self) -> int:
        """Largest v with b**v dividing self (0 for the zero polynomial)."""
        for i, c in enumerate(self._coeffs):
            if c != 0:
                return i
        return 0

    def shift_down(self, v: int) -> "UniPoly":
        """Divide by b**v; the low coefficients must vanish."""
        if any(c != 0 for c in self._coeffs[:v]):
            raise MathError(f"b^{v} does not divide {self}")
        return UniPoly(self._coeffs[v:])

    def reverse(self) -> "UniPoly":
        """The reciprocal polynomial b**deg * p(1/b)."""
        return UniPoly(reversed(self._coeffs))

    def primitive_integer_form(self) -> tuple[int, ...]:
        """Integer coefficients with content 1 and positive leading term."""
        if self.is_zero():
            return ()
        den = reduce(math.lcm, (c.denominator for c in self._coeffs), 1)
        ints = [int(c * den) for c in self._coeffs]
        g = reduce(math.gcd, ints, 0)
        ints = [i // g for i in ints]
        if ints[-1] < 0:
            ints = [-i for i in ints]
        return tuple(ints)


def poly_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm (zero if both inputs are zero)."""
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def poly_gcd_many(polys: Iterable[UniPoly]) -> UniPoly:
    acc = UniPoly()
    for p in polys:
        acc = poly_gcd(acc, p)
    return acc


def square_free_part(f: UniPoly) -> UniPoly:
    if f.degree < 1:
        return f.monic()
    return (f // poly_gcd(f, f.derivative())).monic()


def square_free_decomposition(f: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm: monic, pairwise coprime, square-free a_i with f ~ prod a_i**i."""
    if f.is_zero():
        raise MathError("identically zero")
    out = []
    if f.degree < 1:
        return out
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f // a
    c = df // a
    d = c - b.derivative()
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        if a.degree >= 1:
            out.append((a, i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    return out


def _det(matrix: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for r in range(col + 1, n):
            factor = m[r][col] / p
            if factor:
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


def sylvester_matrix(f: UniPoly, g: UniPoly) -> list[list[Fraction]]:
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        rows.append([Fraction(0)] * i + fc + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + gc + [Fraction(0)] * (size - n - 1 - i))
    return rows


def resultant(f: UniPoly, g: UniPoly) -> Fraction:
    """Determinant of the Sylvester matrix of ``f`` and ``g``.

    Zero exactly when ``f`` and ``g`` share a complex root (for nonzero
    inputs).  A nonzero constant ``c`` has no roots, so its resultant with
    ``g`` is ``c**deg g`` (and 1 against the zero polynomial); the zero
    polynomial against a non-constant one gives 0.
    """
    if f.is_zero() and g.is_zero():
        raise MathError("undefined resultant: both polynomials are zero")
    if f.degree == 0:
        return f.lc() ** max(g.degree, 0)
    if g.degree == 0:
        return g.lc() ** f.degree
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    return _det(sylvester_matrix(f, g))


def sturm_sequence(f: UniPoly) -> list[UniPoly]:
    seq = [f, f.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sign_changes(signs: Sequence[int]) -> int:
    nz = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def _sign_at_infinity(p: UniPoly, positive: bool) -> int:
    s = _sign(p.lc())
    if not positive and p.degree % 2 == 1:
        s = -s
    return s


def sturm_count(f: UniPoly) -> int:
    """Number of distinct real roots of a nonzero polynomial."""
    if f.is_zero():
        raise MathError("identically zero")
    if f.degree < 1:
        return 0
    seq = sturm_sequence(square_free_part(f))
    neg = _sign_changes([_sign_at_infinity(p, False) for p in seq])
    pos = _sign_changes([_sign_at_infinity(p, True) for p in seq])
    return neg - pos


def count_real_roots(f: UniPoly, multiplicity: bool = False) -> int:
    if not multiplicity:
        return sturm_count(f)
    return sum(i * sturm_count(a) for a, i in square_free_decomposition(f))


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_root_candidates(f: UniPoly) -> list[Fraction]:
    """Candidates p/q from the rational-root theorem (nonzero roots only)."""
    ints = f.primitive_integer_form()
    if len(ints) < 2:
        return []
    v = next(i for i, c in enumerate(ints) if c != 0)
    a0, an = ints[v], ints[-1]
    cands = set()
    for p in _divisors(a0):
        for q in _divisors(an):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    return sorted(cands)


@dataclass(frozen=True)
class RootReport:
    rational_roots: tuple[tuple[Fraction, int], ...]
    irrational_real_root_count: int

    @property
    def has_real_roots(self) -> bool:
        return bool(self.rational_roots) or self.irrational_real_root_count > 0

    def to_dict(self) -> dict:
        return {
            "rational_roots": [
                {"root": format_rational(r), "multiplicity": m} for r, m in self.rational_roots
            ],
            "irrational_real_root_count": self.irrational_real_root_count,
        }


def classify_real_roots(f: UniPoly) -> RootReport:
    """Split the real roots of ``f`` into rational ones and an irrational count.

    Rational roots come from the rational-root theorem applied to the
    primitive integer form and are deflated out with multiplicity.  Whatever
    real roots the deflated polynomial still has are irrational, and their
    (distinct) number is read off a Sturm sequence.
    """
    if f.is_zero():
        raise MathError("identically zero")
    roots: list[tuple[Fraction, int]] = []
    g = f
    v = g.valuation()
    if v:
        roots.append((Fraction(0), v))
        g = g.shift_down(v)
    for cand in rational_root_candidates(g):
        mult = 0
        lin = UniPoly([-cand, 1])
        while g.degree >= 1 and g(cand) == 0:
            g = g // lin
            mult += 1
        if mult:
            roots.append((cand, mult))
    roots.sort()
    return RootReport(tuple(roots), sturm_count(g) if g.degree >= 1 else 0)


def binomial(n: int, j: int) -> int:
    if not 0 <= j <= n:
        raise MathError(f"binomial index out of range: C({n}, {j})")
    return math.comb(n, j)


def symmetric_function(j: int, values: Sequence) -> Fraction:
    """The j-th elementary symmetric polynomial evaluated at ``values``."""
    vals = [as_rational(v) for v in values]
    if not 0 <= j <= len(vals):
        raise MathError(f"symmetric function index {j} out of range for {len(vals)} values")
    # e_j via the generating polynomial prod (1 + v t)
    gen = [Fraction(1)]
    for v in vals:
        gen = [a + v * b for a, b in zip(gen + [Fraction(0)], [Fraction(0)] + gen)]
    return gen[j]
