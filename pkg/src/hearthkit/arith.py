"""Exact scalars: rationals, Gaussian rationals and univariate polynomials over Q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .errors import ValidationError


def rat(x) -> Fraction:
    """Coerce an int, Fraction, fmpq or string like ``"-3/4"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_str(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class GaussRat:
    """An element re + i*im of Q(i)."""

    re: Fraction
    im: Fraction

    def __post_init__(self):
        object.__setattr__(self, "re", rat(self.re))
        object.__setattr__(self, "im", rat(self.im))

    @classmethod
    def parse(cls, value) -> "GaussRat":
        if isinstance(value, GaussRat):
            return value
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return cls(rat(value[0]), rat(value[1]))
        return cls(rat(value), Fraction(0))

    def __add__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other) -> "GaussRat":
        if isinstance(other, GaussRat):
            return GaussRat(self.re * other.re - self.im * other.im,
                            self.re * other.im + self.im * other.re)
        c = rat(other)
        return GaussRat(self.re * c, self.im * c)

    __rmul__ = __mul__

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_json(self) -> list:
        return [str(self.re), str(self.im)]

    def __str__(self) -> str:
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


GAUSS_ZERO = GaussRat(Fraction(0), Fraction(0))


def gauss_sum(values: Iterable[GaussRat]) -> GaussRat:
    total = GAUSS_ZERO
    for v in values:
        total = total + v
    return total


class PolyRat:
    """Univariate polynomial over Q, coefficients stored lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c) -> "PolyRat":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1) -> "PolyRat":
        return cls([0] * k + [c])

    @classmethod
    def parse(cls, value) -> "PolyRat":
        if isinstance(value, PolyRat):
            return value
        if isinstance(value, (list, tuple)):
            return cls(value)
        return cls((value,))

    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_unit(self) -> bool:
        return len(self.coeffs) == 1

    def lc(self) -> Fraction:
        return self.coeffs[-1]

    def valuation(self) -> int:
        """Order of vanishing at t = 0 (zero polynomial raises)."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        raise ValueError("valuation of the zero polynomial")

    def monic(self) -> "PolyRat":
        if self.is_zero():
            return self
        lc = self.lc()
        return PolyRat([c / lc for c in self.coeffs])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyRat):
            if isinstance(other, (int, Fraction)):
                other = PolyRat.const(other)
            else:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "PolyRat":
        return other if isinstance(other, PolyRat) else PolyRat.const(other)

    def __add__(self, other) -> "PolyRat":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return PolyRat([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                        for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "PolyRat":
        return PolyRat([-c for c in self.coeffs])

    def __sub__(self, other) -> "PolyRat":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PolyRat":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PolyRat":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return PolyRat()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return PolyRat(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PolyRat":
        out = PolyRat.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other) -> tuple["PolyRat", "PolyRat"]:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree()
        lc = other.lc()
        quot = [Fraction(0)] * max(len(rem) - dd, 0)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            q = c / lc
            quot[k - dd] = q
            for j, oc in enumerate(other.coeffs):
                rem[k - dd + j] -= q * oc
        return PolyRat(quot), PolyRat(rem[:dd] if dd > 0 else [])

    def __floordiv__(self, other) -> "PolyRat":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "PolyRat":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "PolyRat":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def divides(self, other: "PolyRat") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, PolyRat) else PolyRat()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def substitute_power(self, k: int) -> "PolyRat":
        """Return p(t**k)."""
        out = [Fraction(0)] * (k * max(len(self.coeffs) - 1, 0) + 1)
        for i, c in enumerate(self.coeffs):
            out[k * i] = c
        return PolyRat(out)

    def shift(self, k: int) -> "PolyRat":
        """Multiply by t**k (k >= 0)."""
        if self.is_zero():
            return self
        return PolyRat([0] * k + list(self.coeffs))

    def to_flint(self) -> flint.fmpq_poly:
        return flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in self.coeffs])

    @classmethod
    def from_flint(cls, p) -> "PolyRat":
        return cls([rat(c) for c in p.coeffs()])

    def factor(self) -> list[tuple["PolyRat", int]]:
        """Monic irreducible factors with multiplicities, sorted by (degree, coefficients)."""
        if self.is_zero():
            raise ValueError("cannot factor zero")
        if self.degree() == 0:
            return []
        _, facs = self.to_flint().factor()
        out = [(PolyRat.from_flint(f).monic(), int(e)) for f, e in facs]
        out.sort(key=lambda fe: (fe[0].degree(), fe[0].coeffs))
        return out

    def to_json(self) -> list:
        return [str(c) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"PolyRat({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)


def poly_gcd(a: PolyRat, b: PolyRat) -> PolyRat:
    """Monic gcd (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


ZERO = PolyRat()
ONE = PolyRat.const(1)
T = PolyRat.monomial(1)


class LaurentRat:
    """Element poly * t**low of Q[t, 1/t], normalized so poly(0) != 0."""

    __slots__ = ("poly", "low")

    def __init__(self, poly: PolyRat, low: int = 0):
        poly = PolyRat.parse(poly)
        if poly.is_zero():
            low = 0
        else:
            v = poly.valuation()
            if v:
                poly = PolyRat(poly.coeffs[v:])
                low += v
        self.poly = poly
        self.low = low

    @classmethod
    def parse(cls, value) -> "LaurentRat":
        if isinstance(value, LaurentRat):
            return value
        if isinstance(value, PolyRat):
            return cls(value, 0)
        if isinstance(value, dict):
            if "coeffs" not in value:
                raise ValidationError("Laurent entry needs a 'coeffs' list")
            return cls(PolyRat(value["coeffs"]), int(value.get("low", 0)))
        return cls(PolyRat.parse(value), 0)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def denominator_power(self) -> int:
        return max(0, -self.low) if not self.is_zero() else 0

    def times_t_power(self, k: int) -> PolyRat:
        """Return t**k * self as a polynomial (k must clear the denominator)."""
        if self.is_zero():
            return ZERO
        e = self.low + k
        if e < 0:
            raise ArithmeticError("t-power does not clear the denominator")
        return self.poly.shift(e)

    def to_json(self) -> dict:
        return {"coeffs": self.poly.to_json(), "low": self.low}

    def __str__(self) -> str:
        return f"({self.poly})*t^{self.low}"
