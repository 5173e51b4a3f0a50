"""Exact scalars, univariate polynomials and rational functions in one variable.

Scalars are :class:`fractions.Fraction`.  The formal variable of
:class:`UniPoly` / :class:`UniRatFunction` is called ``xi`` throughout; it is
the scaling variable used for limit extraction at 0 and infinity.

Everything here is immutable and every rational function is kept in
canonical form (coprime numerator and denominator, monic denominator).
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence, Union

ExactScalar = Fraction
Scalar = Union[int, Fraction]


class NoLimit:
    """Result of a limit that does not exist (the function is unbounded)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NO_LIMIT"

    def __bool__(self) -> bool:
        return False


NO_LIMIT = NoLimit()


def random_scalar(rng: random.Random, bound: int) -> Fraction:
    """Return a/b with a uniform in [-bound, bound] minus {0}, b uniform in [1, bound]."""
    if bound < 2:
        raise ValueError("bound must be at least 2")
    a = rng.randint(1, bound) * rng.choice((-1, 1))
    b = rng.randint(1, bound)
    return Fraction(a, b)


def _trim(coeffs: Iterable[Scalar]) -> tuple:
    c = [Fraction(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class UniPoly:
    """Dense univariate polynomial, coefficients lowest degree first."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        self.coeffs = _trim(coeffs)
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple) -> "UniPoly":
        p = object.__new__(cls)
        p.coeffs = coeffs
        p._hash = None
        return p

    @classmethod
    def constant(cls, c: Scalar) -> "UniPoly":
        return cls((c,))

    @classmethod
    def variable(cls) -> "UniPoly":
        return cls._raw((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> float:
        """Degree; ``float('-inf')`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    @property
    def order(self) -> float:
        """Order of vanishing at 0; ``float('inf')`` for the zero polynomial."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return float("inf")

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def low(self) -> Fraction:
        return self.coeffs[int(self.order)]

    def __call__(self, v):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim((other,))
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"({c})*xi^{i}")
        return " + ".join(terms)

    def __neg__(self) -> "UniPoly":
        return UniPoly._raw(tuple(-c for c in self.coeffs))

    def __add__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            other = UniPoly.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        while out and out[-1] == 0:
            out.pop()
        return UniPoly._raw(tuple(out))

    __radd__ = __add__

    def __sub__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            other = UniPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "UniPoly":
        return (-self) + other

    def scale(self, c: Scalar) -> "UniPoly":
        if not c:
            return UniPoly._raw(())
        return UniPoly._raw(tuple(v * c for v in self.coeffs))

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly._raw(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return UniPoly._raw(tuple(out))

    __rmul__ = __mul__

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        db = len(other.coeffs) - 1
        lb = other.coeffs[-1]
        if len(r) - 1 < db:
            return UniPoly._raw(()), self
        q = [Fraction(0)] * (len(r) - db)
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k]
            if not c:
                continue
            c = c / lb
            q[k - db] = c
            for j, bj in enumerate(other.coeffs):
                r[k - db + j] -= c * bj
        return UniPoly(q), UniPoly(r[:db])

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lc = self.coeffs[-1]
        if lc == 1:
            return self
        return UniPoly._raw(tuple(c / lc for c in self.coeffs))

    def reversed(self, width: int | None = None) -> "UniPoly":
        """Coefficient reversal xi^width * p(1/xi); width defaults to the degree."""
        if width is None:
            width = len(self.coeffs) - 1
        c = list(self.coeffs) + [Fraction(0)] * (width + 1 - len(self.coeffs))
        return UniPoly(reversed(c))

    def shift_down(self, k: int) -> "UniPoly":
        """Divide by xi^k (the caller guarantees divisibility)."""
        return UniPoly._raw(self.coeffs[k:])


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd; gcd(0, 0) is 0."""
    while not b.is_zero():
        if len(b.coeffs) == 1:
            return UniPoly._raw((Fraction(1),))
        a, b = b, a.divmod(b)[1]
    return a.monic()


_ONE = UniPoly._raw((Fraction(1),))


class UniRatFunction:
    """num/den with gcd(num, den) = 1 and monic den."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, _canonical: bool = False):
        if not isinstance(num, UniPoly):
            num = UniPoly.constant(num)
        if den is None:
            den = _ONE
        elif not isinstance(den, UniPoly):
            den = UniPoly.constant(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _canonical:
            if num.is_zero():
                den = _ONE
            elif len(den.coeffs) > 1 and len(num.coeffs) > 1:
                g = poly_gcd(num, den)
                if len(g.coeffs) > 1:
                    num = num.divmod(g)[0]
                    den = den.divmod(g)[0]
            lc = den.coeffs[-1]
            if lc != 1:
                num = num.scale(1 / lc)
                den = den.scale(1 / lc)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def xi(cls) -> "UniRatFunction":
        return cls(UniPoly.variable(), _ONE, _canonical=True)

    @classmethod
    def linear(cls, a: Scalar, b: Scalar) -> "UniRatFunction":
        """a + b*xi."""
        return cls(UniPoly((a, b)), _ONE, _canonical=True)

    def is_polynomial(self) -> bool:
        return len(self.den.coeffs) == 1

    def is_constant(self) -> bool:
        return len(self.den.coeffs) == 1 and len(self.num.coeffs) <= 1

    def constant_value(self) -> Fraction:
        return self.num.coeffs[0] if self.num.coeffs else Fraction(0)

    def __call__(self, v):
        return self.num(v) / self.den(v)

    def __repr__(self) -> str:
        if self.is_polynomial():
            return f"UniRatFunction({self.num!r})"
        return f"UniRatFunction(({self.num!r}) / ({self.den!r}))"

    def __eq__(self, other) -> bool:
        if isinstance(other, UniRatFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_polynomial() and self.num == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __neg__(self) -> "UniRatFunction":
        return UniRatFunction(-self.num, self.den, _canonical=True)

    def __add__(self, other) -> "UniRatFunction":
        if isinstance(other, (int, Fraction)):
            if not other:
                return self
            return UniRatFunction(self.num + self.den.scale(other), self.den, _canonical=True)
        if not isinstance(other, UniRatFunction):
            return NotImplemented
        if self.den == other.den:
            if self.is_polynomial():
                return UniRatFunction(self.num + other.num, _ONE, _canonical=True)
            return UniRatFunction(self.num + other.num, self.den)
        if self.is_polynomial():
            return UniRatFunction(self.num * other.den + other.num, other.den, _canonical=True)
        if other.is_polynomial():
            return UniRatFunction(self.num + other.num * self.den, self.den, _canonical=True)
        g = poly_gcd(self.den, other.den)
        if len(g.coeffs) > 1:
            d1 = self.den.divmod(g)[0]
            d2 = other.den.divmod(g)[0]
            return UniRatFunction(self.num * d2 + other.num * d1, self.den * d2)
        return UniRatFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "UniRatFunction":
        return self + (-other)

    def __rsub__(self, other) -> "UniRatFunction":
        return (-self) + other

    def __mul__(self, other) -> "UniRatFunction":
        if isinstance(other, (int, Fraction)):
            if not other:
                return UniRatFunction(UniPoly._raw(()), _ONE, _canonical=True)
            return UniRatFunction(self.num.scale(other), self.den, _canonical=True)
        if not isinstance(other, UniRatFunction):
            return NotImplemented
        if self.is_polynomial() and other.is_polynomial():
            return UniRatFunction(self.num * other.num, _ONE, _canonical=True)
        a, b = self.num, self.den
        c, d = other.num, other.den
        g1 = poly_gcd(a, d) if len(a.coeffs) > 1 and len(d.coeffs) > 1 else _ONE
        g2 = poly_gcd(c, b) if len(c.coeffs) > 1 and len(b.coeffs) > 1 else _ONE
        if len(g1.coeffs) > 1:
            a = a.divmod(g1)[0]
            d = d.divmod(g1)[0]
        if len(g2.coeffs) > 1:
            c = c.divmod(g2)[0]
            b = b.divmod(g2)[0]
        num = a * c
        den = b * d
        if num.is_zero():
            return UniRatFunction(num, _ONE, _canonical=True)
        lc = den.coeffs[-1]
        if lc != 1:
            num = num.scale(1 / lc)
            den = den.scale(1 / lc)
        return UniRatFunction(num, den, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "UniRatFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        lc = self.num.coeffs[-1]
        return UniRatFunction(self.den.scale(1 / lc), self.num.scale(1 / lc), _canonical=True)

    def __truediv__(self, other) -> "UniRatFunction":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return UniRatFunction(self.num.scale(1 / Fraction(other)), self.den, _canonical=True)
        if not isinstance(other, UniRatFunction):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "UniRatFunction":
        return self.inverse() * other

    def __pow__(self, k: int) -> "UniRatFunction":
        if k < 0:
            return self.inverse() ** (-k)
        out = UniRatFunction(_ONE, _ONE, _canonical=True)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def substitute_reciprocal(self) -> "UniRatFunction":
        """f(1/xi), computed by coefficient reversal."""
        dn = len(self.num.coeffs) - 1
        dd = len(self.den.coeffs) - 1
        w = max(dn, dd, 0)
        if self.num.is_zero():
            return self
        return UniRatFunction(self.num.reversed(w), self.den.reversed(w))

    def valuation(self) -> float:
        """Order at xi=0 (negative for a pole); +inf for zero."""
        if self.num.is_zero():
            return float("inf")
        return self.num.order - self.den.order

    def degree(self) -> float:
        """deg num - deg den, the order of growth at infinity."""
        if self.num.is_zero():
            return float("-inf")
        return self.num.degree - self.den.degree

    def taylor(self, order: int) -> list[Fraction]:
        """Coefficients c_0..c_order of the expansion at xi=0 (requires no pole at 0)."""
        if self.den.coeffs[0] == 0:
            raise ZeroDivisionError("pole at xi=0")
        d = list(self.den.coeffs) + [Fraction(0)] * (order + 1)
        n = list(self.num.coeffs) + [Fraction(0)] * (order + 1)
        out = []
        d0 = d[0]
        for k in range(order + 1):
            acc = n[k]
            for j in range(k):
                acc -= out[j] * d[k - j]
            out.append(acc / d0)
        return out


FieldValue = Union[Fraction, UniRatFunction]


def as_ratfunc(v) -> UniRatFunction:
    if isinstance(v, UniRatFunction):
        return v
    return UniRatFunction(UniPoly.constant(v), _ONE, _canonical=True)


def limit_at_zero(f) -> Union[Fraction, NoLimit]:
    """Limit of f(xi) as xi -> 0: 0, the lowest-order coefficient ratio, or NO_LIMIT."""
    if not isinstance(f, UniRatFunction):
        return Fraction(f)
    if f.num.is_zero():
        return Fraction(0)
    a, b = f.num.order, f.den.order
    if a > b:
        return Fraction(0)
    if a < b:
        return NO_LIMIT
    return f.num.low() / f.den.low()


def limit_at_infinity(f) -> Union[Fraction, NoLimit]:
    """Limit of f(xi) as xi -> infinity."""
    if not isinstance(f, UniRatFunction):
        return Fraction(f)
    if f.num.is_zero():
        return Fraction(0)
    dn, dd = f.num.degree, f.den.degree
    if dn < dd:
        return Fraction(0)
    if dn > dd:
        return NO_LIMIT
    return f.num.lead() / f.den.lead()


class FieldContract:
    """Minimal exact-field interface used by generic algorithms."""

    name = "abstract"

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, k: int):
        raise NotImplementedError

    def add(self, a, b):
        return a + b

    def negate(self, a):
        return -a

    def multiply(self, a, b):
        return a * b

    def invert(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def equals(self, a, b) -> bool:
        return a == b


class RationalField(FieldContract):
    name = "QQ"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, k: int):
        return Fraction(k)


class RatFuncField(FieldContract):
    """QQ(xi)."""

    name = "QQ(xi)"

    def zero(self):
        return as_ratfunc(0)

    def one(self):
        return as_ratfunc(1)

    def from_int(self, k: int):
        return as_ratfunc(k)

    def invert(self, a):
        return as_ratfunc(a).inverse()

    def equals(self, a, b) -> bool:
        return as_ratfunc(a) == as_ratfunc(b)


QQ = RationalField()
QQXI = RatFuncField()


def fmt_scalar(v) -> str:
    """Exact text rendering used in reports."""
    if isinstance(v, NoLimit):
        return "NO_LIMIT"
    if isinstance(v, UniRatFunction):
        return repr(v)
    return str(Fraction(v))


def parse_scalar(s: Union[str, int, Sequence]) -> Fraction:
    return Fraction(s) if not isinstance(s, Fraction) else s
