"""Sparse multivariate Laurent polynomials over QQ, for tiny fully symbolic runs.

Elements of one computation share a variable catalog (a tuple of names).
``SparseLaurent`` supports ring operations and division by monomials;
anything else becomes a ``SymbolicRational`` (a cross-multiplied fraction).
Both plug straight into the evaluator, so a whole expression tree can be
evaluated at a symbolic point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exact import fmt_scalar
from .report import Check
from .signature import AlgebraSignature, ParamPoint

Number = Union[int, Fraction]


class CatalogMismatch(ValueError):
    pass


class SizeExceeded(ValueError):
    pass


class SparseLaurent:
    __slots__ = ("catalog", "terms", "_hash")

    def __init__(self, catalog: Sequence[str], terms: Optional[Mapping[tuple, Number]] = None):
        self.catalog = tuple(catalog)
        clean = {}
        if terms:
            width = len(self.catalog)
            for e, c in terms.items():
                if c:
                    if len(e) != width:
                        raise CatalogMismatch("exponent width does not match the catalog")
                    clean[tuple(e)] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, catalog, terms):
        obj = cls.__new__(cls)
        obj.catalog = catalog
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def constant(cls, catalog, c: Number) -> "SparseLaurent":
        catalog = tuple(catalog)
        return cls(catalog, {(0,) * len(catalog): c})

    @classmethod
    def var(cls, catalog, name: str, power: int = 1) -> "SparseLaurent":
        catalog = tuple(catalog)
        e = [0] * len(catalog)
        e[catalog.index(name)] = power
        return cls(catalog, {tuple(e): 1})

    @classmethod
    def variables(cls, catalog) -> list["SparseLaurent"]:
        return [cls.var(catalog, v) for v in catalog]

    # predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * len(self.catalog), Fraction(0))

    def __bool__(self):
        return bool(self.terms)

    # coercion
    def _lift(self, other) -> Optional["SparseLaurent"]:
        if isinstance(other, SparseLaurent):
            if other.catalog != self.catalog:
                raise CatalogMismatch(f"{self.catalog} vs {other.catalog}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return SparseLaurent.constant(self.catalog, other)
        return None

    def __eq__(self, other) -> bool:
        if isinstance(other, SymbolicRational):
            return other == self
        if isinstance(other, SparseLaurent):
            return self.catalog == other.catalog and self.terms == other.terms
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.catalog, frozenset(self.terms.items())))
        return self._hash

    # ring ops
    def __neg__(self):
        return SparseLaurent._raw(self.catalog, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return SparseLaurent._raw(self.catalog, out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not self.terms or not o.terms:
            return SparseLaurent._raw(self.catalog, {})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return SparseLaurent._raw(self.catalog, out)

    __rmul__ = __mul__

    def monomial_inverse(self) -> "SparseLaurent":
        (e, c), = self.terms.items()
        return SparseLaurent._raw(self.catalog, {tuple(-a for a in e): 1 / c})

    def __truediv__(self, other):
        if isinstance(other, SymbolicRational):
            return SymbolicRational(self, SparseLaurent.constant(self.catalog, 1)) / other
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if o.is_monomial():
            return self * o.monomial_inverse()
        return SymbolicRational(self, o)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            if self.is_monomial():
                return self.monomial_inverse() ** (-k)
            return SymbolicRational(SparseLaurent.constant(self.catalog, 1), self ** (-k))
        out = SparseLaurent.constant(self.catalog, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # structure
    def min_exponents(self) -> tuple:
        return tuple(min(col) for col in zip(*self.terms)) if self.terms else (0,) * len(self.catalog)

    def shift(self, e: Sequence[int]) -> "SparseLaurent":
        return SparseLaurent._raw(self.catalog, {tuple(a + b for a, b in zip(k, e)): c for k, c in self.terms.items()})

    def degree_in(self, name: str) -> int:
        i = self.catalog.index(name)
        return max(e[i] for e in self.terms) if self.terms else -1

    def total_degree(self, names: Optional[Iterable[str]] = None) -> int:
        idx = [self.catalog.index(v) for v in names] if names is not None else range(len(self.catalog))
        return max(sum(e[i] for i in idx) for e in self.terms) if self.terms else -1

    def coefficient(self, monomial: Mapping[str, int], names: Sequence[str]) -> "SparseLaurent":
        """Coefficient of the monomial in ``names`` (a Laurent polynomial in the rest)."""
        idx = [self.catalog.index(v) for v in names]
        want = tuple(monomial.get(v, 0) for v in names)
        out = {}
        for e, c in self.terms.items():
            if tuple(e[i] for i in idx) == want:
                e2 = list(e)
                for i in idx:
                    e2[i] = 0
                out[tuple(e2)] = c
        return SparseLaurent._raw(self.catalog, out)

    def split(self, names: Sequence[str]) -> dict:
        """Map from exponent tuples in ``names`` to the coefficient polynomials."""
        idx = [self.catalog.index(v) for v in names]
        out: dict = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in idx)
            e2 = list(e)
            for i in idx:
                e2[i] = 0
            out.setdefault(key, {})[tuple(e2)] = c
        return {k: SparseLaurent._raw(self.catalog, v) for k, v in out.items()}

    def substitute(self, values: Mapping[str, object]):
        """Replace the named variables by values (numbers or polynomials)."""
        # ints would turn negative powers into floats
        values = {k: Fraction(v) if isinstance(v, int) else v for k, v in values.items()}
        out = None
        for e, c in self.terms.items():
            t = c
            rest = list(e)
            for i, name in enumerate(self.catalog):
                if name in values and e[i]:
                    t = t * values[name] ** e[i]
                    rest[i] = 0
            if any(rest):
                t = t * SparseLaurent._raw(self.catalog, {tuple(rest): Fraction(1)})
            out = t if out is None else out + t
        if out is None:
            return Fraction(0)
        if isinstance(out, SparseLaurent) and out.is_constant():
            return out.constant_value()
        return out

    def _lead(self):
        e = max(self.terms)
        return e, self.terms[e]

    def exact_div(self, other: "SparseLaurent") -> Optional["SparseLaurent"]:
        """self / other if it is a Laurent polynomial, else None."""
        o = self._lift(other)
        if o.is_zero():
            raise ZeroDivisionError
        if self.is_zero():
            return self
        if o.is_monomial():
            return self * o.monomial_inverse()
        # normalize both to polynomials not divisible by any variable
        so, oo = self.min_exponents(), o.min_exponents()
        rem = self.shift(tuple(-a for a in so))
        den = o.shift(tuple(-a for a in oo))
        dl, dc = den._lead()
        quo: dict = {}
        while rem.terms:
            rl, rc = rem._lead()
            e = tuple(a - b for a, b in zip(rl, dl))
            if any(v < 0 for v in e):
                return None
            c = rc / dc
            quo[e] = c
            rem = rem - den * SparseLaurent._raw(self.catalog, {e: c})
        q = SparseLaurent._raw(self.catalog, quo)
        return q.shift(tuple(a - b for a, b in zip(so, oo)))

    # rendering
    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: (tuple(-v for v in t[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (name if p == 1 else f"{name}^{p}") for name, p in zip(self.catalog, e) if p
            )
            if not mono:
                parts.append(fmt_scalar(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{fmt_scalar(c)}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self):
        return f"SparseLaurent({self})"


class SymbolicRational:
    """num / den of Laurent polynomials; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __new__(cls, num: SparseLaurent, den: SparseLaurent):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return SparseLaurent._raw(num.catalog, {})
        if den.is_monomial():
            return num * den.monomial_inverse()
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @property
    def catalog(self):
        return self.num.catalog

    @staticmethod
    def _parts(v, catalog):
        if isinstance(v, SymbolicRational):
            return v.num, v.den
        if isinstance(v, SparseLaurent):
            return v, SparseLaurent.constant(catalog, 1)
        if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
            return SparseLaurent.constant(catalog, v), SparseLaurent.constant(catalog, 1)
        return None

    def __eq__(self, other):
        p = self._parts(other, self.catalog)
        if p is None:
            return NotImplemented
        n2, d2 = p
        return self.num * d2 == n2 * self.den

    def __hash__(self):  # rationals are compared, not hashed
        raise TypeError("SymbolicRational is unhashable")

    def __bool__(self):
        return True

    def __neg__(self):
        return SymbolicRational(-self.num, self.den)

    def __add__(self, other):
        p = self._parts(other, self.catalog)
        if p is None:
            return NotImplemented
        n2, d2 = p
        if d2 == self.den:
            return SymbolicRational(self.num + n2, self.den)
        return SymbolicRational(self.num * d2 + n2 * self.den, self.den * d2)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        p = self._parts(other, self.catalog)
        if p is None:
            return NotImplemented
        n2, d2 = p
        num, den = self.num * n2, self.den * d2
        return _reduce(num, den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._parts(other, self.catalog)
        if p is None:
            return NotImplemented
        n2, d2 = p
        if n2.is_zero():
            raise ZeroDivisionError
        return _reduce(self.num * d2, self.den * n2)

    def __rtruediv__(self, other):
        p = self._parts(other, self.catalog)
        if p is None:
            return NotImplemented
        n2, d2 = p
        return _reduce(n2 * self.den, d2 * self.num)

    def __pow__(self, k: int):
        if k < 0:
            return SymbolicRational(self.den ** (-k), self.num ** (-k))
        return SymbolicRational(self.num ** k, self.den ** k)

    def substitute(self, values):
        return self.num.substitute(values) / self.den.substitute(values)

    def simplify(self):
        q = self.num.exact_div(self.den)
        return q if q is not None else self

    def __repr__(self):
        return f"SymbolicRational(({self.num}) / ({self.den}))"


def _reduce(num: SparseLaurent, den: SparseLaurent):
    if len(den.terms) <= 4 and len(num.terms) <= 400:
        q = num.exact_div(den)
        if q is not None:
            return q
    return SymbolicRational(num, den)


def substitute(v, values):
    if isinstance(v, (SparseLaurent, SymbolicRational)):
        return v.substitute(values)
    return v


# ----------------------------------------------------------------------------
# symbolic points and materialization

MAX_TINY_VARIABLES = 6
PARAMETER_NAMES = ("q", "d")


def variable_names(sig: AlgebraSignature, degree: Sequence[int]) -> list[list[str]]:
    """x{i}_{a} names, or x, y, z (one variable per color, K <= 3)."""
    if sig.K <= 3 and all(n <= 1 for n in degree):
        letters = "xyz"
        return [[letters[i]] if degree[i] else [] for i in range(sig.K)]
    return [[f"x{i + 1}_{a + 1}" for a in range(n)] for i, n in enumerate(degree)]


def symbolic_point(sig: AlgebraSignature, degree: Sequence[int], with_s: bool = True):
    """Catalog, ParamPoint over SparseLaurent and a symbolic assignment.

    s_K is the monomial (s_1 ... s_{K-1})^{-1}, so the product of the s_i is 1
    identically.
    """
    names = variable_names(sig, degree)
    s_names = [f"s{i}" for i in range(1, sig.K)] if with_s else []
    catalog = tuple(v for row in names for v in row) + PARAMETER_NAMES + tuple(s_names)
    var = lambda v: SparseLaurent.var(catalog, v)
    s = [var(v) for v in s_names]
    if with_s:
        last = SparseLaurent.constant(catalog, 1)
        for v in s:
            last = last * v
        s.append(last.monomial_inverse())
    p = ParamPoint(var("q"), var("d"), tuple(s), None, check=with_s)
    x = tuple(tuple(var(v) for v in row) for row in names)
    return catalog, p, x, names


def materialize_tiny(e, with_s: bool = True):
    """Expand ``e`` as f / (canonical denominator) with f a SparseLaurent.

    Returns (numerator, denominator, catalog, variable names).
    """
    from .shuffle import canonical_denominator, evaluate

    if sum(e.degree) > MAX_TINY_VARIABLES:
        raise SizeExceeded(f"{sum(e.degree)} variables exceeds the cap {MAX_TINY_VARIABLES}")
    catalog, p, x, names = symbolic_point(e.sig, e.degree, with_s)
    val = evaluate(e, p, x)
    den = canonical_denominator(e.sig, x)
    if isinstance(den, Fraction):
        den = SparseLaurent.constant(catalog, den)
    prod = val * den
    if isinstance(prod, SymbolicRational):
        f = prod.num.exact_div(prod.den)
        if f is None:
            raise ValueError("element is not a Laurent numerator over the canonical denominator")
    elif isinstance(prod, SparseLaurent):
        f = prod
    else:
        f = SparseLaurent.constant(catalog, prod)
    return f, den, catalog, names


# ----------------------------------------------------------------------------
# the three-dimensional worked example for gl(2|1), N = 1


def example_catalog():
    return symbolic_point(AlgebraSignature(2, 1), (1, 1, 1))[0]


def example_family(catalog):
    """xyz and the two d-twisted cyclic families (numerators over (x-y)(y-z)(x-z))."""
    x, y, z, q, d, s1, s2 = SparseLaurent.variables(catalog)
    family_B = s1 * s2 * d ** 2 * x ** 2 * y + s2 * d ** 2 * y ** 2 * z + z ** 2 * x
    family_C = s1 * s2 * d ** 2 * y ** 2 * x + s1 * x ** 2 * z + z ** 2 * y
    return x * y * z, family_B, family_C


def example_expected(catalog):
    """Printed numerators of G_0, G_1, G_2 over (x-y)(y-z)(z-x)."""
    x, y, z, q, d, s1, s2 = SparseLaurent.variables(catalog)
    xyz, fB, fC = example_family(catalog)
    q2 = q ** 2
    q1 = d * q.monomial_inverse()
    q3i = q * d
    qi = q.monomial_inverse()
    g0 = qi * (1 - q2) ** 2 * xyz
    g1 = qi * (1 - q2) ** 2 * (fC - (q1 + q3i) * s1 * s2 * xyz)
    g2 = (1 - q2) * (
        -(q - qi) * s1 * fB
        + (q ** 2 - qi ** 2) * s1 * s2 * d * fC
        - (q ** 3 - qi ** 3) * s1 ** 2 * s2 ** 2 * d ** 2 * xyz
    )
    return [g0, g1, g2]


def first_mismatch(got: SparseLaurent, want: SparseLaurent) -> Optional[dict]:
    diff = got - want
    if diff.is_zero():
        return None
    names = [v for v in got.catalog if v in "xyz"]
    for key, coeff in sorted(diff.split(names).items(), reverse=True):
        mono = "*".join(f"{v}^{k}" for v, k in zip(names, key) if k) or "1"
        return {
            "monomial": mono,
            "got": str(got.split(names).get(key, 0)),
            "expected": str(want.split(names).get(key, 0)),
        }
    return None


def reproduce_worked_example() -> list[Check]:
    """Materialize G_0, G_1, G_2 for gl(2|1), N = 1 and compare with the printed numerators."""
    from .bethe import G

    sig = AlgebraSignature(2, 1)
    out = []
    catalog = None
    expected = None
    for r in range(3):
        f, den, catalog, _ = materialize_tiny(G(sig, r, 1))
        if expected is None:
            expected = example_expected(catalog)
        chk = Check(f"worked-example-G{r}", "worked-example-gl21", {"r": r, "N": 1}, trials=1)
        want = expected[r]
        # the canonical denominator is (x-y)(y-z)(z-x), the orientation of the printed G displays
        if f == want:
            chk.notes = "exact match over (x-y)(y-z)(z-x)"
        elif f == -want:
            chk.notes = "match up to a global sign"
            chk.fail(reason="global sign differs")
        else:
            chk.fail(**(first_mismatch(f, want) or {}))
        chk.params["numerator"] = str(f)
        out.append(chk)
    return out
