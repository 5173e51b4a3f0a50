"""Signatures (m, n), parameter points and structure functions.

Colors are 1-based, ``1..K`` with ``K = m + n``; any integer index is reduced
with :meth:`AlgebraSignature.color`.  Colors ``m`` and ``m + n`` are fermionic
when ``n >= 1``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Optional

from .exact import random_scalar


@dataclass(frozen=True)
class AlgebraSignature:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 0:
            raise ValueError(f"need m >= 1 and n >= 0, got ({self.m}, {self.n})")
        if self.m == self.n:
            raise ValueError("m == n is not supported")

    @property
    def K(self) -> int:
        return self.m + self.n

    def color(self, i: int) -> int:
        return (i - 1) % self.K + 1

    @property
    def fermionic(self) -> frozenset:
        return frozenset({self.m, self.K}) if self.n >= 1 else frozenset()

    def is_fermionic(self, i: int) -> bool:
        return self.color(i) in self.fermionic

    def before_equator(self, i: int) -> bool:
        return 1 <= self.color(i) <= self.m - 1

    def after_equator(self, i: int) -> bool:
        return self.m + 1 <= self.color(i) <= self.K - 1

    @property
    def label(self) -> str:
        return f"gl({self.m}|{self.n})"

    def cyclic_dual(self) -> "AlgebraSignature":
        """The signature (n, m) of the cyclically relabeled algebra."""
        return AlgebraSignature(self.n, self.m)


@dataclass(frozen=True)
class ParamPoint:
    """Exact values of q, d (and s_1..s_K); q_1, q_2, q_3 are derived.

    Field elements may be ints, Fractions or any object with field operations
    (the symbolic backend passes Laurent monomials here).
    """

    q: Any
    d: Any
    s: tuple = ()
    kappa: Any = None
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        # plain ints would turn 1/(q*d) into a float
        for name in ("q", "d", "kappa"):
            v = getattr(self, name)
            if isinstance(v, int) and not isinstance(v, bool):
                object.__setattr__(self, name, Fraction(v))
        object.__setattr__(
            self, "s", tuple(Fraction(v) if isinstance(v, int) else v for v in self.s)
        )
        if self.check and self.s:
            prod = 1
            for v in self.s:
                prod = prod * v
            if prod != 1:
                raise ValueError("the s parameters must multiply to 1")

    @cached_property
    def q1(self):
        return self.d / self.q

    @cached_property
    def q2(self):
        return self.q * self.q

    @cached_property
    def q3(self):
        return 1 / (self.q * self.d)

    def qs(self, name: str, power: int = 1):
        base = {"q1": self.q1, "q2": self.q2, "q3": self.q3, "q": self.q, "d": self.d}[name]
        return base ** power

    def s_at(self, i: int):
        """s_i with the index read modulo K."""
        K = len(self.s)
        return self.s[(i - 1) % K]

    def cumulative_s(self, i: int):
        """bold-s_i = s_1 ... s_{i-1}; equals 1 for i = 1."""
        out = 1
        for j in range(1, i):
            out = out * self.s[j - 1]
        return out

    def with_s(self, s) -> "ParamPoint":
        return ParamPoint(self.q, self.d, tuple(s), self.kappa, self.check)


def point_from_q1(q, q1, s=(), kappa=None) -> ParamPoint:
    """ParamPoint with d fixed by q_1 = d/q."""
    return ParamPoint(q, q * q1, s, kappa)


def sample_generic_point(
    sig: AlgebraSignature,
    rng: random.Random,
    bound: int = 1000,
    kappa_power: Optional[int] = None,
) -> ParamPoint:
    """Random exact parameter point; s_K closes the product to 1.

    With ``kappa_power = e`` a root witness kappa is sampled first and
    ``q_1 = kappa**e`` (so fractional powers of q_1 become integer powers of kappa).
    """
    while True:
        q = random_scalar(rng, bound)
        kappa = None
        if kappa_power is not None:
            kappa = random_scalar(rng, bound)
            d = q * kappa ** kappa_power
        else:
            d = random_scalar(rng, bound)
        # a rational q_i is a root of unity only if it is +-1
        if all(abs(v) != 1 for v in (q, d / q, q * d, kappa or 2)):
            break
    s = [random_scalar(rng, bound) for _ in range(sig.K - 1)]
    prod = Fraction(1)
    for v in s:
        prod *= v
    s.append(1 / prod)
    return ParamPoint(q, d, tuple(s), kappa)


class StructureFunctions:
    """omega_{i,j}(x, y) for one signature at one parameter point.

    Each nontrivial entry is stored as (prefactor, roots, pole order), meaning
    ``prefactor * prod(x - r*y for r in roots) / (x - y)**order``.
    """

    def __init__(self, sig: AlgebraSignature, p: ParamPoint):
        self.sig = sig
        self.p = p
        self.table: dict[tuple[int, int], tuple] = {}
        self._build()

    def _build(self):
        sig, p = self.sig, self.p
        m, n, K = sig.m, sig.n, sig.K
        q1, q2, q3, d = p.q1, p.q2, p.q3, p.d
        t = self.table
        if K == 1:
            t[1, 1] = (1, (q1, q2, q3), 3)
            return
        if n == 0 and m == 2:
            t[1, 1] = t[2, 2] = (1, (q2,), 1)
            t[1, 2] = t[2, 1] = (1, (q1, q3), 2)
            return
        for i in range(1, K + 1):
            im = sig.color(i - 1)
            if n == 0 or 1 <= i <= m - 1:
                t[i, i] = (1, (q2,), 1)
            elif m + 1 <= i <= K - 1:
                t[i, i] = (1, (1 / q2,), 1)
            # omega_{i-1,i}
            if n == 0 or 1 <= i <= m:
                t[im, i] = (1, (q1,), 1)
            else:
                t[im, i] = (1, (1 / q1,), 1)
            # omega_{i,i-1}
            if n == 0 or 1 <= i <= m:
                t[i, im] = (d, (q3,), 1)
            else:
                t[i, im] = (1 / d, (1 / q3,), 1)

    @property
    def nontrivial_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.table)

    def __call__(self, i: int, j: int, x, y):
        entry = self.table.get((self.sig.color(i), self.sig.color(j)))
        if entry is None:
            return 1
        pref, roots, order = entry
        num = pref
        for r in roots:
            num = num * (x - r * y)
        den = x - y
        if order > 1:
            den = den ** order
        return num / den

    def entry(self, i: int, j: int):
        return self.table.get((self.sig.color(i), self.sig.color(j)))


def omega(sig: AlgebraSignature, p: ParamPoint, i: int, j: int, x, y):
    """Structure function omega_{i,j}(x, y); 1 for non-adjacent colors."""
    return structure_functions(sig, p)(i, j, x, y)


_SF_CACHE: dict = {}


def structure_functions(sig: AlgebraSignature, p: ParamPoint) -> StructureFunctions:
    key = (sig, p.q, p.d)
    try:
        sf = _SF_CACHE.get(key)
    except TypeError:
        return StructureFunctions(sig, p)
    if sf is None:
        if len(_SF_CACHE) > 256:
            _SF_CACHE.clear()
        sf = _SF_CACHE[key] = StructureFunctions(sig, p)
    return sf
