"""Fusion homomorphisms Sh0_{m|n} -> Sh0_{m|n-1} (x) Sh_1 and Sh_m -> Sh_{m-1} (x) Sh_1.

A fusion stage specializes the source variables along q-geometric strings
(y-strings for the first L indices, z-strings for the rest) and divides by a
correction factor.  Images are kept as *tensor maps*: dictionaries from a
component key (one degree vector per tensor factor) to a callable of the
per-factor assignments.  The tensor product of such maps is the
factorwise shuffle product with no extra sign between factors.

Fractional powers of q_1 never appear: every stage samples (or derives) a root
witness kappa and defines q_1 as an integer power of it.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

from .exact import UniPoly, UniRatFunction, as_ratfunc, random_scalar
from .report import Check
from .shuffle import (
    DEFAULT_BOUND,
    DEFAULT_RESAMPLE_BUDGET,
    DEFAULT_TRIALS,
    ShuffleElement,
    Unit,
    _divides_by_coordinates,
    _splittings,
    canonical_denominator,
    check_pole_shape,
    check_symmetry,
    check_wheel,
    evaluate,
    random_assignment,
    with_resampling,
)
from .signature import AlgebraSignature, ParamPoint, structure_functions

SH1 = AlgebraSignature(1, 0)

VARIANTS = ("printed", "erratum", "alt-denominator")


def _prod(values):
    out = Fraction(1)
    for v in values:
        out = out * v
    return out


# ----------------------------------------------------------------------------
# stages


@dataclass(frozen=True)
class FusionStage:
    """One fusion map out of ``sig`` at the source point ``p`` (which carries kappa).

    ``variant`` selects the correction factor:

    * ``printed``: the displayed factors, literally;
    * ``erratum``: the n = 1 C factor reads y_m where y_{m-1} is displayed, and
      a degenerate source or target (Sh_2, or Sh_1 out of Sh_2) gets the
      rescaling that matches its d-free structure functions;
    * ``alt-denominator``: ``erratum`` with the repeated q_3^{m-2} pole of the
      color-m C factor replaced by q_3^m (kept to show that this reading fails).
    """

    sig: AlgebraSignature
    p: ParamPoint
    variant: str = "printed"

    def __post_init__(self):
        m, n = self.sig.m, self.sig.n
        if n >= 1 and m < n + 1:
            raise ValueError("fusion needs m >= n + 1")
        if n == 0 and m < 2:
            raise ValueError("the one-color fusion needs m >= 2")
        if self.p.kappa is None:
            raise ValueError("the source point needs a root witness kappa")
        if self.p.q1 != self.p.kappa ** kappa_exponent(self.sig):
            raise ValueError("q_1 must equal kappa ** kappa_exponent(sig)")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def tilde(self) -> bool:
        return self.sig.n == 0

    @property
    def kappa(self):
        return self.p.kappa

    @cached_property
    def target_sig(self) -> AlgebraSignature:
        m, n = self.sig.m, self.sig.n
        return AlgebraSignature(m - 1, 0) if self.tilde else AlgebraSignature(m, n - 1)

    @cached_property
    def target_point(self) -> ParamPoint:
        """(q, d * kappa): q_1 -> q_1 kappa, q_3 -> q_3 / kappa, q_2 fixed."""
        p = self.p
        return ParamPoint(p.q, p.d * self.kappa, transported_s(self.sig, p.s))

    @cached_property
    def aux_point(self) -> ParamPoint:
        """Point of the Sh_1 factor; only the triple (q_1, q_2, q_3) matters there."""
        p, m, n = self.p, self.sig.m, self.sig.n
        if self.tilde:
            # (q_1 q_3^{1-m}, q_2, q_3^m)
            return ParamPoint(p.q, p.q * p.q1 * p.q3 ** (1 - m), (Fraction(1),))
        # (q_1^{-1} q_3^{-m+n-1}, q_2^{-1}, q_3^{m-n})
        qq = 1 / p.q
        return ParamPoint(qq, qq / p.q1 * p.q3 ** (n - m - 1), (Fraction(1),))

    @property
    def factors(self) -> list:
        return [(self.target_sig, self.target_point), (SH1, self.aux_point)]

    # -- specialization ------------------------------------------------------

    def specialize(self, y, z) -> tuple:
        """Source assignment from y (one row of length L per target color) and z."""
        p, k = self.p, self.kappa
        m, K = self.sig.m, self.sig.K
        q1, q3 = p.q1, p.q3
        z = tuple(z)
        rows = []
        for i in range(1, K + 1):
            if self.tilde:
                src = y[0] if i == m else y[i - 1]
                ys = [k ** (i - m) * v for v in src]
                zs = [q3 ** (i - 1) * v for v in z]
            else:
                if i <= m:
                    ys = [q1 * k ** i * v for v in y[i - 1]]
                elif i < K:
                    ys = [q1 * k ** (2 * m - i) * v for v in y[i - 1]]
                else:
                    ys = [q1 * v for v in y[K - 2]]
                e = -1 if i == K else (i - 1 if i < m else 2 * m - i - 1)
                zs = [q3 ** e * v for v in z]
            rows.append(tuple(ys) + tuple(zs))
        return tuple(rows)

    # -- correction factor ---------------------------------------------------

    def correction(self, y, z):
        if self.tilde:
            out = _tilde_factor(self, y, z)
        else:
            out = _abc(self, y, z, fix_n1=self.variant != "printed",
                       alt_denominator=self.variant == "alt-denominator")
        if self.variant != "printed":
            L = len(y[0]) if y else 0
            N = L + len(z)
            out = out * degenerate_scale(self.target_sig, self.target_point, L)
            out = out / degenerate_scale(self.sig, self.p, N)
        return out

    def pi_value(self, fn: Callable, y, z):
        """Component value: fn at the specialization divided by the correction factor."""
        x = self.specialize(y, z)
        return fn(x) / self.correction(y, z)

    def apply(self, e: ShuffleElement) -> dict:
        """Tensor map of pi(e); keys ((L,)*K', (N-L,)) for L = 0..N."""
        if not e.in_sh0:
            raise ValueError("fusion acts on equal-degree elements")
        base = {(tuple(e.degree),): lambda vs: evaluate(e, self.p, vs[0])}
        return self.apply_to_map(base, 0)

    def apply_to_map(self, tmap: dict, index: int) -> dict:
        """Fuse tensor factor ``index`` of an existing tensor map."""
        Kt = self.target_sig.K
        out = {}
        for key, fn in tmap.items():
            N = key[index][0] if key[index] else 0
            for L in range(N + 1):
                newkey = key[:index] + ((L,) * Kt, (N - L,)) + key[index + 1:]

                def comp(vs, fn=fn):
                    y, zrow = vs[index], vs[index + 1]
                    z = zrow[0]
                    x = self.specialize(y, z)
                    inner = vs[:index] + (x,) + vs[index + 2:]
                    return fn(inner) / self.correction(y, z)

                out[newkey] = comp
        return out


def degenerate_scale(sig: AlgebraSignature, p: ParamPoint, N: int):
    """d^{N(N-1)} for Sh_2 and d^{N(N-1)/2} for Sh_1, else 1.

    Multiplying degree-N elements by this maps the d-free degenerate algebra
    onto the one whose structure functions follow the generic Sh_m pattern
    (one d per ordered adjacent color pair).
    """
    if sig.n == 0 and sig.m == 2:
        return p.d ** (N * (N - 1))
    if sig.K == 1:
        return p.d ** (N * (N - 1) // 2)
    return Fraction(1)


def kappa_exponent(sig: AlgebraSignature) -> int:
    """e with q_1 = kappa**e at the source of a fusion stage."""
    return sig.m - 1 if sig.n == 0 else -(sig.m - sig.n + 1)


def transported_s(sig: AlgebraSignature, s: Sequence) -> tuple:
    """s for the target factor.

    n >= 1: bold-s_i is kept for i < K, so s_{K-1} and s_K merge.
    n = 0: s~_1 = (s_2 ... s_{m-1})^{-1}, s~_i = s_i for 2 <= i <= m-2, and the
    last entry closes the product.
    """
    s = tuple(s)
    if not s:
        return ()
    K = sig.K
    if sig.n >= 1:
        return s[:K - 2] + (s[K - 2] * s[K - 1],)
    m = sig.m
    if m == 2:
        return (Fraction(1),)
    first = 1 / _prod(s[1:m - 1])
    mid = s[1:m - 2]
    return (first,) + tuple(mid) + (1 / (first * _prod(mid)),)


def sample_stage(sig: AlgebraSignature, rng: random.Random, bound: int = DEFAULT_BOUND,
                 variant: str = "printed") -> FusionStage:
    """Random source point with a root witness, wrapped as a fusion stage."""
    from .signature import sample_generic_point

    p = sample_generic_point(sig, rng, bound, kappa_power=kappa_exponent(sig))
    return FusionStage(sig, p, variant)


# ----------------------------------------------------------------------------
# correction factors


def _abc(st: FusionStage, y, z, fix_n1: bool = False, alt_denominator: bool = False):
    p, k = st.p, st.kappa
    m, n, K = st.sig.m, st.sig.n, st.sig.K
    q1, q2, q3, d = p.q1, p.q2, p.q3, p.d
    Kt = K - 1
    Y = lambda i: y[(i - 1) % Kt]  # y_0 is y_{K-1}
    L = len(y[0]) if y else 0
    out = Fraction(1)
    # A
    for i in range(0, m):
        for ya in Y(i):
            for yb in Y(i + 1):
                out = out * (ya - yb) / (ya - k * yb)
    if n > 1:
        for i in range(m, K - 1):
            for ya in Y(i):
                for yb in Y(i + 1):
                    out = out * (ya - yb) / (ya - yb / k)
    last = Y(K - 1)
    for a in range(L):
        for b in range(a + 1, L):
            ya, yb = last[a], last[b]
            if n > 1:
                num = (ya - q2 * yb) * (ya - yb / q2)
            else:
                num = (ya - yb) ** 2
            out = out * num / (d * (ya - q1 * yb) * (ya - yb / q1))
    # B
    for a in range(len(z)):
        for b in range(a + 1, len(z)):
            za, zb = z[a], z[b]
            r = (za - q2 * zb) * (za - zb / q2) / ((za - q3 * zb) * (za - zb / q3))
            out = out * d ** (m - n) * r ** (K - 2)
            out = out * (za - zb) ** 2 / ((za - q3 * zb) * (za - zb / q3))
            out = out * (za - zb) ** 2 / ((za - q3 ** (m - n + 1) * zb) * (za - q3 ** (n - m - 1) * zb))
    # C
    for zb in z:
        for i in range(1, m):
            for yv in Y(i):
                X = q1 * k ** i * yv
                out = out * d * (X - q2 * q3 ** (i - 1) * zb) * (X - q3 ** (i - 1) * zb / q2)
                out = out / ((X - q3 ** i * zb) * (X - q3 ** (i - 2) * zb))
        if n > 1:
            for yv in Y(m):
                X = q1 * k ** m * yv
                num = (X - q3 ** (m - 1) * zb) * (X - q2 * q3 ** (m - 1) * zb)
                d2 = q3 ** m if alt_denominator else q3 ** (m - 2)
                out = out * num / (d * (X - q3 ** (m - 2) * zb) * (X - d2 * zb))
            for i in range(m + 1, K - 1):
                e = 2 * m - i - 1
                for yv in Y(i):
                    X = q1 * k ** (2 * m - i) * yv
                    num = (X - q2 * q3 ** e * zb) * (X - q3 ** e * zb / q2)
                    out = out * num / (d * (X - q3 ** (e + 1) * zb) * (X - q3 ** (e - 1) * zb))
            for yv in Y(K - 1):
                num = (yv - q2 * q3 ** (m - n) * zb) * (yv - q3 ** (m - n) * zb / q2)
                den = (yv - q3 ** (m - n + 1) * zb) * (yv - q3 ** (m - n) * zb / q1)
                out = out * num / den
                out = out * (yv - q2 * zb) * (yv - zb) / ((yv - zb / q3) * (yv - zb / q1))
        else:
            for a, yv in enumerate(Y(m)):
                prev = yv if fix_n1 else Y(m - 1)[a]
                num = (yv - q3 ** (m - 2) * zb / q1) * (yv - q3 ** (m - 1) * zb)
                den = (prev - q3 ** (m - 2) * zb) * (yv - q3 ** (m - 1) * zb / q1)
                out = out * num / den
                out = out * (yv - q2 * zb) * (yv - zb) / ((yv - zb / q3) * (yv - zb / q1))
    return out


def _lemma_numerator(st: FusionStage, y, z):
    """Product of the factors split off rho(f) in the defining relation of f-bar."""
    p, k = st.p, st.kappa
    m, n, K = st.sig.m, st.sig.n, st.sig.K
    q1, q2, q3 = p.q1, p.q2, p.q3
    last = y[K - 2]
    out = Fraction(1)
    if n > 1:
        for ya in last:
            for yb in last:
                out = out * (ya - q2 * yb)
    else:
        for a, ya in enumerate(last):
            out = out * ya
            for yb in last[a + 1:]:
                out = out * (ya - yb) ** 2
    for za in z:
        for zb in z:
            out = out * (za - q2 * zb) ** (K - 2)
    for a in range(len(z)):
        for b in range(a + 1, len(z)):
            out = out * (z[a] - z[b]) ** 2
    for zb in z:
        for i in range(1, m):
            for yv in y[i - 1]:
                X = q1 * k ** i * yv
                out = out * (X - q2 * q3 ** (i - 1) * zb) * (X - q3 ** (i - 1) * zb / q2)
        for i in range(m + 1, K):
            e = 2 * m - i - 1
            for yv in y[i - 1]:
                X = q1 * k ** (2 * m - i) * yv
                out = out * (X - q2 * q3 ** e * zb) * (X - q3 ** e * zb / q2)
        for a, yv in enumerate(y[m - 1]):
            X = q1 * k ** m * yv
            out = out * (X - q2 * q3 ** (m - 1) * zb) * (X - q3 ** (m - 1) * zb)
            w = last[a]
            out = out * (w - zb) * (w - q2 * zb)
    return out


def target_denominator(st: FusionStage, y, z):
    """Canonical denominator of the target factor times prod_{a<b} (z_a - z_b)^2."""
    out = canonical_denominator(st.target_sig, y) if y and y[0] else Fraction(1)
    for a in range(len(z)):
        for b in range(a + 1, len(z)):
            out = out * (z[a] - z[b]) ** 2
    return out


def _lemma_factor(st: FusionStage, y, z):
    """Correction factor implied by the numerator relation, with constant 1."""
    x = st.specialize(y, z)
    return _lemma_numerator(st, y, z) * target_denominator(st, y, z) / canonical_denominator(st.sig, x)


def _tilde_factor(st: FusionStage, y, z):
    p, k = st.p, st.kappa
    m = st.sig.m
    q1, q2, q3, d = p.q1, p.q2, p.q3, p.d
    Y = lambda i: y[0] if i == m else y[i - 1]  # y_m is y_1
    y1 = y[0] if y else ()
    L = len(y1)
    out = Fraction(1)
    for a in range(L):
        for b in range(a + 1, L):
            ya, yb = y1[a], y1[b]
            out = out * d * (ya - q2 * yb) * (ya - yb / q2) / ((ya - q1 * yb) * (ya - yb / q1))
    for i in range(1, m):
        for a, ya in enumerate(Y(i)):
            for b, yb in enumerate(Y(i + 1)):
                if a == b and (i + 1 == m) and m == 2:
                    continue  # y_2 is y_1 here: the diagonal entry is 0/0
                out = out * (ya - yb) / (ya - k * yb)
    for a in range(len(z)):
        for b in range(a + 1, len(z)):
            za, zb = z[a], z[b]
            r = d * (za - q2 * zb) * (za - zb / q2) / ((za - q3 * zb) * (za - zb / q3))
            out = out * r ** (m - 1)
            out = out * d * (za - zb) ** 2 / ((za - q3 ** (m - 1) * zb) * (za - q3 ** (1 - m) * zb))
    for zb in z:
        for i in range(2, m):
            for yv in Y(i):
                X = k ** (i - m) * yv
                num = (X - q1 * q3 ** i * zb) * (X - q3 ** (i - 2) * zb / q1)
                out = out * d * num / ((X - q3 ** i * zb) * (X - q3 ** (i - 2) * zb))
        for yv in y1:
            out = out * d ** 2 * (yv - q1 ** 2 * q3 * zb) * (yv - zb / q3) / ((yv - q1 * q3 * zb) * (yv - zb))
            num = (yv - q3 ** (m - 2) * zb / q1) * (yv - q1 * q3 ** m * zb)
            out = out * num / ((yv - q3 ** (m - 2) * zb) * (yv - q1 * q3 ** (m - 1) * zb))
    return out


# ----------------------------------------------------------------------------
# tensor maps


def unit_map(factors: list) -> dict:
    key = tuple((0,) * sig.K for sig, _ in factors)
    return {key: lambda vs: Fraction(1)}


def tensor_product_value(factors: list, left: dict, right: dict, key: tuple, vs: tuple):
    """Component ``key`` of left * right at the per-factor assignment ``vs``."""
    sfs = [structure_functions(sig, p) for sig, p in factors]
    total = Fraction(0)
    for lkey, lfn in left.items():
        rkey = tuple(tuple(a - b for a, b in zip(kf, lf)) for kf, lf in zip(key, lkey))
        if any(v < 0 for deg in rkey for v in deg):
            continue
        rfn = right.get(rkey)
        if rfn is None:
            continue
        per_factor = []
        for (sig, _), ld, rd in zip(factors, lkey, rkey):
            ferm = [sig.is_fermionic(i) for i in range(1, sig.K + 1)]
            per_factor.append(list(itertools.product(*_splittings(ld, rd, ferm))))
        for choice in itertools.product(*per_factor):
            sign = 1
            lv, rv = [], []
            for x, ch in zip(vs, choice):
                for _, _, s in ch:
                    sign *= s
                lv.append(tuple(tuple(x[c][a] for a in ch[c][0]) for c in range(len(ch))))
                rv.append(tuple(tuple(x[c][b] for b in ch[c][1]) for c in range(len(ch))))
            fv = lfn(tuple(lv))
            if fv == 0:
                continue
            term = fv * rfn(tuple(rv))
            for sf, x, ch in zip(sfs, vs, choice):
                for i, j in sf.nontrivial_pairs:
                    for a in ch[i - 1][0]:
                        for b in ch[j - 1][1]:
                            term = term * sf(i, j, x[i - 1][a], x[j - 1][b])
            total = total + (term if sign == 1 else -term)
    return total


def random_factor_assignment(key: tuple, rng: random.Random, bound: int = DEFAULT_BOUND) -> tuple:
    return tuple(random_assignment(deg, rng, bound) for deg in key)


# ----------------------------------------------------------------------------
# checks


def homomorphism_check(stage: FusionStage, F: ShuffleElement, G: ShuffleElement, rng: random.Random,
                       trials: int = DEFAULT_TRIALS, bound: int = DEFAULT_BOUND,
                       budget: int = DEFAULT_RESAMPLE_BUDGET, name: str = "fusion-homomorphism") -> Check:
    """pi(F * G) = pi(F) * pi(G) on every component, exactly, at random points."""
    sig = stage.sig
    chk = Check(name, "fusion-homomorphism",
                {"signature": sig.label, "M": F.degree[0] if F.degree else 0,
                 "N": G.degree[0] if G.degree else 0, "variant": stage.variant,
                 "target": stage.target_sig.label})
    lhs_map = stage.apply(F * G)
    pf, pg = stage.apply(F), stage.apply(G)
    factors = stage.factors
    for key in sorted(lhs_map):
        for t in range(trials):
            def attempt():
                vs = random_factor_assignment(key, rng, bound)
                return vs, lhs_map[key](vs), tensor_product_value(factors, pf, pg, key, vs)
            vs, lhs, rhs = with_resampling(attempt, budget)
            chk.trials += 1
            if lhs != rhs:
                return chk.fail(component=[list(k) for k in key], trial=t, point=vs, lhs=lhs, rhs=rhs)
    return chk


class _FrozenComponent(ShuffleElement):
    """One tensor factor of a component, the other factors held at fixed values."""

    def __init__(self, fn: Callable, sig: AlgebraSignature, key: tuple, index: int, others: tuple):
        self.fn, self.sig, self.index, self.others = fn, sig, index, others
        self.degree = tuple(key[index])

    def _eval(self, ctx, x):
        vs = self.others[:self.index] + (x,) + self.others[self.index + 1:]
        return self.fn(vs)

    def __repr__(self):
        return f"FrozenComponent(factor={self.index}, degree={list(self.degree)})"


def frozen_factor(tmap: dict, key: tuple, factors: list, index: int, rng: random.Random,
                  bound: int = DEFAULT_BOUND) -> ShuffleElement:
    others = random_factor_assignment(key, rng, bound)
    return _FrozenComponent(tmap[key], factors[index][0], key, index, others)


def check_image_validity(stage: FusionStage, e: ShuffleElement, rng: random.Random,
                         trials: int = 2, bound: int = DEFAULT_BOUND, budget: int = DEFAULT_RESAMPLE_BUDGET,
                         name: str = "fusion-image") -> list[Check]:
    """Symmetry, wheel and pole shape of every component in each tensor factor."""
    tmap = stage.apply(e)
    factors = stage.factors
    out = []
    for key in sorted(tmap):
        for idx, (sig, p) in enumerate(factors):
            if sum(key[idx]) == 0:
                continue
            elem = with_resampling(lambda: _probe(frozen_factor(tmap, key, factors, idx, rng, bound), p), budget)
            label = f"{name}[{stage.sig.label}->{'target' if idx == 0 else 'Sh1'},key={[list(k) for k in key]}]"
            checks = [
                check_symmetry(elem, p, rng, trials, bound, budget, name=label + ":symmetry"),
                check_wheel(elem, p, rng, trials, bound, budget, max_tuples=4, name=label + ":wheel"),
                check_pole_shape(elem, p, rng, 1, bound, budget, name=label + ":pole-shape"),
            ]
            for c in checks:
                c.anchor = "fusion-image-in-target-algebra"
                c.params["source"] = stage.sig.label
                c.params["variant"] = stage.variant
            out.extend(checks)
    return out


def _probe(elem: ShuffleElement, p: ParamPoint) -> ShuffleElement:
    # fails fast (and triggers a resample) when the frozen values are degenerate
    evaluate(elem, p, random_assignment(elem.degree, random.Random(0)))
    return elem


# ----------------------------------------------------------------------------
# closed forms of fused generating series


def fused_series_closed_form(stage: FusionStage, N: int, star: bool, component: str,
                             printed: bool = False) -> Callable:
    """Closed form of pi(G_N(u)) (or pi(G*_N(u))) on a pure component, at w = 1/u.

    ``component`` is ``y`` for (N, 0) and ``z`` for (0, N).  With ``printed``
    the one-color formulas are taken literally; otherwise the argument of the
    fused series carries bold-s_m and the z-product runs over i = 2..m, which
    is what the map actually produces.  For n = 1 the starred target series
    is (1 / canonical denominator) times the product of J*-series over
    colors 1..m (the target has no fermionic colors, so no P* exists there).
    """
    from .bethe import J_series, eval_eps, eval_G_series

    sig = stage.sig
    p, tp, ap = stage.p, stage.target_point, stage.aux_point
    tsig, k = stage.target_sig, stage.kappa
    m, n, K = sig.m, sig.n, sig.K
    q1, q3 = p.q1, p.q3
    S = p.cumulative_s
    if star and n == 0:
        raise ValueError("G* needs n >= 1")
    if component == "z" and n >= 1 and not star:
        raise ValueError("the unstarred (0, N) closed form has unspecified inner constants")

    def starred_target(y, w):
        if tsig.n >= 1:
            return eval_G_series(tsig, tp, y, w, star=True)
        out = 1 / canonical_denominator(tsig, y)
        for i in range(1, tsig.K + 1):
            out = out * J_series(tsig, tp, y, i, w, star=True)
        return out

    def closed_form(y, z, w):
        if component == "y":
            if n == 0:
                shift = 1 if printed else S(m)
                return (1 - q1 ** N * w) * eval_G_series(tsig, tp, y, shift * w / k ** N)
            if not star:
                return eval_G_series(tsig, tp, y, w / k ** N) / (1 - S(K) * q1 ** N * w)
            return (1 - S(K) * w / q1 ** N) * starred_target(y, w * k ** N)
        eps = eval_eps(ap, z, "q2")
        if n == 0:
            out = 1 - q3 ** ((m - 1) * N) * w
            for i in (range(1, m) if printed else range(2, m + 1)):
                out = out * (1 - S(i) * w / q3 ** N)
            return out * eps
        out = 1 - S(K) * q3 ** ((m - n + 1) * N) * w
        for i in range(m + 1, K):
            out = out * (1 - S(i) * q3 ** N * w)
        for i in range(1, m + 1):
            out = out / (1 - S(i) * q3 ** N * w)
        return out * eps

    return closed_form


def check_surjectivity_formula(sig: AlgebraSignature, N: int, rng: random.Random, star: bool = False,
                               component: str = "y", u_samples: int = 3, points: int = 3,
                               bound: int = DEFAULT_BOUND, budget: int = DEFAULT_RESAMPLE_BUDGET,
                               variant: str = "erratum", printed_form: bool = False) -> Check:
    """pi(G_N(u)) on a pure component against its closed form; the ratio must be one constant."""
    from .bethe import eval_G_series

    stage = sample_stage(sig, rng, bound, variant)
    tsig = stage.target_sig
    closed = fused_series_closed_form(stage, N, star, component, printed_form)
    chk = Check(f"fusion-series{'-star' if star else ''}-{component}[{sig.label},N={N}]",
                "fused-generating-series",
                {"signature": sig.label, "N": N, "star": star, "component": component,
                 "variant": variant, "printed_form": printed_form})
    key = ((N,) * tsig.K, (0,)) if component == "y" else ((0,) * tsig.K, (N,))
    ratios = set()
    for t in range(points):
        vs = None
        for s in range(u_samples):
            def attempt():
                vs_ = vs or random_factor_assignment(key, rng, bound)
                w = random_scalar(rng, bound)
                y, z = vs_[0], vs_[1][0]
                x = stage.specialize(y, z)
                lhs = eval_G_series(sig, stage.p, x, w, star=star) / stage.correction(y, z)
                return vs_, w, lhs, closed(y, z, w)
            vs, w, lhs, rhs = with_resampling(attempt, budget)
            chk.trials += 1
            if rhs == 0:
                if lhs != 0:
                    return chk.fail(point=vs, w=w, lhs=lhs, reason="closed form vanishes alone")
                continue
            ratios.add(lhs / rhs)
            if len(ratios) > 1:
                return chk.fail(point=vs, w=w, ratios=sorted(map(str, ratios)),
                                reason="ratio is not constant")
    if ratios:
        c = next(iter(ratios))
        chk.params["constant"] = c
        if c == 0:
            chk.fail(reason="zero proportionality constant")
    return chk


def surjectivity_probes(sig: AlgebraSignature, rng: random.Random, max_N: int = 2,
                        variant: str = "erratum", printed_form: bool = False, **kw) -> list[Check]:
    """Every probed (star, component) closed form for N = 1..max_N."""
    opts = [(False, "y"), (False, "z")] if sig.n == 0 else [(False, "y"), (True, "y"), (True, "z")]
    return [check_surjectivity_formula(sig, N, rng, star, comp, variant=variant,
                                       printed_form=printed_form, **kw)
            for N in range(1, max_N + 1) for star, comp in opts]


def check_lemma_consistency(stage: FusionStage, N: int, L: int, rng: random.Random, points: int = 2,
                            bound: int = DEFAULT_BOUND, budget: int = DEFAULT_RESAMPLE_BUDGET) -> Check:
    """The correction factor against the numerator relation.

    That relation fixes the factor up to a constant times a Laurent monomial
    (f-bar may absorb monomials).  On a random line the ratio must therefore
    have zeros and poles only where some coordinate vanishes.
    """
    if stage.tilde:
        raise ValueError("the numerator relation is stated for n >= 1 only")
    chk = Check(f"fusion-factor-shape[{stage.sig.label},N={N},L={L}]", "fusion-correction-factor",
                {"signature": stage.sig.label, "N": N, "L": L, "variant": stage.variant})
    key = ((L,) * stage.target_sig.K, (N - L,))
    for t in range(points):
        def attempt():
            base = random_factor_assignment(key, rng, bound)
            direc = random_factor_assignment(key, rng, bound)
            line = tuple(tuple(tuple(UniRatFunction.linear(b, d) for b, d in zip(rb, rd))
                               for rb, rd in zip(fb, fd)) for fb, fd in zip(base, direc))
            y, z = line[0], line[1][0]
            r = as_ratfunc(stage.correction(y, z) / _lemma_factor(stage, y, z))
            coords = [UniPoly((b, d)) for fb, fd in zip(base, direc)
                      for rb, rd in zip(fb, fd) for b, d in zip(rb, rd)]
            return base, direc, r, coords
        base, direc, r, coords = with_resampling(attempt, budget)
        chk.trials += 1
        if not (_divides_by_coordinates(r.num, coords) and _divides_by_coordinates(r.den, coords)):
            return chk.fail(base=base, direction=direc, ratio=repr(r))
    return chk


# ----------------------------------------------------------------------------
# iterates


@dataclass
class IteratedFusion:
    """A chain of fusion stages; each stage fuses the surviving factor again."""

    sig: AlgebraSignature
    p: ParamPoint
    stages: list

    @property
    def depth(self) -> int:
        return len(self.stages)

    def factors(self) -> list:
        """Final tensor factors: the surviving algebra, then the Sh_1's, newest first."""
        if not self.stages:
            return [(self.sig, self.p)]
        last = self.stages[-1]
        aux = [(SH1, st.aux_point) for st in reversed(self.stages)]
        return [(last.target_sig, last.target_point)] + aux

    def triples(self) -> list:
        return [(p.q1, p.q2, p.q3) for _, p in self.factors()]

    def apply(self, e: ShuffleElement) -> dict:
        if not self.stages:
            return {(tuple(e.degree),): lambda vs: evaluate(e, self.p, vs[0])}
        tmap = self.stages[0].apply(e)
        for st in self.stages[1:]:
            tmap = st.apply_to_map(tmap, 0)
        return tmap


def iterate_pi(sig: AlgebraSignature, depth: int, rng: random.Random, bound: int = 7,
               variant: str = "erratum") -> IteratedFusion:
    """Chain of ``depth`` stages with exact root witnesses for every stage.

    q_1 at the source is t**E for a sampled t, and every stage's kappa is an
    integer power of t; E is the least exponent that makes this possible.  A
    one-color chain stops at Sh_1, so its depth is capped at m - 1.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if sig.n >= 1 and depth > sig.n:
        raise ValueError("at most n stages for n >= 1")
    if sig.n == 0:
        depth = min(depth, sig.m - 1)
    from .signature import sample_generic_point

    if depth == 0:
        return IteratedFusion(sig, sample_generic_point(sig, rng, DEFAULT_BOUND), [])
    sigs = [sig]
    for _ in range(depth - 1):
        s = sigs[-1]
        sigs.append(AlgebraSignature(s.m, s.n - 1) if s.n >= 1 else AlgebraSignature(s.m - 1, 0))
    # exponents relative to q_1 of the source: kappa_j = q1_j^(1/e_j), q1_{j+1} = q1_j * kappa_j
    q1_exp, kappa_exp = [Fraction(1)], []
    for s in sigs:
        kappa_exp.append(q1_exp[-1] / kappa_exponent(s))
        q1_exp.append(q1_exp[-1] + kappa_exp[-1])
    scale = math.lcm(*(f.denominator for f in q1_exp + kappa_exp))
    while True:
        t = random_scalar(rng, bound)
        base = sample_generic_point(sig, rng, DEFAULT_BOUND)
        q = base.q
        if abs(t) != 1 and all(abs(q * q * t ** int(e * scale)) != 1 and abs(t ** int(e * scale)) != 1
                               for e in q1_exp):
            break
    s_cur = base.s
    stages = []
    for j, s in enumerate(sigs):
        q1 = t ** int(q1_exp[j] * scale)
        st = FusionStage(s, ParamPoint(q, q * q1, s_cur, t ** int(kappa_exp[j] * scale)), variant)
        stages.append(st)
        s_cur = st.target_point.s
    return IteratedFusion(sig, stages[0].p, stages)


def corollary_triples(sig: AlgebraSignature, p: ParamPoint) -> list:
    """Closed-form triples of the fully iterated target, as an unordered list.

    n >= 1: the n Sh_1 factors only (the surviving factor carries q_1^{n/m}).
    n = 0: all m one-color factors.
    """
    m, n = sig.m, sig.n
    q1, q2, q3 = p.q1, p.q2, p.q3
    if n >= 1:
        return [(q2 ** (j + 1) * q3 ** (n - m), 1 / q2, q2 ** (-j) * q3 ** (m - n)) for j in range(n)]
    return [(q2 ** j * q1 ** m, q2, q2 ** (-j - 1) * q1 ** (-m)) for j in range(m)]


def check_iterate(sig: AlgebraSignature, rng: random.Random, depth: Optional[int] = None,
                  trials: int = 2, bound: int = DEFAULT_BOUND,
                  budget: int = DEFAULT_RESAMPLE_BUDGET, variant: str = "erratum") -> Check:
    """Full iterate: target triples against the closed form, then unit and degree-1 smoke tests."""
    if depth is None:
        depth = sig.n if sig.n >= 1 else sig.m - 1
    it = iterate_pi(sig, depth, rng, variant=variant)
    chk = Check(f"iterate-{sig.label}-depth{it.depth}", "fusion-iterate",
                {"signature": sig.label, "depth": it.depth, "variant": variant})
    got = it.triples()
    expect = corollary_triples(sig, it.p)
    have = got[1:] if sig.n >= 1 else got
    if sorted(have) != sorted(expect):
        chk.fail(reason="target triples differ from the closed form",
                 got=[list(map(str, t)) for t in have], expected=[list(map(str, t)) for t in expect])
        return chk
    if sig.n >= 1:
        # surviving factor: q_1^{1 - n/m}, compared through m-th powers
        q1_final = got[0][0]
        if q1_final ** sig.m != it.p.q1 ** (sig.m - sig.n):
            chk.fail(reason="surviving factor has the wrong q_1", got=q1_final)
            return chk
    factors = it.factors()
    unit = it.apply(Unit(sig))
    ukey = tuple((0,) * s.K for s, _ in factors)
    if set(unit) != {ukey} or unit[ukey](tuple(((),) * s.K for s, _ in factors)) != 1:
        chk.fail(reason="unit is not sent to the unit")
        return chk
    from .bethe import G

    F = G(sig, 1, 1)
    H = G(sig, 2, 1)
    left, right, prod = it.apply(F), it.apply(H), it.apply(F * H)
    for key, fn in prod.items():
        for t in range(trials):
            def attempt():
                vs = random_factor_assignment(key, rng, bound)
                return vs, fn(vs), tensor_product_value(factors, left, right, key, vs)

            vs, a, b = with_resampling(attempt, budget)
            chk.trials += 1
            if a != b:
                chk.fail(key=[list(k) for k in key], trial=t, lhs=a, rhs=b)
                return chk
    return chk
