"""Bethe-subalgebra membership through scaled limits.

For a scaling vector k the first k_i variables of every color are multiplied
by xi.  A member F has finite limits F_0, F_inf of the scaled function at
xi -> 0 and xi -> infinity, and F_inf = target(k) * F_0.

The check is a probabilistic certificate: limits are decided exactly by degree
comparison, but only at the sampled base points.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact import NO_LIMIT, UniRatFunction, as_ratfunc, limit_at_infinity, limit_at_zero
from .report import Check
from .shuffle import (
    DEFAULT_BOUND,
    DEFAULT_RESAMPLE_BUDGET,
    ShuffleElement,
    evaluate,
    normalize_assignment,
    random_assignment,
    with_resampling,
)
from .signature import AlgebraSignature, ParamPoint
from .symbolic import SparseLaurent, SymbolicRational, example_family, symbolic_point

DEFAULT_MEMBERSHIP_TRIALS = 3


def scaled_assignment(base, k: Sequence[int]) -> tuple:
    xi = UniRatFunction.xi()
    return tuple(
        tuple(v * xi if a < ki else v for a, v in enumerate(row)) for row, ki in zip(base, k)
    )


def scaled_evaluate(e: ShuffleElement, p: ParamPoint, k: Sequence[int], base) -> UniRatFunction:
    """e at x_{i,a} -> xi * base_{i,a} for a <= k_i, as a rational function of xi."""
    base = normalize_assignment(e.degree, base)
    return as_ratfunc(evaluate(e, p, scaled_assignment(base, k)))


def membership_target(sig: AlgebraSignature, p: ParamPoint, k: Sequence[int], degree: Sequence[int]):
    """prod s_i^{k_i} * d^{2 (N_m k_m - N_K k_K)}; no d factor when n = 0."""
    out = Fraction(1)
    for i, ki in enumerate(k, start=1):
        if ki:
            out = out * p.s_at(i) ** ki
    if sig.n >= 1:
        m, K = sig.m, sig.K
        out = out * p.d ** (2 * (degree[m - 1] * k[m - 1] - degree[K - 1] * k[K - 1]))
    return out


def scaling_vectors(degree: Sequence[int]):
    return itertools.product(*(range(n + 1) for n in degree))


@dataclass
class ScalingRecord:
    k: tuple
    limit0_exists: bool
    limit_inf_exists: bool
    ratio: object
    target: object
    ok: bool

    def to_dict(self) -> dict:
        return {
            "k": list(self.k),
            "limit0_exists": self.limit0_exists,
            "limit_inf_exists": self.limit_inf_exists,
            "ratio": None if self.ratio is None else str(self.ratio),
            "target": str(self.target),
            "ok": self.ok,
        }


@dataclass
class MembershipVerdict:
    check: Check
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.check.passed


def membership_check(e: ShuffleElement, p: ParamPoint, rng: random.Random,
                     trials: int = DEFAULT_MEMBERSHIP_TRIALS, bound: int = DEFAULT_BOUND,
                     budget: int = DEFAULT_RESAMPLE_BUDGET, ks: Optional[Sequence[Sequence[int]]] = None,
                     stop_at_first: bool = True, name: str = "membership") -> MembershipVerdict:
    """Existence of both scaled limits and the ratio condition for every k."""
    sig = e.sig
    chk = Check(name, "bethe-membership-ratio-of-limits",
                {"signature": sig.label, "degree": list(e.degree)},
                notes="probabilistic certificate: exact limits at sampled base points")
    verdict = MembershipVerdict(chk)
    vectors = [tuple(k) for k in ks] if ks is not None else list(scaling_vectors(e.degree))
    for k in vectors:
        target = membership_target(sig, p, k, e.degree)
        ratios = set()
        for t in range(trials):
            def attempt():
                base = random_assignment(e.degree, rng, bound)
                return base, scaled_evaluate(e, p, k, base)

            base, f = with_resampling(attempt, budget)
            chk.trials += 1
            l0, linf = limit_at_zero(f), limit_at_infinity(f)
            ok = l0 is not NO_LIMIT and linf is not NO_LIMIT and linf == target * l0
            ratio = None
            if l0 is not NO_LIMIT and linf is not NO_LIMIT and l0 != 0:
                ratio = linf / l0
                ratios.add(ratio)
            rec = ScalingRecord(k, l0 is not NO_LIMIT, linf is not NO_LIMIT, ratio, target, ok)
            verdict.records.append(rec)
            if not ok:
                chk.fail(k=list(k), trial=t, base=base, limit0=str(l0), limit_inf=str(linf), target=target)
                if stop_at_first:
                    return verdict
        if len(ratios) > 1:
            chk.fail(k=list(k), reason="ratio depends on the base point", ratios=sorted(map(str, ratios)))
            if stop_at_first:
                return verdict
    return verdict


def nonsquare_degree_probe(e: ShuffleElement, p: ParamPoint, rng: random.Random,
                           trials: int = DEFAULT_MEMBERSHIP_TRIALS) -> MembershipVerdict:
    """Membership verdict for an element of any degree (expected to fail off Sh^0)."""
    verdict = membership_check(e, p, rng, trials, name="nonsquare-degree-probe")
    verdict.check.params["equal_degrees"] = e.in_sh0
    return verdict


# ----------------------------------------------------------------------------
# the tiny solver: gl(2|1), N = 1, fully symbolic in q, d, s_1, s_2


def tiny_monomials():
    """Exponents (i, j, l) of x^i y^j z^l, total degree 3, each at most 2."""
    return [e for e in itertools.product(range(3), repeat=3) if sum(e) == 3]


def _xi_split(poly: SparseLaurent, k: Sequence[int], var_index: Sequence[int]) -> dict:
    """Group terms of ``poly`` by the xi-degree induced by the scaling vector."""
    out: dict = {}
    for e, c in poly.terms.items():
        deg = sum(e[i] for i, ki in zip(var_index, k) if ki)
        out.setdefault(deg, {})[e] = c
    return {d: SparseLaurent._raw(poly.catalog, t) for d, t in out.items()}


@dataclass
class TinySolution:
    monomials: list
    equations: list
    rank: int
    basis: list  # SparseLaurent numerators over (x-y)(y-z)(z-x)
    catalog: tuple

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _field_zero(v) -> bool:
    if isinstance(v, SymbolicRational):
        return v.num.is_zero()
    return v == 0


def nullspace(rows: list[list], ncols: int):
    """Kernel basis of a matrix over a field given by exact Python objects."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if not _field_zero(rows[i][col])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [_simplify(v * inv) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and not _field_zero(rows[i][col]):
                f = rows[i][col]
                rows[i] = [_simplify(a - f * b) for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * ncols
        vec[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][fcol]
        basis.append(vec)
    return len(pivots), basis


def _simplify(v):
    if isinstance(v, SymbolicRational):
        return v.simplify()
    return v


def membership_equations(catalog, p, k_vectors=None):
    """Linear conditions on the 7 monomial coefficients, one list per equation."""
    x, y, z = (SparseLaurent.var(catalog, v) for v in "xyz")
    pi = (x - y) * (y - z) * (z - x)
    monos = tiny_monomials()
    var_index = [catalog.index(v) for v in "xyz"]
    sig = AlgebraSignature(2, 1)
    eqs: list[list] = []
    for k in (k_vectors or list(scaling_vectors((1, 1, 1)))):
        pis = _xi_split(pi, k, var_index)
        lo, hi = min(pis), max(pis)
        target = membership_target(sig, p, k, (1, 1, 1))
        for j, e in enumerate(monos):
            deg = sum(a for a, ki in zip(e, k) if ki)
            if deg < lo or deg > hi:
                # this monomial alone would create a pole at 0 or infinity
                row = [Fraction(0)] * len(monos)
                row[j] = Fraction(1)
                eqs.append(row)
        # f_top * pi_low - target * f_low * pi_top = 0, coefficientwise in x, y, z
        coeff_rows: dict = {}
        for j, e in enumerate(monos):
            deg = sum(a for a, ki in zip(e, k) if ki)
            mono = x ** e[0] * y ** e[1] * z ** e[2]
            contrib = SparseLaurent(catalog)
            if deg == hi:
                contrib = contrib + mono * pis[lo]
            if deg == lo:
                contrib = contrib - target * mono * pis[hi]
            for key, coeff in contrib.split(["x", "y", "z"]).items():
                coeff_rows.setdefault(key, [Fraction(0)] * len(monos))[j] = coeff
        eqs.extend(coeff_rows[key] for key in sorted(coeff_rows))
    return eqs


def membership_solve_tiny(p: Optional[ParamPoint] = None, catalog=None) -> TinySolution:
    """Kernel of the membership conditions on degree-3 numerators over (x-y)(y-z)(z-x).

    With ``p`` omitted the parameters stay symbolic in q, d, s_1, s_2.
    """
    if p is None:
        catalog, p, _, _ = symbolic_point(AlgebraSignature(2, 1), (1, 1, 1))
    elif catalog is None:
        catalog = ("x", "y", "z")
    monos = tiny_monomials()
    eqs = membership_equations(catalog, p)
    rank, kernel = nullspace(eqs, len(monos))
    x, y, z = (SparseLaurent.var(catalog, v) for v in "xyz")
    basis = []
    for vec in kernel:
        f = SparseLaurent(catalog)
        for c, e in zip(vec, monos):
            if not _field_zero(c):
                f = f + c * x ** e[0] * y ** e[1] * z ** e[2]
        basis.append(f)
    return TinySolution(monos, eqs, rank, basis, tuple(catalog))


def vector_of(f: SparseLaurent, monos) -> list:
    names = ["x", "y", "z"]
    parts = f.split(names)
    return [parts.get(e, SparseLaurent(f.catalog)) for e in monos]


def satisfies(eqs, vec) -> bool:
    for row in eqs:
        acc = Fraction(0)
        for a, v in zip(row, vec):
            acc = acc + a * v
        if not _field_zero(acc):
            return False
    return True


def rank_of(vectors, ncols) -> int:
    return nullspace(vectors, ncols)[0] if vectors else 0


def check_tiny_solver() -> list[Check]:
    """Dimension 3, and the displayed family spans the kernel (family over (x-y)(y-z)(x-z))."""
    from .bethe import dim_R

    sol = membership_solve_tiny()
    dim = Check("tiny-solver-dimension", "bethe-algebra-dimension-gl21-N1",
                {"dimension": sol.dimension, "dim_R": dim_R(3, 1), "rank": sol.rank}, trials=1)
    if sol.dimension != 3 or dim_R(3, 1) != 3:
        dim.fail(dimension=sol.dimension)
    span = Check("tiny-solver-family", "bethe-algebra-family-gl21-N1", {}, trials=1)
    # the family is written over (x-y)(y-z)(x-z) = -(x-y)(y-z)(z-x); signs do not affect the span
    family = [vector_of(-f, sol.monomials) for f in example_family(sol.catalog)]
    for idx, vec in enumerate(family):
        if not satisfies(sol.equations, vec):
            span.fail(member=idx, reason="family element violates a membership condition")
            break
    if span.passed:
        r = rank_of(family, len(sol.monomials))
        span.params["family_rank"] = r
        if r != sol.dimension:
            span.fail(reason="family does not span the kernel", family_rank=r)
    return [dim, span]
