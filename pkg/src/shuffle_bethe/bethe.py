"""Bethe generators G_{r,N}, G*_{r,N}, their ingredients, and generating series."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .exact import UniRatFunction, as_ratfunc
from .report import Check
from .shuffle import (
    DEFAULT_BOUND,
    DEFAULT_RESAMPLE_BUDGET,
    DEFAULT_TRIALS,
    Builtin,
    EvalContext,
    canonical_denominator,
    check_pole_shape,
    check_symmetry,
    check_wheel,
    evaluate,
    random_assignment,
    register_builtin,
    with_resampling,
)
from .signature import AlgebraSignature, ParamPoint
from .special import bar, delta, eval_Itilde_l


def _xbar(x, i: int, sig: AlgebraSignature):
    return bar(x[sig.color(i) - 1])


def eval_P(sig: AlgebraSignature, p: ParamPoint, x, star: bool = False):
    """Prefactor P^{m|n}_N (or P^{*,m|n}_N) at x; x_0 is x_K."""
    m, n, K = sig.m, sig.n, sig.K
    q2 = p.q2
    if star and n == 0:
        raise ValueError("the starred prefactor needs n >= 1")
    if n == 0 and m == 1:
        xs = x[0]
        out = Fraction(1)
        for a in range(len(xs)):
            for b in range(a + 1, len(xs)):
                diff = xs[a] - xs[b]
                out = out * (xs[a] - q2 * xs[b]) * (xs[a] - xs[b] / q2) / (diff * diff)
        return out
    if n == 0:
        num = Fraction(1)
        for i in range(1, m + 1):
            for xa in x[i - 1]:
                for xb in x[i - 1]:
                    num = num * (xa - q2 * xb)
        return num / canonical_denominator(sig, x)
    num = Fraction(1)
    colors = range(m + 1, K) if star else range(1, m)
    ratio = 1 / q2 if star else q2
    for i in colors:
        for xa in x[i - 1]:
            for xb in x[i - 1]:
                num = num * (xa - ratio * xb)
    num = num * _xbar(x, K if star else m, sig) * delta(x[m - 1]) * delta(x[K - 1])
    return num / canonical_denominator(sig, x)


def eval_t(sig: AlgebraSignature, p: ParamPoint, x, i: int):
    """t_i = bold-s_i * xbar_{i-1} / xbar_i."""
    return p.cumulative_s(i) * _xbar(x, i - 1, sig) / _xbar(x, i, sig)


class _JTable:
    """Itilde_{N,N,l}(d^{+-1} x_{i-1}, x_i) for l = 0..N, cached per color."""

    def __init__(self, sig, p, x, star):
        self.sig, self.p, self.x, self.star = sig, p, x, star
        self._rows: dict[int, list] = {}

    def row(self, i: int):
        r = self._rows.get(i)
        if r is None:
            sig, p, x = self.sig, self.p, self.x
            scale = 1 / p.d if self.star else p.d
            y = [scale * v for v in x[sig.color(i - 1) - 1]]
            z = list(x[sig.color(i) - 1])
            r = self._rows[i] = [eval_Itilde_l(l, p.q, y, z) for l in range(len(z) + 1)]
        return r

    def J(self, i: int, c: int):
        """J^c_i (or J^{*,c}_i) = (-bold-s_i d^{+-N})^c Itilde^{c+1}_{N,N}."""
        p = self.p
        row = self.row(i)
        N = len(row) - 1
        q = p.q
        itilde = Fraction(0)
        for l, v in enumerate(row):
            term = q ** ((N - 2 * l) * (c + 1)) * v
            itilde = itilde - term if l % 2 else itilde + term
        dN = p.d ** (-N if self.star else N)
        return (-p.cumulative_s(i) * dN) ** c * itilde


def eval_J(sig: AlgebraSignature, p: ParamPoint, x, i: int, c: int, star: bool = False):
    return _JTable(sig, p, x, star).J(i, c)


@lru_cache(maxsize=None)
def _compositions(total: int, parts: int) -> tuple:
    if parts == 0:
        return ((),) if total == 0 else ()
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


def tableau_terms(sig: AlgebraSignature, r: int, star: bool = False) -> list[tuple[tuple, dict]]:
    """Column tableaux of length r: (t-subset, {color: J-exponent}).

    Unstarred: subsets of 1..m, exponents on m+1..K.  Starred: subsets of
    m+1..K, exponents on 1..m.
    """
    m, K = sig.m, sig.K
    single = list(range(m + 1, K + 1)) if star else list(range(1, m + 1))
    multi = list(range(1, m + 1)) if star else list(range(m + 1, K + 1))
    out = []
    for size in range(min(r, len(single)) + 1):
        for comp in _compositions(r - size, len(multi)):
            for subset in itertools.combinations(single, size):
                out.append((subset, dict(zip(multi, comp))))
    return out


def eval_G(sig: AlgebraSignature, p: ParamPoint, x, r: int, star: bool = False):
    """G_{r,N} (or G*_{r,N}) as P times the tableau sum of t and J products."""
    if star and sig.n == 0:
        raise ValueError("G* needs n >= 1")
    terms = tableau_terms(sig, r, star)
    if not terms:
        return Fraction(0)
    table = _JTable(sig, p, x, star)
    ts = {i: eval_t(sig, p, x, i) for i in range(1, sig.K + 1)}
    total = Fraction(0)
    for subset, exps in terms:
        term = Fraction(1)
        for i in subset:
            term = term * ts[i]
        for i, c in exps.items():
            term = term * table.J(i, c)
        total = total + term
    return eval_P(sig, p, x, star) * total


def eval_eps(p: ParamPoint, xs: Sequence, which: str = "q2"):
    """epsilon_N(x; q_i) = prod_{a<b} (x_a - q_i x_b)(x_a - x_b/q_i)/(x_a - x_b)^2."""
    qi = p.qs(which)
    out = Fraction(1)
    for a in range(len(xs)):
        for b in range(a + 1, len(xs)):
            diff = xs[a] - xs[b]
            out = out * (xs[a] - qi * xs[b]) * (xs[a] - xs[b] / qi) / (diff * diff)
    return out


def J_series(sig: AlgebraSignature, p: ParamPoint, x, i: int, w, star: bool = False):
    """sum_c (-u)^{-c} J^c_i in closed form, at w = 1/u.

    Pole factor 1/(1 - bold-s_i w / (q_2^l q_3^N)); starred: q_1^N in place of q_3^N.
    """
    table = _JTable(sig, p, x, star)
    row = table.row(i)
    N = len(row) - 1
    q = p.q
    base = p.q1 ** N if star else p.q3 ** N
    si = p.cumulative_s(i)
    total = Fraction(0)
    for l, v in enumerate(row):
        term = q ** (N - 2 * l) * v / (1 - si * w / (p.q2 ** l * base))
        total = total - term if l % 2 else total + term
    return total


def eval_G_series(sig: AlgebraSignature, p: ParamPoint, x, w, star: bool = False):
    """sum_r (-u)^{-r} G_{r,N} in closed form at w = 1/u (w may be a formal variable)."""
    m, K = sig.m, sig.K
    single = range(m + 1, K + 1) if star else range(1, m + 1)
    multi = range(1, m + 1) if star else range(m + 1, K + 1)
    out = eval_P(sig, p, x, star)
    for i in single:
        out = out * (1 - eval_t(sig, p, x, i) * w)
    for i in multi:
        out = out * J_series(sig, p, x, i, w, star)
    return out


def dim_R(K: int, N: int) -> int:
    """Coefficient of t^N in prod_{nu >= 1} (1 - t^nu)^{-K}."""
    if K < 1 or N < 0:
        raise ValueError("need K >= 1 and N >= 0")
    coeffs = [1] + [0] * N
    for nu in range(1, N + 1):
        for _ in range(K):
            for k in range(nu, N + 1):
                coeffs[k] += coeffs[k - nu]
    return coeffs[N]


def dims_table(K: int, N: int) -> list[int]:
    return [dim_R(K, k) for k in range(N + 1)]


# ----------------------------------------------------------------------------
# builtins


def _sh0_degree(sig, params):
    return (int(params["N"]),) * sig.K


def _eps_degree(sig, params):
    if sig.K != 1:
        raise ValueError("EpsN lives in the one-color algebra")
    return (int(params["N"]),)


@register_builtin("P", _sh0_degree)
def _b_P(node, ctx, x):
    return eval_P(node.sig, ctx.p, x)


@register_builtin("Pstar", _sh0_degree)
def _b_Pstar(node, ctx, x):
    return eval_P(node.sig, ctx.p, x, star=True)


@register_builtin("t", _sh0_degree)
def _b_t(node, ctx, x):
    return eval_t(node.sig, ctx.p, x, int(node.params["i"]))


@register_builtin("J", _sh0_degree)
def _b_J(node, ctx, x):
    return eval_J(node.sig, ctx.p, x, int(node.params["i"]), int(node.params["c"]))


@register_builtin("Jstar", _sh0_degree)
def _b_Jstar(node, ctx, x):
    return eval_J(node.sig, ctx.p, x, int(node.params["i"]), int(node.params["c"]), star=True)


@register_builtin("G", _sh0_degree, "Bethe generator G_{r,N}")
def _b_G(node, ctx, x):
    return eval_G(node.sig, ctx.p, x, int(node.params["r"]))


@register_builtin("Gstar", _sh0_degree, "Bethe generator G*_{r,N}")
def _b_Gstar(node, ctx, x):
    return eval_G(node.sig, ctx.p, x, int(node.params["r"]), star=True)


@register_builtin("EpsN", _eps_degree, "epsilon_N(x; q_i)")
def _b_eps(node, ctx, x):
    return eval_eps(ctx.p, x[0], str(node.params.get("which", "q2")))


def G(sig: AlgebraSignature, r: int, N: int) -> Builtin:
    return Builtin(sig, "G", r=r, N=N)


def Gstar(sig: AlgebraSignature, r: int, N: int) -> Builtin:
    if sig.n == 0:
        raise ValueError("G* needs n >= 1")
    return Builtin(sig, "Gstar", r=r, N=N)


def EpsN(N: int, which: str = "q2", sig: Optional[AlgebraSignature] = None) -> Builtin:
    return Builtin(sig or AlgebraSignature(1, 0), "EpsN", N=N, which=which)


# ----------------------------------------------------------------------------
# checks


def generator_elements(sig: AlgebraSignature, N: int, max_r: int) -> list[Builtin]:
    """G_{r,N} for r <= max_r, then G*_{r,N} when n >= 1."""
    out = [G(sig, r, N) for r in range(max_r + 1)]
    if sig.n >= 1:
        out += [Gstar(sig, r, N) for r in range(max_r + 1)]
    return out


def element_label(e) -> str:
    if isinstance(e, Builtin):
        inner = ",".join(f"{k}={v}" for k, v in sorted(e.params.items()))
        return f"{e.name}({inner})"
    return repr(e)


def check_structure(e, p: ParamPoint, rng, trials: int = DEFAULT_TRIALS, bound: int = DEFAULT_BOUND,
                    budget: int = DEFAULT_RESAMPLE_BUDGET) -> list[Check]:
    """Symmetry, every applicable wheel condition, coinciding-fermion zeros, pole shape."""
    label = f"{element_label(e)}@{e.sig.label}"
    out = [
        check_symmetry(e, p, rng, trials, bound, budget, name=f"symmetry[{label}]"),
        check_wheel(e, p, rng, trials, bound, budget, name=f"wheel[{label}]"),
        check_pole_shape(e, p, rng, 1, bound, budget, name=f"pole-shape[{label}]"),
    ]
    for c in out:
        c.params["element"] = element_label(e)
    return out


def check_series_truncation(sig: AlgebraSignature, p: ParamPoint, N: int, rng, star: bool = False,
                            order: int = 4, points: int = 3, bound: int = DEFAULT_BOUND,
                            budget: int = DEFAULT_RESAMPLE_BUDGET) -> Check:
    """Taylor coefficients of the closed generating series in w = 1/u against (-1)^r G_{r,N}."""
    chk = Check(f"series-truncation[{sig.label},N={N}{',star' if star else ''}]", "generating-series",
                {"signature": sig.label, "N": N, "star": star, "order": order})
    w = UniRatFunction.xi()
    for t in range(points):
        def attempt():
            x = random_assignment((N,) * sig.K, rng, bound)
            coeffs = as_ratfunc(eval_G_series(sig, p, x, w, star)).taylor(order)
            return x, coeffs, [eval_G(sig, p, x, r, star) for r in range(order + 1)]

        x, coeffs, direct = with_resampling(attempt, budget)
        chk.trials += 1
        for r, (a, b) in enumerate(zip(coeffs, direct)):
            if a != (-1) ** r * b:
                return chk.fail(trial=t, point=x, r=r, series=a, tableau=b)
    return chk


def _compare_elements(chk: Check, lhs, rhs, p: ParamPoint, rng, trials: int, bound: int, budget: int) -> Check:
    for t in range(trials):
        def attempt():
            x = random_assignment(lhs.degree, rng, bound)
            return x, evaluate(lhs, p, x), evaluate(rhs, p, x)

        x, a, b = with_resampling(attempt, budget)
        chk.trials += 1
        if a != b:
            return chk.fail(trial=t, point=x, lhs=a, rhs=b)
    return chk


def check_eps_family(p: ParamPoint, N: int, rng, trials: int = DEFAULT_TRIALS, bound: int = DEFAULT_BOUND,
                     budget: int = DEFAULT_RESAMPLE_BUDGET) -> Check:
    """G_{0,N} of the one-color algebra is epsilon_N(x; q_2)."""
    sig = AlgebraSignature(1, 0)
    chk = Check(f"one-color-G0-is-epsilon[N={N}]", "one-color-commutative-family", {"N": N})
    return _compare_elements(chk, G(sig, 0, N), EpsN(N, "q2"), p, rng, trials, bound, budget)


def check_top_generator(sig: AlgebraSignature, p: ParamPoint, N: int, rng, trials: int = DEFAULT_TRIALS,
                        bound: int = DEFAULT_BOUND, budget: int = DEFAULT_RESAMPLE_BUDGET) -> Check:
    """n = 0: G_{m,N} = (prod_i bold-s_i) G_{0,N}."""
    if sig.n != 0:
        raise ValueError("stated for n = 0")
    chk = Check(f"top-generator[{sig.label},N={N}]", "n0-top-generator", {"signature": sig.label, "N": N})
    const = Fraction(1)
    for i in range(1, sig.m + 1):
        const *= p.cumulative_s(i)
    return _compare_elements(chk, G(sig, sig.m, N), const * G(sig, 0, N), p, rng, trials, bound, budget)


def check_vanishing_beyond(sig: AlgebraSignature, p: ParamPoint, N: int, r: int, rng,
                           trials: int = DEFAULT_TRIALS, bound: int = DEFAULT_BOUND,
                           budget: int = DEFAULT_RESAMPLE_BUDGET) -> Check:
    """n = 0: G_{r,N} = 0 for r > m."""
    chk = Check(f"vanishing-beyond-m[{sig.label},N={N},r={r}]", "n0-generators-vanish-beyond-m",
                {"signature": sig.label, "N": N, "r": r})
    for t in range(trials):
        def attempt():
            x = random_assignment((N,) * sig.K, rng, bound)
            return x, eval_G(sig, p, x, r)

        x, v = with_resampling(attempt, budget)
        chk.trials += 1
        if v != 0:
            return chk.fail(trial=t, point=x, value=v)
    return chk


def check_commutator(F, H, p: ParamPoint, rng, trials: int = DEFAULT_TRIALS, bound: int = DEFAULT_BOUND,
                     budget: int = DEFAULT_RESAMPLE_BUDGET, expect_commute: bool = True,
                     name: Optional[str] = None) -> Check:
    """F*H - H*F at random points; with expect_commute=False a nonzero value is the pass condition."""
    sig = F.sig
    label = name or f"commutator[{element_label(F)},{element_label(H)}@{sig.label}]"
    anchor = "bethe-commutativity" if expect_commute else "noncommuting-control"
    chk = Check(label, anchor, {"signature": sig.label, "left": element_label(F), "right": element_label(H)})
    FH, HF = F * H, H * F
    nonzero = False
    for t in range(trials):
        def attempt():
            x = random_assignment(FH.degree, rng, bound)
            ctx = EvalContext(sig, p)
            return x, ctx.value(FH, x), ctx.value(HF, x)

        x, a, b = with_resampling(attempt, budget)
        chk.trials += 1
        nonzero = nonzero or a != 0
        if expect_commute and a != b:
            return chk.fail(trial=t, point=x, FH=a, HF=b)
        if not expect_commute and a != b:
            chk.params["witness_point"] = x
            return chk
    if not expect_commute:
        chk.fail(reason="no point separates F*H from H*F")
    elif not nonzero:
        chk.notes = "both products vanish at every sampled point"
    return chk
