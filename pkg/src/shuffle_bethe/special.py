"""The I-function family I^c_{M,N}, its polynomial clearing Itilde, and checks.

All functions are duck-typed over the field: ``q``, ``y`` and ``z`` may be
Fractions or UniRatFunctions in the scaling variable xi.

Two independent routes compute the same objects:

* :func:`eval_Ic` expands the product of q-difference operators acting on
  Delta(y)/Pi(y, z) as a sum over subsets S of {1..M};
* :func:`eval_Itilde` sums the closed subset formula for Itilde_{M,N,l}.

They are related by :func:`itilde_prefactor` and compared in the test-suite.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Callable, Sequence

from .exact import NO_LIMIT, UniRatFunction, as_ratfunc, limit_at_infinity, limit_at_zero, random_scalar
from .report import Check
from .shuffle import DEFAULT_BOUND, DEFAULT_RESAMPLE_BUDGET, DEFAULT_TRIALS, register_builtin, with_resampling


def qint(q, n: int):
    """[n] = (q^n - q^-n)/(q - q^-1)."""
    return (q ** n - q ** (-n)) / (q - 1 / q)


def delta(y: Sequence):
    out = Fraction(1)
    for a in range(len(y)):
        for b in range(a + 1, len(y)):
            out = out * (y[a] - y[b])
    return out


def bar(y: Sequence):
    out = Fraction(1)
    for v in y:
        out = out * v
    return out


def pi_prod(y: Sequence, z: Sequence):
    out = Fraction(1)
    for a in y:
        for b in z:
            out = out * (a - b)
    return out


def apply_difference_operator(c: int, q, y: Sequence, fn: Callable[[list], object]):
    """(1/Delta(y)) prod_a (q^c T_a - q^-c T_a^-1)/(q - q^-1) applied to fn, at y.

    T_a multiplies y_a by q.
    """
    M = len(y)
    total = Fraction(0)
    qi = 1 / q
    for size in range(M + 1):
        weight = q ** (c * (M - 2 * size))
        if size % 2:
            weight = -weight
        for S in itertools.combinations(range(M), size):
            shifted = [y[a] * qi if a in S else y[a] * q for a in range(M)]
            total = total + weight * fn(shifted)
    return total / (q - qi) ** M / delta(y)


def eval_Ic(c: int, q, y: Sequence, z: Sequence):
    """I^c_{M,N}(y, z) with M = len(y), N = len(z); equals 1 when M = 0."""
    if not y:
        return Fraction(1)
    return apply_difference_operator(c, q, y, lambda ys: delta(ys) / pi_prod(ys, z))


def itilde_prefactor(q, y: Sequence, z: Sequence):
    """(q - 1/q)^M prod_{a,b} (q y_a - z_b)(y_a/q - z_b)."""
    out = (q - 1 / q) ** len(y)
    for a in y:
        for b in z:
            out = out * (q * a - b) * (a / q - b)
    return out


def eval_Itilde_l(l: int, q, y: Sequence, z: Sequence):
    """Itilde_{M,N,l}(y, z): the coefficient of (-1)^l q^{(M-2l)c} in Itilde^c."""
    M = len(y)
    if not 0 <= l <= M:
        return Fraction(0)
    qi = 1 / q
    total = Fraction(0)
    for I in itertools.combinations(range(M), l):
        inside = set(I)
        term = Fraction(1)
        for a in I:
            for b in range(M):
                if b not in inside:
                    term = term * (qi * y[a] - q * y[b]) / (y[a] - y[b])
        for a in range(M):
            shift = q if a in inside else qi
            for zb in z:
                term = term * (shift * y[a] - zb)
        total = total + term
    e2 = (M - l) * (M - l - 1) - l * (l - 1)
    return q ** (e2 // 2) * total


def eval_Itilde(c: int, q, y: Sequence, z: Sequence):
    """Itilde^c_{M,N}(y, z) = sum_l (-1)^l q^{(M-2l)c} Itilde_{M,N,l}(y, z)."""
    M = len(y)
    total = Fraction(0)
    for l in range(M + 1):
        term = q ** ((M - 2 * l) * c) * eval_Itilde_l(l, q, y, z)
        total = total - term if l % 2 else total + term
    return total


# ----------------------------------------------------------------------------
# builtins: y in color 1, z in color 2


def _two_group_degree(sig, params):
    if sig.K < 2:
        raise ValueError("two-group functions need at least two colors")
    return (int(params["M"]), int(params["N"])) + (0,) * (sig.K - 2)


@register_builtin("Iupper", _two_group_degree, "I^c_{M,N}(x_1, x_2)")
def _builtin_Ic(node, ctx, x):
    return eval_Ic(int(node.params["c"]), ctx.p.q, x[0], x[1])


@register_builtin("ItildeUpper", _two_group_degree, "Itilde^c_{M,N}(x_1, x_2)")
def _builtin_Itilde(node, ctx, x):
    return eval_Itilde(int(node.params["c"]), ctx.p.q, x[0], x[1])


# ----------------------------------------------------------------------------
# checks


def _sample(rng, n, bound):
    return [random_scalar(rng, bound) for _ in range(n)]


def _run_trials(chk: Check, trials: int, budget: int, attempt, compare) -> Check:
    for t in range(trials):
        data = with_resampling(attempt, budget)
        chk.trials += 1
        bad = compare(data)
        if bad:
            return chk.fail(trial=t, **bad)
    return chk


def check_duality(q, rng, M, N, c, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND, budget=DEFAULT_RESAMPLE_BUDGET):
    chk = Check(f"I-duality[M={M},N={N},c={c}]", "Ic-duality", {"M": M, "N": N, "c": c})
    const = Fraction(-1) ** (M * N + N)
    for i in range(M - N):
        const = const * qint(q, c + i)

    def attempt():
        y, z = _sample(rng, M, bound), _sample(rng, N, bound)
        return y, z, eval_Ic(c, q, y, z), const * eval_Ic(1 - c, q, z, y)

    return _run_trials(chk, trials, budget, attempt,
                       lambda d: None if d[2] == d[3] else {"y": d[0], "z": d[1], "lhs": d[2], "rhs": d[3]})


def check_vanishing(q, rng, M, N, c, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND, budget=DEFAULT_RESAMPLE_BUDGET):
    chk = Check(f"I-vanishing[M={M},N={N},c={c}]", "Ic-vanishing", {"M": M, "N": N, "c": c})

    def attempt():
        y, z = _sample(rng, M, bound), _sample(rng, N, bound)
        return y, z, eval_Ic(c, q, y, z)

    return _run_trials(chk, trials, budget, attempt,
                       lambda d: None if d[2] == 0 else {"y": d[0], "z": d[1], "value": d[2]})


def check_shift(q, rng, N, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND, budget=DEFAULT_RESAMPLE_BUDGET):
    chk = Check(f"I-shift[N={N}]", "Ic-shift-identity", {"N": N})

    def attempt():
        y, z = _sample(rng, N, bound), _sample(rng, N, bound)
        return y, z, bar(y) * eval_Ic(1, q, y, z), bar(z) * eval_Ic(0, q, y, z)

    return _run_trials(chk, trials, budget, attempt,
                       lambda d: None if d[2] == d[3] else {"y": d[0], "z": d[1], "lhs": d[2], "rhs": d[3]})


def check_itilde_routes(q, rng, M, N, c, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND,
                        budget=DEFAULT_RESAMPLE_BUDGET):
    """Closed subset formula against prefactor * operator expansion."""
    chk = Check(f"Itilde-routes[M={M},N={N},c={c}]", "Itilde-clearing", {"M": M, "N": N, "c": c})

    def attempt():
        y, z = _sample(rng, M, bound), _sample(rng, N, bound)
        return y, z, eval_Itilde(c, q, y, z), itilde_prefactor(q, y, z) * eval_Ic(c, q, y, z)

    return _run_trials(chk, trials, budget, attempt,
                       lambda d: None if d[2] == d[3] else {"y": d[0], "z": d[1], "closed": d[2], "operator": d[3]})


def check_Ic_identities(q, rng: random.Random, max_mn: int = 3, max_c: int = 3, trials: int = DEFAULT_TRIALS,
                        bound: int = DEFAULT_BOUND) -> list[Check]:
    """Duality (M >= N), vanishing (M > N, N-M+1 <= c <= 0), shift, and the two Itilde routes."""
    out = []
    for M in range(max_mn + 1):
        for N in range(max_mn + 1):
            for c in range(-max_c, max_c + 1):
                if M >= N:
                    out.append(check_duality(q, rng, M, N, c, trials, bound))
                if M > N and N - M + 1 <= c <= 0:
                    out.append(check_vanishing(q, rng, M, N, c, trials, bound))
                out.append(check_itilde_routes(q, rng, M, N, c, trials, bound))
    for N in range(max_mn + 1):
        out.append(check_shift(q, rng, N, trials, bound))
    return out


def check_Icq(q, rng, N, c, sign=1, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND, budget=DEFAULT_RESAMPLE_BUDGET):
    """Itilde^c_{N,N}(y, q^{+-1} y) in closed form."""
    chk = Check(f"Itilde-diagonal[N={N},c={c},sign={sign:+d}]", "Itilde-diagonal", {"N": N, "c": c, "sign": sign})
    qs = q if sign > 0 else 1 / q

    def attempt():
        y = _sample(rng, N, bound)
        rhs = q ** (sign * (N * (N - 1) // 2 + N * c))
        for a in y:
            for b in y:
                rhs = rhs * (a / q - q * b)
        return y, eval_Itilde(c, q, y, [qs * v for v in y]), rhs

    return _run_trials(chk, trials, budget, attempt,
                       lambda d: None if d[1] == d[2] else {"y": d[0], "lhs": d[1], "rhs": d[2]})


def check_Iwheel(q, rng, N, c, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND, budget=DEFAULT_RESAMPLE_BUDGET):
    """Itilde^c_{N,N} vanishes at y_1 = z_1/q, y_2 = q z_1 and at z_1 = y_1/q, z_2 = q y_1."""
    chk = Check(f"Itilde-wheel[N={N},c={c}]", "Itilde-wheel-vanishing", {"N": N, "c": c})
    for side in ("y", "z"):
        def attempt():
            y, z = _sample(rng, N, bound), _sample(rng, N, bound)
            if side == "y":
                y[0], y[1] = z[0] / q, q * z[0]
            else:
                z[0], z[1] = y[0] / q, q * y[0]
            return y, z, eval_Itilde(c, q, y, z)

        _run_trials(chk, trials, budget, attempt,
                    lambda d: None if d[2] == 0 else {"locus": side, "y": d[0], "z": d[1], "value": d[2]})
        if not chk.passed:
            break
    return chk


def _scaled(vals, count):
    xi = UniRatFunction.xi()
    return [v * xi if a < count else as_ratfunc(v) for a, v in enumerate(vals)]


def check_asymptotics(q, rng, M, N, k, l, c, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND,
                      budget=DEFAULT_RESAMPLE_BUDGET) -> Check:
    """Leading terms of I^c_{M,N}(xi y', y'', xi z', z'') at xi -> infinity and xi -> 0."""
    chk = Check(f"I-asymptotics[M={M},N={N},k={k},l={l},c={c}]", "Ic-asymptotics",
                {"M": M, "N": N, "k": k, "l": l, "c": c})
    xi = UniRatFunction.xi()

    def attempt():
        y, z = _sample(rng, M, bound), _sample(rng, N, bound)
        val = as_ratfunc(eval_Ic(c, q, _scaled(y, k), _scaled(z, l)))
        y1, y2, z1, z2 = y[:k], y[k:], z[:l], z[l:]
        top = limit_at_infinity(val * xi ** (k * N + (M - k) * l))
        top_rhs = (Fraction(-1) ** ((M - k) * l) / (bar(y1) ** (N - l) * bar(z1) ** (M - k))
                   * eval_Ic(c + M - k - N + l, q, y1, z1) * eval_Ic(c, q, y2, z2))
        low = limit_at_zero(val * xi ** (k * l))
        low_rhs = (Fraction(-1) ** (k * (N - l)) / (bar(y2) ** l * bar(z2) ** k)
                   * eval_Ic(c, q, y1, z1) * eval_Ic(c + k - l, q, y2, z2))
        return y, z, top, top_rhs, low, low_rhs

    def compare(d):
        y, z, top, top_rhs, low, low_rhs = d
        if top is NO_LIMIT or top != top_rhs:
            return {"side": "infinity", "y": y, "z": z, "limit": str(top), "expected": top_rhs}
        if low is NO_LIMIT or low != low_rhs:
            return {"side": "zero", "y": y, "z": z, "limit": str(low), "expected": low_rhs}
        return None

    return _run_trials(chk, trials, budget, attempt, compare)


def check_nonzero_thresholds(q, rng, N, k, l, c, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND,
                             budget=DEFAULT_RESAMPLE_BUDGET) -> Check:
    """For M = N and c > 0: the limits exist, and vanish when c <= k-l (infinity) or c <= l-k (zero)."""
    chk = Check(f"I-limit-thresholds[N={N},k={k},l={l},c={c}]", "Ic-nonzero-thresholds",
                {"N": N, "k": k, "l": l, "c": c})
    xi = UniRatFunction.xi()

    def attempt():
        y, z = _sample(rng, N, bound), _sample(rng, N, bound)
        val = as_ratfunc(eval_Ic(c, q, _scaled(y, k), _scaled(z, l)))
        return y, z, limit_at_infinity(val * xi ** (N * (k + l) - k * l)), limit_at_zero(val * xi ** (k * l))

    def compare(d):
        y, z, top, low = d
        if top is NO_LIMIT or low is NO_LIMIT:
            return {"y": y, "z": z, "reason": "limit does not exist"}
        if c <= k - l and top != 0:
            return {"y": y, "z": z, "side": "infinity", "limit": top}
        if c <= l - k and low != 0:
            return {"y": y, "z": z, "side": "zero", "limit": low}
        return None

    return _run_trials(chk, trials, budget, attempt, compare)


def check_appendix_identity(q, rng, N, trials=DEFAULT_TRIALS, bound=DEFAULT_BOUND,
                            budget=DEFAULT_RESAMPLE_BUDGET) -> Check:
    """Operator with c = 1 on Delta/Pi * (1 - sum_a (y_a - z_a) sum_b (1/y_b - 1/z_b)) vs ybar/zbar I^2."""
    chk = Check(f"difference-operator-identity[N={N}]", "difference-operator-identity", {"N": N})

    def attempt():
        y, z = _sample(rng, N, bound), _sample(rng, N, bound)

        def bracket(ys):
            s1 = sum((ys[a] - z[a] for a in range(N)), Fraction(0))
            s2 = sum((1 / ys[b] - 1 / z[b] for b in range(N)), Fraction(0))
            return delta(ys) / pi_prod(ys, z) * (1 - s1 * s2)

        lhs = apply_difference_operator(1, q, y, bracket)
        rhs = bar(y) / bar(z) * eval_Ic(2, q, y, z)
        return y, z, lhs, rhs

    return _run_trials(chk, trials, budget, attempt,
                       lambda d: None if d[2] == d[3] else {"y": d[0], "z": d[1], "lhs": d[2], "rhs": d[3]})
