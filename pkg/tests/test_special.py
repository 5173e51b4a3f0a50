import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import xi
from shuffle_bethe.exact import as_ratfunc, random_scalar
from shuffle_bethe.special import (
    bar,
    check_appendix_identity,
    check_asymptotics,
    check_duality,
    check_Ic_identities,
    check_Icq,
    check_itilde_routes,
    check_Iwheel,
    check_nonzero_thresholds,
    check_shift,
    check_vanishing,
    delta,
    eval_Ic,
    eval_Itilde,
    eval_Itilde_l,
    itilde_prefactor,
    qint,
)

Q = Fraction(3, 2)


def rat(v):
    return sympy.Rational(v.numerator, v.denominator)


def sympy_Ic(c, q, y, z):
    """Apply the operators one variable at a time by substitution, then evaluate."""
    M = len(y)
    ys = sympy.symbols(f"y0:{M}")
    qs = rat(q)
    f = sympy.prod([ys[a] - ys[b] for a in range(M) for b in range(a + 1, M)])
    f = f / sympy.prod([ys[a] - rat(zb) for a in range(M) for zb in z])
    for a in range(M):
        f = (qs ** c * f.subs(ys[a], qs * ys[a]) - qs ** (-c) * f.subs(ys[a], ys[a] / qs)) / (qs - 1 / qs)
    f = f / sympy.prod([ys[a] - ys[b] for a in range(M) for b in range(a + 1, M)])
    return f.subs({ys[a]: rat(y[a]) for a in range(M)})


def sample(rng, n):
    return [random_scalar(rng, 40) for _ in range(n)]


def test_qint():
    assert qint(Q, 0) == 0 and qint(Q, 1) == 1
    for n in range(1, 5):
        assert qint(Q, -n) == -qint(Q, n)
    assert qint(Q, 2) == Q + 1 / Q


def test_examples(rng):
    assert eval_Ic(0, Q, [], []) == 1
    y, z = sample(rng, 1)[0], sample(rng, 1)[0]
    assert eval_Ic(0, Q, [y], [z]) == -y / ((Q * y - z) * (y / Q - z))
    assert eval_Ic(0, Q, sample(rng, 2), sample(rng, 1)) == 0
    assert eval_Itilde(0, Q, [y], [z]) == -(Q - 1 / Q) * y


@pytest.mark.parametrize("M,N", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)])
@pytest.mark.parametrize("c", [-2, 0, 1, 3])
def test_Ic_matches_sympy(M, N, c, rng):
    y, z = sample(rng, M), sample(rng, N)
    assert rat(eval_Ic(c, Q, y, z)) == sympy_Ic(c, Q, y, z)


def test_identity_checks_pass(rng):
    checks = check_Ic_identities(Q, rng, max_mn=2, max_c=2, trials=2)
    assert checks and all(c.passed for c in checks)
    assert check_shift(Q, rng, 1).passed
    # for (M, N) = (2, 1) the range N-M+1 <= c <= 0 is {0}; a range {-1, 0} needs M - N = 2
    assert check_vanishing(Q, rng, 2, 1, 0).passed
    assert not check_vanishing(Q, rng, 2, 1, -1).passed
    assert check_vanishing(Q, rng, 3, 1, -1).passed and check_vanishing(Q, rng, 3, 1, 0).passed
    assert check_duality(Q, rng, 2, 2, 1).passed


def test_shift_one_variable(rng):
    y, z = sample(rng, 1), sample(rng, 1)
    assert eval_Ic(1, Q, y, z) == z[0] / y[0] * eval_Ic(0, Q, y, z)


def test_checks_reject_false_claims(rng):
    # c = 1 is outside the vanishing range for M = 2, N = 1
    assert not check_vanishing(Q, rng, 2, 1, 1).passed


@pytest.mark.parametrize("N", [1, 2, 3])
def test_diagonal_and_wheel(N, rng):
    for c in (-1, 0, 2):
        assert check_Icq(Q, rng, N, c).passed
        assert check_Icq(Q, rng, N, c, sign=-1).passed
        if N >= 2:
            assert check_Iwheel(Q, rng, N, c).passed


def test_asymptotics_examples(rng):
    y, z = sample(rng, 2), sample(rng, 2)
    assert check_asymptotics(Q, rng, 2, 2, 0, 0, 1).passed
    assert check_asymptotics(Q, rng, 1, 1, 1, 0, 1).passed
    assert check_nonzero_thresholds(Q, rng, 2, 2, 0, 1).passed
    # c = 1 <= k - l = 2: the xi -> infinity limit vanishes
    f = as_ratfunc(eval_Ic(1, Q, [xi() * v for v in y], z)) * xi() ** 4
    from shuffle_bethe.exact import limit_at_infinity
    assert limit_at_infinity(f) == 0


@pytest.mark.parametrize("N", [1, 2, 3])
def test_appendix_identity(N, rng):
    assert check_appendix_identity(Q, rng, N).passed


@given(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3), st.integers(0, 10 ** 6))
def test_routes_agree(M, N, c, seed):
    rng = random.Random(seed)
    assert check_itilde_routes(Q, rng, M, N, c, trials=1).passed


@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 10 ** 6))
def test_laurent_in_q_power_c(M, N, seed):
    rng = random.Random(seed)
    y, z = sample(rng, M), sample(rng, N)
    parts = [eval_Itilde_l(l, Q, y, z) for l in range(M + 1)]
    for c in range(-3, 4):
        rebuilt = sum((-1) ** l * Q ** ((M - 2 * l) * c) * v for l, v in enumerate(parts))
        assert rebuilt == eval_Itilde(c, Q, y, z)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(-2, 2), st.integers(0, 10 ** 6))
def test_symmetry(M, N, c, seed):
    rng = random.Random(seed)
    y, z = sample(rng, M), sample(rng, N)
    try:
        base = eval_Ic(c, Q, y, z)
    except ZeroDivisionError:
        return
    for py in itertools.permutations(y):
        assert eval_Ic(c, Q, list(py), z[::-1]) == base


@given(st.integers(0, 3), st.integers(0, 3), st.integers(-2, 2), st.integers(0, 10 ** 6))
def test_total_degree(M, N, c, seed):
    rng = random.Random(seed)
    y, z = sample(rng, M), sample(rng, N)
    f = as_ratfunc(eval_Itilde(c, Q, [xi() * v for v in y], [xi() * v for v in z]))
    value = eval_Itilde(c, Q, y, z)
    if value != 0:
        assert f.num.order == f.num.degree == M * N and f.den.degree == 0


def test_helpers():
    assert delta([Fraction(1), Fraction(3), Fraction(4)]) == (1 - 3) * (1 - 4) * (3 - 4)
    assert bar([Fraction(2), Fraction(5)]) == 10
    y, z = [Fraction(2)], [Fraction(7)]
    assert eval_Itilde(1, Q, y, z) == itilde_prefactor(Q, y, z) * eval_Ic(1, Q, y, z)
