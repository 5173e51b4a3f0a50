import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import xi
from shuffle_bethe.bethe import (
    EpsN,
    G,
    Gstar,
    check_commutator,
    check_eps_family,
    check_series_truncation,
    check_structure,
    check_top_generator,
    check_vanishing_beyond,
    dim_R,
    dims_table,
    eval_G,
    eval_G_series,
    eval_J,
    eval_P,
    eval_t,
    tableau_terms,
)
from shuffle_bethe.exact import as_ratfunc, random_scalar
from shuffle_bethe.shuffle import Generator, evaluate, random_assignment
from shuffle_bethe.signature import AlgebraSignature, ParamPoint, sample_generic_point
from shuffle_bethe.special import eval_Itilde

S21 = AlgebraSignature(2, 1)


def example_values(p, x, y, z):
    """The three displayed gl(2|1), N = 1 generators, typed in directly."""
    q, d = p.q, p.d
    s1, s2 = p.s[0], p.s[1]
    q2, q1, q3i, qi = q * q, d / q, q * d, 1 / q
    xyz = x * y * z
    fB = s1 * s2 * d ** 2 * x ** 2 * y + s2 * d ** 2 * y ** 2 * z + z ** 2 * x
    fC = s1 * s2 * d ** 2 * y ** 2 * x + s1 * x ** 2 * z + z ** 2 * y
    den = (x - y) * (y - z) * (z - x)
    g0 = qi * (1 - q2) ** 2 * xyz
    g1 = qi * (1 - q2) ** 2 * (fC - (q1 + q3i) * s1 * s2 * xyz)
    g2 = (1 - q2) * (-(q - qi) * s1 * fB + (q ** 2 - qi ** 2) * s1 * s2 * d * fC
                     - (q ** 3 - qi ** 3) * s1 ** 2 * s2 ** 2 * d ** 2 * xyz)
    return [g / den for g in (g0, g1, g2)]


def test_worked_example_values(rng):
    for _ in range(5):
        p = sample_generic_point(S21, rng)
        x, y, z = (random_scalar(rng, 1000) for _ in range(3))
        pt = ((x,), (y,), (z,))
        assert [eval_G(S21, p, pt, r) for r in range(3)] == example_values(p, x, y, z)


def test_worked_example_series(rng):
    p = sample_generic_point(S21, rng)
    x, y, z = (random_scalar(rng, 1000) for _ in range(3))
    coeffs = as_ratfunc(eval_G_series(S21, p, ((x,), (y,), (z,)), xi())).taylor(2)
    assert [(-1) ** r * c for r, c in enumerate(coeffs)] == example_values(p, x, y, z)


def test_prefactor_examples(rng):
    one = AlgebraSignature(1, 0)
    p = sample_generic_point(one, rng)
    assert eval_P(one, p, ((Fraction(5),),)) == 1
    sig = AlgebraSignature(3, 0)
    p = sample_generic_point(sig, rng)
    x = random_assignment((1, 1, 1), rng)
    expected = Fraction(1)
    for i in range(3):
        expected *= (1 - p.q2) * x[i][0] / (x[i][0] - x[(i + 1) % 3][0])
    assert eval_P(sig, p, x) == expected


def test_t_and_J_examples(rng):
    p = sample_generic_point(S21, rng)
    x, y, z = (random_scalar(rng, 1000) for _ in range(3))
    pt = ((x,), (y,), (z,))
    assert eval_t(S21, p, pt, 1) == z / x
    assert eval_t(S21, p, pt, 3) == p.s[0] * p.s[1] * y / z
    for i in (1, 2, 3):
        prev = pt[(i - 2) % 3]
        assert eval_J(S21, p, pt, i, 0) == eval_Itilde(1, p.q, [p.d * v for v in prev], list(pt[i - 1]))


def test_tableau_terms_32():
    sig = AlgebraSignature(3, 2)
    got = Counter((t, tuple(sorted(e.items()))) for t, e in tableau_terms(sig, 2))
    expected = Counter()
    for t in [(1, 2), (1, 3), (2, 3)]:
        expected[(t, ((4, 0), (5, 0)))] += 1
    for i in (1, 2, 3):
        expected[((i,), ((4, 1), (5, 0)))] += 1
        expected[((i,), ((4, 0), (5, 1)))] += 1
    for c in ((2, 0), (1, 1), (0, 2)):
        expected[((), ((4, c[0]), (5, c[1])))] += 1
    assert got == expected and sum(got.values()) == 12


def test_n0_generators_are_elementary_symmetric(rng):
    from itertools import combinations

    for m, N in ((2, 1), (2, 2), (3, 1)):
        sig = AlgebraSignature(m, 0)
        p = sample_generic_point(sig, rng)
        x = random_assignment((N,) * m, rng)
        ts = [eval_t(sig, p, x, i) for i in range(1, m + 1)]
        P = eval_P(sig, p, x)
        for r in range(m + 3):
            e_r = sum((eval_prod(c) for c in combinations(ts, r)), Fraction(0))
            assert eval_G(sig, p, x, r) == P * e_r


def eval_prod(vals):
    out = Fraction(1)
    for v in vals:
        out *= v
    return out


def test_classical_checks(rng):
    for N in (1, 2, 3):
        assert check_eps_family(sample_generic_point(AlgebraSignature(1, 0), rng), N, rng).passed
    for m, N in ((2, 1), (2, 2), (3, 1)):
        sig = AlgebraSignature(m, 0)
        p = sample_generic_point(sig, rng)
        assert check_top_generator(sig, p, N, rng).passed
        assert check_vanishing_beyond(sig, p, N, m + 1, rng).passed
    # G_{m-1} is no multiple of G_0; the comparison must be able to fail
    sig = AlgebraSignature(2, 0)
    p = sample_generic_point(sig, rng)
    assert not check_vanishing_beyond(sig, p, 1, 1, rng).passed


def test_eps_formula(rng):
    p = sample_generic_point(AlgebraSignature(1, 0), rng)
    a, b = Fraction(2), Fraction(7)
    for which in ("q1", "q2", "q3"):
        qi = p.qs(which)
        assert evaluate(EpsN(2, which), p, ((a, b),)) == (a - qi * b) * (a - b / qi) / (a - b) ** 2


@pytest.mark.parametrize("m,n,N", [(2, 1, 1), (2, 1, 2), (3, 1, 1), (2, 0, 2), (1, 0, 3)])
def test_generators_in_sh0(m, n, N, rng):
    sig = AlgebraSignature(m, n)
    p = sample_generic_point(sig, rng)
    elems = [G(sig, r, N) for r in (0, 1, m)]
    if n:
        elems.append(Gstar(sig, 1, N))
    for e in elems:
        assert all(c.passed for c in check_structure(e, p, rng, trials=1))


@pytest.mark.parametrize("m,n,N", [(2, 1, 1), (2, 1, 2), (3, 1, 1), (2, 0, 2), (3, 0, 1), (1, 0, 3)])
def test_series_truncation(m, n, N, rng):
    sig = AlgebraSignature(m, n)
    p = sample_generic_point(sig, rng)
    assert check_series_truncation(sig, p, N, rng, points=1).passed
    if n:
        assert check_series_truncation(sig, p, N, rng, star=True, points=1).passed


@given(st.integers(0, 10 ** 6))
def test_series_two_routes_at_numeric_u(seed):
    """The closed series at a numeric w against a long truncated tableau sum is not exact,
    so compare the closed form with its own Taylor data through the rational function."""
    rng = random.Random(seed)
    p = sample_generic_point(S21, rng, 50)
    x = random_assignment((1, 1, 1), rng, 50)
    w = random_scalar(rng, 50)
    try:
        f = as_ratfunc(eval_G_series(S21, p, x, xi()))
        direct = eval_G_series(S21, p, x, w)
    except ZeroDivisionError:
        return
    if f.den(w) != 0:
        assert f(w) == direct


def test_commutator_control(rng):
    sig = AlgebraSignature(2, 0)
    p = sample_generic_point(sig, rng)
    assert check_commutator(Generator(sig, 1, 0), Generator(sig, 2, 0), p, rng, expect_commute=False).passed
    assert check_commutator(G(sig, 1, 1), G(sig, 2, 2), p, rng, trials=2).passed
    p21 = sample_generic_point(S21, rng)
    assert check_commutator(G(S21, 1, 1), Gstar(S21, 2, 1), p21, rng, trials=2).passed
    assert not check_commutator(Generator(S21, 1, 0), Generator(S21, 2, 0), p21, rng, trials=2).passed


def test_dims():
    assert dim_R(3, 1) == 3 and dim_R(1, 5) == 7 and dim_R(3, 2) == 9
    assert dims_table(1, 5) == [1, 1, 2, 3, 5, 7] and dims_table(2, 0) == [1]
    with pytest.raises(ValueError):
        dim_R(0, 1)


def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


@given(st.integers(1, 4), st.integers(0, 7))
def test_dims_count_colored_partitions(K, N):
    """Tuples of K partitions with total size N, enumerated directly."""
    from itertools import product

    counts = [sum(1 for _ in _partitions(k)) for k in range(N + 1)]
    total = 0
    for sizes in product(range(N + 1), repeat=K):
        if sum(sizes) == N:
            prod = 1
            for s in sizes:
                prod *= counts[s]
            total += prod
    assert dim_R(K, N) == total


def test_gstar_needs_n():
    with pytest.raises(ValueError):
        Gstar(AlgebraSignature(2, 0), 0, 1)


def test_generator_zero_point_consistency():
    sig = S21
    p = ParamPoint(Fraction(2), Fraction(3), (1, 1, 1))
    v = evaluate(G(sig, 0, 1), p, ((Fraction(1),), (Fraction(2),), (Fraction(3),)))
    assert v == example_values(p, Fraction(1), Fraction(2), Fraction(3))[0]
