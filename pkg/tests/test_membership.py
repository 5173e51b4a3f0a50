import itertools
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from shuffle_bethe.bethe import G, Gstar
from shuffle_bethe.exact import limit_at_infinity, limit_at_zero
from shuffle_bethe.membership import (
    check_tiny_solver,
    membership_check,
    membership_solve_tiny,
    membership_target,
    nonsquare_degree_probe,
    scaled_evaluate,
    scaling_vectors,
    tiny_monomials,
)
from shuffle_bethe.shuffle import Generator, Unit, evaluate, explicit, random_assignment
from shuffle_bethe.signature import AlgebraSignature, ParamPoint, sample_generic_point
from shuffle_bethe.symbolic import SparseLaurent, example_expected, materialize_tiny

S21 = AlgebraSignature(2, 1)


def over_pi(monomials):
    """sum c x^i y^j z^l over (x-y)(y-z)(z-x) as an Explicit element."""
    return explicit(S21, (1, 1, 1), [(c, ((i,), (j,), (l,))) for c, (i, j, l) in monomials])


def test_scaling_vector_enumeration():
    assert len(list(scaling_vectors((2, 2, 2)))) == 27
    assert len(set(scaling_vectors((1, 1, 1, 1)))) == 16


def test_zero_scaling_is_constant(rng):
    p = sample_generic_point(S21, rng)
    base = random_assignment((1, 1, 1), rng)
    f = scaled_evaluate(G(S21, 1, 1), p, (0, 0, 0), base)
    assert f.is_constant() and f.constant_value() == evaluate(G(S21, 1, 1), p, base)


def test_full_scaling_targets_one(rng):
    for sig, N in ((S21, 2), (AlgebraSignature(3, 0), 1), (AlgebraSignature(3, 2), 1)):
        p = sample_generic_point(sig, rng)
        assert membership_target(sig, p, (N,) * sig.K, (N,) * sig.K) == 1


def test_ratio_for_first_color_scaling(rng):
    p = sample_generic_point(S21, rng)
    base = random_assignment((1, 1, 1), rng)
    f = scaled_evaluate(G(S21, 1, 1), p, (1, 0, 0), base)
    assert limit_at_infinity(f) / limit_at_zero(f) == p.s[0]
    assert membership_target(S21, p, (1, 0, 0), (1, 1, 1)) == p.s[0]


def test_complementary_targets(rng):
    for sig in (S21, AlgebraSignature(3, 1), AlgebraSignature(3, 0)):
        p = sample_generic_point(sig, rng)
        N = 2
        for k in scaling_vectors((N,) * sig.K):
            kc = tuple(N - a for a in k)
            assert membership_target(sig, p, k, (N,) * sig.K) * membership_target(sig, p, kc, (N,) * sig.K) == 1


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_generators_are_members(r, rng):
    p = sample_generic_point(S21, rng)
    for e in (G(S21, r, 1), Gstar(S21, r, 1)):
        v = membership_check(e, p, rng, trials=2)
        assert v.passed, v.check.witness
        # identical ratios across base points are part of the verdict
        by_k = {}
        for rec in v.records:
            if rec.ratio is not None:
                by_k.setdefault(rec.k, set()).add(rec.ratio)
        assert all(len(s) == 1 for s in by_k.values())


def test_unit_passes_vacuously(rng):
    p = sample_generic_point(S21, rng)
    assert membership_check(Unit(S21), p, rng).passed


def test_explicit_non_member(rng):
    p = sample_generic_point(S21, rng)
    v = membership_check(over_pi([(1, (2, 1, 0))]), p, rng)
    assert not v.passed and v.check.witness


def test_displayed_family_members(rng):
    p = sample_generic_point(S21, rng)
    s1, s2, d = p.s[0], p.s[1], p.d
    # numerators displayed over (x-y)(y-z)(x-z); negate for the canonical orientation
    family = [
        [(-1, (1, 1, 1))],
        [(-s1 * s2 * d * d, (2, 1, 0)), (-s2 * d * d, (0, 2, 1)), (-1, (1, 0, 2))],
        [(-s1 * s2 * d * d, (1, 2, 0)), (-s1, (2, 0, 1)), (-1, (0, 1, 2))],
    ]
    for f in family:
        assert membership_check(over_pi(f), p, rng).passed


def test_subalgebra_property(rng):
    p = sample_generic_point(S21, rng)
    assert membership_check(G(S21, 1, 1) * G(S21, 2, 1), p, rng, trials=1).passed
    assert membership_check(G(S21, 0, 1) * G(S21, 0, 1), p, rng, trials=1).passed


def test_nonsquare_probes(rng):
    p = sample_generic_point(S21, rng)
    assert not nonsquare_degree_probe(Generator(S21, 1, 0), p, rng).passed
    assert not nonsquare_degree_probe(Generator(S21, 1, 0) * Generator(S21, 2, 0), p, rng).passed
    control = nonsquare_degree_probe(G(S21, 0, 1), p, rng)
    assert control.passed and control.check.params["equal_degrees"]


# ---------------------------------------------------------------------------
# tiny solver against an independent sympy computation at a numeric point


def sympy_kernel_dimension(p):
    x, y, z, t = sp.symbols("x y z t")
    cs = sp.symbols("c0:7")
    monos = [x ** i * y ** j * z ** l for i, j, l in tiny_monomials()]
    num = sum(c * m for c, m in zip(cs, monos))
    pi = (x - y) * (y - z) * (z - x)
    s1, s2, d = (sp.Rational(v.numerator, v.denominator) for v in (p.s[0], p.s[1], p.d))
    s3 = 1 / (s1 * s2)
    eqs = []
    for k in itertools.product((0, 1), repeat=3):
        sub = {v: t * v for v, ki in zip((x, y, z), k) if ki}
        N = sp.Poly(sp.expand(num.subs(sub, simultaneous=True)), t)
        D = sp.Poly(sp.expand(pi.subs(sub, simultaneous=True)), t)
        lo = min(m[0] for m in D.monoms())
        hi = D.degree()
        for (e,), c in zip(N.monoms(), N.coeffs()):
            if e < lo or e > hi:
                eqs.extend(sp.Poly(c, x, y, z).coeffs())
        target = s1 ** k[0] * s2 ** k[1] * s3 ** k[2] * d ** (2 * (k[1] - k[2]))
        cross = sp.expand(N.coeff_monomial(t ** hi) * D.coeff_monomial(t ** lo)
                          - target * N.coeff_monomial(t ** lo) * D.coeff_monomial(t ** hi))
        if cross != 0:
            eqs.extend(sp.Poly(cross, x, y, z).coeffs())
    A = sp.Matrix([[sp.diff(e, c) for c in cs] for e in eqs])
    return 7 - A.rank()


def test_tiny_solver_symbolic():
    sol = membership_solve_tiny()
    assert sol.dimension == 3
    assert all(c.passed for c in check_tiny_solver())


def test_tiny_solver_matches_sympy(rng):
    p = sample_generic_point(S21, rng, 30)
    assert membership_solve_tiny(p).dimension == sympy_kernel_dimension(p) == 3


def test_G1_expands_in_family_basis():
    f, _, catalog, _ = materialize_tiny(G(S21, 1, 1))
    x, y, z, q, d, s1, s2 = SparseLaurent.variables(catalog)
    qi = q.monomial_inverse()
    pref = qi * (1 - q ** 2) ** 2
    fC = s1 * s2 * d ** 2 * y ** 2 * x + s1 * x ** 2 * z + z ** 2 * y
    A = -(d * qi + q * d) * s1 * s2 * pref
    assert f == pref * fC + A * x * y * z
    assert f == example_expected(catalog)[1]
