import random
from collections import Counter
from fractions import Fraction

import pytest

from shuffle_bethe.bethe import G, Gstar
from shuffle_bethe.fusion import (
    FusionStage,
    check_image_validity,
    check_iterate,
    check_lemma_consistency,
    check_surjectivity_formula,
    corollary_triples,
    homomorphism_check,
    iterate_pi,
    kappa_exponent,
    sample_stage,
    transported_s,
    unit_map,
)
from shuffle_bethe.shuffle import Generator, Unit, evaluate, random_assignment
from shuffle_bethe.signature import AlgebraSignature, sample_generic_point

S21 = AlgebraSignature(2, 1)


def reversed_product(sig):
    e = Generator(sig, sig.K, 0)
    for i in range(sig.K - 1, 0, -1):
        e = e * Generator(sig, i, 0)
    return e


def test_specialization_examples(rng):
    st = sample_stage(S21, rng)
    p, k = st.p, st.kappa
    y = ((Fraction(3), Fraction(5)), (Fraction(7), Fraction(11)))
    z = (Fraction(13),)
    x = st.specialize(y, z)
    assert x[0][0] == st.target_point.q1 * y[0][0] == p.q1 * k * y[0][0]
    assert x[2][-1] == z[0] / p.q3
    # color m+n-1 = 2 here coincides with m; use (3,2) for the unit coefficient
    sig = AlgebraSignature(3, 2)
    st = sample_stage(sig, rng)
    y = tuple((Fraction(2 + i),) for i in range(4))
    x = st.specialize(y, ())
    assert x[3][0] == y[3][0]


def test_root_witness_required(rng):
    p = sample_generic_point(S21, rng)
    with pytest.raises(ValueError):
        FusionStage(S21, p)
    p = sample_generic_point(S21, rng, kappa_power=kappa_exponent(S21))
    assert p.q1 == p.kappa ** -2
    st = FusionStage(S21, p)
    assert st.target_point.q1 == p.q1 * p.kappa and st.target_point.q3 == p.q3 / p.kappa


def test_factor_parameters(rng):
    st = sample_stage(S21, rng)
    p, aux = st.p, st.aux_point
    assert (aux.q1, aux.q2, aux.q3) == (1 / (p.q1 * p.q3 ** 2), 1 / p.q2, p.q3)
    st0 = sample_stage(AlgebraSignature(3, 0), rng)
    p, aux = st0.p, st0.aux_point
    assert (aux.q1, aux.q2, aux.q3) == (p.q1 * p.q3 ** -2, p.q2, p.q3 ** 3)
    assert st0.target_point.q1 == p.q1 * p.kappa and p.q1 == p.kappa ** 2


def test_empty_factor_correction(rng):
    """L = N has no z variables, L = 0 none of y; both must still be finite and nonzero."""
    st = sample_stage(S21, rng, variant="erratum")
    y = ((Fraction(3),), (Fraction(5),))
    assert st.correction(y, ()) != 0
    assert st.correction(((), ()), (Fraction(7),)) != 0


@pytest.mark.parametrize("m,n", [(2, 1), (3, 1), (2, 0), (3, 0)])
def test_homomorphism_erratum(m, n, rng):
    sig = AlgebraSignature(m, n)
    st = sample_stage(sig, rng, variant="erratum")
    assert homomorphism_check(st, G(sig, 0, 1), G(sig, 1, 1), rng, trials=2).passed
    assert homomorphism_check(st, G(sig, 1, 1), reversed_product(sig), rng, trials=2).passed


@pytest.mark.slow
def test_homomorphism_erratum_32(rng):
    sig = AlgebraSignature(3, 2)
    st = sample_stage(sig, rng, variant="erratum")
    assert homomorphism_check(st, G(sig, 0, 1), G(sig, 1, 1), rng, trials=1).passed


@pytest.mark.parametrize("m,n", [(2, 1), (2, 0), (3, 0)])
def test_printed_factors_fail(m, n, rng):
    sig = AlgebraSignature(m, n)
    st = sample_stage(sig, rng, variant="printed")
    chk = homomorphism_check(st, G(sig, 0, 1), G(sig, 1, 1), rng, trials=2)
    assert not chk.passed and chk.witness["lhs"] != chk.witness["rhs"]


def test_alt_denominator_is_not_needed(rng):
    """The repeated q_3^{m-2} pole only matters for n >= 2; both readings agree at (3,1)."""
    sig = AlgebraSignature(3, 1)
    st = sample_stage(sig, rng, variant="alt-denominator")
    assert homomorphism_check(st, G(sig, 0, 1), G(sig, 1, 1), rng, trials=1).passed


def test_unit_and_grading(rng):
    st = sample_stage(S21, rng, variant="erratum")
    m = st.apply(Unit(S21))
    assert list(m) == [((0, 0), (0,))]
    assert m[((0, 0), (0,))]((((), ()), ((),))) == 1
    assert homomorphism_check(st, Unit(S21), G(S21, 1, 1), rng, trials=1).passed
    comps = st.apply(G(S21, 0, 1) * G(S21, 1, 2))
    assert sorted(k[1][0] for k in comps) == [0, 1, 2, 3]
    assert list(unit_map(st.factors)) == [((0, 0), (0,))]


def test_pure_z_component_is_z_independent_multiple(rng):
    """pi(G(0,1))_{0,1} is a constant times the degree-1 element 1 of Sh_1."""
    st = sample_stage(S21, rng, variant="erratum")
    comp = st.apply(G(S21, 0, 1))[((0, 0), (1,))]
    vals = {comp((((), ()), ((Fraction(z),),))) for z in (2, 5, 9)}
    assert len(vals) == 1 and vals.pop() != 0


@pytest.mark.parametrize("m,n", [(2, 1), (2, 0)])
def test_image_validity(m, n, rng):
    sig = AlgebraSignature(m, n)
    st = sample_stage(sig, rng, variant="erratum")
    checks = check_image_validity(st, G(sig, 1, 1), rng, trials=1)
    assert checks and all(c.passed for c in checks), [c.name for c in checks if not c.passed]


def test_printed_image_pole_shape_fails(rng):
    st = sample_stage(S21, rng, variant="printed")
    checks = check_image_validity(st, G(S21, 1, 2), rng, trials=1)
    bad = [c.name for c in checks if not c.passed]
    assert bad and all(n.endswith("pole-shape") and "[[1, 1], [1]]" in n for n in bad)


@pytest.mark.parametrize("m,n,star,comp", [(2, 0, False, "y"), (2, 0, False, "z"), (3, 0, False, "y"),
                                           (2, 1, False, "y"), (2, 1, True, "y"), (2, 1, True, "z")])
def test_surjectivity_closed_forms(m, n, star, comp, rng):
    chk = check_surjectivity_formula(AlgebraSignature(m, n), 1, rng, star=star, component=comp, points=2)
    assert chk.passed, chk.witness


def test_surjectivity_printed_n0_forms_disagree(rng):
    chk = check_surjectivity_formula(AlgebraSignature(2, 0), 1, rng, component="y", points=2, printed_form=True)
    assert not chk.passed


@pytest.mark.parametrize("N,L", [(1, 0), (1, 1), (2, 1)])
def test_correction_factor_shape(N, L, rng):
    st = sample_stage(AlgebraSignature(3, 1), rng, variant="erratum")
    assert check_lemma_consistency(st, N, L, rng).passed


def test_transported_s():
    s = (Fraction(2), Fraction(3), Fraction(1, 6))
    assert transported_s(S21, s) == (Fraction(2), Fraction(1, 2))
    s4 = (Fraction(2), Fraction(3), Fraction(5), Fraction(1, 30))
    t = transported_s(AlgebraSignature(4, 0), s4)
    assert t[0] == Fraction(1, 15) and t[1] == 3 and t[0] * t[1] * t[2] == 1


def test_iterate_depth_zero_is_identity(rng):
    it = iterate_pi(S21, 0, rng)
    e = G(S21, 1, 1)
    x = random_assignment((1, 1, 1), rng)
    assert list(it.apply(e)) == [((1, 1, 1),)]
    assert it.apply(e)[((1, 1, 1),)]((x,)) == evaluate(e, it.p, x)


@pytest.mark.parametrize("m,n,depth", [(2, 1, 1), (3, 2, 2), (3, 1, 1), (2, 0, 1), (3, 0, 2)])
def test_iterate_triples(m, n, depth, rng):
    sig = AlgebraSignature(m, n)
    it = iterate_pi(sig, depth, rng)
    q1, q2, q3 = it.p.q1, it.p.q2, it.p.q3
    if n:
        want = [(q2 ** (j + 1) * q3 ** (n - m), 1 / q2, q2 ** -j * q3 ** (m - n)) for j in range(n)]
    else:
        want = [(q2 ** j * q1 ** m, q2, q2 ** (-j - 1) * q1 ** -m) for j in range(m)]
    # at full depth the last one-color target is itself a factor of the closed form
    got = it.triples()[1:] if n else it.triples()
    assert Counter(got) == Counter(want)
    assert Counter(corollary_triples(sig, it.p)) == Counter(want)
    if n:
        assert it.triples()[0][0] ** m == q1 ** (m - n)


@pytest.mark.parametrize("m,n", [(2, 1), (2, 0), (3, 0)])
def test_check_iterate(m, n, rng):
    chk = check_iterate(AlgebraSignature(m, n), rng, trials=1)
    assert chk.passed, chk.witness
