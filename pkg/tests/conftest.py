import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from shuffle_bethe.exact import UniPoly, UniRatFunction

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

fractions = st.builds(Fraction, st.integers(-30, 30), st.integers(1, 12))
nonzero_fractions = fractions.filter(lambda v: v != 0)
polys = st.lists(fractions, min_size=0, max_size=5).map(UniPoly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())
ratfuncs = st.builds(UniRatFunction, polys, nonzero_polys)
nonzero_ratfuncs = st.builds(UniRatFunction, nonzero_polys, nonzero_polys)


@pytest.fixture
def rng():
    return random.Random(12345)


def xi():
    return UniRatFunction.xi()
