import os
import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

positive_rationals = st.builds(Fraction, st.integers(1, 12), st.integers(1, 12))


def rate_vectors(min_size=1, max_size=6):
    return st.lists(positive_rationals, min_size=min_size, max_size=max_size)


@st.composite
def contents(draw, max_L=5, max_s=3):
    from pushtasep.states import Content

    L = draw(st.integers(2, max_L))
    s = draw(st.integers(1, min(max_s, L - 1)))
    # Place s+1 cut points: n_0 >= 1, n_s >= 1, middle species may be empty.
    n0 = draw(st.integers(1, L - 1))
    rest = L - n0
    ns = draw(st.integers(1, rest))
    middle = [0] * (s - 1)
    left = rest - ns
    for _ in range(left):
        if s > 1:
            middle[draw(st.integers(0, s - 2))] += 1
        else:
            ns += 1
    return Content((n0, *middle, ns))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
