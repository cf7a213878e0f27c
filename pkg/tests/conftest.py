import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from sclab.complex import SimplicialComplex
from sclab.sampler import sample_probs

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def random_complexes(draw, max_n=8, max_dim=3):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(1, max_dim))
    probs = draw(st.lists(st.floats(0.2, 1.0), min_size=d, max_size=d))
    seed = draw(st.integers(0, 2**63))
    return sample_probs(n, probs, seed)


@st.composite
def facet_lists(draw, max_n=7, max_size=4):
    n = draw(st.integers(1, max_n))
    facets = draw(st.lists(
        st.sets(st.integers(0, n - 1), min_size=1, max_size=max_size).map(lambda s: tuple(sorted(s))),
        max_size=8))
    return n, facets


def hollow(n, vertices):
    from itertools import combinations
    return [tuple(c) for c in combinations(vertices, len(vertices) - 1)]


@pytest.fixture
def octahedron():
    return SimplicialComplex.from_facets(6, [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)])


@pytest.fixture
def full_triangle():
    return SimplicialComplex.from_facets(3, [(0, 1, 2)])


@pytest.fixture
def hollow_triangle():
    return SimplicialComplex.from_facets(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
