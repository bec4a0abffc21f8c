import random

import pytest
from hypothesis import strategies as st

from atlasdescent.order import FinitePoset, FinitePreorder, alexandrov_frame
from atlasdescent import corpus


def poset_strategy(max_size=5):
    """Random posets as upper-triangular relations closed transitively."""

    @st.composite
    def build(draw):
        n = draw(st.integers(0, max_size))
        ids = [f"x{k}" for k in range(n)]
        pairs = [(ids[a], ids[b]) for a in range(n) for b in range(a + 1, n)]
        keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
        perm = draw(st.permutations(ids))
        P = FinitePoset.from_relations(ids, [p for p, k in zip(pairs, keep) if k])
        return P.relabel(dict(zip(ids, perm)))

    return build()


def preorder_strategy(max_size=4):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_size))
        pts = [f"p{k}" for k in range(n)]
        pairs = [(a, b) for a in pts for b in pts if a != b]
        keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
        return FinitePreorder.from_relations(pts, [p for p, k in zip(pairs, keep) if k])

    return build()


def diagram_strategy():
    @st.composite
    def build(draw):
        seed = draw(st.integers(0, 10**6))
        return corpus._random_diagram(random.Random(seed))

    return build()


@pytest.fixture(scope="session")
def line():
    return corpus.line_space()


@pytest.fixture(scope="session")
def atlas():
    return corpus.basic_atlas()


@pytest.fixture(scope="session")
def non_atlas():
    return corpus.discrete_pair()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
