from itertools import product

import pytest

from atlasdescent import corpus
from atlasdescent.order import FinitePreorder, canonical_form
from atlasdescent.simplicial import TruncatedSSet

from oracles import atlas_by_formula, simplicial_identities_hold


def brute_preorder_classes(n):
    pts = [str(k) for k in range(n)]
    pairs = [(a, b) for a in pts for b in pts if a != b]
    seen = set()
    for keep in product([False, True], repeat=len(pairs)):
        rel = [p for p, k in zip(pairs, keep) if k]
        P = FinitePreorder.from_relations(pts, rel)
        if len(P.leq) - n == len(rel):  # already transitive, so each preorder is hit once per labelling
            seen.add(canonical_form(P))
    return seen


class TestEnumeration:
    @pytest.mark.parametrize("n", range(4))
    def test_preorders_match_brute_force(self, n):
        got = {canonical_form(P) for P in corpus.preorders_up_to_iso(n)}
        assert len(got) == len(corpus.preorders_up_to_iso(n))
        assert got == brute_preorder_classes(n)

    def test_counts(self):
        assert [len(corpus.preorders_up_to_iso(n)) for n in range(5)] == [1, 1, 3, 9, 33]
        assert [len(corpus.posets_up_to_iso(n)) for n in range(6)] == [1, 1, 2, 5, 16, 63]

    def test_exhaustive_diagrams(self):
        ds = list(corpus.exhaustive_diagrams(3))
        names = [n for n, _ in ds]
        assert len(names) == len(set(names))
        kinds = {atlas_by_formula(D) for _, D in ds}
        assert kinds == {True, False}


class TestRandom:
    def test_reproducible(self):
        a = corpus.random_diagrams(5, 20)
        b = corpus.random_diagrams(5, 20)
        assert all(x.U == y.U and x.index.leq == y.index.leq for x, y in zip(a, b))

    def test_index_bound(self):
        assert all(len(D.index) <= 5 for D in corpus.random_diagrams(1, 200))

    def test_labeled_bounds(self):
        Hs = corpus.random_labeled_ssets(2, 30)
        assert len(Hs) == 30
        assert all(H.total_size <= 200 for H in Hs)
        assert all(simplicial_identities_hold(H.shape) for H in Hs[:10])

    def test_named(self):
        assert atlas_by_formula(corpus.basic_atlas()) and not atlas_by_formula(corpus.discrete_pair())
        assert atlas_by_formula(corpus.circle_atlas())
        assert isinstance(corpus.random_labeled_ssets(0, 1)[0].shape, TruncatedSSet)

    def test_minimal_neighbourhoods(self, line):
        assert corpus.minimal_neighbourhoods(line) == [frozenset("m"), frozenset("lm"), frozenset("mr")]
