import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atlasdescent import corpus
from atlasdescent.descent import (
    SetSheaf,
    check_descent,
    constant_presheaf,
    is_sheaf,
    limit_over_diagram,
    matching_families,
    refinement_limit_size,
    sections_sheaf,
)
from atlasdescent.order import FinitePreorder, alexandrov_frame, specialization_preorder
from atlasdescent.semirep import SetPresheaf

from conftest import diagram_strategy, preorder_strategy
from oracles import atlas_by_formula, limit_oracle, sheaf_condition_oracle


fold = corpus.fold_bundle


@st.composite
def bundles(draw, max_points=3):
    """A random continuous map of preorders ``E -> X``."""
    X = draw(preorder_strategy(max_points))
    fib = {x: draw(st.integers(0, 2)) for x in X.elements}
    pts = [f"{x}.{k}" for x in X.elements for k in range(fib[x])]
    pairs = [(a, b) for a in pts for b in pts if a != b and X.le(a.split(".")[0], b.split(".")[0])]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    E = FinitePreorder.from_relations(pts, [q for q, k in zip(pairs, keep) if k])
    p = {e: e.split(".")[0] for e in pts}
    # transitive closure can add pairs; they still respect X because X is transitive
    return E, X, p


def components(X: FinitePreorder) -> int:
    parent = {x: x for x in X.elements}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in X.leq:
        parent[find(a)] = find(b)
    return len({find(x) for x in X.elements})


class TestSheafCondition:
    @given(bundles())
    @settings(max_examples=40, deadline=None)
    def test_sections_are_sheaves(self, bundle):
        E, X, p = bundle
        F = sections_sheaf(E, X, p)
        assert is_sheaf(F) and is_sheaf(F, "pairs")
        if len(F.frame.opens) <= 6:
            assert sheaf_condition_oracle(F.presheaf)

    @given(preorder_strategy(3), st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_random_presheaves_match_oracle(self, X, seed):
        frame = alexandrov_frame(X)
        if len(frame.opens) > 6:
            return
        F = random_presheaf(frame, random.Random(seed))
        want = sheaf_condition_oracle(F)
        assert is_sheaf(F) == want == is_sheaf(F, "pairs")

    def test_constant_presheaves(self, line):
        # two values over the empty open already break gluing for the empty cover
        assert not is_sheaf(constant_presheaf(line, ["a", "b"]))
        assert not is_sheaf(constant_presheaf(line, ["a", "b"]), "pairs")
        # one value everywhere is the terminal sheaf
        assert is_sheaf(constant_presheaf(line, ["a"])) and is_sheaf(constant_presheaf(line, ["a"]), "pairs")

    def test_empty_fibre(self, line):
        X = specialization_preorder(line)
        E = FinitePreorder.from_relations(["x"], [])
        with pytest.raises(ValueError):
            sections_sheaf(E, X, {"x": "zz"})
        F = sections_sheaf(E, X, {"x": "m"})
        assert F.presheaf.sections[frozenset()] == ((),)
        assert all(len(F.presheaf.sections[V]) == (1 if V <= {"m"} else 0) for V in line.opens)

    def test_discontinuous_projection(self):
        X = FinitePreorder.from_relations(["a", "b"], [("a", "b")])
        E = FinitePreorder.from_relations(["x", "y"], [("y", "x")])
        with pytest.raises(ValueError):
            sections_sheaf(E, X, {"x": "a", "y": "b"})

    def test_checked(self, line):
        with pytest.raises(ValueError):
            SetSheaf.checked(constant_presheaf(line, ["a", "b"]))

    def test_unknown_method(self, line):
        with pytest.raises(ValueError):
            is_sheaf(constant_presheaf(line, ["a"]), "nope")


def random_presheaf(frame, rng):
    """A section over W picks a value on every open inside W; restriction forgets the rest.

    Each open gets zero to two values, so the result is a sheaf only in special
    cases. With ``parity`` on, values on overlapping opens must share parity.
    """
    opens = sorted(frame.opens, key=lambda W: (len(W), sorted(W)))
    values = {W: tuple(range(rng.randint(0, 2))) for W in opens}
    values[frozenset()] = (0,) if rng.random() < 0.8 else (0, 1)
    parity = rng.random() < 0.5

    def sections(W):
        inner = [W2 for W2 in opens if W2 <= W]
        out = []
        for vals in product(*[values[W2] for W2 in inner]):
            if parity and any(a % 2 != b % 2 for A, a in zip(inner, vals) for B, b in zip(inner, vals) if A & B):
                continue
            out.append(tuple((tuple(sorted(A)), v) for A, v in zip(inner, vals)))
        return out

    def restrict(W, W2, s):
        return tuple(pair for pair in s if frozenset(pair[0]) <= W2)

    return SetPresheaf.from_functions(frame, sections, restrict)


class TestLimits:
    @given(diagram_strategy(), st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_limit_matches_oracle(self, D, seed):
        if len(D.index) > 4 or len(D.frame.opens) > 8:
            return
        X = specialization_preorder(D.frame)
        E, p = fold(X)
        F = sections_sheaf(E, X, p)
        got = sorted(limit_over_diagram(F, D).families)
        assert got == sorted(limit_oracle(F.presheaf, D))

    @given(diagram_strategy())
    @settings(max_examples=40, deadline=None)
    def test_refinement_limit_equals_diagram_limit(self, D):
        if len(D.index) > 4 or len(D.frame.opens) > 8:
            return
        X = specialization_preorder(D.frame)
        E, p = fold(X)
        F = sections_sheaf(E, X, p)
        assert refinement_limit_size(F, D) == len(limit_over_diagram(F, D))

    def test_matching_families(self, line):
        X = specialization_preorder(line)
        E, p = fold(X)
        F = sections_sheaf(E, X, p).presheaf
        U, V = frozenset("lm"), frozenset("mr")
        assert len(list(matching_families(F, [U, V]))) == 2
        assert len(list(matching_families(F, []))) == 1


class TestDescent:
    def test_basic_atlas_fold(self, atlas, line):
        X = specialization_preorder(line)
        E, p = fold(X)
        v = check_descent(sections_sheaf(E, X, p), atlas)
        assert v.passed and v.source_size == v.limit_size == 2

    def test_discrete_pair_fold(self, non_atlas, line):
        X = specialization_preorder(line)
        E, p = fold(X)
        v = check_descent(sections_sheaf(E, X, p), non_atlas)
        assert not v.passed and v.failure == "non-surjective"
        assert (v.source_size, v.limit_size) == (2, 4)

    def test_fold_counts_components(self):
        for X in corpus.preorders_up_to_iso(3):
            E, p = fold(X)
            F = sections_sheaf(E, X, p).presheaf
            top = frozenset(X.elements)
            assert len(F.sections[top]) == 2 ** components(X)

    def test_non_injective(self, line):
        """Two global sections that agree everywhere on the cover's members."""
        secs = {W: (("g", 0), ("g", 1)) if W == line.top else (("l", 0),) for W in line.opens}

        def restrict(W, W2, s):
            return s if W2 == W else ("l", 0)

        F = SetPresheaf.from_functions(line, lambda W: secs[W], restrict)
        v = check_descent(F, corpus.basic_atlas())
        assert not v.passed and v.failure == "non-injective" and len(v.elements) == 2

    def test_non_surjective(self, line):
        """Singletons everywhere except the whole space, which has no sections."""
        F = SetPresheaf.from_functions(line, lambda W: () if W == line.top else ("*",), lambda W, W2, s: s)
        v = check_descent(F, corpus.basic_atlas())
        assert not v.passed and v.failure == "non-surjective" and v.limit_size == 1

    @given(diagram_strategy(), st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_atlases_satisfy_descent(self, D, seed):
        if len(D.index) > 4 or len(D.frame.opens) > 8 or not atlas_by_formula(D):
            return
        X = specialization_preorder(D.frame)
        E, p = fold(X, random.Random(seed).randint(1, 3))
        assert check_descent(sections_sheaf(E, X, p), D).passed

    def test_relabel_invariance(self, atlas, line):
        X = specialization_preorder(line)
        E, p = fold(X)
        F = sections_sheaf(E, X, p)
        D2 = atlas.relabel({"w": "z1", "u": "z2", "v": "z3"})
        assert check_descent(F, D2) == check_descent(F, atlas)
