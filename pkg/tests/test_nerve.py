import random

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form
from hypothesis import given, settings
from hypothesis import strategies as st

from atlasdescent import corpus
from atlasdescent._smith import elementary_divisors, smith_diagonal
from atlasdescent.nerve import (
    HomologyGroup,
    NerveSimplex,
    assignment_is_monotone,
    counit_eval,
    homology,
    monotone_assignments,
    nerve_truncated,
    refine_diagram,
    slice_homology,
    slice_refinement_check,
    transpose_assignment,
    transpose_map,
)
from atlasdescent.order import FinitePoset
from atlasdescent.simplicial import (
    TruncatedSemiSSet,
    boundary_simplex,
    ez_decompose,
    semi_boundary,
    simplicial_envelope,
    simplicial_maps,
    standard_simplex,
)

from conftest import poset_strategy
from oracles import homology_oracle, order_reversing_maps, simplicial_identities_hold


def projective_plane_like():
    """One vertex, edges a and c, 2-simplices with boundaries 2a - c and c: first homology Z/2."""
    levels = [["v"], ["a", "c"], ["t1", "t2"]]
    faces = {2: {"t1": ["a", "c", "a"], "t2": ["c", "a", "a"]}}
    G = TruncatedSemiSSet.from_keys(levels, lambda n, i, k: "v" if n == 1 else faces[n][k][i])
    return simplicial_envelope(G, 3)


class TestNerveSizes:
    def test_wedge(self):
        nv = nerve_truncated(corpus.wedge_poset(), 2)
        assert nv.sset.sizes[:2] == (3, 11)

    def test_singleton(self):
        nv = nerve_truncated(FinitePoset.discrete(["p"]), 3)
        assert nv.sset.sizes == (1, 1, 1, 1)

    def test_discrete(self):
        assert nerve_truncated(FinitePoset.discrete(["a", "b"]), 2).sset.sizes == (2, 2, 2)

    def test_empty(self):
        assert nerve_truncated(FinitePoset.discrete([]), 2).sset.sizes == (0, 0, 0)

    def test_two_element_chain(self):
        # full subset at 0 leaves both endpoints free (4), at 1 forces both to 1 (1)
        assert nerve_truncated(FinitePoset.chain(["0", "1"]), 1).sset.sizes == (2, 5)

    @given(poset_strategy(3))
    @settings(max_examples=40, deadline=None)
    def test_rows_match_definition(self, I):
        nv = nerve_truncated(I, 2)
        for n in range(3):
            got = {nv.simplex(n, x).as_dict().__repr__() for x in range(nv.sset.sizes[n])}
            want = {
                {tuple(sorted(T)): f[T] for T in sorted(f, key=lambda T: sum(1 << v for v in T))}.__repr__()
                for f in order_reversing_maps(I, n)
            }
            assert len(got) == nv.sset.sizes[n] == len(want)
            assert got == want

    @given(poset_strategy(3))
    @settings(max_examples=40, deadline=None)
    def test_simplicial_identities(self, I):
        assert simplicial_identities_hold(nerve_truncated(I, 3).sset)

    @given(poset_strategy(3))
    @settings(max_examples=30, deadline=None)
    def test_faces_restrict_along_injections(self, I):
        nv = nerve_truncated(I, 2)
        for n in (1, 2):
            for x in range(nv.sset.sizes[n]):
                s = nv.simplex(n, x).as_dict()
                for i in range(n + 1):
                    vmap = [v + (v >= i) for v in range(n)]
                    face = nv.simplex(n - 1, nv.sset.face(n, i, x)).as_dict()
                    assert all(face[T] == s[tuple(vmap[v] for v in T)] for T in face)

    def test_index_of(self):
        nv = nerve_truncated(corpus.wedge_poset(), 2)
        for x in range(nv.sset.sizes[2]):
            assert nv.index_of(nv.simplex(2, x)) == x
        with pytest.raises(KeyError):
            nv.index_of(NerveSimplex(0, ("zz",)))

    def test_counit(self):
        nv = nerve_truncated(corpus.wedge_poset(), 2)
        els = nv.poset.elements
        for x in range(nv.sset.sizes[1]):
            s = nv.simplex(1, x)
            assert counit_eval(s) == s.at((0, 1)) == els[nv.counit(1)[x]]

    def test_degenerate_simplices_are_constant_on_fibres(self):
        nv = nerve_truncated(corpus.wedge_poset(), 2)
        S = nv.sset
        for x in range(S.sizes[2]):
            ez = ez_decompose(S, 2, x)
            assert S.act(ez.surjection, ez.level, ez.core) == x


class TestRefinement:
    def test_basic_atlas_labels(self, atlas):
        H = refine_diagram(atlas, 2)
        assert sorted(map(sorted, (H.label(0, x) for x in range(3)))) == [["l", "m"], ["m"], ["m", "r"]]
        for x in range(H.shape.sizes[1]):
            s = nerve_truncated(atlas.index, 2).simplex(1, x)
            assert H.label(1, x) == atlas.U[counit_eval(s)]


class TestTranspose:
    @pytest.mark.parametrize("K", [boundary_simplex(1, 2), standard_simplex(1, 2), standard_simplex(0, 2)])
    def test_bijection_into_wedge(self, K):
        I = corpus.wedge_poset()
        nv = nerve_truncated(I, K.N)
        maps = list(simplicial_maps(K, nv.sset))
        assigns = list(monotone_assignments(K, I))
        assert len(maps) == len(assigns)
        seen = set()
        for g in maps:
            f = transpose_map(K, nv, g)
            assert assignment_is_monotone(K, np.asarray(I.matrix, dtype=bool), f)
            back = transpose_assignment(K, nv, f)
            assert all(np.array_equal(a, b) for a, b in zip(back, g))
            seen.add(tuple(tuple(a.tolist()) for a in f))
        assert seen == {tuple(tuple(a.tolist()) for a in f) for f in assigns}

    def test_boundary_edge_count(self):
        I = corpus.wedge_poset()
        K = boundary_simplex(1, 2)
        assert len(list(monotone_assignments(K, I))) == 9

    def test_rejects_non_monotone(self):
        I = FinitePoset.chain(["0", "1"])
        K = standard_simplex(1, 1)
        nv = nerve_truncated(I, 1)
        # edges valued above the vertex 0 is the wrong direction
        with pytest.raises(ValueError):
            transpose_assignment(K, nv, [np.array([0, 0]), np.array([1, 1, 1])])
        with pytest.raises(ValueError):
            transpose_assignment(K, nv, [np.array([0, 0]), np.array([0])])

    @given(poset_strategy(3), st.integers(0, 10**6))
    @settings(max_examples=20, deadline=None)
    def test_round_trip_random(self, I, seed):
        rng = random.Random(seed)
        G = corpus.random_semi_complex(rng, rng.randint(1, 3), 1)
        K = simplicial_envelope(G, 1)
        nv = nerve_truncated(I, 1)
        count = 0
        for f in monotone_assignments(K, I):
            g = transpose_assignment(K, nv, f)
            back = transpose_map(K, nv, g)
            assert all(np.array_equal(a, b) for a, b in zip(back, f))
            count += 1
            if count > 200:
                break


class TestSlices:
    @pytest.mark.parametrize("i", ["A", "B", "U", "V"])
    def test_circle(self, i):
        I = corpus.circle_poset()
        assert slice_refinement_check(i, I, 2)
        assert slice_homology(i, I, 1) == [HomologyGroup(1, ()), HomologyGroup(0, ())]

    def test_unknown_element(self):
        with pytest.raises(ValueError):
            slice_refinement_check("zz", corpus.wedge_poset(), 1)

    @given(poset_strategy(4), st.data())
    @settings(max_examples=30, deadline=None)
    def test_random(self, I, data):
        if not len(I):
            return
        i = data.draw(st.sampled_from(I.elements))
        assert slice_refinement_check(i, I, 2)
        assert slice_homology(i, I, 1) == [HomologyGroup(1, ()), HomologyGroup(0, ())]


class TestHomology:
    def test_circle(self):
        S = nerve_truncated(corpus.circle_poset(), 3).sset
        assert homology(S, 2) == [HomologyGroup(1, ()), HomologyGroup(1, ()), HomologyGroup(0, ())]

    def test_boundary_triangle(self):
        S = simplicial_envelope(semi_boundary(2), 3)
        assert [h.betti for h in homology(S, 2)] == [1, 1, 0]

    def test_sphere(self):
        S = simplicial_envelope(semi_boundary(3), 4)
        assert [h.betti for h in homology(S, 3)] == [1, 0, 1, 0]

    def test_torsion(self):
        S = projective_plane_like()
        assert homology(S, 2) == [HomologyGroup(1, ()), HomologyGroup(0, (2,)), HomologyGroup(0, ())]
        assert homology(S, 2) == [HomologyGroup(b, t) for b, t in homology_oracle(S, 2)]

    def test_empty(self):
        S = nerve_truncated(FinitePoset.discrete([]), 2).sset
        assert homology(S, 1) == [HomologyGroup(0, ()), HomologyGroup(0, ())]

    def test_degree_bound(self):
        S = standard_simplex(1, 2)
        with pytest.raises(ValueError):
            homology(S, 2)
        with pytest.raises(ValueError):
            homology(S, -1)

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_envelopes_match_oracle(self, seed):
        rng = random.Random(seed)
        G = corpus.random_semi_complex(rng, rng.randint(1, 5), 2)
        S = simplicial_envelope(G, 3)
        got = homology(S, 2)
        assert got == [HomologyGroup(b, t) for b, t in homology_oracle(S, 2)]

    @given(poset_strategy(4))
    @settings(max_examples=20, deadline=None)
    def test_nerves_match_oracle(self, I):
        S = nerve_truncated(I, 2).sset
        if len(S.nondegenerate(2)) > 150:
            return
        assert homology(S, 1) == [HomologyGroup(b, t) for b, t in homology_oracle(S, 1)]


class TestSmith:
    @given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_dense_matches_sympy(self, m, n, seed):
        rng = random.Random(seed)
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        D = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
        want = sorted(abs(int(D[i, i])) for i in range(min(m, n)) if D[i, i] != 0)
        assert sorted(smith_diagonal(A)) == want

    @given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_sparse_matches_dense(self, m, n, seed):
        rng = random.Random(seed)
        A = [[rng.choice([0, 0, 1, -1, 2]) for _ in range(n)] for _ in range(m)]
        cols = [{r: A[r][c] for r in range(m) if A[r][c]} for c in range(n)]
        assert sorted(elementary_divisors(cols)) == sorted(smith_diagonal(A))
