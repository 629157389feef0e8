from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from hyperham.graph import (EllCycle, EllPath, KGraph, PartiteView,
                            canonical_cycle, codegree, cycle_windows, format_instance,
                            induced, is_delta_dirac, min_codegree, parse_instance,
                            parse_partition, partite_min_codegree, path_windows,
                            validate_ell_cycle, validate_ell_path)
from hyperham.models import gen_binomial, gen_complete


def brute_min_codegree(H):
    return min(sum(H.has_edge(X + (v,)) for v in range(H.n) if v not in X)
               for X in combinations(range(H.n), H.k - 1))


def brute_partite(view):
    H, k = view.base, view.base.k
    best = None
    for idx in combinations(range(view.s), k - 1):
        for i in set(range(view.s)) - set(idx):
            for X in _product(*(view.parts[j] for j in idx)):
                d = sum(H.has_edge(X + (v,)) for v in view.parts[i])
                best = d if best is None else min(best, d)
    return best


def _product(*pools):
    out = [()]
    for pool in pools:
        out = [x + (v,) for x in out for v in pool]
    return out


class TestKGraph:
    def test_rejects_bad_edges(self):
        with pytest.raises(ValueError):
            KGraph(4, 3, [(0, 1)])
        with pytest.raises(ValueError):
            KGraph(4, 3, [(0, 1, 1)])
        with pytest.raises(ValueError):
            KGraph(4, 3, [(0, 1, 4)])
        with pytest.raises(ValueError):
            KGraph(4, 3, [(0, 1, 2), (2, 1, 0)])
        with pytest.raises(ValueError):
            KGraph(4, 1)

    def test_membership_is_order_free(self):
        H = KGraph(5, 3, [(3, 1, 4)])
        assert H.has_edge((4, 3, 1)) and (1, 3, 4) in H
        assert not H.has_edge((0, 1, 2))
        assert len(H) == 1

    def test_completions(self):
        H = gen_complete(5, 3)
        assert H.completions((0, 1)) == frozenset({2, 3, 4})
        assert codegree(H, (3, 4)) == 3
        with pytest.raises(ValueError):
            H.completions((0,))

    def test_equality_ignores_labels(self):
        a = KGraph(4, 3, [(0, 1, 2)])
        b = KGraph(4, 3, [(0, 1, 2)], labels=[7, 8, 9, 10])
        assert a == b and hash(a) == hash(b)


class TestCodegree:
    def test_complete(self):
        assert min_codegree(gen_complete(7, 3)) == 5
        assert min_codegree(gen_complete(6, 4)) == 3

    def test_edgeless(self):
        assert min_codegree(KGraph(6, 3)) == 0

    def test_n_less_than_k(self):
        with pytest.raises(ValueError):
            min_codegree(KGraph(2, 3))

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(4, 9), k=st.integers(2, 4), p=st.floats(0, 1), seed=st.integers(0, 10**6))
    def test_matches_brute_force(self, n, k, p, seed):
        H = gen_binomial(n, k, p, seed)
        assert min_codegree(H) == brute_min_codegree(H)

    def test_dirac_flag(self):
        H = gen_complete(8, 3)
        assert is_delta_dirac(H, 0.75) and not is_delta_dirac(H, 0.76)


class TestPartite:
    def test_complete_partite(self):
        H = gen_complete(9, 3)
        view = PartiteView.equi(H, [(0, 1, 2), (3, 4, 5), (6, 7, 8)])
        assert view.m == 3 and view.s == 3
        assert partite_min_codegree(view) == 3

    def test_needs_k_parts(self):
        view = PartiteView.equi(gen_complete(6, 3), [(0, 1, 2), (3, 4, 5)])
        with pytest.raises(ValueError):
            partite_min_codegree(view)

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            PartiteView.equi(gen_complete(6, 3), [(0, 1), (1, 2), (3, 4)])

    @settings(max_examples=25, deadline=None)
    @given(s=st.integers(3, 5), m=st.integers(1, 3), p=st.floats(0.3, 1), seed=st.integers(0, 10**6))
    def test_matches_brute_force(self, s, m, p, seed):
        H = gen_binomial(s * m, 3, p, seed)
        view = PartiteView.equi(H, [tuple(range(i * m, (i + 1) * m)) for i in range(s)])
        assert partite_min_codegree(view) == brute_partite(view)

    def test_crossing_edge(self):
        H = gen_complete(6, 3)
        view = PartiteView.equi(H, [(0, 1), (2, 3), (4, 5)])
        assert view.is_crossing_edge((0, 2, 4))
        assert not view.is_crossing_edge((0, 1, 4))


class TestInduced:
    def test_relabels_sorted(self):
        H = KGraph(6, 3, [(1, 3, 5), (0, 1, 2)])
        F = induced(H, [5, 3, 1])
        assert F.n == 3 and F.edges == frozenset({(0, 1, 2)})
        assert F.to_parent((0, 1, 2)) == (1, 3, 5)

    def test_labels_compose(self):
        H = gen_complete(8, 3)
        F = induced(induced(H, [2, 4, 6, 7]), [1, 2, 3])
        assert F.labels == (4, 6, 7)


class TestWindows:
    def test_cycle_windows(self):
        assert cycle_windows((0, 1, 2, 3, 4, 5), 3, 1) == [(0, 1, 2), (2, 3, 4), (4, 5, 0)]

    def test_path_windows(self):
        assert path_windows((0, 1, 2, 3, 4), 3, 1) == [(0, 1, 2), (2, 3, 4)]
        with pytest.raises(ValueError):
            path_windows((0, 1, 2, 3), 3, 1)

    def test_cycle_divisibility(self):
        with pytest.raises(ValueError):
            cycle_windows(tuple(range(7)), 3, 1)

    def test_validate_cycle(self):
        H = gen_complete(6, 3)
        chk = validate_ell_cycle(H, (0, 1, 2, 3, 4, 5), 1)
        assert chk.ok and chk.spanning and not chk.degenerate
        H2 = KGraph(6, 3, [(0, 1, 2), (2, 3, 4)])
        chk = validate_ell_cycle(H2, (0, 1, 2, 3, 4, 5), 1)
        assert chk.violations == (4,) and not chk

    def test_repeated_vertex(self):
        with pytest.raises(ValueError):
            validate_ell_cycle(gen_complete(6, 3), (0, 1, 2, 3, 4, 4), 1)

    def test_validate_path(self):
        H = KGraph(5, 3, [(0, 1, 2)])
        assert validate_ell_path(H, (0, 1, 2, 3, 4), 1) == (2,)

    def test_degenerate_flag(self):
        assert validate_ell_cycle(gen_complete(4, 3), (0, 1, 2, 3), 1).degenerate

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_canonical_invariant_under_rotation_and_reflection(self, data):
        k = data.draw(st.integers(2, 5))
        ell = data.draw(st.integers(0, k - 1))
        step = k - ell
        B = data.draw(st.integers(max(3, -(-k // step)), 6))
        order = data.draw(st.permutations(list(range(B * step))))
        rot = data.draw(st.integers(0, B - 1)) * step
        rotated = order[rot:] + order[:rot]
        # reflect so windows stay aligned: reverse, then shift by the overlap
        rev = order[::-1]
        shift = (len(order) - k) % len(order)
        reflected = rev[shift:] + rev[:shift]
        c = canonical_cycle(order, k, ell)
        assert canonical_cycle(rotated, k, ell) == c
        assert canonical_cycle(reflected, k, ell) == c


class TestPathsAndCycles:
    def test_ell_path(self):
        P = EllPath((0, 1, 2, 3, 4, 5, 6), 3, 1)
        assert P.first_edge == (0, 1, 2) and P.last_edge == (4, 5, 6)
        assert P.edges == [(0, 1, 2), (2, 3, 4), (4, 5, 6)]
        assert (2, 3, 4) in P.edge_set()

    def test_ell_cycle(self):
        C = EllCycle((0, 1, 2, 3, 4, 5), 3, 1)
        assert C.canonical_edges == ((0, 1, 2), (0, 4, 5), (2, 3, 4))
        assert not C.degenerate


class TestTextFormat:
    def test_roundtrip(self):
        H = gen_binomial(8, 3, 0.5, 1)
        assert parse_instance(format_instance(H)) == H

    def test_comments_and_blanks(self):
        H = parse_instance("# hi\n\n3 4\n0 1 2\n# x\n1 2 3\n")
        assert len(H) == 2

    def test_bad_header(self):
        with pytest.raises(ValueError):
            parse_instance("3\n0 1 2\n")
        with pytest.raises(ValueError):
            parse_instance("")

    def test_sorted_output(self):
        H = KGraph(5, 3, [(2, 3, 4), (0, 1, 2)])
        assert format_instance(H) == "3 5\n0 1 2\n2 3 4\n"

    def test_partition(self):
        assert parse_partition("0 1\n# c\n2 3\n") == [(0, 1), (2, 3)]
