import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperpack.hgraph import Hypergraph, KhgFormatError, parse_khg, render_khg, vset


def small_hypergraphs(max_n=8, ks=(2, 3)):
    @st.composite
    def build(draw):
        k = draw(st.sampled_from(ks))
        n = draw(st.integers(min_value=k, max_value=max_n))
        all_edges = list(itertools.combinations(range(n), k))
        edges = draw(st.lists(st.sampled_from(all_edges), unique=True, max_size=12))
        return Hypergraph(k, n, edges)

    return build()


class TestConstruction:
    def test_edges_canonical_sorted(self):
        h = Hypergraph(3, 5, [(4, 2, 0), (1, 0, 2)])
        assert h.edges == ((0, 1, 2), (0, 2, 4))

    def test_rejects_wrong_size(self):
        with pytest.raises(ValueError):
            Hypergraph(3, 5, [(0, 1)])

    def test_rejects_repeat_vertex(self):
        with pytest.raises(ValueError):
            Hypergraph(3, 5, [(0, 1, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Hypergraph(3, 5, [(0, 1, 5)])

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValueError):
            Hypergraph(3, 5, [(0, 1, 2), (2, 1, 0)])

    def test_rejects_k_below_2(self):
        with pytest.raises(ValueError):
            Hypergraph(1, 5, [])

    def test_empty_host_ok(self):
        h = Hypergraph(3, 0, [])
        assert h.n == 0 and h.edges == ()

    def test_k_above_n_only_with_edges(self):
        Hypergraph(4, 2, [])  # fine while edgeless
        with pytest.raises(ValueError):
            Hypergraph(4, 2, [(0, 1, 2, 3)])

    def test_equality_and_hash(self):
        a = Hypergraph(3, 4, [(0, 1, 2)])
        b = Hypergraph(3, 4, [(2, 1, 0)])
        assert a == b and hash(a) == hash(b)
        assert a != Hypergraph(3, 5, [(0, 1, 2)])


class TestQueries:
    def setup_method(self):
        # K4^(3): every triple of {0..3}
        self.k4 = Hypergraph(3, 4, itertools.combinations(range(4), 3))

    def test_degree_empty_set_is_edge_count(self):
        assert self.k4.degree(()) == 4

    def test_vertex_degree(self):
        assert self.k4.degree((0,)) == 3

    def test_pair_degree(self):
        assert self.k4.degree((0, 1)) == 2

    def test_full_size_degree_is_membership(self):
        assert self.k4.degree((0, 1, 2)) == 1
        h = Hypergraph(3, 4, [(0, 1, 2)])
        assert h.degree((0, 1, 3)) == 0

    def test_degree_oversized_query(self):
        with pytest.raises(ValueError):
            self.k4.degree((0, 1, 2, 3))

    def test_min_l_degree_values(self):
        assert self.k4.min_l_degree(0) == 4
        assert self.k4.min_l_degree(1) == 3
        assert self.k4.min_l_degree(2) == 2

    def test_min_l_degree_range_check(self):
        with pytest.raises(ValueError):
            self.k4.min_l_degree(3)

    def test_link_of_pair(self):
        assert self.k4.link((0, 1)) == ((2,), (3,))

    def test_link_requires_proper_subset(self):
        with pytest.raises(ValueError):
            self.k4.link((0, 1, 2))

    def test_link_set_cached_consistent(self):
        assert self.k4.link_set(0) == frozenset(self.k4.link((0,)))

    def test_induced_relabels(self):
        h = Hypergraph(3, 6, [(1, 3, 5), (0, 1, 2)])
        sub = h.induced((1, 3, 5))
        assert sub.n == 3 and sub.edges == ((0, 1, 2),)

    def test_degree_profile(self):
        assert self.k4.degree_profile() == (4, 3, 2)

    def test_incident(self):
        h = Hypergraph(3, 5, [(0, 1, 2), (0, 3, 4)])
        assert h.incident(0) == frozenset({0, 1})
        assert h.incident(2) == frozenset({0})


@given(small_hypergraphs())
@settings(max_examples=60, deadline=None)
def test_degree_sum_identity(h):
    # handshake at every level: sum of l-set degrees = C(k, l) * |E|
    for l in range(0, h.k):
        total = sum(h.degree(c) for c in itertools.combinations(range(h.n), l))
        assert total == comb(h.k, l) * len(h.edges)


@given(small_hypergraphs())
@settings(max_examples=60, deadline=None)
def test_khg_round_trip(h):
    assert parse_khg(render_khg(h)) == h


@given(small_hypergraphs())
@settings(max_examples=40, deadline=None)
def test_link_matches_definition(h):
    for v in range(min(h.n, 4)):
        expect = sorted(
            tuple(w for w in e if w != v) for e in h.edges if v in e
        )
        assert list(h.link((v,))) == expect


class TestFormat:
    def test_render_shape(self):
        h = Hypergraph(3, 5, [(0, 1, 2), (0, 1, 4)])
        assert render_khg(h) == "3 5\n0 1 2\n0 1 4\n"

    def test_comments_and_blanks_ignored(self):
        text = "# host\n\n3 5  # header\n0 1 2\n\n# done\n"
        h = parse_khg(text)
        assert h.edges == ((0, 1, 2),)

    def test_missing_header(self):
        with pytest.raises(KhgFormatError):
            parse_khg("# nothing here\n")

    def test_bad_header_line_number(self):
        with pytest.raises(KhgFormatError) as ei:
            parse_khg("\n# c\n3\n")
        assert ei.value.line_no == 3

    def test_bad_edge_line_number(self):
        with pytest.raises(KhgFormatError) as ei:
            parse_khg("3 5\n0 1 2\n0 1\n")
        assert ei.value.line_no == 3

    def test_non_integer_vertex(self):
        with pytest.raises(KhgFormatError):
            parse_khg("3 5\n0 1 x\n")

    def test_duplicate_edge_rejected(self):
        with pytest.raises(KhgFormatError):
            parse_khg("3 5\n0 1 2\n2 1 0\n")

    def test_out_of_range_vertex(self):
        with pytest.raises(KhgFormatError) as ei:
            parse_khg("3 5\n0 1 5\n")
        assert ei.value.line_no == 2

    def test_graph_via_k2(self):
        g = parse_khg("2 3\n0 1\n1 2\n")
        assert g.k == 2 and g.degree((1,)) == 2


def test_vset_collapses_duplicates():
    assert vset((3, 1, 3, 0)) == (0, 1, 3)
