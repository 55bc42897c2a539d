import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperpack.gen import gen_complete, gen_divisibility_barrier, gen_union_of_cliques
from hyperpack.hgraph import Hypergraph
from hyperpack.partition import (
    GoodnessCertificate,
    Partition,
    PartitionPreconditionError,
    SparseNeighborhoodError,
    UnreachableClusterError,
    certify_goodness,
    find_closed_partition,
    parse_partition,
    render_partition,
)
from hyperpack.pattern import CapExceededError, pattern_from_name
from hyperpack.reach import ThresholdSchedule

E3 = pattern_from_name("edge:3")
P3 = pattern_from_name("P3")


class TestPartitionValue:
    def test_normalises_classes(self):
        p = Partition(((3, 1), (2, 0)))
        assert p.classes == ((1, 3), (0, 2))
        assert p.d == 2
        assert p.target() == (0, 1, 2, 3)
        assert p.class_index() == {1: 0, 3: 0, 0: 1, 2: 1}

    def test_rejects_empty_class(self):
        with pytest.raises(ValueError):
            Partition(((1, 2), ()))

    def test_rejects_overlap(self):
        with pytest.raises(ValueError):
            Partition(((1, 2), (2, 3)))


class TestFindClosedPartition:
    def test_parity_barrier_splits_by_side(self):
        h = gen_divisibility_barrier(12, 3, 5)
        part = find_closed_partition(h, E3, range(12), 2, Fraction(1, 20))
        assert part.classes == ((0, 1, 2, 3, 4), (5, 6, 7, 8, 9, 10, 11))

    def test_dense_host_is_single_class(self):
        h = gen_complete(9, 3)
        part = find_closed_partition(h, E3, range(9), 2, Fraction(1, 20))
        assert part.classes == (tuple(range(9)),)

    def test_graph_clique_union_splits(self):
        g = gen_union_of_cliques((6, 6))
        part = find_closed_partition(g, P3, range(12), 2, Fraction(1, 20))
        assert part.classes == (tuple(range(6)), tuple(range(6, 12)))

    def test_leftover_reassignment_follows_strong_neighborhoods(self):
        # the extra edge makes vertex 0 depth-1 reachable to most of the odd
        # side; with witness count 1 the sides merge except the edge's pair
        base = gen_divisibility_barrier(12, 3, 5)
        h = Hypergraph(3, 12, list(base.edges) + [(0, 5, 6)])
        part = find_closed_partition(h, E3, range(12), 2, Fraction(1, 20))
        assert part.classes == ((0, 1, 2, 3, 4, 7, 8, 9, 10, 11), (5, 6))

    def test_count_threshold_restores_split(self):
        base = gen_divisibility_barrier(12, 3, 5)
        h = Hypergraph(3, 12, list(base.edges) + [(0, 5, 6)])
        part = find_closed_partition(
            h, E3, range(12), 2, Fraction(1, 20),
            schedule=ThresholdSchedule(explicit_count=2),
        )
        assert part.classes == ((0, 1, 2, 3, 4), (5, 6, 7, 8, 9, 10, 11))

    def test_sparse_neighborhood_error(self):
        # vertex 6 sits in no edge at all
        h = Hypergraph(3, 7, [(0, 1, 2), (0, 1, 3), (2, 3, 4), (1, 2, 5)])
        with pytest.raises(SparseNeighborhoodError) as ei:
            find_closed_partition(h, E3, range(7), 2, Fraction(1, 20))
        assert ei.value.vertex in range(7)
        assert ei.value.have < ei.value.need

    def test_unreachable_cluster_error(self):
        # three disjoint complete components, class cap 2: some triple has no
        # reachable pair at depth 1
        comps = []
        for b in (0, 4, 8):
            comps += [tuple(b + x for x in c) for c in itertools.combinations(range(4), 3)]
        h = Hypergraph(3, 12, comps)
        with pytest.raises(UnreachableClusterError) as ei:
            find_closed_partition(h, E3, range(12), 2, Fraction(1, 30))
        w = ei.value.witness
        assert len(w) == 3
        assert len({v // 4 for v in w}) == 3  # one vertex per component

    def test_restricted_target(self):
        h = gen_complete(9, 3)
        part = find_closed_partition(h, E3, range(6), 2, Fraction(1, 20))
        assert part.target() == tuple(range(6))

    def test_empty_target(self):
        h = gen_complete(6, 3)
        part = find_closed_partition(h, E3, (), 2, Fraction(1, 20))
        assert part.classes == ()

    def test_validation(self):
        h = gen_complete(6, 3)
        with pytest.raises(ValueError):
            find_closed_partition(h, E3, range(6), 1, Fraction(1, 20))
        with pytest.raises(ValueError):
            find_closed_partition(h, E3, range(6), 2, Fraction(0))
        with pytest.raises(ValueError):
            find_closed_partition(h, E3, range(6), 2, Fraction(1, 20), alpha=Fraction(0))

    def test_class_count_bounded(self):
        # r <= min(c_cap, floor(1/delta')) by construction of the search range
        g = gen_union_of_cliques((6, 6))
        part = find_closed_partition(g, P3, range(12), 4, Fraction(1, 3))
        assert part.d <= 3


class TestCertifyGoodness:
    def test_valid_on_barrier_split(self):
        h = gen_divisibility_barrier(12, 3, 5)
        part = Partition(((0, 1, 2, 3, 4), (5, 6, 7, 8, 9, 10, 11)))
        cert = certify_goodness(h, E3, part, 2, Fraction(1, 40))
        assert cert.valid
        assert cert.sizes == (5, 7)
        assert cert.closed == (True, True)
        assert cert.failing_pairs == (None, None)

    def test_cross_class_failure_recorded(self):
        h = gen_divisibility_barrier(12, 3, 5)
        mixed = Partition(((0, 1, 2, 3, 5), (4, 6, 7, 8, 9, 10, 11)))
        cert = certify_goodness(h, E3, mixed, 2, Fraction(1, 40))
        assert not cert.valid
        pair = cert.failing_pairs[cert.closed.index(False)]
        assert pair is not None
        # the recorded pair straddles the parity sides (A is 0..4)
        assert (pair[0] <= 4) != (pair[1] <= 4)

    def test_size_floor_enforced(self):
        h = gen_complete(12, 3)
        part = Partition(((0,), tuple(range(1, 12))))
        cert = certify_goodness(h, E3, part, 1, Fraction(1, 4))
        assert cert.size_ok == (False, True)
        assert not cert.valid

    def test_cap_refusal(self):
        h = gen_complete(12, 3)
        part = Partition((tuple(range(12)),))
        with pytest.raises(CapExceededError):
            certify_goodness(h, E3, part, 9, Fraction(1, 40), cap=24)

    def test_depth_validation(self):
        h = gen_complete(6, 3)
        with pytest.raises(ValueError):
            certify_goodness(h, E3, Partition((tuple(range(6)),)), 0, Fraction(1, 4))

    def test_monotone_in_depth(self):
        h = gen_divisibility_barrier(9, 3, 4)
        part = Partition(((0, 1, 2, 3), (4, 5, 6, 7, 8)))
        c1 = certify_goodness(h, E3, part, 1, Fraction(1, 10))
        c2 = certify_goodness(h, E3, part, 2, Fraction(1, 10))
        for a, b in zip(c1.closed, c2.closed):
            if a:
                assert b


@given(st.integers(min_value=6, max_value=12))
@settings(max_examples=8, deadline=None)
def test_output_partitions_target(n):
    n -= n % 3
    h = gen_complete(n, 3)
    try:
        part = find_closed_partition(h, E3, range(n), 2, Fraction(1, 20))
    except PartitionPreconditionError:
        return
    assert part.target() == tuple(range(n))
    seen = [v for cls in part.classes for v in cls]
    assert len(seen) == len(set(seen)) == n


class TestSerialisation:
    def test_round_trip(self):
        part = Partition(((0, 1, 2), (3, 4)))
        assert parse_partition(render_partition(part)) == part

    def test_comments_and_blanks(self):
        text = "# classes\n0 1 2\n\n3 4  # tail\n"
        assert parse_partition(text) == Partition(((0, 1, 2), (3, 4)))

    def test_bad_token(self):
        with pytest.raises(ValueError):
            parse_partition("0 1 x\n")

    def test_render_shape(self):
        assert render_partition(Partition(((1, 0), (2,)))) == "0 1\n2\n"
