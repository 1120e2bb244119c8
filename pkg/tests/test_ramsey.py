"""Arrowing oracles, adversarial search, and the colored-host pipeline."""

import itertools

import pytest

from sizeramsey.embedder import verify_embedding
from sizeramsey.errors import TooManyEdges
from sizeramsey.graph import (Graph, GnpParams, child_seed, gnp_sample,
                              named_graph, random_cubic)
from sizeramsey.ramsey import (BLUE, RED, EdgeColoring,
                               adversarial_coloring_search, enumerate_copies,
                               is_ramsey_exhaustive, mono_subgraph_search,
                               ramsey_pipeline, subgraph_search)


def _naive_has_copy(g, h):
    for per in itertools.permutations(range(g.n), h.n):
        if all(g.has_edge(per[u], per[v]) for u, v in h.edges()):
            return True
    return False


class TestEdgeColoring:
    def test_round_trip(self):
        g = gnp_sample(GnpParams(10, 0.5, 1))
        c = EdgeColoring.random(g, 5)
        c2 = EdgeColoring.from_lines(c.to_lines())
        assert c2.edges == c.edges
        assert (c2.colors == c.colors).all()

    def test_color_class_partition(self):
        g = gnp_sample(GnpParams(12, 0.4, 2))
        c = EdgeColoring.random(g, 3)
        red = c.color_class(g.n, RED)
        blue = c.color_class(g.n, BLUE)
        assert red.edge_count + blue.edge_count == g.edge_count


class TestSubgraphSearch:
    def test_triangle_in_k6(self):
        hit = subgraph_search(named_graph("Complete(6)"),
                              named_graph("Complete(3)"))
        assert hit is not None and len(set(hit.values())) == 3

    def test_no_triangle_in_c5(self):
        assert subgraph_search(named_graph("Cycle(5)"),
                               named_graph("Complete(3)")) is None

    @pytest.mark.parametrize("seed", range(40))
    def test_agrees_with_naive(self, seed):
        g = gnp_sample(GnpParams(9, 0.4, child_seed(1, "g", seed)))
        h = gnp_sample(GnpParams(4, 0.5, child_seed(1, "h", seed)))
        assert (subgraph_search(g, h) is not None) == _naive_has_copy(g, h)

    def test_mono_variant(self):
        g = named_graph("Complete(6)")
        c = EdgeColoring.constant(g, RED)
        assert mono_subgraph_search(g, c, named_graph("Complete(3)"),
                                    RED) is not None
        assert mono_subgraph_search(g, c, named_graph("Complete(3)"),
                                    BLUE) is None

    def test_allowed_restriction(self):
        g = named_graph("Complete(6)")
        hit = subgraph_search(g, named_graph("Complete(3)"),
                              allowed=[0, 1, 2])
        assert set(hit.values()) == {0, 1, 2}


class TestEnumerateCopies:
    def test_triangles_in_k4(self):
        assert len(enumerate_copies(named_graph("Complete(4)"),
                                    named_graph("Complete(3)"))) == 4

    def test_c5_copies_in_k5(self):
        # K5 contains (5-1)!/2 = 12 distinct 5-cycles
        assert len(enumerate_copies(named_graph("Complete(5)"),
                                    named_graph("Cycle(5)"))) == 12


class TestExhaustiveArrowing:
    def test_k6_arrows_k3(self):
        res = is_ramsey_exhaustive(named_graph("Complete(6)"),
                                   named_graph("Complete(3)"))
        assert res.arrows and res.certificate is None
        assert res.colorings_checked == 1 << 14

    def test_k5_does_not_arrow_k3(self):
        res = is_ramsey_exhaustive(named_graph("Complete(5)"),
                                   named_graph("Complete(3)"))
        assert not res.arrows
        cert = res.certificate
        k3 = named_graph("Complete(3)")
        for color in (RED, BLUE):
            cls = cert.color_class(5, color)
            assert cls.edge_count == 5  # two edge-disjoint 5-cycles
            assert subgraph_search(cls, k3) is None

    def test_single_edge_arrows_k2(self):
        res = is_ramsey_exhaustive(named_graph("Path(3)"),
                                   named_graph("Complete(2)"))
        assert res.arrows

    def test_too_many_edges(self):
        with pytest.raises(TooManyEdges):
            is_ramsey_exhaustive(gnp_sample(GnpParams(10, 1.0, 1)),
                                 named_graph("Complete(3)"))

    def test_no_copy_means_no_arrowing(self):
        res = is_ramsey_exhaustive(named_graph("Cycle(6)"),
                                   named_graph("Complete(3)"))
        assert not res.arrows


class TestAdversarialSearch:
    def test_finds_k5_witness(self):
        w = adversarial_coloring_search(named_graph("Complete(5)"),
                                        named_graph("Complete(3)"),
                                        budget=5000, seed=1)
        assert w is not None

    def test_none_on_k6(self):
        assert adversarial_coloring_search(named_graph("Complete(6)"),
                                           named_graph("Complete(3)"),
                                           budget=3000, seed=1) is None

    def test_zero_budget(self):
        assert adversarial_coloring_search(named_graph("Complete(5)"),
                                           named_graph("Complete(3)"),
                                           budget=0, seed=1) is None

    @pytest.mark.parametrize("seed", range(30))
    def test_never_contradicts_oracle(self, seed):
        g = gnp_sample(GnpParams(7, 0.5, child_seed(2, "g", seed)))
        if g.edge_count > 20 or g.edge_count == 0:
            return
        h = named_graph("Complete(3)")
        w = adversarial_coloring_search(g, h, budget=2000,
                                        seed=child_seed(2, "s", seed))
        if w is not None:
            assert not is_ramsey_exhaustive(g, h).arrows


class TestPipeline:
    def test_dense_monochromatic_host(self):
        k20 = named_graph("Complete(20)")
        col = EdgeColoring.constant(k20, RED)
        res = ramsey_pipeline(k20, col, named_graph("Cycle(5)"), seed=1)
        assert res.success
        gmaj = col.color_class(20, RED)
        assert verify_embedding(gmaj, named_graph("Cycle(5)"), res.state)

    def test_random_host_with_k4_component(self):
        g = gnp_sample(GnpParams(4000, 0.35, 77))
        col = EdgeColoring.random(g, 5)
        h28 = random_cubic(28, seed=4)
        k4 = named_graph("Complete(4)")
        h = Graph.from_edges(32, h28.edges() +
                             [(28 + u, 28 + v) for u, v in k4.edges()])
        res = ramsey_pipeline(g, col, h, seed=2)
        assert res.success
        gmaj = col.color_class(g.n, res.color)
        assert verify_embedding(gmaj, h, res.state)

    def test_sparse_host_reports_failure(self):
        n = 600
        g = gnp_sample(GnpParams(n, 0.03, 5))  # far below the threshold
        col = EdgeColoring.random(g, 1)
        res = ramsey_pipeline(g, col, named_graph("Complete(4)"), seed=1)
        assert not res.success
        assert res.failure is not None

    def test_high_degree_pattern_rejected(self):
        g = named_graph("Complete(20)")
        col = EdgeColoring.constant(g, RED)
        with pytest.raises(ValueError):
            ramsey_pipeline(g, col, named_graph("Complete(5)"), seed=1)
