"""Embedding engine: candidate sets, tree/cycle embedding, block pipeline."""

import itertools

import numpy as np
import pytest

from sizeramsey.decompose import decompose_components
from sizeramsey.embedder import (EmbedConfig, EmbeddingState, HostPartition,
                                 TreeEmbedInput, candidate_set,
                                 check_distance2_coloring,
                                 default_bucket_count, embed_blocks,
                                 embed_cycle, embed_tree, occupancy_report,
                                 occupancy_summary, verify_embedding)
from sizeramsey.errors import ColoringInvalid, EmbeddingFailure, Terminated
from sizeramsey.graph import (GnpParams, VertexColoring, child_seed,
                              gnp_sample, named_graph, random_cubic,
                              square_coloring)


def _full_targets(pattern, n):
    return {v: np.arange(n) for v in range(pattern.n)}


class TestCandidateSet:
    def test_common_neighborhood(self):
        g = named_graph("Complete(5)")
        pat = named_graph("Path(3)")
        st = EmbeddingState(5)
        st.place(0, 0)
        st.place(2, 1)
        cand = candidate_set(g, st, pat, 1, np.arange(5))
        # vertex 1 is adjacent to both 0 and 2; hosts 0,1 are used
        assert sorted(int(x) for x in cand) == [2, 3, 4]

    def test_respects_target(self):
        g = named_graph("Complete(5)")
        pat = named_graph("Path(2)")
        st = EmbeddingState(5)
        cand = candidate_set(g, st, pat, 0, np.array([1, 3]))
        assert sorted(int(x) for x in cand) == [1, 3]


class TestEmbedTree:
    def test_path_success_and_validity(self):
        g = gnp_sample(GnpParams(500, 0.1, 1))
        pat = named_graph("Path(6)")
        st = embed_tree(g, TreeEmbedInput(pat, _full_targets(pat, 500),
                                          bucket_count=3), seed=2)
        assert verify_embedding(g, pat, st)

    def test_anchor_respected(self):
        g = named_graph("Complete(6)")
        pat = named_graph("Path(3)")
        inp = TreeEmbedInput(pat, _full_targets(pat, 6), anchors={0: 5},
                             bucket_count=2)
        st = embed_tree(g, inp, seed=1)
        assert g.has_edge(st.image[0], 5)

    def test_terminates_on_impossible(self):
        g = gnp_sample(GnpParams(6, 0.0, 1))  # empty host
        pat = named_graph("Path(3)")
        with pytest.raises(Terminated):
            embed_tree(g, TreeEmbedInput(pat, _full_targets(pat, 6),
                                         bucket_count=2), seed=1)

    def test_occupancy_traced(self):
        g = gnp_sample(GnpParams(400, 0.15, 3))
        pat = named_graph("Path(8)")
        st = embed_tree(g, TreeEmbedInput(pat, _full_targets(pat, 400),
                                          bucket_count=3), seed=4)
        assert sum(st.occupancy) == 8
        assert occupancy_summary(st).startswith("0:")

    def test_deterministic(self):
        g = gnp_sample(GnpParams(300, 0.1, 5))
        pat = named_graph("Path(5)")
        runs = [embed_tree(g, TreeEmbedInput(pat, _full_targets(pat, 300),
                                             bucket_count=2), seed=6).image
                for _ in range(2)]
        assert runs[0] == runs[1]


class TestEmbedCycle:
    @pytest.mark.parametrize("seed", range(100))
    def test_c8_in_sparse_host(self, seed):
        g = gnp_sample(GnpParams(1000, 0.1, child_seed(2, "c8", seed)))
        pat = named_graph("Cycle(8)")
        st = embed_cycle(g, TreeEmbedInput(pat, _full_targets(pat, 1000),
                                           bucket_count=3), seed=seed)
        assert verify_embedding(g, pat, st)

    def test_short_cycle_agrees_with_exhaustive(self):
        """Where direct enumeration finds no C4, embed_cycle must fail too."""
        pat = named_graph("Cycle(4)")
        for seed in range(40):
            g = gnp_sample(GnpParams(12, 0.25, child_seed(7, "x", seed)))
            exists = False
            for quad in itertools.permutations(range(12), 4):
                if (g.has_edge(quad[0], quad[1]) and
                        g.has_edge(quad[1], quad[2]) and
                        g.has_edge(quad[2], quad[3]) and
                        g.has_edge(quad[3], quad[0])):
                    exists = True
                    break
            try:
                st = embed_cycle(g, TreeEmbedInput(
                    pat, _full_targets(pat, 12), bucket_count=2), seed=seed)
                found = verify_embedding(g, pat, st)
            except EmbeddingFailure:
                found = False
            assert found == exists

    def test_long_cycle_closure(self):
        g = gnp_sample(GnpParams(3000, 0.1, 11))
        pat = named_graph("Cycle(30)")
        st = embed_cycle(g, TreeEmbedInput(pat, _full_targets(pat, 3000),
                                           bucket_count=3), seed=12)
        assert verify_embedding(g, pat, st)

    def test_failure_rolls_back(self):
        g = gnp_sample(GnpParams(8, 0.0, 1))
        pat = named_graph("Cycle(5)")
        st = EmbeddingState(8)
        with pytest.raises(EmbeddingFailure):
            embed_cycle(g, TreeEmbedInput(pat, _full_targets(pat, 8),
                                          bucket_count=2), st, seed=1)
        assert st.image == {} and sum(st.occupancy) == 0


class TestHostPartition:
    def test_equitable(self):
        part = HostPartition.random_equitable(range(100), 5, seed=3)
        sizes = [len(v) for v in part.cells.values()]
        assert len(part.cells) == 10
        assert max(sizes) - min(sizes) <= 1
        allv = sorted(int(v) for vs in part.cells.values() for v in vs)
        assert allv == list(range(100))

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            HostPartition({(0, 0): [1, 2], (0, 1): [2, 3]})


class TestEmbedBlocks:
    def _instance(self, n, p, hsize, root):
        g = gnp_sample(GnpParams(n, p, child_seed(root, "g")))
        h = random_cubic(hsize, seed=child_seed(root, "h"))
        d, _ = decompose_components(h)
        col = square_coloring(h)
        part = HostPartition.random_equitable(range(n), col.num_colors,
                                              seed=child_seed(root, "part"))
        return g, h, d, col, part

    def test_success_and_validity(self):
        n = 2000
        p = 4.0 * n ** (-0.4)
        for root in range(10):
            g, h, d, col, part = self._instance(n, p, 40, root)
            st = embed_blocks(g, h, d, part, col,
                              EmbedConfig(p=p, bucket_count=2,
                                          seed=child_seed(root, "e")))
            assert verify_embedding(g, h, st)
            # cell contract: every vertex landed in a cell of its color
            for v, x in st.image.items():
                z = st.cell_choice[v]
                assert x in set(int(y) for y in
                                part.cells[(col.colors[v], z)])

    def test_invalid_coloring_rejected(self):
        n = 500
        g, h, d, col, part = self._instance(n, 0.2, 10, 1)
        bad = VertexColoring([0] * h.n, 1)
        with pytest.raises(ColoringInvalid):
            embed_blocks(g, h, d, part, bad, EmbedConfig(p=0.2))

    def test_check_distance2(self):
        h = named_graph("Petersen")
        with pytest.raises(ColoringInvalid):
            check_distance2_coloring(h, VertexColoring([0] * 10, 1))
        check_distance2_coloring(h, square_coloring(h))

    def test_deterministic(self):
        n = 1500
        p = 4.0 * n ** (-0.4)
        images = []
        for _ in range(2):
            g, h, d, col, part = self._instance(n, p, 30, 9)
            st = embed_blocks(g, h, d, part, col,
                              EmbedConfig(p=p, bucket_count=2, seed=13))
            images.append(dict(st.image))
        assert images[0] == images[1]


class TestOccupancyReport:
    def test_bounds_and_fit(self):
        st = EmbeddingState(100)
        st.occupancy = [30, 8, 1]
        rows = occupancy_report(st, n=1000, p=0.1, c_constants=[1.0, 1.0, 1.0])
        assert len(rows) == 3
        assert rows[0].bound == 1000.0 and not rows[0].exceeded
        # bucket 1 bound: n/(np^2) = 100; occupancy 8 is fine
        assert rows[1].bound == pytest.approx(100.0)
        fitted = occupancy_report(st, n=1000, p=0.1)
        assert all(not r.exceeded for r in fitted)

    def test_default_bucket_count(self):
        assert default_bucket_count(2000, 4.0 * 2000 ** -0.4) >= 3
        assert default_bucket_count(100, 0.01) == 3  # clamped floor z=2
