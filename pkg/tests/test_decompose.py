"""Block decomposition: induced structure, ordering property, variants."""

import itertools

import pytest

from sizeramsey.decompose import (BlockKind, decompose_components,
                                  decompose_cubic, decompose_triangle_free,
                                  decomposition_from_text,
                                  decomposition_to_text,
                                  longest_induced_path,
                                  max_induced_cycle_family,
                                  validate_decomposition)
from sizeramsey.errors import (DegreeTooHigh, HasTriangle, IsK4, NotBipartite,
                               NotConnected)
from sizeramsey.graph import Graph, named_graph, random_cubic


def _connected_cubic(n, seed):
    s = seed
    while True:
        g = random_cubic(n, seed=s)
        if g.is_connected():
            return g
        s += 10_000


class TestDecomposeCubic:
    @pytest.mark.parametrize("name", ["K33", "Petersen", "Prism3", "Cube",
                                      "Heawood", "MoebiusKantor"])
    def test_named_graphs_valid(self, name):
        h = named_graph(name)
        d = decompose_cubic(h)
        assert validate_decomposition(h, d, min_cycle=4) == []

    def test_k4_rejected(self):
        with pytest.raises(IsK4):
            decompose_cubic(named_graph("K4"))

    def test_disconnected_rejected(self):
        two = Graph.from_edges(12, named_graph("K33").edges() +
                               [(u + 6, v + 6)
                                for u, v in named_graph("K33").edges()])
        with pytest.raises(NotConnected):
            decompose_cubic(two)

    def test_high_degree_rejected(self):
        with pytest.raises(DegreeTooHigh):
            decompose_cubic(named_graph("Complete(5)"))

    @pytest.mark.parametrize("n", [6, 8, 10, 12, 14])
    def test_random_cubic_valid(self, n):
        for s in range(30):
            h = random_cubic(n, seed=s)
            if not h.is_connected():
                continue
            if h.n == 4:
                continue
            try:
                d = decompose_cubic(h)
            except IsK4:
                continue
            assert validate_decomposition(h, d, min_cycle=4) == []

    def test_reversal_ordering_both_directions(self):
        """Forward: each vertex has <= 1 neighbour in earlier blocks.
        Equivalent reverse view: each vertex keeps >= deg-1 neighbours in its
        own or later blocks."""
        h = _connected_cubic(14, 3)
        d = decompose_cubic(h)
        masks = h.neighbor_masks()
        earlier = 0
        for block in d.blocks:
            bmask = 0
            for v in block.vertices:
                bmask |= 1 << v
            for v in block.vertices:
                back = (masks[v] & earlier).bit_count()
                assert back <= 1
                later_or_own = (masks[v] & ~earlier).bit_count()
                assert later_or_own >= h.degree(v) - 1
            earlier |= bmask


class TestInducedSearch:
    def test_longest_induced_path_vs_exhaustive(self):
        for s in range(8):
            h = random_cubic(10, seed=s)
            path = longest_induced_path(h)
            best = 1
            for k in range(2, h.n + 1):
                found = False
                for per in itertools.permutations(range(h.n), k):
                    ok = all(h.has_edge(per[i], per[i + 1])
                             for i in range(k - 1))
                    if ok:
                        ok = all(not h.has_edge(per[i], per[j])
                                 for i in range(k) for j in range(i + 2, k))
                    if ok:
                        found = True
                        break
                if found:
                    best = k
                else:
                    break
            assert len(path) == best

    def test_cycle_family_disjoint_induced(self):
        h = named_graph("Petersen")
        fam = max_induced_cycle_family(h, min_len=4)
        used = set()
        for cyc in fam:
            assert len(cyc) >= 4
            assert not used & set(cyc)
            used |= set(cyc)
            for i, u in enumerate(cyc):
                for j in range(i + 1, len(cyc)):
                    adjacent = h.has_edge(u, cyc[j])
                    consecutive = (j == i + 1) or (i == 0 and
                                                   j == len(cyc) - 1)
                    assert adjacent == consecutive

    def test_petersen_two_pentagons(self):
        fam = max_induced_cycle_family(named_graph("Petersen"), min_len=4)
        assert sorted(len(c) for c in fam) == [5, 5]


class TestTriangleFreeVariant:
    def test_petersen_cycles_at_least_5(self):
        h = named_graph("Petersen")
        d = decompose_triangle_free(h)
        assert validate_decomposition(h, d, min_cycle=5) == []
        for b in d.blocks:
            if b.kind is BlockKind.CYCLE:
                assert len(b.vertices) >= 5

    @pytest.mark.parametrize("name", ["Heawood", "MoebiusKantor"])
    def test_bipartite_cycles_at_least_6(self, name):
        h = named_graph(name)
        d = decompose_triangle_free(h, bipartite_mode=True)
        assert validate_decomposition(h, d, min_cycle=6) == []
        for b in d.blocks:
            if b.kind is BlockKind.CYCLE:
                assert len(b.vertices) >= 6

    def test_triangle_rejected(self):
        # 8-vertex cubic graph containing a triangle on {0,1,2}
        g = Graph.from_edges(8, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3),
                                 (4, 5), (4, 6), (5, 6), (4, 7), (5, 7),
                                 (2, 6), (3, 7)])
        assert sorted(g.degrees()) == [3] * 8
        with pytest.raises(HasTriangle):
            decompose_triangle_free(g)

    def test_non_bipartite_rejected(self):
        with pytest.raises(NotBipartite):
            decompose_triangle_free(named_graph("Petersen"),
                                    bipartite_mode=True)


class TestComponentsAndSerialization:
    def test_components_k4_split(self):
        k33 = named_graph("K33")
        k4 = named_graph("K4")
        h = Graph.from_edges(10, k33.edges() +
                             [(u + 6, v + 6) for u, v in k4.edges()])
        d, k4s = decompose_components(h)
        assert k4s == [[6, 7, 8, 9]]
        covered = sorted(v for b in d.blocks for v in b.vertices)
        assert covered == list(range(6))

    def test_size_descending_order(self):
        a = named_graph("Petersen")
        b = named_graph("K33")
        h = Graph.from_edges(16, b.edges() +
                             [(u + 6, v + 6) for u, v in a.edges()])
        d, _ = decompose_components(h)
        first_block_vs = set(d.blocks[0].vertices)
        assert first_block_vs <= set(range(6, 16))  # bigger component first

    def test_text_round_trip(self):
        h = named_graph("Heawood")
        d = decompose_cubic(h)
        text = decomposition_to_text(d)
        d2 = decomposition_from_text(text)
        assert [(b.kind, b.vertices) for b in d.blocks] == \
               [(b.kind, b.vertices) for b in d2.blocks]
