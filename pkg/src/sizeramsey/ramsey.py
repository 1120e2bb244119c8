"""Ramsey arrowing checks and the colored-host embedding pipeline.

``is_ramsey_exhaustive`` decides G -> H exactly by scanning every 2-coloring
of E(G) (complement symmetry fixes the color of edge 0), reporting either the
exhaustion or a certificate coloring with no monochromatic copy of H.
``adversarial_coloring_search`` is the heuristic counterpart for hosts too
large to exhaust. ``ramsey_pipeline`` runs the full structural route on a
colored host: majority color class, random equitable partition plus cleanup,
greedy K4 components, then block decomposition and the cell embedding engine.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .decompose import decompose_components
from .embedder import (EmbedConfig, EmbeddingState, HostPartition,
                       embed_blocks, verify_embedding)
from .errors import (BudgetExceeded, ColoringInvalid, EmbeddingFailure,
                     Exhausted, TooManyEdges)
from .graph import Graph, rng_for, square_coloring

RED, BLUE = 0, 1
_COLOR_NAMES = {RED: "red", BLUE: "blue"}


@dataclass
class EdgeColoring:
    """A 2-coloring of the edges of a host graph, aligned with g.edges()."""

    edges: list
    colors: np.ndarray

    def __post_init__(self):
        self.colors = np.asarray(self.colors, dtype=np.uint8)
        if len(self.edges) != len(self.colors):
            raise ColoringInvalid(
                f"{len(self.edges)} edges but {len(self.colors)} colors")
        if self.colors.size and self.colors.max() > 1:
            raise ColoringInvalid("edge colors must be 0 (red) or 1 (blue)")

    @classmethod
    def constant(cls, g, color=RED):
        return cls(g.edges(), np.full(g.edge_count, color, dtype=np.uint8))

    @classmethod
    def random(cls, g, seed):
        rng = rng_for(seed, "edgecoloring", g.edge_count)
        return cls(g.edges(), rng.integers(0, 2, g.edge_count, dtype=np.uint8))

    @classmethod
    def from_red_mask(cls, g, red_mask):
        edges = g.edges()
        colors = np.array([(0 if (red_mask >> i) & 1 else 1)
                           for i in range(len(edges))], dtype=np.uint8)
        return cls(edges, colors)

    def color_class(self, n, color):
        """The spanning subgraph carrying the edges of one color."""
        kept = [e for e, c in zip(self.edges, self.colors) if c == color]
        return Graph.from_edges(n, kept)

    def edge_counts(self):
        blue = int(self.colors.sum())
        return len(self.edges) - blue, blue

    def to_lines(self):
        return [f"{u} {v} {int(c)}" for (u, v), c in
                zip(self.edges, self.colors)]

    @classmethod
    def from_lines(cls, lines):
        edges, colors = [], []
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v, c = line.split()
            edges.append((int(u), int(v)))
            colors.append(int(c))
        return cls(edges, np.asarray(colors, dtype=np.uint8))


def subgraph_search(g, h, allowed=None, budget=None):
    """Injective edge-preserving map of H into G, or None.

    Exact backtracking with degree and adjacency pruning; ``allowed``
    restricts host vertices. ``budget`` caps search-tree nodes and raises
    BudgetExceeded when hit (pass None for the unbudgeted exact mode).
    """
    if h.n == 0:
        return {}
    if allowed is None:
        allowed_mask = None
    else:
        allowed_mask = _kernels.indices_to_mask(g.n, list(allowed))
    hmasks = h.neighbor_masks()
    hdeg = [h.degree(v) for v in range(h.n)]
    gdeg = g.degrees()
    # connected-first ordering: each later vertex has an earlier neighbour
    # whenever its component allows it
    order = []
    seen = set()
    for root in sorted(range(h.n), key=lambda v: -hdeg[v]):
        if root in seen:
            continue
        queue = [root]
        seen.add(root)
        while queue:
            u = queue.pop(0)
            order.append(u)
            for w in range(h.n):
                if w not in seen and (hmasks[u] >> w) & 1:
                    seen.add(w)
                    queue.append(w)
    pos = {v: i for i, v in enumerate(order)}
    used = np.zeros((g.n + 63) // 64, dtype=np.uint64)
    image = {}
    nodes = [0]

    def rec(i):
        if i == len(order):
            return True
        nodes[0] += 1
        if budget is not None and nodes[0] > budget:
            raise BudgetExceeded("subgraph search node budget exhausted")
        v = order[i]
        cand = ~used
        if allowed_mask is not None:
            cand = cand & allowed_mask
        anchored = False
        for u in range(h.n):
            if (hmasks[v] >> u) & 1 and u in image:
                cand = cand & g.adj[image[u]]
                anchored = True
        for x in _kernels.mask_to_indices(cand):
            x = int(x)
            if x >= g.n or gdeg[x] < hdeg[v]:
                continue
            image[v] = x
            used[x >> 6] |= np.uint64(1) << np.uint64(x & 63)
            if rec(i + 1):
                return True
            del image[v]
            used[x >> 6] &= ~(np.uint64(1) << np.uint64(x & 63))
        return False

    return dict(image) if rec(0) else None


def mono_subgraph_search(g, coloring, h, color, budget=None):
    """Copy of H inside one color class of the coloring, or None."""
    return subgraph_search(coloring.color_class(g.n, color), h, budget=budget)


def enumerate_copies(g, h):
    """Every copy of H in G as an edge-index bitmask over g.edges()."""
    edge_index = {}
    for i, (u, v) in enumerate(g.edges()):
        edge_index[(u, v)] = i
        edge_index[(v, u)] = i
    hmasks = h.neighbor_masks()
    hedges = h.edges()
    out = set()
    image = {}
    used = set()

    def rec(i):
        if i == h.n:
            mask = 0
            for a, b in hedges:
                mask |= 1 << edge_index[(image[a], image[b])]
            out.add(mask)
            return
        v = i
        anchors = [image[u] for u in range(v) if (hmasks[v] >> u) & 1]
        if anchors:
            cand = None
            for x in anchors:
                nb = set(int(w) for w in g.neighbors(x))
                cand = nb if cand is None else cand & nb
            cand = sorted(cand - used)
        else:
            cand = [x for x in range(g.n) if x not in used]
        for x in cand:
            if g.degree(x) < h.degree(v):
                continue
            image[v] = x
            used.add(x)
            rec(i + 1)
            used.discard(x)
            del image[v]

    rec(0)
    return sorted(out)


@dataclass
class ArrowingResult:
    arrows: bool
    certificate: Optional[EdgeColoring]
    colorings_checked: int


def is_ramsey_exhaustive(g, h):
    """Exact decision of G -> H by scanning all 2-colorings of E(G).

    Edge 0 is fixed red (complement symmetry), so 2^(e-1) colorings are
    scanned. A negative answer carries a certificate coloring, re-verified to
    contain no monochromatic copy in either class.
    """
    e = g.edge_count
    if e > 26:
        raise TooManyEdges(f"e(G)={e} > 26")
    if h.edge_count == 0:
        if h.n <= g.n:
            return ArrowingResult(True, None, 0)
        return ArrowingResult(False, EdgeColoring.constant(g), 0)
    copies = enumerate_copies(g, h)
    if not copies:
        cert = EdgeColoring.constant(g)
        return ArrowingResult(False, cert, 0)
    masks = np.asarray(copies, dtype=np.int64)
    idx, checked = _kernels.arrow_scan(masks, e, 0, 1 << (e - 1))
    if idx < 0:
        return ArrowingResult(True, None, checked)
    red_mask = (idx << 1) | 1
    cert = EdgeColoring.from_red_mask(g, red_mask)
    for color in (RED, BLUE):
        if mono_subgraph_search(g, cert, h, color) is not None:
            raise AssertionError("certificate re-verification failed")
    return ArrowingResult(False, cert, checked)


def adversarial_coloring_search(g, h, budget, seed):
    """Local search for a 2-coloring of E(G) with no monochromatic H.

    Flips one edge of a randomly chosen monochromatic copy per step, keeping
    the flip that minimizes the number of monochromatic copies. Returns a
    re-verified coloring or None within ``budget`` steps; returning None says
    nothing about arrowing.
    """
    if budget <= 0:
        return None
    copies = enumerate_copies(g, h)
    e = g.edge_count
    if not copies:
        return EdgeColoring.constant(g)
    if any(m == 0 for m in copies):
        return None  # an edgeless H on few vertices is monochromatic always
    rng = rng_for(seed, "adversarial", e)
    red = int(rng.integers(0, 1 << e)) if e < 63 else int.from_bytes(
        rng.bytes((e + 7) // 8), "little") & ((1 << e) - 1)
    full = (1 << e) - 1

    def mono_copies(red_bits):
        return [m for m in copies
                if (red_bits & m) == m or (red_bits & m) == 0]

    for _ in range(budget):
        mono = mono_copies(red)
        if not mono:
            coloring = EdgeColoring.from_red_mask(g, red)
            for color in (RED, BLUE):
                if mono_subgraph_search(g, coloring, h, color) is not None:
                    raise AssertionError("witness re-verification failed")
            return coloring
        target = mono[int(rng.integers(0, len(mono)))]
        best = None
        bits = target
        while bits:
            low = bits & -bits
            cand = red ^ low
            score = len(mono_copies(cand))
            if best is None or score < best[0]:
                best = (score, cand)
            bits ^= low
        red = best[1]
    return None


@dataclass
class PipelineResult:
    state: Optional[EmbeddingState]
    color: Optional[int]
    failure: Optional[str]
    details: dict = field(default_factory=dict)

    @property
    def success(self):
        return self.state is not None


def ramsey_pipeline(gamma, coloring, h, seed=0, num_cells=20,
                    config_overrides=None):
    """Monochromatic embedding of H into a colored host, or a failure report.

    Route: pick the color class with more edges; split its vertex set into
    ``num_cells`` random equitable cells; run the low-degree cleanup with d
    the measured mean inter-cell density, floored at one third of the host's
    overall edge density; embed K4 components of H by direct backtracking;
    decompose the remaining components and run the cell embedding engine on
    the paired cleaned cells.
    """
    if h.n and max(h.degrees()) > 3:
        raise ValueError("pattern must have maximum degree <= 3")
    if num_cells % 2:
        raise ValueError("num_cells must be even")
    red_e, blue_e = (int(np.sum(coloring.colors == c)) for c in (RED, BLUE))
    color = RED if red_e >= blue_e else BLUE
    gmaj = coloring.color_class(gamma.n, color)
    n = gamma.n
    p_est = 2 * gamma.edge_count / (n * (n - 1)) if n > 1 else 0.0
    details = {"color": _COLOR_NAMES[color], "p_est": p_est}

    rng = rng_for(seed, "pipeline-partition", num_cells)
    perm = rng.permutation(n)
    raw_cells = {i: np.sort(part) for i, part in
                 enumerate(np.array_split(perm, num_cells))}
    if any(len(c) == 0 for c in raw_cells.values()):
        return PipelineResult(None, color, "PartitionDegenerate", details)

    masks = {j: _kernels.indices_to_mask(n, raw_cells[j])
             for j in range(num_cells)}
    dens = []
    for i in range(num_cells):
        rows = gmaj.adj[raw_cells[i]]
        for j in range(i + 1, num_cells):
            e_ij = int(_kernels.popcount_rows(rows & masks[j]).sum())
            dens.append(e_ij / (len(raw_cells[i]) * len(raw_cells[j])))
    d = max(float(np.mean(dens)), p_est / 3) if dens else p_est / 3
    details["d"] = d
    if d <= 0:
        return PipelineResult(None, color, "PartitionDegenerate", details)

    cell_pattern = Graph.from_edges(
        num_cells, [(i, j) for i in range(num_cells)
                    for j in range(i + 1, num_cells)])
    try:
        cleaned = _cleanup(gmaj, cell_pattern, raw_cells, d)
    except Exhausted:
        return PipelineResult(None, color, "PartitionDegenerate", details)

    decomp, k4_comps = decompose_components(h)
    state = EmbeddingState(n)
    for comp in k4_comps:
        sub, labels = h.subgraph(comp)
        hit = subgraph_search(gmaj, sub,
                              allowed=[v for v in range(n)
                                       if not state.is_used(v)],
                              budget=2_000_000)
        if hit is None:
            return PipelineResult(None, color, "K4ComponentFailed", details)
        for hv, gv in hit.items():
            state.place(labels[hv], gv)

    if decomp.blocks:
        col = square_coloring(h)
        if col.num_colors > num_cells // 2:
            return PipelineResult(None, color, "PartitionDegenerate", details)
        cells = {}
        for i in range(num_cells // 2):
            cells[(i, 0)] = np.asarray(cleaned[2 * i])
            cells[(i, 1)] = np.asarray(cleaned[2 * i + 1])
        partition = HostPartition(cells)
        cfg = EmbedConfig(p=d, seed=seed)
        if config_overrides:
            for k, v in config_overrides.items():
                setattr(cfg, k, v)
        try:
            embed_blocks(gmaj, h, decomp, partition, col, cfg, state)
        except EmbeddingFailure as exc:
            details["failure_vertex"] = getattr(exc, "vertex", None)
            return PipelineResult(None, color, type(exc).__name__, details)

    if not verify_embedding(gmaj, h, state):
        return PipelineResult(None, color, "VerificationFailed", details)
    return PipelineResult(state, color, None, details)


def _cleanup(g, pattern, sets, d):
    from .regularity import cleanup
    return cleanup(g, pattern, sets, d)
