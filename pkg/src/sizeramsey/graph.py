"""Immutable bitset graphs, generators and basic structural queries.

Adjacency is stored as one uint64 bitset row per vertex so that the
common-neighbourhood computations in the embedding engine reduce to
word-parallel ANDs. Graphs are simple and undirected; vertices are 0..n-1.
"""

from dataclasses import dataclass
from fractions import Fraction
from hashlib import blake2b

import numpy as np

from . import _kernels
from .errors import GenerationTimeout, OddOrder, OverlappingFamily, TooSmall


def child_seed(root, *key):
    """Derive a 64-bit child seed from a root seed and a key tuple.

    Scheme: blake2b-8 digest of the ascii repr of ``(root,) + key``. Every
    stochastic operation in the package derives its generator through this
    function, so a single root seed replays an experiment bit-exactly.
    """
    h = blake2b(repr((int(root),) + tuple(key)).encode("ascii"), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def rng_for(root, *key):
    return np.random.default_rng(child_seed(root, *key))


class Graph:
    """Simple undirected graph with bitset adjacency rows."""

    __slots__ = ("n", "adj", "edge_count")

    def __init__(self, n, adj, edge_count):
        self.n = n
        self.adj = adj
        self.adj.setflags(write=False)
        self.edge_count = edge_count

    @classmethod
    def from_edges(cls, n, edges):
        edges = [(u, v) if u < v else (v, u) for u, v in edges]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edge")
        if edges:
            us = np.fromiter((e[0] for e in edges), dtype=np.int64)
            vs = np.fromiter((e[1] for e in edges), dtype=np.int64)
            adj = _kernels.build_adjacency(n, us, vs)
        else:
            adj = np.zeros((n, (n + 63) // 64), dtype=np.uint64)
        return cls(n, adj, len(edges))

    @classmethod
    def from_edge_arrays(cls, n, us, vs):
        adj = _kernels.build_adjacency(n, us, vs)
        return cls(n, adj, len(us))

    # -- queries ---------------------------------------------------------

    def has_edge(self, u, v):
        return bool(self.adj[u, v >> 6] >> np.uint64(v & 63) & np.uint64(1))

    def degree(self, v):
        return _kernels.popcount(self.adj[v])

    def degrees(self):
        return _kernels.popcount_rows(self.adj)

    def neighbors(self, v):
        return _kernels.mask_to_indices(self.adj[v])

    def edges(self):
        out = []
        for u in range(self.n):
            for v in self.neighbors(u):
                if v > u:
                    out.append((u, int(v)))
        return out

    def neighbor_masks(self):
        """Per-vertex adjacency as python ints (arbitrary width bitmasks)."""
        byts = self.adj.tobytes()
        row = self.adj.shape[1] * 8
        return [int.from_bytes(byts[i * row:(i + 1) * row], "little")
                for i in range(self.n)]

    def subgraph(self, vertices):
        """Induced subgraph; returns (graph, old-label list)."""
        verts = sorted(int(v) for v in vertices)
        pos = {v: i for i, v in enumerate(verts)}
        edges = [(pos[u], pos[v]) for u in verts for v in self.neighbors(u)
                 if v in pos and v > u]
        return Graph.from_edges(len(verts), edges), verts

    def components(self):
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self.neighbors(u):
                    if not seen[v]:
                        seen[v] = True
                        stack.append(int(v))
            comps.append(sorted(comp))
        return comps

    def is_connected(self):
        return self.n <= 1 or len(self.components()) == 1

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.adj, other.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count})"


# -- G(n,p) -----------------------------------------------------------------

@dataclass(frozen=True)
class GnpParams:
    n: int
    p: float
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p={self.p} outside [0,1]")
        if self.n < 0:
            raise ValueError("negative n")


def _pair_from_index(idx):
    # pairs (u,v), u<v, ordered by v then u: index = v(v-1)/2 + u
    v = np.floor((1.0 + np.sqrt(1.0 + 8.0 * idx)) / 2.0).astype(np.int64)
    v -= (v * (v - 1) // 2 > idx)
    u = idx - v * (v - 1) // 2
    return u, v


def gnp_sample(params):
    """Sample G(n,p). Deterministic in (n, p, seed)."""
    n, p = params.n, params.p
    rng = rng_for(params.seed, "gnp", n)
    m = n * (n - 1) // 2
    if p <= 0.0 or m == 0:
        return Graph.from_edges(n, [])
    if p >= 1.0:
        idx = np.arange(m, dtype=np.int64)
    elif m <= (1 << 26):
        idx = np.flatnonzero(rng.random(m) < p).astype(np.int64)
    else:
        # sparse path: draw Binomial(m, p) distinct pair indices
        k = int(rng.binomial(m, p))
        chosen = set()
        while len(chosen) < k:
            draw = rng.integers(0, m, size=k - len(chosen))
            chosen.update(int(x) for x in draw)
        idx = np.fromiter(sorted(chosen), dtype=np.int64, count=k)
    us, vs = _pair_from_index(idx)
    return Graph.from_edge_arrays(n, us, vs)


def random_cubic(n, seed):
    """Uniform random 3-regular graph via the configuration model.

    Loops/multi-edges are rejected and the pairing is resampled, at most 1000
    times (the simple-graph probability is bounded below for fixed degree 3).
    """
    if n % 2 == 1:
        raise OddOrder(f"no cubic graph on {n} (odd) vertices")
    if n < 4:
        raise TooSmall("cubic graphs need at least 4 vertices")
    rng = rng_for(seed, "cubic", n)
    stubs = np.repeat(np.arange(n), 3)
    for _ in range(1000):
        perm = rng.permutation(stubs)
        us, vs = perm[0::2], perm[1::2]
        if np.any(us == vs):
            continue
        pairs = {(min(a, b), max(a, b)) for a, b in zip(us.tolist(), vs.tolist())}
        if len(pairs) < len(us):
            continue
        return Graph.from_edge_arrays(n, us.astype(np.int64), vs.astype(np.int64))
    raise GenerationTimeout(f"no simple pairing found for n={n} in 1000 attempts")


# -- named graphs -------------------------------------------------------------

def _lcf(n, jumps):
    """Cycle 0..n-1 plus chords i -> i + jumps[i % len(jumps)] (mod n)."""
    edges = {(i, (i + 1) % n) for i in range(n)}
    for i in range(n):
        j = (i + jumps[i % len(jumps)]) % n
        edges.add((min(i, j), max(i, j)))
    edges = {(min(a, b), max(a, b)) for a, b in edges}
    return Graph.from_edges(n, sorted(edges))


def named_graph(name):
    """Canonical constructions of the built-in test patterns.

    Parametrised names: ``Cycle(k)``, ``Path(k)``, ``Complete(k)``.
    """
    key = name.strip().lower()
    if key.endswith(")") and "(" in key:
        base, arg = key[:-1].split("(", 1)
        k = int(arg)
        if k < 1:
            raise ValueError("k must be >= 1")
        if base == "cycle":
            if k < 3:
                raise ValueError("cycles need k >= 3")
            return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])
        if base == "path":
            return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])
        if base == "complete":
            return Graph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k)])
        raise ValueError(f"unknown graph family {base!r}")
    if key == "k4":
        return named_graph("Complete(4)")
    if key == "k33":
        return Graph.from_edges(6, [(i, j) for i in range(3) for j in range(3, 6)])
    if key == "petersen":
        # outer C5 on 0..4, inner pentagram on 5..9, spokes i -- i+5
        edges = [(i, (i + 1) % 5) for i in range(5)]
        edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        edges += [(i, i + 5) for i in range(5)]
        return Graph.from_edges(10, edges)
    if key == "prism3":
        edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
        return Graph.from_edges(6, edges)
    if key == "cube":
        edges = [(u, v) for u in range(8) for v in range(u + 1, 8)
                 if bin(u ^ v).count("1") == 1]
        return Graph.from_edges(8, edges)
    if key == "heawood":
        return _lcf(14, [5, -5])
    if key in ("moebiuskantor", "mobiuskantor"):
        return _lcf(16, [5, -5])
    raise ValueError(f"unknown named graph {name!r}")


# -- distance-2 coloring -------------------------------------------------------

@dataclass
class VertexColoring:
    colors: list
    num_colors: int


def square_coloring(h):
    """Greedy proper coloring of the square of ``h``.

    Vertices at distance <= 2 receive distinct colors. The square of a graph
    with maximum degree D has maximum degree <= D^2, so greedy uses at most
    D^2 + 1 colors (10 for cubic graphs).
    """
    masks = h.neighbor_masks()
    colors = [-1] * h.n
    for v in range(h.n):
        ball = masks[v]
        for u in _iter_bits(masks[v]):
            ball |= masks[u]
        taken = {colors[u] for u in _iter_bits(ball) if u != v and colors[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return VertexColoring(colors, max(colors, default=-1) + 1)


def _iter_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -- 2-density -----------------------------------------------------------------

def m2_density(h):
    """Exact m2(H) = max (e(F)-1)/(v(F)-2) over subgraphs F with v(F) >= 3.

    Enumeration over connected induced subgraphs only: for a fixed vertex set
    the induced subgraph maximises e(F), and if F is disconnected with a
    component F1 of >= 3 vertices then (e-1)/(v-2) only drops when the other
    components are merged in (extra vertices add at most their internal edges,
    and (e1+e2-1)/(v1+v2-2) <= max((e1-1)/(v1-2), density bound) for subcubic
    counting; concretely an isolated vertex strictly lowers the ratio).
    """
    if h.n < 3:
        raise TooSmall("m2 needs at least 3 vertices")
    masks = h.neighbor_masks()
    best = None
    for s in range(1, 1 << h.n):
        k = s.bit_count()
        if k < 3 or not _mask_connected(masks, s):
            continue
        e = 0
        for v in _iter_bits(s):
            e += (masks[v] & s).bit_count()
        e //= 2
        val = Fraction(e - 1, k - 2)
        if best is None or val > best:
            best = val
    if best is None:
        raise TooSmall("no connected subgraph with >= 3 vertices")
    return best


def _mask_connected(masks, s):
    start = (s & -s).bit_length() - 1
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for v in _iter_bits(frontier):
            nxt |= masks[v] & s
        nxt &= ~seen
        seen |= nxt
        frontier = nxt
    return seen == s


# -- common neighbourhoods -----------------------------------------------------

def common_neighborhood_union(gamma, family):
    """|union over S in family of N^(S)|, N^(S) = common neighbours outside S."""
    family = [sorted(int(v) for v in s) for s in family]
    if family:
        d = len(family[0])
        if any(len(s) != d for s in family):
            raise ValueError("all sets in the family must have equal size")
        seen = set()
        for s in family:
            if seen.intersection(s):
                raise OverlappingFamily("family sets intersect")
            seen.update(s)
    acc = np.zeros(gamma.adj.shape[1], dtype=np.uint64)
    for s in family:
        inter = gamma.adj[s[0]].copy()
        for v in s[1:]:
            inter &= gamma.adj[v]
        inter &= ~_kernels.indices_to_mask(gamma.n, s)
        acc |= inter
    return _kernels.popcount(acc)


# -- text formats ----------------------------------------------------------------

def write_edge_list(g, path):
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.edge_count}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def read_edge_list(path):
    with open(path) as fh:
        first = fh.readline().split()
        if len(first) != 2:
            raise ValueError("expected header 'n m'")
        n, m = int(first[0]), int(first[1])
        edges = []
        for line in fh:
            if not line.strip():
                continue
            u, v = map(int, line.split())
            edges.append((u, v))
    if len(edges) != m:
        raise ValueError(f"header promised {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def to_graph6(g):
    """Encode in graph6 format (printable ascii, 6 bits per char)."""
    n = g.n
    if n <= 62:
        header = chr(n + 63)
    elif n <= 258047:
        header = "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    else:
        raise ValueError("graph too large for this graph6 writer")
    bits = []
    for v in range(1, n):
        row = g.adj[v]
        for u in range(v):
            bits.append((int(row[u >> 6]) >> (u & 63)) & 1)
    while len(bits) % 6:
        bits.append(0)
    chars = []
    for i in range(0, len(bits), 6):
        val = 0
        for b in bits[i:i + 6]:
            val = (val << 1) | b
        chars.append(chr(val + 63))
    return header + "".join(chars)


def from_graph6(text):
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[10:]
    if s.startswith("~~"):
        raise ValueError("graph too large for this graph6 reader")
    if s.startswith("~"):
        n = 0
        for c in s[1:4]:
            n = (n << 6) | (ord(c) - 63)
        body = s[4:]
    else:
        n = ord(s[0]) - 63
        body = s[1:]
    bits = []
    for c in body:
        val = ord(c) - 63
        if not (0 <= val <= 63):
            raise ValueError(f"bad graph6 character {c!r}")
        bits.extend((val >> sh) & 1 for sh in range(5, -1, -1))
    edges = []
    k = 0
    for v in range(1, n):
        for u in range(v):
            if bits[k]:
                edges.append((u, v))
            k += 1
    return Graph.from_edges(n, edges)
