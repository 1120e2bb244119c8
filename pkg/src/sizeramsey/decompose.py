"""Block decompositions of subcubic graphs into induced paths and cycles.

A decomposition partitions V(H) into blocks B_1..B_t, each inducing a path or
a chordless cycle, ordered so that every vertex of B_i has at most one
neighbour in B_1 u ... u B_{i-1}. Construction removes a maximal family of
disjoint induced cycles first, then repeatedly extracts a longest induced path
from the remainder, and finally reverses the list (the construction order has
the mirror property: at most one neighbour in *later* blocks).
"""

import enum
from dataclasses import dataclass, field

from .errors import (DegreeTooHigh, HasTriangle, IsK4, NotBipartite,
                     NotConnected, TooLargeForExact, TooSmall)

EXACT_PATH_THRESHOLD = 64


class BlockKind(enum.Enum):
    PATH = "P"
    CYCLE = "C"


@dataclass
class Block:
    vertices: list
    kind: BlockKind


@dataclass
class BlockDecomposition:
    blocks: list
    back_degree: dict = field(default_factory=dict)

    @classmethod
    def from_blocks(cls, h, blocks):
        masks = h.neighbor_masks()
        earlier = 0
        back = {}
        for blk in blocks:
            for v in blk.vertices:
                back[v] = (masks[v] & earlier).bit_count()
            for v in blk.vertices:
                earlier |= 1 << v
        return cls(list(blocks), back)

    def cycle_blocks(self):
        return [b for b in self.blocks if b.kind is BlockKind.CYCLE]


# -- bitmask helpers -----------------------------------------------------------

def _iter_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _bits_ascending(mask):
    return list(_iter_bits(mask))


# -- induced cycles ------------------------------------------------------------

def _induced_cycle_exact_length(masks, avail, length):
    """First chordless cycle of exactly ``length`` inside ``avail``, or None.

    DFS over chordless paths anchored at their minimum vertex; a candidate
    adjacent to the anchor may only appear as the closing vertex.
    """
    for v0 in _bits_ascending(avail):
        gt = avail & ~((1 << (v0 + 1)) - 1)
        stack = [([v0, w], (1 << v0) | (1 << w), 0) for w in
                 reversed(_bits_ascending(masks[v0] & gt))]
        while stack:
            path, pmask, interior_nbrs = stack.pop()
            last = path[-1]
            cands = masks[last] & gt & ~pmask & ~interior_nbrs
            if len(path) + 1 == length:
                for w in _bits_ascending(cands):
                    if masks[w] & (1 << v0):
                        return path + [w]
                continue
            nbrs2 = interior_nbrs | (masks[last] if len(path) >= 2 else 0)
            for w in reversed(_bits_ascending(cands)):
                if masks[w] & (1 << v0):
                    continue  # chord to the anchor unless closing
                stack.append((path + [w], pmask | (1 << w),
                              nbrs2 & ~(1 << w)))
    return None


def _find_induced_cycle(masks, avail, min_len, n):
    """Shortest-first search for a chordless cycle of length >= min_len."""
    for length in range(min_len, avail.bit_count() + 1):
        cyc = _induced_cycle_exact_length(masks, avail, length)
        if cyc is not None:
            return cyc
    return None


def max_induced_cycle_family(h, min_len=4):
    """Greedy maximal family of disjoint induced cycles of length >= min_len.

    Maximal, not maximum: after removal no further disjoint induced cycle of
    qualifying length remains. Shorter cycles are preferred (found first).
    """
    if min_len < 4:
        raise ValueError("min_len must be >= 4")
    masks = h.neighbor_masks()
    avail = (1 << h.n) - 1
    family = []
    while True:
        cyc = _find_induced_cycle(masks, avail, min_len, h.n)
        if cyc is None:
            return family
        family.append(cyc)
        for v in cyc:
            avail &= ~(1 << v)


# -- longest induced path --------------------------------------------------------

def _longest_induced_path_masks(masks, avail):
    """Exact longest induced path in the graph restricted to ``avail``.

    Branch and bound over chordless paths grown from one endpoint; the bound
    is current length plus the count of vertices not yet excluded. Ties among
    maximum-length paths break to the lexicographically smallest sequence.
    """
    best = []
    best_key = None
    for s in _bits_ascending(avail):
        # (path, banned) with banned = path plus neighbours of path[:-1]
        stack = [([s], 1 << s)]
        while stack:
            path, banned = stack.pop()
            key = (-len(path), path)
            if best_key is None or key < best_key:
                best, best_key = path, key
            last = path[-1]
            cands = masks[last] & avail & ~banned
            potential = len(path) + (avail & ~banned).bit_count()
            if potential < -best_key[0]:
                continue
            nbanned = banned | (masks[last] & avail)
            for w in reversed(_bits_ascending(cands)):
                stack.append((path + [w], nbanned | (1 << w)))
    return best


def longest_induced_path(h):
    """Maximum-cardinality induced path, exact up to 64 vertices."""
    if h.n < 1:
        raise TooSmall("graph has no vertices")
    if h.n > EXACT_PATH_THRESHOLD:
        raise TooLargeForExact(
            f"exact longest induced path limited to {EXACT_PATH_THRESHOLD} vertices")
    return _longest_induced_path_masks(h.neighbor_masks(), (1 << h.n) - 1)


# -- decomposition -------------------------------------------------------------

def _is_k4(h):
    return h.n == 4 and h.edge_count == 6


def decompose_cubic(h):
    """Block decomposition of a connected subcubic graph (Lemma-style).

    Cycles (length >= 4, chordless) are extracted greedily first, then longest
    induced paths from the remainder; the constructed list is reversed so the
    forward back-degree bound (<= 1 neighbour in earlier blocks) holds.
    """
    if not h.is_connected():
        raise NotConnected("input must be connected")
    if h.n and int(max(h.degrees())) > 3:
        raise DegreeTooHigh("maximum degree must be <= 3")
    if _is_k4(h):
        raise IsK4("K4 admits no such decomposition")
    masks = h.neighbor_masks()
    construction = []
    avail = (1 << h.n) - 1
    for cyc in max_induced_cycle_family(h, 4):
        construction.append(Block(cyc, BlockKind.CYCLE))
        for v in cyc:
            avail &= ~(1 << v)
    while avail:
        if avail.bit_count() > EXACT_PATH_THRESHOLD:
            raise TooLargeForExact(
                f"remainder exceeds the exact path search bound {EXACT_PATH_THRESHOLD}")
        path = _longest_induced_path_masks(masks, avail)
        construction.append(Block(path, BlockKind.PATH))
        for v in path:
            avail &= ~(1 << v)
    return BlockDecomposition.from_blocks(h, list(reversed(construction)))


def decompose_triangle_free(h, bipartite_mode=False):
    """Decomposition variant for triangle-free cubic graphs.

    Cycle blocks have length >= 5 (>= 6 when ``bipartite_mode``). Path
    extraction runs on a temporarily expanded remainder where every degree-2
    vertex gets a pendant helper vertex; helpers can only be path endpoints
    and are stripped before the block is emitted.
    """
    if not h.is_connected():
        raise NotConnected("input must be connected")
    degs = h.degrees()
    if h.n == 0 or set(int(d) for d in degs) != {3}:
        raise DegreeTooHigh("input must be cubic")
    if h.n < 7:
        raise TooSmall("triangle-free decomposition needs >= 7 vertices")
    masks = h.neighbor_masks()
    for u, v in h.edges():
        if masks[u] & masks[v]:
            raise HasTriangle(f"edge ({u},{v}) lies in a triangle")
    if bipartite_mode and not _is_bipartite(masks, h.n):
        raise NotBipartite("bipartite_mode requires a bipartite input")

    min_len = 6 if bipartite_mode else 5
    construction = []
    avail = (1 << h.n) - 1
    for cyc in max_induced_cycle_family(h, min_len):
        construction.append(Block(cyc, BlockKind.CYCLE))
        for v in cyc:
            avail &= ~(1 << v)
    while avail:
        ext_masks = [m & avail for m in masks]
        nxt = h.n
        full = avail
        for v in _bits_ascending(avail):
            if ext_masks[v].bit_count() == 2:
                ext_masks.append(1 << v)
                ext_masks[v] |= 1 << nxt
                full |= 1 << nxt
                nxt += 1
        if full.bit_count() > EXACT_PATH_THRESHOLD:
            raise TooLargeForExact(
                f"expanded remainder exceeds the exact path search bound")
        path = _longest_induced_path_masks(ext_masks, full)
        stripped = [v for v in path if v < h.n]
        if not stripped:
            raise TooSmall("path extraction made no progress")
        construction.append(Block(stripped, BlockKind.PATH))
        for v in stripped:
            avail &= ~(1 << v)
    return BlockDecomposition.from_blocks(h, list(reversed(construction)))


def _is_bipartite(masks, n):
    color = [-1] * n
    for s in range(n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = [s]
        while queue:
            u = queue.pop()
            for v in _iter_bits(masks[u]):
                if color[v] < 0:
                    color[v] = color[u] ^ 1
                    queue.append(v)
                elif color[v] == color[u]:
                    return False
    return True


# -- validation -----------------------------------------------------------------

@dataclass
class Violation:
    code: str
    detail: str


def validate_decomposition(h, d, min_cycle=4):
    """Independent checker; returns the list of violations (empty iff valid)."""
    out = []
    masks = h.neighbor_masks()
    seen = 0
    for bi, blk in enumerate(d.blocks):
        bmask = 0
        for v in blk.vertices:
            if not (0 <= v < h.n):
                out.append(Violation("NonPartition", f"vertex {v} out of range"))
                continue
            if bmask >> v & 1 or seen >> v & 1:
                out.append(Violation("NonPartition", f"vertex {v} repeated"))
            bmask |= 1 << v
        out.extend(_check_block_shape(masks, blk, bi, min_cycle))
        for v in blk.vertices:
            bd = (masks[v] & seen).bit_count()
            if bi > 0 and bd > 1:
                out.append(Violation(
                    "BackDegree", f"vertex {v} of block {bi} has {bd} earlier neighbours"))
            if d.back_degree and d.back_degree.get(v) != bd:
                out.append(Violation(
                    "BackDegreeMap", f"stored back degree of {v} is {d.back_degree.get(v)}, actual {bd}"))
        seen |= bmask
    if seen != (1 << h.n) - 1:
        missing = [v for v in range(h.n) if not seen >> v & 1]
        out.append(Violation("NonPartition", f"vertices {missing} uncovered"))
    return out


def _check_block_shape(masks, blk, bi, min_cycle):
    out = []
    vs = blk.vertices
    k = len(vs)
    adj = lambda a, b: bool(masks[a] >> b & 1)
    if blk.kind is BlockKind.PATH:
        for i in range(k):
            for j in range(i + 1, k):
                want = (j == i + 1)
                if adj(vs[i], vs[j]) != want:
                    out.append(Violation(
                        "NotInduced",
                        f"block {bi}: pair ({vs[i]},{vs[j]}) breaks the path shape"))
    else:
        if k < max(min_cycle, 4):
            out.append(Violation(
                "ShortCycle", f"block {bi}: cycle of length {k} < {max(min_cycle, 4)}"))
        for i in range(k):
            for j in range(i + 1, k):
                want = (j == i + 1) or (i == 0 and j == k - 1)
                if k >= 3 and adj(vs[i], vs[j]) != want:
                    out.append(Violation(
                        "NotInduced",
                        f"block {bi}: pair ({vs[i]},{vs[j]}) breaks the cycle shape"))
    return out


# -- per-component driver ----------------------------------------------------------

def decompose_components(h, fn=decompose_cubic):
    """Decompose each connected component and concatenate, larger first.

    Components isomorphic to K4 are returned separately (they have no
    decomposition and are embedded by direct search downstream).
    """
    comps = sorted(h.components(), key=lambda c: (-len(c), c))
    blocks = []
    k4s = []
    for comp in comps:
        sub, labels = h.subgraph(comp)
        if _is_k4(sub):
            k4s.append(comp)
            continue
        d = fn(sub)
        for blk in d.blocks:
            blocks.append(Block([labels[v] for v in blk.vertices], blk.kind))
    masks = h.neighbor_masks()
    earlier = 0
    back = {}
    for blk in blocks:
        for v in blk.vertices:
            back[v] = (masks[v] & earlier).bit_count()
        for v in blk.vertices:
            earlier |= 1 << v
    return BlockDecomposition(blocks, back), k4s


# -- serialization -----------------------------------------------------------------

def decomposition_to_text(d):
    return "".join(
        blk.kind.value + " " + " ".join(str(v) for v in blk.vertices) + "\n"
        for blk in d.blocks)


def decomposition_from_text(text):
    blocks = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        kind, *verts = line.split()
        blocks.append(Block([int(v) for v in verts], BlockKind(kind)))
    masks_needed = BlockDecomposition(blocks, {})
    return masks_needed
