"""Candidate-set machinery and the block embedding engine.

Trees are embedded by the first-free-bucket strategy: the union of target
sets is split uniformly at random into buckets, and every vertex lands in the
lowest-index bucket whose free candidate set is nonempty, with the occupancy
of each bucket traced. Cycles are threaded either by direct backtracking
(short) or by embedding the opened path and closing it with a bounded
backtracking search over the tail. Block sequences use two host cells per
color class and pick, per vertex, the first cell with enough free candidates.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import (BucketExhausted, BudgetExceeded, ClosureFailed,
                     ColoringInvalid, EmbeddingFailure, Terminated)
from .decompose import BlockKind
from .graph import rng_for


def _as_words(n, target):
    if isinstance(target, np.ndarray) and target.dtype == np.uint64:
        return target
    return _kernels.indices_to_mask(n, target)


class EmbeddingState:
    """Partial injection pattern -> host with bucket occupancy counters."""

    def __init__(self, host_n):
        self.host_n = host_n
        self.image = {}
        self.used = np.zeros((host_n + 63) // 64, dtype=np.uint64)
        self.bucket_index = {}
        self.cell_choice = {}
        self.occupancy = []

    def place(self, v, x, bucket=None):
        assert v not in self.image
        self.image[v] = x
        self.used[x >> 6] |= np.uint64(1) << np.uint64(x & 63)
        if bucket is not None:
            self.bucket_index[v] = bucket
            while len(self.occupancy) <= bucket:
                self.occupancy.append(0)
            self.occupancy[bucket] += 1

    def checkpoint(self):
        return set(self.image)

    def rollback(self, token):
        for v in [v for v in self.image if v not in token]:
            x = self.image.pop(v)
            self.used[x >> 6] &= ~(np.uint64(1) << np.uint64(x & 63))
            j = self.bucket_index.pop(v, None)
            if j is not None:
                self.occupancy[j] -= 1
            self.cell_choice.pop(v, None)

    def is_used(self, x):
        return bool(self.used[x >> 6] >> np.uint64(x & 63) & np.uint64(1))


@dataclass
class TreeEmbedInput:
    pattern: object                 # tree/forest Graph
    target_sets: dict               # pattern vertex -> host vertex set
    anchors: dict = field(default_factory=dict)  # pattern vertex -> host s_v
    bucket_count: int = 2


@dataclass
class EmbedConfig:
    p: float
    kappa: float = 1.0 / 12.0
    bucket_count: Optional[int] = None
    short_cycle_threshold: int = 12
    closure_depth: int = 8
    node_budget: int = 1_000_000
    block_retry_factor: int = 2
    seed: int = 0


def default_bucket_count(n, p):
    """z+1 buckets with z the smallest exponent making (np^2)^z exceed n^2.

    Clamped to z >= 2 and z <= 6; the asymptotic choice has no finite-n value,
    so this is configurable everywhere it is used.
    """
    npp = n * p * p
    z = 2
    if npp > 1:
        z = max(2, min(6, math.ceil(2 * math.log(n) / math.log(npp))))
    return z + 1


def candidate_set(g, state, pattern, v, target):
    """Free candidates for v: common neighbourhood of embedded pattern
    neighbours, intersected with the target set, minus used host vertices."""
    words = _as_words(g.n, target) & ~state.used
    for u in pattern.neighbors(v):
        if int(u) in state.image:
            words = words & g.adj[state.image[int(u)]]
    return _kernels.mask_to_indices(words)


def _forest_order(pattern, vertices):
    """(vertex, parent) pairs with each non-root having one earlier neighbour."""
    vset = set(vertices)
    seen = set()
    order = []
    for root in sorted(vset):
        if root in seen:
            continue
        seen.add(root)
        order.append((root, None))
        queue = [root]
        while queue:
            u = queue.pop(0)
            for w in pattern.neighbors(u):
                w = int(w)
                if w in vset and w not in seen:
                    seen.add(w)
                    order.append((w, u))
                    queue.append(w)
    return order


def _make_buckets(g, targets, bucket_count, rng):
    """Random equipartition of the union of target sets into buckets."""
    union = np.zeros_like(next(iter(targets.values())))
    for w in targets.values():
        union = union | w
    idx = _kernels.mask_to_indices(union)
    perm = rng.permutation(idx)
    parts = np.array_split(perm, bucket_count)
    return [_kernels.indices_to_mask(g.n, part) for part in parts]


def _embed_ordered_tree(g, order, targets, state, buckets):
    """Steps of the first-free-bucket strategy over an explicit ordering."""
    for v, parent in order:
        cand = targets[v] & ~state.used
        if parent is not None:
            cand = cand & g.adj[state.image[parent]]
        placed = False
        for j, bmask in enumerate(buckets):
            x = _kernels.first_set_bit(cand & bmask)
            if x >= 0:
                state.place(v, x, bucket=j)
                placed = True
                break
        if not placed:
            raise Terminated(v, state.occupancy)
    return state


def embed_tree(g, inp, state=None, seed=0):
    """Embed a tree/forest, each vertex landing inside its target set."""
    if state is None:
        state = EmbeddingState(g.n)
    targets = {v: _as_words(g.n, t) for v, t in inp.target_sets.items()}
    for v, s in inp.anchors.items():
        targets[v] = targets[v] & g.adj[s]
    rng = rng_for(seed, "buckets", len(targets))
    buckets = _make_buckets(g, targets, inp.bucket_count, rng)
    order = _forest_order(inp.pattern, targets.keys())
    return _embed_ordered_tree(g, order, targets, state, buckets)


def _cycle_order(pattern, vertices):
    """Walk the cycle starting from its smallest vertex."""
    vs = sorted(int(v) for v in vertices)
    start = vs[0]
    nbrs = {v: [int(u) for u in pattern.neighbors(v) if int(u) in set(vs)]
            for v in vs}
    order = [start, min(nbrs[start])]
    while len(order) < len(vs):
        cur, prev = order[-1], order[-2]
        nxt = [u for u in nbrs[cur] if u != prev]
        order.append(nxt[0])
    return order


class _Budget:
    def __init__(self, limit):
        self.left = limit

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("backtracking node budget exhausted")


def _bucketed_candidates(cand, buckets):
    """Candidate hosts in first-free-bucket order: bucket-0 candidates in
    ascending host index, then bucket 1, and so on."""
    for j, bmask in enumerate(buckets):
        for x in _kernels.mask_to_indices(cand & bmask):
            yield int(x), j


def _backtrack_chain(g, chain, targets, state, budget, buckets, close_to=None):
    """DFS embedding of a vertex chain; the last vertex must additionally be
    adjacent to ``close_to`` when given."""
    def rec(i):
        budget.spend()
        v = chain[i]
        cand = targets[v] & ~state.used
        if i > 0:
            cand = cand & g.adj[state.image[chain[i - 1]]]
        if i == len(chain) - 1 and close_to is not None:
            cand = cand & g.adj[close_to]
        for x, bucket in _bucketed_candidates(cand, buckets):
            state.place(v, x, bucket=bucket)
            if i + 1 == len(chain):
                return True
            if rec(i + 1):
                return True
            _undo_one(state, v)
        return False

    return rec(0)


def _undo_one(state, v):
    x = state.image.pop(v)
    state.used[x >> 6] &= ~(np.uint64(1) << np.uint64(x & 63))
    j = state.bucket_index.pop(v, None)
    if j is not None:
        state.occupancy[j] -= 1


def _backtrack_cycle(g, order, targets, state, budget, buckets):
    """Exact backtracking search for a constrained cycle copy."""
    t = len(order)

    def rec(i):
        budget.spend()
        v = order[i]
        cand = targets[v] & ~state.used
        if i > 0:
            cand = cand & g.adj[state.image[order[i - 1]]]
        if i == t - 1:
            cand = cand & g.adj[state.image[order[0]]]
        for x, bucket in _bucketed_candidates(cand, buckets):
            state.place(v, x, bucket=bucket)
            if i + 1 == t or rec(i + 1):
                return True
            _undo_one(state, v)
        return False

    return rec(0)


def embed_cycle(g, inp, state=None, seed=0, short_threshold=12,
                closure_depth=8, node_budget=1_000_000):
    """Thread a cycle through its target sets.

    Short cycles: direct backtracking over the cyclic order (an explicit
    search in place of an existential counting argument). Long cycles: embed
    the opened path with the bucket strategy, then close it, backtracking
    over at most ``closure_depth`` tail vertices.
    """
    if state is None:
        state = EmbeddingState(g.n)
    targets = {int(v): _as_words(g.n, t) for v, t in inp.target_sets.items()}
    for v, s in inp.anchors.items():
        targets[int(v)] = targets[int(v)] & g.adj[s]
    t = len(targets)
    if t < 4:
        raise ValueError("cycles must have length >= 4")
    order = _cycle_order(inp.pattern, targets.keys())
    rng = rng_for(seed, "cyclebuckets", t)
    buckets = _make_buckets(g, targets, inp.bucket_count, rng)
    budget = _Budget(node_budget)
    token = state.checkpoint()
    if t <= short_threshold:
        if not _backtrack_cycle(g, order, targets, state, budget, buckets):
            state.rollback(token)
            raise Terminated(order[0], state.occupancy)
        return state
    k = min(closure_depth, t - 2)
    prefix, tail = order[:t - k], order[t - k:]
    try:
        chain_order = [(prefix[0], None)] + [(v, prefix[i]) for i, v in
                                             enumerate(prefix[1:])]
        _embed_ordered_tree(g, chain_order, targets, state, buckets)
    except Terminated:
        state.rollback(token)
        raise
    tail_targets = _TailTargets(targets, g, state, prefix)
    _undo_one(state, prefix[-1])  # the pivot re-enters the tail search, pinned
    ok = _backtrack_chain(g, [prefix[-1]] + tail, tail_targets,
                          state, budget, buckets,
                          close_to=state.image[order[0]])
    if not ok:
        state.rollback(token)
        raise ClosureFailed("no closing edge within the backtrack window")
    return state


class _TailTargets(dict):
    """Target lookup for the tail search; the already-placed pivot vertex is
    pinned to its current image."""

    def __init__(self, targets, g, state, prefix):
        super().__init__(targets)
        pivot = prefix[-1]
        self[pivot] = _kernels.indices_to_mask(g.n, [state.image[pivot]])


# -- host partitions and the block pipeline -------------------------------------

@dataclass
class HostPartition:
    """Paired host cells: cells[(i, z)] for color index i and copy z in {0,1}."""

    cells: dict

    def __post_init__(self):
        seen = set()
        for key, verts in self.cells.items():
            vs = set(int(v) for v in verts)
            if seen & vs:
                raise ValueError(f"cell {key} overlaps another cell")
            seen |= vs

    @classmethod
    def random_equitable(cls, vertices, num_colors, seed):
        rng = rng_for(seed, "partition", num_colors)
        verts = np.asarray(sorted(int(v) for v in vertices))
        perm = rng.permutation(verts)
        parts = np.array_split(perm, 2 * num_colors)
        cells = {}
        for i in range(num_colors):
            cells[(i, 0)] = np.sort(parts[2 * i])
            cells[(i, 1)] = np.sort(parts[2 * i + 1])
        return cls(cells)

    def num_colors(self):
        return 1 + max(k[0] for k in self.cells)


def check_distance2_coloring(h, coloring):
    """Raise ColoringInvalid unless vertices at distance <= 2 differ."""
    masks = h.neighbor_masks()
    for v in range(h.n):
        ball = masks[v]
        for u in _iter_bits(masks[v]):
            ball |= masks[u]
        for u in _iter_bits(ball):
            if u != v and coloring.colors[u] == coloring.colors[v]:
                raise ColoringInvalid(
                    f"vertices {v} and {u} at distance <= 2 share color "
                    f"{coloring.colors[v]}")


def _iter_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def embed_blocks(g, h, decomp, partition, coloring, config, state=None):
    """Embed the blocks of a decomposition in order.

    Per vertex, the anchor is the image of its unique earlier neighbour and
    the free candidate set F_v comes from the first cell copy z in {0,1}
    clearing the threshold kappa*|cell|*p. A block whose embedding terminates
    is retried with the other cell copy forced for the failing vertex, while a
    second copy exists; anchorless vertices target the whole cell.
    """
    if state is None:
        state = EmbeddingState(g.n)
    check_distance2_coloring(h, coloring)
    if coloring.num_colors > partition.num_colors():
        raise ColoringInvalid(
            f"coloring uses {coloring.num_colors} colors, partition has "
            f"{partition.num_colors()}")
    cell_words = {k: _as_words(g.n, v) for k, v in partition.cells.items()}
    cell_size = {k: len(partition.cells[k]) for k in partition.cells}
    hmasks = h.neighbor_masks()
    embedded_mask = 0
    for v in state.image:
        embedded_mask |= 1 << v

    for bi, block in enumerate(decomp.blocks):
        overrides = {}
        retries = 0
        max_retries = config.block_retry_factor * len(block.vertices) + 4
        while True:
            token = state.checkpoint()
            try:
                _embed_one_block(g, h, block, hmasks, embedded_mask, cell_words,
                                 cell_size, coloring, config, state, overrides,
                                 salt=(bi, retries))
                break
            except EmbeddingFailure as exc:
                state.rollback(token)
                retries += 1
                fail_v = getattr(exc, "vertex", None)
                if isinstance(exc, ClosureFailed):
                    order = (_cycle_order(h, block.vertices)
                             if block.kind is BlockKind.CYCLE else block.vertices)
                    fail_v = next((v for v in reversed(order)
                                   if v not in overrides), None)
                if (retries > max_retries or fail_v is None
                        or fail_v in overrides
                        or isinstance(exc, (BucketExhausted, BudgetExceeded))):
                    raise
                overrides[fail_v] = 1 - state.cell_choice.get(fail_v, 0) \
                    if fail_v in state.cell_choice else 1
        for v in block.vertices:
            embedded_mask |= 1 << v
    return state


def _embed_one_block(g, h, block, hmasks, embedded_mask, cell_words, cell_size,
                     coloring, config, state, overrides, salt):
    targets = {}
    for v in block.vertices:
        earlier = hmasks[v] & embedded_mask
        anchor = None
        if earlier:
            av = (earlier & -earlier).bit_length() - 1
            if earlier.bit_count() > 1:
                raise ColoringInvalid(
                    f"vertex {v} has {earlier.bit_count()} earlier neighbours; "
                    "decomposition invalid")
            anchor = state.image[av]
        color = coloring.colors[v]
        thr_mult = config.kappa * config.p
        zs = (overrides[v],) if v in overrides else (0, 1)
        chosen = None
        for z in zs:
            words = cell_words[(color, z)] & ~state.used
            if anchor is not None:
                words = words & g.adj[anchor]
            if _kernels.popcount(words) >= thr_mult * cell_size[(color, z)]:
                chosen = (z, words)
                break
        if chosen is None:
            raise BucketExhausted(v)
        state.cell_choice[v] = chosen[0]
        targets[v] = chosen[1]
    bucket_count = config.bucket_count or default_bucket_count(g.n, config.p)
    inp = TreeEmbedInput(h, targets, bucket_count=bucket_count)
    if block.kind is BlockKind.CYCLE:
        embed_cycle(g, inp, state, seed=_salted(config.seed, salt),
                    short_threshold=config.short_cycle_threshold,
                    closure_depth=config.closure_depth,
                    node_budget=config.node_budget)
    else:
        embed_tree(g, inp, state, seed=_salted(config.seed, salt))


def _salted(seed, salt):
    from .graph import child_seed
    return child_seed(seed, "blockseed", *salt)


def verify_embedding(g, h, state):
    """True iff the image is injective, total on V(H), and edge-preserving."""
    if set(state.image) != set(range(h.n)):
        return False
    imgs = list(state.image.values())
    if len(set(imgs)) != len(imgs):
        return False
    for u, v in h.edges():
        if not g.has_edge(state.image[u], state.image[v]):
            return False
    return True


@dataclass
class OccupancyRow:
    bucket: int
    occupancy: int
    bound: float
    exceeded: bool


def occupancy_report(state, n, p, c_constants=None):
    """Per-bucket occupancy against the geometric bound c_j * n / (np^2)^j.

    With ``c_constants`` given, flags buckets exceeding their bound; without,
    the constants are fitted post hoc (bound == occupancy, nothing flagged).
    """
    rows = []
    base = n * p * p
    for j, occ in enumerate(state.occupancy):
        if c_constants is not None and j < len(c_constants):
            bound = c_constants[j] * n / base ** j
        else:
            bound = occ
        rows.append(OccupancyRow(j, occ, bound, occ > bound))
    return rows


def occupancy_summary(state):
    return ";".join(f"{j}:{occ}" for j, occ in enumerate(state.occupancy))
