"""Sparse regularity predicates: exact oracle, sampled estimator, cleanup.

A pair (V1, V2) is (eps, p)-regular when every subset pair (U1, U2) with
|Ui| >= eps|Vi| has |d(U1,U2) - d(V1,V2)| <= eps*p. The exact oracle runs in
rational arithmetic and is limited to small sides; the estimator is a
one-sided sampling surrogate whose witnesses are always re-verified exactly.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .errors import EmptySide, Exhausted, Overlap, SliceTooLarge, TooLargeForExact
from .graph import rng_for

EXACT_SIDE_BOUND = 16


@dataclass(frozen=True)
class RegularityParams:
    epsilon: float
    p: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (0 < self.epsilon <= 1):
            raise ValueError("epsilon must lie in (0, 1]")
        if not (0 < self.p <= 1):
            raise ValueError("p must lie in (0, 1]")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")


@dataclass
class RegularityVerdict:
    regular: bool
    witness: Optional[tuple] = None  # (U1, U2, deviation)


def _check_sides(a, b):
    a = [int(v) for v in a]
    b = [int(v) for v in b]
    if not a or not b:
        raise EmptySide("both sides must be nonempty")
    if set(a) & set(b):
        raise Overlap("sides must be disjoint")
    return a, b


def _edges_between(g, a, b):
    bmask = _kernels.indices_to_mask(g.n, b)
    return int(_kernels.popcount_rows(g.adj[np.asarray(a)] & bmask).sum())


def density(g, a, b):
    """Exact rational edge density e(A,B) / (|A||B|)."""
    a, b = _check_sides(a, b)
    return Fraction(_edges_between(g, a, b), len(a) * len(b))


def _min_subset_size(eps, size):
    return math.ceil(Fraction(eps) * size)


def is_regular_exact(g, a, b, params, exact_bound=EXACT_SIDE_BOUND):
    """Ground-truth (eps, p)-regularity verdict by full enumeration.

    All subsets U1 of the smaller side are enumerated; for each (U1, |U2|) the
    extremal U2 (top/bottom vertices by degree into U1) attains the maximum
    deviation, so checking extremal sets is equivalent to checking all pairs.
    Arithmetic is exact rational throughout.
    """
    a, b = _check_sides(a, b)
    if len(a) > exact_bound or len(b) > exact_bound:
        raise TooLargeForExact(f"exact oracle limited to {exact_bound} per side")
    swapped = len(b) < len(a)
    if swapped:
        a, b = b, a
    d = density(g, a, b)
    tol = Fraction(params.epsilon) * Fraction(params.p)
    ka = _min_subset_size(params.epsilon, len(a))
    kb = _min_subset_size(params.epsilon, len(b))
    # deg(b_j, U1) via bitmask of each b-vertex's neighbours inside a
    amask_of_b = []
    for v in b:
        row = g.adj[v]
        amask_of_b.append(sum(1 << i for i, u in enumerate(a)
                              if row[u >> 6] >> np.uint64(u & 63) & np.uint64(1)))
    na = len(a)
    for s in range(1, 1 << na):
        if s.bit_count() < ka:
            continue
        u1 = [a[i] for i in range(na) if s >> i & 1]
        degs = sorted(((m & s).bit_count(), j) for j, m in enumerate(amask_of_b))
        size1 = len(u1)
        # suffix/prefix sums give extremal densities for each |U2| >= kb
        lo_cum = 0
        lo_list = []
        for t, (dg, j) in enumerate(degs, start=1):
            lo_cum += dg
            lo_list.append((lo_cum, t))
        hi_cum = 0
        hi_list = []
        for t, (dg, j) in enumerate(reversed(degs), start=1):
            hi_cum += dg
            hi_list.append((hi_cum, t))
        for cum, t in hi_list[kb - 1:]:
            dev = Fraction(cum, size1 * t) - d
            if dev > tol:
                u2 = sorted(b[j] for _, j in degs[-t:])
                w = (u2, u1, dev) if swapped else (u1, u2, dev)
                return RegularityVerdict(False, w)
        for cum, t in lo_list[kb - 1:]:
            dev = d - Fraction(cum, size1 * t)
            if dev > tol:
                u2 = sorted(b[j] for _, j in degs[:t])
                w = (u2, u1, dev) if swapped else (u1, u2, dev)
                return RegularityVerdict(False, w)
    return RegularityVerdict(True)


def estimate_regularity(g, a, b, params, samples, seed):
    """One-sided sampling estimator for regularity at large scale.

    Samples subset pairs at the extremal size ceil(eps|Vi|), hill-climbs
    around the worst pair found, and returns a witness only after exact
    rational re-verification; ``regular=True`` means "no witness found".
    """
    a, b = _check_sides(a, b)
    rng = rng_for(seed, "estreg", len(a), len(b), samples)
    d = density(g, a, b)
    d_f = float(d)
    tol = Fraction(params.epsilon) * Fraction(params.p)
    ka = _min_subset_size(params.epsilon, len(a))
    kb = _min_subset_size(params.epsilon, len(b))
    a_arr = np.asarray(a)
    b_arr = np.asarray(b)
    # dense 0/1 matrix restricted to (A, B); fine at estimator scale
    bmask = _kernels.indices_to_mask(g.n, b)
    pos_b = {v: i for i, v in enumerate(b)}
    mat = np.zeros((len(a), len(b)), dtype=np.uint8)
    for i, u in enumerate(a):
        for w in _kernels.mask_to_indices(g.adj[u] & bmask):
            mat[i, pos_b[int(w)]] = 1

    def dev_of(ia, ib):
        return abs(mat[np.ix_(ia, ib)].sum() / (len(ia) * len(ib)) - d_f)

    worst = None
    worst_dev = -1.0
    for _ in range(max(0, samples)):
        ia = rng.choice(len(a), size=ka, replace=False)
        ib = rng.choice(len(b), size=kb, replace=False)
        dv = dev_of(ia, ib)
        if dv > worst_dev:
            worst_dev, worst = dv, (ia, ib)
    if worst is not None:
        worst = _local_search(mat, worst, d_f, rng)
        ia, ib = worst
        e = int(mat[np.ix_(ia, ib)].sum())
        dev = abs(Fraction(e, len(ia) * len(ib)) - d)
        if dev > tol:
            return RegularityVerdict(
                False, (sorted(int(a_arr[i]) for i in ia),
                        sorted(int(b_arr[i]) for i in ib), dev))
    return RegularityVerdict(True)


def _local_search(mat, pair, d_f, rng, rounds=3):
    """Greedy element swaps pushing the sampled pair towards extremal density."""
    ia, ib = list(pair[0]), list(pair[1])
    for _ in range(rounds):
        improved = False
        for idxs, other, axis in ((ia, ib, 0), (ib, ia, 1)):
            inside = set(idxs)
            size = mat.shape[axis]
            sub = mat[np.ix_(ia, ib)]
            cur = sub.sum() / sub.size
            sign = 1.0 if cur >= d_f else -1.0
            if axis == 0:
                scores = mat[:, ib].sum(axis=1)
            else:
                scores = mat[ia, :].sum(axis=0)
            worst_i = min(range(len(idxs)), key=lambda i: sign * scores[idxs[i]])
            best_out = max((j for j in range(size) if j not in inside),
                           key=lambda j: sign * scores[j], default=None)
            if best_out is not None and sign * scores[best_out] > sign * scores[idxs[worst_i]]:
                idxs[worst_i] = best_out
                improved = True
        if not improved:
            break
    return np.asarray(ia), np.asarray(ib)


def cleanup(g, pattern, sets, d):
    """Iterative low-degree deletion until a pairwise min-degree guarantee holds.

    For every pattern edge ij, each surviving v in V_i' keeps at least
    d*|V_j|/2 neighbours in V_j', with |V_j| the ORIGINAL size. The loop runs
    to completion regardless of how far the sets shrink; achieved sizes are
    whatever they are. Raises Exhausted when a set empties.
    """
    d = Fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    keys = list(sets.keys())
    orig = {i: [int(v) for v in sets[i]] for i in keys}
    all_vs = [v for vs in orig.values() for v in vs]
    if len(set(all_vs)) != len(all_vs):
        raise Overlap("sets must be pairwise disjoint")
    cur = {i: set(orig[i]) for i in keys}
    masks = {i: _kernels.indices_to_mask(g.n, orig[i]) for i in keys}
    nbrs = {i: sorted(j for j in keys if j != i and pattern.has_edge(i, j))
            for i in keys}
    thresholds = {i: d * len(orig[i]) / 2 for i in keys}
    dirty = True
    while dirty:
        dirty = False
        for i in keys:
            if not cur[i]:
                continue
            vs = np.asarray(sorted(cur[i]))
            drop = np.zeros(len(vs), dtype=bool)
            for j in nbrs[i]:
                degs = _kernels.popcount_rows(g.adj[vs] & masks[j])
                drop |= degs < thresholds[j]
            if drop.any():
                dirty = True
                for v in vs[drop]:
                    v = int(v)
                    cur[i].discard(v)
                    masks[i][v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
    for i in keys:
        if not cur[i]:
            raise Exhausted(f"cleanup emptied set {i!r}")
    return {i: sorted(cur[i]) for i in keys}


@dataclass
class ProbeStats:
    trials: int
    passes: int
    worst_deviation: float

    @property
    def pass_fraction(self):
        return None if self.trials == 0 else self.passes / self.trials


def inheritance_probe(g, v1, v2, d, slice_size, trials, params, seed,
                      samples=200):
    """Statistical probe of neighbourhood regularity inheritance.

    Samples vertex pairs (v, w) outside V1 u V2, slices their neighbourhoods
    N_v in V1 and N_w in V2 down to ``slice_size``, and runs the sampling
    estimator on (N_v, V2) and (N_v, N_w). Reports the pass fraction; this
    measures, not proves, the inheritance statement.
    """
    v1 = [int(x) for x in v1]
    v2 = [int(x) for x in v2]
    rng = rng_for(seed, "probe", len(v1), len(v2), trials)
    if trials <= 0:
        return ProbeStats(0, 0, float("nan"))
    inside = set(v1) | set(v2)
    outside = np.asarray([u for u in range(g.n) if u not in inside])
    m1 = _kernels.indices_to_mask(g.n, v1)
    m2 = _kernels.indices_to_mask(g.n, v2)
    passes = 0
    worst = 0.0
    for t in range(trials):
        v, w = rng.choice(outside, size=2, replace=False)
        nv = _kernels.mask_to_indices(g.adj[int(v)] & m1)
        nw = _kernels.mask_to_indices(g.adj[int(w)] & m2)
        if len(nv) < slice_size or len(nw) < slice_size:
            raise SliceTooLarge(
                f"slice_size {slice_size} exceeds a sampled neighbourhood "
                f"({min(len(nv), len(nw))})")
        nv = rng.choice(nv, size=slice_size, replace=False)
        nw = rng.choice(nw, size=slice_size, replace=False)
        ok = True
        for x, y in ((nv, v2), (nv, nw)):
            verdict = estimate_regularity(g, x, y, params, samples,
                                          rng.integers(1 << 62))
            if not verdict.regular:
                ok = False
                worst = max(worst, float(verdict.witness[2]))
        passes += ok
    return ProbeStats(trials, passes, worst)
