"""Hot numeric kernels: bitset rows and the arrowing coloring scan.

Every kernel has a pure-numpy implementation. When numba is importable and the
environment variable ``SIZERAMSEY_NO_NUMBA`` is unset (or "0"), the inner-loop
kernels are replaced by ``@njit`` versions. ``BACKEND`` records which path is
active; ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("SIZERAMSEY_NO_NUMBA", "0") not in ("0", "")

try:
    if _FORCE_NUMPY:
        raise ImportError
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False

BACKEND = "numba" if _HAVE_NUMBA else "numpy"


# -- pure numpy reference implementations --------------------------------------

def _popcount_rows_np(words):
    """Per-row popcount of a (rows, W) uint64 bitset matrix."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def _build_adjacency_np(n, us, vs):
    us = np.asarray(us, dtype=np.uint64)
    vs = np.asarray(vs, dtype=np.uint64)
    words = np.zeros((n, (n + 63) // 64), dtype=np.uint64)
    flat = words.reshape(-1)
    w = np.uint64(words.shape[1])
    np.bitwise_or.at(flat, us * w + (vs >> np.uint64(6)),
                     np.uint64(1) << (vs & np.uint64(63)))
    np.bitwise_or.at(flat, vs * w + (us >> np.uint64(6)),
                     np.uint64(1) << (us & np.uint64(63)))
    return words


def _arrow_scan_np(masks, n_edges, start, stop):
    """Scan red-edge bitmasks ``(c << 1) | 1`` for c in [start, stop).

    Returns (index of the first coloring with no monochromatic copy, number of
    colorings checked). Index is -1 when every coloring in the range contains
    a monochromatic copy. ``masks`` holds the edge-set bitmask of every copy of
    the target graph.
    """
    full = (1 << n_edges) - 1
    chunk = 1 << 14
    checked = 0
    c = start
    while c < stop:
        hi = min(c + chunk, stop)
        reds = (np.arange(c, hi, dtype=np.int64) << 1) | 1
        blues = ~reds & full
        mono = np.zeros(hi - c, dtype=bool)
        for m in masks:
            mono |= (reds & m) == m
            mono |= (blues & m) == m
        bad = np.flatnonzero(~mono)
        if bad.size:
            return c + int(bad[0]), checked + int(bad[0]) + 1
        checked += hi - c
        c = hi
    return -1, checked


popcount_rows = _popcount_rows_np
build_adjacency = _build_adjacency_np
arrow_scan = _arrow_scan_np


# -- numba overrides -----------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _popcount64(x):
        x = x - ((x >> 1) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + ((x >> 2) & np.uint64(0x3333333333333333))
        x = (x + (x >> 4)) & np.uint64(0x0F0F0F0F0F0F0F0F)
        return (x * np.uint64(0x0101010101010101)) >> 56

    @njit(cache=True)
    def _popcount_rows_nb(words):
        flat = words.reshape(-1, words.shape[-1])
        out = np.zeros(flat.shape[0], dtype=np.int64)
        for i in range(flat.shape[0]):
            acc = np.uint64(0)
            for j in range(flat.shape[1]):
                acc += _popcount64(flat[i, j])
            out[i] = acc
        return out.reshape(words.shape[:-1])

    @njit(cache=True)
    def _build_adjacency_nb(n, us, vs):
        w = (n + 63) // 64
        words = np.zeros((n, w), dtype=np.uint64)
        for k in range(us.shape[0]):
            u = us[k]
            v = vs[k]
            words[u, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
            words[v, u >> 6] |= np.uint64(1) << np.uint64(u & 63)
        return words

    @njit(cache=True)
    def _arrow_scan_nb(masks, n_edges, start, stop):
        full = (np.int64(1) << n_edges) - 1
        checked = np.int64(0)
        for c in range(start, stop):
            red = (np.int64(c) << 1) | 1
            blue = ~red & full
            checked += 1
            mono = False
            for i in range(masks.shape[0]):
                m = masks[i]
                if (red & m) == m or (blue & m) == m:
                    mono = True
                    break
            if not mono:
                return np.int64(c), checked
        return np.int64(-1), checked

    def popcount_rows(words):  # noqa: F811
        return _popcount_rows_nb(np.ascontiguousarray(words))

    def build_adjacency(n, us, vs):  # noqa: F811
        return _build_adjacency_nb(
            n, np.ascontiguousarray(us, dtype=np.int64),
            np.ascontiguousarray(vs, dtype=np.int64))

    def arrow_scan(masks, n_edges, start, stop):  # noqa: F811
        idx, checked = _arrow_scan_nb(
            np.ascontiguousarray(masks, dtype=np.int64), n_edges, start, stop)
        return int(idx), int(checked)


# -- shared helpers built on top of the kernels ---------------------------------

def popcount(words):
    """Total number of set bits in a 1d uint64 bitset."""
    return int(popcount_rows(words.reshape(1, -1))[0])


def mask_to_indices(words):
    """Positions of all set bits in a 1d uint64 bitset, ascending."""
    return np.flatnonzero(np.unpackbits(words.view(np.uint8), bitorder="little"))


def first_set_bit(words):
    """Lowest set-bit position of a 1d uint64 bitset, or -1 if empty."""
    nz = np.flatnonzero(words)
    if not nz.size:
        return -1
    w = int(words[nz[0]])
    return int(nz[0]) * 64 + (w & -w).bit_length() - 1


def indices_to_mask(n, indices):
    """Build a 1d uint64 bitset of length ceil(n/64) from vertex indices."""
    words = np.zeros((n + 63) // 64, dtype=np.uint64)
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size:
        np.bitwise_or.at(words, idx >> 6, np.uint64(1) << (idx & 63).astype(np.uint64))
    return words
