"""Numba kernels for exact maximum-clique search on bitset graphs.

Adjacency is an ``(N, W)`` array of ``uint64`` words, bit ``j`` of row ``i``
set iff ``ij`` is an edge.  Vertices are expected to be pre-ordered (see
:func:`degeneracy_order`); the greedy colouring always picks the lowest
numbered vertex first, so the ordering matters for pruning.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DEBRUIJN_TABLE = np.array(
    [
        0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
        62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
        63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
        46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6,
    ],
    dtype=np.int64,
)


@njit(cache=True, nogil=True)
def _lowest_bit(x):
    lsb = x & (~x + np.uint64(1))
    return _DEBRUIJN_TABLE[(lsb * _DEBRUIJN) >> np.uint64(58)]


@njit(cache=True, nogil=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True, nogil=True)
def _colour_sort(adj, P, W, kmin, U, C):
    """Greedy sequential colouring of candidate set ``P``.

    Writes the vertices whose colour is at least ``kmin`` to ``U`` in
    nondecreasing colour order (colours to ``C``) and returns how many.
    """
    Q = P.copy()
    Qk = np.empty(W, dtype=np.uint64)
    n = 0
    k = 0
    remaining = False
    for w in range(W):
        if Q[w] != 0:
            remaining = True
            break
    while remaining:
        k += 1
        for w in range(W):
            Qk[w] = Q[w]
        w = 0
        while w < W:
            if Qk[w] == 0:
                w += 1
                continue
            b = _lowest_bit(Qk[w])
            v = w * 64 + b
            mask = ~(np.uint64(1) << np.uint64(b))
            Q[w] &= mask
            Qk[w] &= mask
            for u in range(w, W):
                Qk[u] &= ~adj[v, u]
            if k >= kmin:
                U[n] = v
                C[n] = k
                n += 1
        remaining = False
        for w in range(W):
            if Q[w] != 0:
                remaining = True
                break
    return n


@njit(cache=True, nogil=True)
def max_clique_kernel(adj, n_vertices, lower_bound, budget, witness, depth_cap):
    """Branch and bound over bitsets with colouring bounds.

    Returns ``(best, nodes, finished)``.  ``witness[:best]`` holds a clique
    of size ``best`` when ``best > lower_bound``; otherwise it is untouched.
    ``depth_cap`` must exceed the clique number (max degree + 2 suffices).
    """
    N = n_vertices
    W = adj.shape[1]
    P = np.zeros((depth_cap, W), dtype=np.uint64)
    U = np.zeros((depth_cap, N), dtype=np.int32)
    C = np.zeros((depth_cap, N), dtype=np.int32)
    pos = np.zeros(depth_cap, dtype=np.int64)
    clique = np.zeros(depth_cap, dtype=np.int32)

    best = lower_bound
    nodes = 0
    if N == 0:
        return best, nodes, True
    for v in range(N):
        P[0, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    nodes += 1
    pos[0] = _colour_sort(adj, P[0], W, best + 1, U[0], C[0])

    d = 0
    while d >= 0:
        pos[d] -= 1
        i = pos[d]
        if i < 0 or d + C[d, i] <= best:
            d -= 1
            continue
        v = U[d, i]
        clique[d] = v
        nonempty = False
        for w in range(W):
            x = P[d, w] & adj[v, w]
            P[d + 1, w] = x
            if x != 0:
                nonempty = True
        P[d, v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
        if not nonempty:
            if d + 1 > best:
                best = d + 1
                for j in range(best):
                    witness[j] = clique[j]
            continue
        if nodes >= budget:
            return best, nodes, False
        nodes += 1
        d += 1
        pos[d] = _colour_sort(adj, P[d], W, best - d + 1, U[d], C[d])
    return best, nodes, True


@njit(cache=True, nogil=True)
def count_cliques_kernel(adj, n_vertices, k, cap):
    """Count ``k``-cliques by ordered extension; ``-1`` when ``cap`` expansions are exceeded."""
    N = n_vertices
    W = adj.shape[1]
    if k <= 0:
        return 1
    P = np.zeros((k + 1, W), dtype=np.uint64)
    cur = np.zeros(k + 1, dtype=np.int64)
    for v in range(N):
        P[0, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    total = 0
    expansions = 0
    d = 0
    cur[0] = -1
    while d >= 0:
        # next vertex after cur[d] in P[d]
        start = cur[d] + 1
        v = -1
        w = start >> 6
        if w < W:
            word = P[d, w] & ~((np.uint64(1) << np.uint64(start & 63)) - np.uint64(1))
            while True:
                if word != 0:
                    v = w * 64 + _lowest_bit(word)
                    break
                w += 1
                if w >= W:
                    break
                word = P[d, w]
        if v < 0:
            d -= 1
            continue
        cur[d] = v
        if d + 1 == k:
            total += 1
            continue
        expansions += 1
        if expansions > cap:
            return -1
        # candidates: later neighbours of v
        cnt = 0
        for u in range(W):
            x = P[d, u] & adj[v, u]
            P[d + 1, u] = x
            cnt += _popcount(x)
        if cnt < k - d - 1:
            continue
        d += 1
        cur[d] = v
    return total


def degeneracy_order(degrees_adj):
    """Vertices ordered so that repeatedly removed min-degree vertices come last.

    ``degrees_adj`` is a dense boolean adjacency matrix.
    """
    adj = np.asarray(degrees_adj, dtype=bool)
    n = adj.shape[0]
    deg = adj.sum(axis=1).astype(np.int64)
    alive = np.ones(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    big = np.iinfo(np.int64).max
    for slot in range(n - 1, -1, -1):
        masked = np.where(alive, deg, big)
        v = int(np.argmin(masked))
        order[slot] = v
        alive[v] = False
        deg -= adj[v]
    return order
