"""Pure-Python greedy split / merge loops.

Reference implementation of the compiled kernels in ``_core.pyx``; both
perform the same floating-point operations in the same order, so their
outputs agree bit for bit.
"""
import heapq
import math

import numpy as np


def _h2(p):
    s = p if p <= 0.5 else 1.0 - p
    if s <= 0.0:
        return 0.0
    return -s * math.log(s) - (1.0 - s) * math.log(1.0 - s)


def _alpha(pl, pm, pr):
    if pr == pl:
        return 1.0
    a = (pr - pm) / (pr - pl)
    if a < 0.0:
        return 0.0
    if a > 1.0:
        return 1.0
    return a


def split_cost(m, pl, pm, pr, hl, hm, hr):
    """Split cost with the three binary entropies supplied by the caller."""
    if pr == pl:
        return 0.0
    a = _alpha(pl, pm, pr)
    c = m * (hm - a * hl - (1.0 - a) * hr)
    return c if c > 0.0 else 0.0


def merge_cost(mi, hi, mj, hj, spi, spj):
    """Merge cost of two clusters given masses, entropies and sums of mass * posterior."""
    s = mi + mj
    pm = (spi + spj) / s
    if pm > 1.0:
        pm = 1.0
    a = mi / s
    c = s * (_h2(pm) - a * hi - (1.0 - a) * hj)
    return c if c > 0.0 else 0.0


def split_run(mass, post, L):
    """Greedily remove interior symbols until ``L`` remain.

    Returns
    -------
    alive : ndarray of bool
    mass : ndarray
        Final masses (removed entries keep their mass at removal time).
    removed : ndarray of int64
        Entry removed at each step.
    costs : ndarray
        Split cost of each step.
    """
    n = len(mass)
    m = [float(v) for v in mass]
    p = [float(v) for v in post]
    prev = list(range(-1, n - 1))
    nxt = list(range(1, n + 1))
    nxt[n - 1] = -1
    h = [_h2(v) for v in p]
    version = [0] * n
    alive = [True] * n
    heap = [(split_cost(m[i], p[i - 1], p[i], p[i + 1], h[i - 1], h[i], h[i + 1]), i, 0)
            for i in range(1, n - 1)]
    heapq.heapify(heap)
    removed = []
    costs = []
    size = n
    while size > L:
        c, i, v = heapq.heappop(heap)
        if not alive[i] or v != version[i]:
            continue
        left = prev[i]
        right = nxt[i]
        a = _alpha(p[left], p[i], p[right])
        mi = m[i]
        m[left] += a * mi
        m[right] += (1.0 - a) * mi
        alive[i] = False
        nxt[left] = right
        prev[right] = left
        removed.append(i)
        costs.append(c)
        size -= 1
        for j in (left, right):
            if prev[j] != -1 and nxt[j] != -1:
                version[j] += 1
                cost = split_cost(m[j], p[prev[j]], p[j], p[nxt[j]], h[prev[j]], h[j], h[nxt[j]])
                heapq.heappush(heap, (cost, j, version[j]))
    return (np.array(alive, dtype=bool), np.array(m), np.array(removed, dtype=np.int64),
            np.array(costs))


def merge_run(mass, post, L):
    """Greedily merge adjacent clusters until ``L`` remain.

    Returns
    -------
    labels : ndarray of int64
        Cluster id (0..L-1, increasing with posterior) of every entry.
    lefts : ndarray of int64
        Leftmost entry of the surviving cluster at each step.
    costs : ndarray
        Merge cost of each step.
    """
    n = len(mass)
    s = [float(v) for v in mass]
    p = [float(v) for v in post]
    sp = [s[k] * p[k] for k in range(n)]
    h = [_h2(v) for v in p]
    prev = list(range(-1, n - 1))
    nxt = list(range(1, n + 1))
    nxt[n - 1] = -1
    version = [0] * n
    alive = [True] * n
    heap = [(merge_cost(s[a], h[a], s[a + 1], h[a + 1], sp[a], sp[a + 1]), a, 0)
            for a in range(n - 1)]
    heapq.heapify(heap)
    lefts = []
    costs = []
    size = n
    while size > L:
        c, a, v = heapq.heappop(heap)
        if not alive[a] or v != version[a] or nxt[a] == -1:
            continue
        b = nxt[a]
        s[a] += s[b]
        sp[a] += sp[b]
        pa = sp[a] / s[a]
        p[a] = pa if pa < 1.0 else 1.0
        h[a] = _h2(p[a])
        alive[b] = False
        nb = nxt[b]
        nxt[a] = nb
        if nb != -1:
            prev[nb] = a
        lefts.append(a)
        costs.append(c)
        size -= 1
        version[a] += 1
        if nb != -1:
            heapq.heappush(heap, (merge_cost(s[a], h[a], s[nb], h[nb], sp[a], sp[nb]), a, version[a]))
        left = prev[a]
        if left != -1:
            version[left] += 1
            heapq.heappush(heap, (merge_cost(s[left], h[left], s[a], h[a], sp[left], sp[a]),
                                  left, version[left]))
    labels = np.empty(n, dtype=np.int64)
    cid = -1
    for k in range(n):
        if alive[k]:
            cid += 1
        labels[k] = cid
    return labels, np.array(lefts, dtype=np.int64), np.array(costs)
