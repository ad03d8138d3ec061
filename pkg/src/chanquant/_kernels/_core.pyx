# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled greedy split / merge loops.

Mirrors ``_pycore``: same cost formulas evaluated in the same order. The
pure-Python loop uses a lazily invalidated heap; here a tournament tree over
symbol indices holds one live key per symbol. Both always select the minimum
(cost, index) among current candidates, so the step sequences coincide. The
tree is laid out in index order, and every update touches a neighbour of
the previous one, which keeps the working set in cache.
"""
import numpy as np
from libc.math cimport log
from libc.stdlib cimport free

cdef extern from "<stdlib.h>" nogil:
    int posix_memalign(void **memptr, size_t alignment, size_t size)

cdef extern from "<sys/mman.h>" nogil:
    int madvise(void *addr, size_t length, int advice)
    int MADV_HUGEPAGE

DEF _PAGE = 2097152


cdef inline double _h2(double p) noexcept nogil:
    cdef double s = p if p <= 0.5 else 1.0 - p
    if s <= 0.0:
        return 0.0
    return -s * log(s) - (1.0 - s) * log(1.0 - s)


cdef inline double _alpha(double pl, double pm, double pr) noexcept nogil:
    cdef double a
    if pr == pl:
        return 1.0
    a = (pr - pm) / (pr - pl)
    if a < 0.0:
        return 0.0
    if a > 1.0:
        return 1.0
    return a


cdef inline double _split_cost(double m, double pl, double pm, double pr,
                               double hl, double hm, double hr) noexcept nogil:
    cdef double a, c
    if pr == pl:
        return 0.0
    a = _alpha(pl, pm, pr)
    c = m * (hm - a * hl - (1.0 - a) * hr)
    return c if c > 0.0 else 0.0


cdef inline double _merge_cost(double mi, double hi, double mj, double hj,
                               double spi, double spj) noexcept nogil:
    cdef double s, pm, a, c
    s = mi + mj
    pm = (spi + spj) / s
    if pm > 1.0:
        pm = 1.0
    a = mi / s
    c = s * (_h2(pm) - a * hi - (1.0 - a) * hj)
    return c if c > 0.0 else 0.0


cdef struct Entry:
    double m
    double v        # posterior (split) or mass * posterior (merge)
    double h        # binary entropy of the current posterior
    int prev
    int nxt


cdef struct Node:
    double cost
    long idx        # -1 for an empty node


cdef struct Work:
    Entry *e
    double *cost    # current key of each symbol
    Node *tree      # tree[k] = winning (cost, symbol) of node k; leaves at P + i
    Py_ssize_t P
    unsigned char *alive
    void *block


cdef inline Node *_better(Node *x, Node *y) noexcept nogil:
    if x.idx < 0:
        return y
    if y.idx < 0:
        return x
    if x.cost < y.cost:
        return x
    if y.cost < x.cost:
        return y
    return x if x.idx < y.idx else y


cdef inline void _replay(Work *w, int i) noexcept nogil:
    # leaf i changed (new key or removed); recompute winners up to the root
    cdef Py_ssize_t k = (w.P + i) >> 1
    cdef Node *win
    while k >= 1:
        win = _better(&w.tree[2 * k], &w.tree[2 * k + 1])
        if win.idx == w.tree[k].idx and win.idx != i:
            break
        w.tree[k] = win[0]
        k >>= 1


cdef inline void _set(Work *w, int i, double c) noexcept nogil:
    w.cost[i] = c
    w.tree[w.P + i].cost = c
    w.tree[w.P + i].idx = i
    _replay(w, i)


cdef inline void _remove(Work *w, int i) noexcept nogil:
    if w.tree[w.P + i].idx < 0:
        return
    w.tree[w.P + i].idx = -1
    _replay(w, i)


cdef void _build(Work *w) noexcept nogil:
    cdef Py_ssize_t k = w.P - 1
    while k >= 1:
        w.tree[k] = _better(&w.tree[2 * k], &w.tree[2 * k + 1])[0]
        k -= 1


cdef void _release(Work *w) noexcept nogil:
    free(w.block)
    w.block = NULL
    w.e = NULL
    w.cost = NULL
    w.tree = NULL
    w.alive = NULL


cdef int _init(Work *w, const double[:] mass, const double[:] post, bint merging) noexcept nogil:
    cdef Py_ssize_t j, n = mass.shape[0]
    w.P = 1
    while w.P < n:
        w.P *= 2
    # one block on huge-page-aligned memory: the greedy loops touch it at
    # scattered offsets, so TLB reach matters more than cache size
    cdef size_t ne = (n + 1) * sizeof(Entry)
    cdef size_t nc = (n + 1) * sizeof(double)
    cdef size_t nt = 2 * w.P * sizeof(Node)
    cdef size_t total = ne + nc + nt + n + 1
    total = (total + _PAGE - 1) // _PAGE * _PAGE
    w.block = NULL
    if posix_memalign(&w.block, _PAGE, total) != 0:
        w.block = NULL
        return -1
    madvise(w.block, total, MADV_HUGEPAGE)
    w.e = <Entry *> w.block
    w.cost = <double *> (<char *> w.block + ne)
    w.tree = <Node *> (<char *> w.block + ne + nc)
    w.alive = <unsigned char *> (<char *> w.block + ne + nc + nt)
    for j in range(2 * w.P):
        w.tree[j].idx = -1
    for j in range(n):
        w.e[j].m = mass[j]
        w.e[j].v = mass[j] * post[j] if merging else post[j]
        w.e[j].h = _h2(post[j])
        w.e[j].prev = <int> (j - 1)
        w.e[j].nxt = <int> (j + 1) if j + 1 < n else -1
        w.alive[j] = 1
    return 0


def split_run(const double[:] mass, const double[:] post, Py_ssize_t L):
    cdef Py_ssize_t n = mass.shape[0]
    steps = n - L if n > L else 0
    removed_arr = np.empty(steps, dtype=np.int64)
    costs_arr = np.empty(steps, dtype=np.float64)
    m_arr = np.empty(n, dtype=np.float64)
    alive_arr = np.empty(n, dtype=np.uint8)
    cdef long long[:] removed = removed_arr
    cdef double[:] costs = costs_arr
    cdef double[:] m_out = m_arr
    cdef unsigned char[:] alive_out = alive_arr
    cdef Work w
    cdef Entry *e
    cdef Py_ssize_t size = n, k = 0, j, jj
    cdef int i, left, right, pj, nj
    cdef double a, mi

    if n >= 2**30:
        raise OverflowError("too many symbols")
    if _init(&w, mass, post, False) != 0:
        raise MemoryError()
    e = w.e
    with nogil:
        for j in range(1, n - 1):
            w.cost[j] = _split_cost(e[j].m, e[j - 1].v, e[j].v, e[j + 1].v,
                                    e[j - 1].h, e[j].h, e[j + 1].h)
            w.tree[w.P + j].cost = w.cost[j]
            w.tree[w.P + j].idx = j
        _build(&w)
        while size > L:
            i = <int> w.tree[1].idx
            removed[k] = i
            costs[k] = w.cost[i]
            _remove(&w, i)
            left = e[i].prev
            right = e[i].nxt
            a = _alpha(e[left].v, e[i].v, e[right].v)
            mi = e[i].m
            e[left].m += a * mi
            e[right].m += (1.0 - a) * mi
            w.alive[i] = 0
            e[left].nxt = right
            e[right].prev = left
            k += 1
            size -= 1
            for jj in range(2):
                j = left if jj == 0 else right
                pj = e[j].prev
                nj = e[j].nxt
                if pj != -1 and nj != -1:
                    _set(&w, <int> j, _split_cost(e[j].m, e[pj].v, e[j].v, e[nj].v,
                                                  e[pj].h, e[j].h, e[nj].h))
        for j in range(n):
            m_out[j] = e[j].m
            alive_out[j] = w.alive[j]
    _release(&w)
    return alive_arr.astype(bool), m_arr, removed_arr, costs_arr


def merge_run(const double[:] mass, const double[:] post, Py_ssize_t L):
    cdef Py_ssize_t n = mass.shape[0]
    steps = n - L if n > L else 0
    lefts_arr = np.empty(steps, dtype=np.int64)
    costs_arr = np.empty(steps, dtype=np.float64)
    labels_arr = np.empty(n, dtype=np.int64)
    cdef long long[:] lefts = lefts_arr
    cdef double[:] costs = costs_arr
    cdef long long[:] labels = labels_arr
    cdef Work w
    cdef Entry *e
    cdef Py_ssize_t size = n, k = 0, j, cid
    cdef int a, b, nb, left
    cdef double pa

    if n >= 2**30:
        raise OverflowError("too many symbols")
    if _init(&w, mass, post, True) != 0:
        raise MemoryError()
    e = w.e
    with nogil:
        for j in range(n - 1):
            w.cost[j] = _merge_cost(e[j].m, e[j].h, e[j + 1].m, e[j + 1].h,
                                    e[j].v, e[j + 1].v)
            w.tree[w.P + j].cost = w.cost[j]
            w.tree[w.P + j].idx = j
        _build(&w)
        while size > L:
            a = <int> w.tree[1].idx
            b = e[a].nxt
            lefts[k] = a
            costs[k] = w.cost[a]
            e[a].m += e[b].m
            e[a].v += e[b].v
            pa = e[a].v / e[a].m
            e[a].h = _h2(pa if pa < 1.0 else 1.0)
            w.alive[b] = 0
            _remove(&w, b)
            nb = e[b].nxt
            e[a].nxt = nb
            if nb != -1:
                e[nb].prev = a
                _set(&w, a, _merge_cost(e[a].m, e[a].h, e[nb].m, e[nb].h, e[a].v, e[nb].v))
            else:
                _remove(&w, a)
            k += 1
            size -= 1
            left = e[a].prev
            if left != -1:
                _set(&w, left, _merge_cost(e[left].m, e[left].h, e[a].m, e[a].h,
                                           e[left].v, e[a].v))
        cid = -1
        for j in range(n):
            if w.alive[j]:
                cid += 1
            labels[j] = cid
    _release(&w)
    return labels_arr, lefts_arr, costs_arr
