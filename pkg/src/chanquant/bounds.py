"""Closed-form approximation bounds, concavity-gap analytics and independent oracles."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotSorted, OutOfRange, TooLargeForOracle

KINDS = ("binary-up", "binary-down", "onehot-up", "onehot-down", "per-step-up", "per-step-down")
DP_CAP = 4096


@dataclass(frozen=True)
class BoundReport:
    kind: str
    q: int
    L: int
    value: float


def bound(kind: str, q: int, L: int) -> float:
    """Worst-case mutual-information change (nats) guaranteed by the greedy algorithms.

    For the per-step kinds ``L`` is the alphabet size before the step.
    """
    from .onehot import lambda_of

    if kind not in KINDS:
        raise OutOfRange(f"unknown bound kind {kind!r}")
    if L < 1 or q < 2:
        raise OutOfRange(f"need q >= 2 and L >= 1, got q={q}, L={L}")
    if kind == "binary-up":
        if L < 2:
            raise OutOfRange("upgrading needs L >= 2")
        return 128.0 / L**2
    if kind == "binary-down":
        return 64.0 / L**2
    if kind == "per-step-up":
        return 256.0 / L**3
    if kind == "per-step-down":
        return 128.0 / L**3
    lam = lambda_of(L, q)
    if kind == "onehot-up":
        if lam < 2:
            raise OutOfRange(f"L={L} gives lambda={lam} < 2 for q={q}")
        return 128.0 * (q - 1) / lam**2
    return 64.0 * (q - 1) / lam**2


def bound_report(kind: str, q: int, L: int) -> BoundReport:
    return BoundReport(kind, q, L, bound(kind, q, L))


# --- concavity gap ----------------------------------------------------------

def _xlogy_ratio(a, b):
    # a * log(a / b) with 0 log 0 = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a > 0, a * (np.log(np.where(a > 0, a, 1.0)) - np.log(np.where(b > 0, b, 1.0))), 0.0)


def concavity_gap_array(p0, p1, alpha):
    """Vectorized h2(a p0 + (1-a) p1) - a h2(p0) - (1-a) h2(p1).

    Evaluated as a d2(p0 || m) + (1-a) d2(p1 || m) with m the mixture,
    which is exact in form and never produces a negative rounding error.
    """
    p0, p1, a = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (p0, p1, alpha)))
    m = a * p0 + (1.0 - a) * p1
    d0 = _xlogy_ratio(p0, m) + _xlogy_ratio(1.0 - p0, 1.0 - m)
    d1 = _xlogy_ratio(p1, m) + _xlogy_ratio(1.0 - p1, 1.0 - m)
    out = a * np.maximum(d0, 0.0) + (1.0 - a) * np.maximum(d1, 0.0)
    return np.where((a == 0) | (a == 1) | (p0 == p1), 0.0, out)


def concavity_gap(p0: float, p1: float, alpha: float) -> float:
    """Jensen gap of the binary entropy between posteriors p0 <= p1 (nats)."""
    if p0 > p1:
        raise NotSorted(f"need p0 <= p1, got {p0} > {p1}")
    if not (0.0 <= p0 and p1 <= 1.0 and 0.0 <= alpha <= 1.0):
        raise OutOfRange("arguments must lie in [0, 1]")
    return float(concavity_gap_array(p0, p1, alpha))


def lemma_bound_array(p0, p1):
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    d = p1 - p0
    den = 2.0 * np.minimum(p0, 1.0 - p1)
    # d * (d / den) rather than d * d / den: the square underflows for tiny gaps
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        second = np.where(den > 0, d * (d / np.where(den > 0, den, 1.0)), np.inf)
    return np.minimum(d, second)


def lemma_bound(p0: float, p1: float) -> float:
    """min{p1 - p0, (p1 - p0)^2 / (2 min{p0, 1 - p1})}, the second term infinite when its denominator vanishes."""
    if p0 > p1:
        raise NotSorted(f"need p0 <= p1, got {p0} > {p1}")
    return float(lemma_bound_array(p0, p1))


def sup_gap_array(p0, p1, tol=1e-12):
    """Vectorized ternary search for max over alpha of the concavity gap.

    The value is accurate to rounding; the maximizer only to about the
    square root of machine precision, where the gap is numerically flat.

    Returns
    -------
    alpha, value : ndarray
    """
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    lo = np.zeros(np.broadcast(p0, p1).shape)
    hi = np.ones_like(lo)
    # each round keeps at most 2/3 of the bracket; on a tie the maximum of a
    # concave function lies between the probes, so both ends move
    rounds = int(math.ceil(math.log(tol) / math.log(2.0 / 3.0))) + 1
    for _ in range(rounds):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        f1 = concavity_gap_array(p0, p1, m1)
        f2 = concavity_gap_array(p0, p1, m2)
        lo = np.where(f1 <= f2, m1, lo)
        hi = np.where(f1 >= f2, m2, hi)
    a = 0.5 * (lo + hi)
    return a, concavity_gap_array(p0, p1, a)


def sup_gap(p0: float, p1: float) -> tuple[float, float]:
    """Maximizer and maximum over alpha of ``concavity_gap(p0, p1, alpha)``."""
    if p0 > p1:
        raise NotSorted(f"need p0 <= p1, got {p0} > {p1}")
    a, v = sup_gap_array(p0, p1)
    return float(a), float(v)


def sup_gap_closed_form(p0: float, p1: float) -> tuple[float, float]:
    """Stationary point of the gap: h2'(m) equals the chord slope of h2 on [p0, p1]."""
    if p1 == p0:
        return 0.5, 0.0
    h = lambda p: 0.0 if p in (0.0, 1.0) else -p * math.log(p) - (1 - p) * math.log(1 - p)
    slope = (h(p1) - h(p0)) / (p1 - p0)
    m = 1.0 / (1.0 + math.exp(slope))
    a = (p1 - m) / (p1 - p0)
    return a, float(concavity_gap_array(p0, p1, a))


def _witness_candidates(p):
    p0, p1 = p[:-1], p[1:]
    # gap(1/2) <= sup-gap <= lemma bound, so only pairs whose lower bound
    # reaches the smallest upper bound can be the minimizer
    upper = lemma_bound_array(p0, p1)
    top = np.min(upper)
    cand = np.flatnonzero(concavity_gap_array(p0, p1, 0.5) <= top * (1 + 1e-9) + 1e-300)
    return np.union1d(cand, [int(np.argmin(upper))])


def sphere_packing_witnesses(vectors) -> list:
    """:func:`sphere_packing_witness` for many vectors with one batched search."""
    ps, cands = [], []
    for posts in vectors:
        p = np.asarray(posts, dtype=np.float64)
        if len(p) < 2:
            raise OutOfRange("need at least two posteriors")
        if np.any(np.diff(p) < 0):
            raise NotSorted("posteriors must be ascending")
        ps.append(p)
        cands.append(_witness_candidates(p))
    if not ps:
        return []
    _, v = sup_gap_array(np.concatenate([p[c] for p, c in zip(ps, cands)]),
                         np.concatenate([p[c + 1] for p, c in zip(ps, cands)]))
    out, start = [], 0
    for c in cands:
        seg = v[start:start + len(c)]
        j = int(np.argmin(seg))
        out.append((int(c[j]) + 1, float(seg[j])))
        start += len(c)
    return out


def sphere_packing_witness(posts) -> tuple[int, float]:
    """Adjacent pair of sorted posteriors p_0 <= ... <= p_n with the smallest sup-gap.

    Returns the 1-based index i of the pair (p_{i-1}, p_i) and its sup-gap.
    """
    return sphere_packing_witnesses([posts])[0]


# --- oracles ----------------------------------------------------------------

def _h2_arr(p):
    s = np.minimum(p, 1.0 - p)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(s > 0, -s * np.log(np.where(s > 0, s, 1.0)) - (1 - s) * np.log(1 - s), 0.0)


def dp_optimal_degrade(view, L: int):
    """Optimal interval quantizer of a binary view into at most ``L`` clusters.

    Minimizes the sum over clusters of (cluster mass) * h2(cluster posterior)
    over contiguous partitions of the posterior-sorted entries, which is the
    optimum over all deterministic quantizers of a binary-input channel.
    """
    from .binary_degrade import outcome_from_labels

    n = len(view)
    if n > DP_CAP:
        raise TooLargeForOracle(f"{n} entries exceeds oracle cap {DP_CAP}")
    if L < 1:
        raise OutOfRange("L must be >= 1")
    L = min(L, n)
    cs = np.concatenate(([0.0], np.cumsum(view.mass)))
    csp = np.concatenate(([0.0], np.cumsum(view.mass * view.post)))
    # D[k, j]: best cost of covering entries 0..j-1 with k clusters
    D = np.full((L + 1, n + 1), np.inf)
    D[0, 0] = 0.0
    arg = np.zeros((L + 1, n + 1), dtype=np.int64)
    for j in range(1, n + 1):
        i = np.arange(j)
        s = cs[j] - cs[i]
        c = s * _h2_arr(np.clip((csp[j] - csp[i]) / s, 0.0, 1.0))
        for k in range(1, min(L, j) + 1):
            cand = D[k - 1, :j] + c
            a = int(np.argmin(cand))
            D[k, j] = cand[a]
            arg[k, j] = a
    k = int(np.argmin(D[:, n]))
    labels = np.empty(n, dtype=np.int64)
    j = n
    for c in range(k, 0, -1):
        i = arg[c, j]
        labels[i:j] = c - 1
        j = i
    return outcome_from_labels(view, labels)


def exhaustive_interval_optimum(view, L: int) -> float:
    """Smallest sum of cluster h2 costs over all interval partitions into at most L parts."""
    n = len(view)
    m, p = view.mass, view.post
    best = math.inf
    for k in range(1, min(L, n) + 1):
        for cuts in itertools.combinations(range(1, n), k - 1):
            bounds_ = (0,) + cuts + (n,)
            total = 0.0
            for a, b in zip(bounds_, bounds_[1:]):
                s = math.fsum(m[a:b])
                pc = min(math.fsum(m[a:b] * p[a:b]) / s, 1.0)
                total += s * (0.0 if pc in (0.0, 1.0) else -pc * math.log(pc) - (1 - pc) * math.log(1 - pc))
            best = min(best, total)
    return best


def _mi_direct(mass) -> float:
    q, n = mass.shape
    px = [math.fsum(mass[x]) for x in range(q)]
    py = [math.fsum(mass[:, y]) for y in range(n)]
    terms = []
    for x in range(q):
        for y in range(n):
            v = float(mass[x, y])
            if v > 0:
                terms.append(v * math.log(v / (px[x] * py[y])))
    return math.fsum(terms)


def brute_force_delta_I(before, after) -> float:
    """|I(before) - I(after)| by plain double-loop summation with compensated sums."""
    return abs(_mi_direct(before.mass) - _mi_direct(after.mass))
