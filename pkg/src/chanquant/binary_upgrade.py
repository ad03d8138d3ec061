"""Greedy-split upgrading of binary-input channels.

An interior output symbol is removed by splitting its mass between its two
posterior-order neighbours so that the neighbours' posteriors are unchanged.
Repeating the cheapest split until ``L`` symbols remain gives a channel that
is upgraded with respect to the original.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import split_run
from .dist import (
    BinaryPosteriorChannel,
    JointDistribution,
    binary_entropy,
    mutual_information,
)
from .errors import BudgetTooSmall, ExtremeRemoved, NotSorted


def _check_sorted(*ps):
    if any(a > b for a, b in zip(ps, ps[1:])):
        raise NotSorted(f"posteriors {ps} are not in ascending order")


def split_alpha(p_left: float, p_mid: float, p_right: float) -> float:
    """Weight sent to the left neighbour: alpha * p_left + (1 - alpha) * p_right = p_mid.

    Returns 1 when the neighbours coincide (then all three posteriors are equal).
    """
    _check_sorted(p_left, p_mid, p_right)
    if p_right == p_left:
        return 1.0
    return min(max((p_right - p_mid) / (p_right - p_left), 0.0), 1.0)


def split_cost(pi_mid: float, p_left: float, p_mid: float, p_right: float) -> float:
    """Increase of I(X;Z) caused by splitting a symbol of mass ``pi_mid`` (nats)."""
    a = split_alpha(p_left, p_mid, p_right)
    gap = binary_entropy(p_mid) - a * binary_entropy(p_left) - (1.0 - a) * binary_entropy(p_right)
    return max(pi_mid * gap, 0.0)


def final_beta_map(view: BinaryPosteriorChannel, surviving) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split every view entry between its nearest surviving neighbours.

    Parameters
    ----------
    view : BinaryPosteriorChannel
    surviving : array_like of int
        Sorted entry indices kept as output symbols; must include the first
        and the last entry.

    Returns
    -------
    left, right : ndarray of int64
        Output symbol ids (0-based ranks within ``surviving``).
    weight : ndarray
        Probability of going to ``left``; ``1 - weight`` goes to ``right``.
        Surviving entries map to themselves with weight 1.
    """
    surv = np.asarray(surviving, dtype=np.int64)
    n = len(view)
    if len(surv) == 0 or surv[0] != 0 or surv[-1] != n - 1:
        raise ExtremeRemoved("surviving set must contain the extreme posteriors")
    if np.any(np.diff(surv) <= 0):
        raise NotSorted("surviving indices must be strictly increasing")
    idx = np.arange(n)
    right = np.searchsorted(surv, idx, side="left")
    exact = surv[np.minimum(right, len(surv) - 1)] == idx
    left = np.where(exact, right, right - 1)
    p = view.post
    pl = p[surv[left]]
    pr = p[surv[right]]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.clip((pr - p) / (pr - pl), 0.0, 1.0)
    weight = np.where(exact | (pr == pl), 1.0, a)
    right = np.where(weight == 1.0, left, right)
    return left.astype(np.int64), right.astype(np.int64), weight


def assemble_columns(p_y, betas, sizes):
    """Output distribution of Z = (Z_1, ..., Z_k) when each Z_i | Y follows a two-point map.

    Parameters
    ----------
    p_y : ndarray, shape (n,)
    betas : list of (left, right, weight) arrays, each of shape (n,)
    sizes : list of int
        Alphabet size of each coordinate, used for mixed-radix packing.

    Returns
    -------
    keys : ndarray of int64
        Packed ids of the occupied tuples, ascending.
    p_z : ndarray
        P*_Z of each occupied tuple.
    """
    keys = np.zeros(len(p_y), dtype=np.int64)
    w = np.asarray(p_y, dtype=np.float64)
    src = np.arange(len(p_y))
    for (left, right, a), size in zip(betas, sizes):
        keys = np.concatenate((keys * size + left[src], keys * size + right[src]))
        w = np.concatenate((w * a[src], w * (1.0 - a[src])))
        src = np.concatenate((src, src))
        keep = w > 0
        keys, w, src = keys[keep], w[keep], src[keep]
    uniq, inv = np.unique(keys, return_inverse=True)
    return uniq, np.bincount(inv.ravel(), weights=w, minlength=len(uniq))


def unpack_keys(keys, sizes) -> np.ndarray:
    """Inverse of the mixed-radix packing: one column per coordinate."""
    out = np.empty((len(keys), len(sizes)), dtype=np.int64)
    rest = np.asarray(keys, dtype=np.int64)
    for i in range(len(sizes) - 1, -1, -1):
        out[:, i] = rest % sizes[i]
        rest = rest // sizes[i]
    return out


def onehot_rows(p_z, coords, posts) -> np.ndarray:
    """P*(x, z) = P*_Z(z) g(x|z), with g built from prefix products of the coordinate posteriors."""
    q = len(posts) + 1
    out = np.empty((q, len(p_z)))
    prefix = np.ones(len(p_z))
    for i, post in enumerate(posts):
        b = post[coords[:, i]]
        out[i] = p_z * (prefix * b)
        prefix = prefix * (1.0 - b)
    out[q - 1] = p_z * prefix
    return out


@dataclass(frozen=True, eq=False)
class UpgradeOutcome:
    """Result of :func:`greedy_split`.

    Attributes
    ----------
    surviving : ndarray of int64
        Entry indices (into ``view``) kept as output symbols.
    left, right, weight : ndarray
        Per-entry split map onto output symbol ids 0..L-1.
    pstar : JointDistribution
        Upgraded joint over {0, 1} x Z.
    delta_I : float
        I(X;Z) - I(X;Y) in nats, recomputed from both joints.
    step_costs : ndarray
        Cost of each executed split, in execution order.
    seq_mass : ndarray
        Output masses produced by the step-by-step redistribution.
    """

    view: BinaryPosteriorChannel = field(repr=False)
    surviving: np.ndarray
    left: np.ndarray
    right: np.ndarray
    weight: np.ndarray
    pstar: JointDistribution = field(repr=False)
    delta_I: float
    step_costs: np.ndarray
    seq_mass: np.ndarray

    @property
    def L(self) -> int:
        return len(self.surviving)

    @property
    def z_post(self) -> np.ndarray:
        return self.view.post[self.surviving]

    @property
    def cost_sum(self) -> float:
        return float(np.sum(self.step_costs))

    @property
    def step_sizes(self) -> np.ndarray:
        """Alphabet size just before each split."""
        return len(self.view) - np.arange(len(self.step_costs))

    def column_betas(self):
        """(left, right, weight) per column of the source joint."""
        g = self.view.group
        return self.left[g], self.right[g], self.weight[g]

    @property
    def beta_map(self) -> list:
        """``[((z_left, a), (z_right, 1 - a)), ...]`` for each source output."""
        left, right, weight = self.column_betas()
        return [((int(lo), float(a)), (int(hi), 1.0 - float(a)))
                for lo, hi, a in zip(left, right, weight)]


def greedy_split(view: BinaryPosteriorChannel, L: int) -> UpgradeOutcome:
    """Upgrade to at most ``L`` outputs by repeatedly applying the cheapest split.

    The first and last entries are never removed. Ties go to the lowest
    entry index.
    """
    if L < 2:
        raise BudgetTooSmall(f"upgrading needs L >= 2, got {L}")
    n = len(view)
    if n <= L:
        surviving = np.arange(n, dtype=np.int64)
        costs = np.empty(0)
        seq_mass = np.array(view.mass)
    else:
        alive, masses, _, costs = split_run(view.mass, view.post, int(L))
        surviving = np.flatnonzero(alive).astype(np.int64)
        seq_mass = masses[surviving]
    left, right, weight = final_beta_map(view, surviving)
    source = view.source
    g = view.group
    keys, p_z = assemble_columns(source.p_y, [(left[g], right[g], weight[g])], [len(surviving)])
    coords = unpack_keys(keys, [len(surviving)])
    pstar = JointDistribution(onehot_rows(p_z, coords, [view.post[surviving]]),
                              tuple(int(k) for k in keys), source.input_labels)
    delta = mutual_information(pstar) - mutual_information(source)
    return UpgradeOutcome(view, surviving, left, right, weight, pstar, delta, costs, seq_mass)
