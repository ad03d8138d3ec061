"""Greedy-merge degrading of binary-input channels."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ._kernels import merge_run
from .dist import (
    BinaryPosteriorChannel,
    JointDistribution,
    binary_entropy,
    mutual_information,
)
from .errors import BudgetTooSmall, PartialQuantizer, ZeroMass


def merge_cost(pi_i: float, p_i: float, pi_j: float, p_j: float) -> float:
    """Loss of I(X;Y) when outputs i and j are merged into one symbol (nats)."""
    if pi_i <= 0 or pi_j <= 0:
        raise ZeroMass("merge_cost needs positive masses")
    s = pi_i + pi_j
    a = pi_i / s
    pm = min(a * p_i + (1.0 - a) * p_j, 1.0)
    gap = binary_entropy(pm) - a * binary_entropy(p_i) - (1.0 - a) * binary_entropy(p_j)
    return max(s * gap, 0.0)


def apply_quantizer(joint: JointDistribution, f) -> tuple[JointDistribution, np.ndarray]:
    """Aggregate P_{X,Y} through a deterministic map of the outputs.

    Parameters
    ----------
    joint : JointDistribution
    f : array_like of int, shape (n,) or (n, k)
        Cluster id (or tuple of ids) of every output column. Ids must be
        non-negative integers.

    Returns
    -------
    pxz : JointDistribution
        Columns are the occupied ids (tuples) in ascending lexicographic order.
    tuples : ndarray of int64, shape (n_occupied, k)
        The id tuple of each column of ``pxz``.
    """
    f = np.asarray(f)
    if f.ndim == 1:
        f = f[:, None]
    if f.shape[0] != joint.n:
        raise PartialQuantizer(f"quantizer covers {f.shape[0]} of {joint.n} outputs")
    if f.size and (not np.issubdtype(f.dtype, np.integer) or f.min() < 0):
        raise PartialQuantizer("quantizer ids must be non-negative integers")
    f = f.astype(np.int64)
    sizes = f.max(axis=0) + 1 if f.size else np.ones(f.shape[1], dtype=np.int64)
    keys = np.zeros(joint.n, dtype=np.int64)
    for i in range(f.shape[1]):
        keys = keys * int(sizes[i]) + f[:, i]
    uniq, inv = np.unique(keys, return_inverse=True)
    inv = inv.ravel()
    mass = np.vstack([np.bincount(inv, weights=row, minlength=len(uniq)) for row in joint.mass])
    tuples = np.empty((len(uniq), f.shape[1]), dtype=np.int64)
    rest = uniq.copy()
    for i in range(f.shape[1] - 1, -1, -1):
        tuples[:, i] = rest % sizes[i]
        rest //= sizes[i]
    labels = tuple(tuple(int(v) for v in t) if f.shape[1] > 1 else int(t[0]) for t in tuples)
    return JointDistribution(mass, labels, joint.input_labels), tuples


@dataclass(frozen=True, eq=False)
class DegradeOutcome:
    """Result of :func:`greedy_merge` or of the DP oracle.

    Attributes
    ----------
    labels : ndarray of int64
        Cluster id (0..L-1, ascending posterior) of every view entry.
    pxz : JointDistribution
        Degraded joint over {0, 1} x clusters.
    delta_I : float
        I(X;Y) - I(X;f(Y)) in nats.
    step_costs : ndarray
        Cost of each executed merge (empty for oracle results).
    """

    view: BinaryPosteriorChannel = field(repr=False)
    labels: np.ndarray
    pxz: JointDistribution = field(repr=False)
    delta_I: float
    step_costs: np.ndarray

    @property
    def L(self) -> int:
        return int(self.labels[-1]) + 1 if len(self.labels) else 0

    @property
    def quantizer(self) -> np.ndarray:
        """Cluster id of every source output column."""
        return self.labels[self.view.group]

    @property
    def cost_sum(self) -> float:
        return float(np.sum(self.step_costs))

    @property
    def step_sizes(self) -> np.ndarray:
        return len(self.view) - np.arange(len(self.step_costs))

    def write_csv(self, path) -> None:
        """Quantizer export: header ``y,z`` with 1-based cluster ids."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["y", "z"])
            for y, z in zip(self.view.source.output_labels, self.quantizer):
                w.writerow([y, int(z) + 1])


def outcome_from_labels(view: BinaryPosteriorChannel, labels, costs=None) -> DegradeOutcome:
    labels = np.asarray(labels, dtype=np.int64)
    pxz, _ = apply_quantizer(view.source, labels[view.group])
    delta = mutual_information(view.source) - mutual_information(pxz)
    return DegradeOutcome(view, labels, pxz, delta,
                          np.empty(0) if costs is None else np.asarray(costs))


def greedy_merge(view: BinaryPosteriorChannel, L: int) -> DegradeOutcome:
    """Degrade to at most ``L`` outputs by repeatedly merging the cheapest adjacent pair.

    Ties go to the lowest left index.
    """
    if L < 1:
        raise BudgetTooSmall(f"degrading needs L >= 1, got {L}")
    n = len(view)
    if n <= L:
        return outcome_from_labels(view, np.arange(n))
    labels, _, costs = merge_run(view.mass, view.post, int(L))
    return outcome_from_labels(view, labels, costs)
