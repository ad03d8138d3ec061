"""Degrading for general input alphabets through the one-hot reduction.

Each conditional binary problem is degraded by greedy merging with budget
lam = floor(L^(1/(q-1))); the output y is then mapped to the tuple of its
q-1 cluster ids.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .binary_degrade import apply_quantizer, greedy_merge
from .bounds import bound
from .dist import JointDistribution, mutual_information
from .errors import BudgetTooSmall
from .onehot import AlphaChain, build_alpha_chain, lambda_of

__all__ = ["OneHotDegradeResult", "apply_quantizer", "degrade"]


@dataclass(frozen=True, eq=False)
class OneHotDegradeResult:
    """Attributes
    ----------
    outcomes : list of DegradeOutcome
        Binary merge result of each sub-problem.
    f : ndarray of int64, shape (n, q-1)
        Cluster id (0-based) of every source output in every coordinate.
    z_tuples : ndarray of int64
        Occupied tuples, one per column of ``pxz``.
    """

    outcomes: list = field(repr=False)
    chain: AlphaChain = field(repr=False)
    f: np.ndarray = field(repr=False)
    z_tuples: np.ndarray = field(repr=False)
    pxz: JointDistribution = field(repr=False)
    delta_I: float
    bound: float
    lam: int
    elapsed: float

    @property
    def L_actual(self) -> int:
        return self.pxz.n

    @property
    def z_index(self) -> np.ndarray:
        """Column of ``pxz`` that each source output lands in."""
        keys = _pack(self.f, self.z_tuples)
        return np.searchsorted(keys[1], keys[0])

    def to_dict(self) -> dict:
        """JSON-ready summary; information values in nats, letters and ids 1-based."""
        rows = []
        for x in range(self.pxz.q):
            for j, z in enumerate(self.z_tuples.tolist()):
                v = float(self.pxz.mass[x, j])
                if v > 0:
                    rows.append([x + 1, [c + 1 for c in z], v])
        return {
            "mode": "degrade",
            "q": self.pxz.q,
            "lambda": self.lam,
            "L_actual": self.L_actual,
            "delta_I": float(self.delta_I),
            "bound": float(self.bound),
            "pxz": rows,
        }

    def write_csv(self, path, labels=None) -> None:
        """Quantizer export: ``y,z1,...,z{q-1},z_id`` with 1-based ids."""
        idx = self.z_index
        k = self.f.shape[1]
        labels = labels if labels is not None else range(len(self.f))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["y"] + [f"z{i + 1}" for i in range(k)] + ["z_id"])
            for y, row, z in zip(labels, self.f.tolist(), idx.tolist()):
                w.writerow([y] + [v + 1 for v in row] + [z + 1])


def _pack(f, tuples):
    sizes = np.maximum(f.max(axis=0), tuples.max(axis=0)) + 1
    a = np.zeros(len(f), dtype=np.int64)
    b = np.zeros(len(tuples), dtype=np.int64)
    for i, s in enumerate(sizes):
        a = a * int(s) + f[:, i]
        b = b * int(s) + tuples[:, i]
    return a, b


def degrade(joint: JointDistribution, L: int) -> OneHotDegradeResult:
    """Degrade ``joint`` to an output alphabet of at most ``L`` symbols."""
    t0 = time.perf_counter()
    q = joint.q
    if L < 1:
        raise BudgetTooSmall(f"degrading needs L >= 1, got {L}")
    lam = lambda_of(L, q)
    if lam < 1:
        raise BudgetTooSmall(f"L={L} gives lambda={lam} for q={q}")
    chain = build_alpha_chain(joint)
    outcomes = [greedy_merge(v, lam) for v in chain.views()]
    f = np.zeros((joint.n, q - 1), dtype=np.int64)
    # outputs outside a sub-problem's support carry no mass there; cluster 0
    for i, (cols, out) in enumerate(zip(chain.cols, outcomes)):
        f[cols, i] = out.quantizer
    pxz, tuples = apply_quantizer(joint, f)
    delta = mutual_information(joint) - mutual_information(pxz)
    return OneHotDegradeResult(outcomes, chain, f, tuples, pxz, delta,
                               bound("onehot-down", q, L), lam, time.perf_counter() - t0)
