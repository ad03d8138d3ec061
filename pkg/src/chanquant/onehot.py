"""One-hot reduction of a q-ary input to q-1 conditional binary problems.

Input letter x is written as the bit vector (X_1, ..., X_{q-1}) with
X_i = 1{x = i}. Sub-problem i is the joint of (X_i, Y) conditioned on
X_1 = ... = X_{i-1} = 0, i.e. on x >= i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import JointDistribution, to_binary_view
from .errors import DegenerateTail, OutOfRange


def one_hot(x: int, q: int) -> tuple:
    """Bit vector of length q-1 with a single 1 at position x; x = q is all zeros."""
    if not 1 <= x <= q:
        raise OutOfRange(f"letter {x} outside 1..{q}")
    return tuple(int(i == x) for i in range(1, q))


def lambda_of(L: int, q: int) -> int:
    """Largest integer lam with lam**(q-1) <= L, in exact integer arithmetic."""
    if q < 2 or L < 1:
        raise OutOfRange(f"need q >= 2 and L >= 1, got q={q}, L={L}")
    k = q - 1
    lam = int(round(L ** (1.0 / k)))
    # float root is only a starting guess
    while lam ** k > L:
        lam -= 1
    while (lam + 1) ** k <= L:
        lam += 1
    return lam


@dataclass(frozen=True, eq=False)
class AlphaChain:
    """The q-1 binary sub-problems of a joint distribution.

    Attributes
    ----------
    dense : ndarray, shape (q-1, 2, n)
        ``dense[i, 0, y]`` = P(X = i+1, Y = y) / m_i and ``dense[i, 1, y]`` =
        P(X > i+1, Y = y) / m_i, over all outputs of the source.
    m : ndarray, shape (q-1,)
        m_i = P(X >= i+1); ``m[0]`` is exactly 1.
    tails : ndarray, shape (q, n)
        ``tails[i, y]`` = P(X >= i+1, Y = y).
    joints : list of JointDistribution
        Sub-problem i restricted to outputs with positive mass, ``cols[i]``.
    """

    dense: np.ndarray
    m: np.ndarray
    tails: np.ndarray
    joints: list
    cols: list

    def __len__(self):
        return len(self.joints)

    def views(self):
        return [to_binary_view(j) for j in self.joints]


def build_alpha_chain(joint) -> AlphaChain:
    """Split ``joint`` into its chain of conditional binary joints.

    ``joint`` may be a :class:`JointDistribution` or a raw (q, n) table; a raw
    table whose prefix events have zero probability raises DegenerateTail.
    """
    mass = joint.mass if isinstance(joint, JointDistribution) else np.asarray(joint, dtype=np.float64)
    q, n = mass.shape
    # suffix sums, accumulated from the last letter up (no subtraction)
    tails = np.empty((q, n))
    tails[q - 1] = mass[q - 1]
    for i in range(q - 2, -1, -1):
        tails[i] = mass[i] + tails[i + 1]
    m = np.empty(q - 1)
    m[0] = 1.0
    m[1:] = tails[1:q - 1].sum(axis=1)
    labels = joint.output_labels if isinstance(joint, JointDistribution) else tuple(range(n))
    dense = np.empty((q - 1, 2, n))
    joints, cols = [], []
    for i in range(q - 1):
        if m[i] <= 0:
            raise DegenerateTail(f"P(X >= {i + 1}) = 0")
        dense[i, 0] = mass[i] / m[i]
        dense[i, 1] = tails[i + 1] / m[i]
        if not (dense[i, 0].sum() > 0 and dense[i, 1].sum() > 0):
            raise DegenerateTail(f"sub-problem {i + 1} has a zero-probability input")
        c = np.flatnonzero(tails[i] > 0)
        cols.append(c)
        sub = labels if len(c) == n else tuple(labels[k] for k in c.tolist())
        joints.append(JointDistribution(dense[i][:, c], sub))
    return AlphaChain(dense, m, tails, joints, cols)
