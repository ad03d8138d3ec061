"""Finite joint distributions P_{X,Y}, entropy primitives and the binary posterior view.

All information quantities are in nats.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    DivergenceInfinite,
    NegativeEntry,
    NonStochastic,
    NotBinary,
    OutOfRange,
)

INPUT_TOL = 1e-9
SUM_TOL = 1e-12
COALESCE_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint probability table with rows indexed by input letters and columns by outputs.

    The constructor only validates. Use :func:`make_joint` or
    :meth:`from_mass` for externally produced tables that need pruning and
    renormalization.
    """

    mass: np.ndarray
    output_labels: tuple
    input_labels: tuple = None
    pruned_inputs: tuple = ()
    pruned_outputs: tuple = ()

    def __post_init__(self):
        mass = np.array(self.mass, dtype=np.float64)
        if mass.ndim != 2:
            raise ValueError("mass must be a 2-d table")
        if mass.shape[0] < 2:
            raise DegenerateInput(f"need at least two input letters, got {mass.shape[0]}")
        if np.any(mass < 0):
            raise NegativeEntry("joint distribution has negative entries")
        total = mass.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise NonStochastic(f"joint distribution sums to {total!r}")
        if np.any(mass.sum(axis=0) <= 0) or np.any(mass.sum(axis=1) <= 0):
            raise DegenerateInput("zero-probability symbols must be pruned")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)
        labels = tuple(self.output_labels)
        if len(labels) != mass.shape[1]:
            raise ValueError("output_labels length does not match mass columns")
        object.__setattr__(self, "output_labels", labels)
        inputs = self.input_labels
        if inputs is None:
            inputs = tuple(range(1, mass.shape[0] + 1))
        object.__setattr__(self, "input_labels", tuple(inputs))

    @classmethod
    def from_mass(cls, mass, output_labels=None, input_labels=None, tol=INPUT_TOL):
        """Validate a raw table, drop zero-marginal rows/columns, renormalize."""
        mass = np.array(mass, dtype=np.float64)
        if mass.ndim != 2:
            raise ValueError("mass must be a 2-d table")
        if np.any(mass < 0):
            raise NegativeEntry("joint distribution has negative entries")
        total = mass.sum()
        if abs(total - 1.0) > tol:
            raise NonStochastic(f"joint distribution sums to {total!r}")
        q, n = mass.shape
        if output_labels is None:
            output_labels = [str(j) for j in range(n)]
        if input_labels is None:
            input_labels = list(range(1, q + 1))
        rows = mass.sum(axis=1) > 0
        cols = mass.sum(axis=0) > 0
        pruned_in = tuple(lab for lab, keep in zip(input_labels, rows) if not keep)
        pruned_out = tuple(lab for lab, keep in zip(output_labels, cols) if not keep)
        if rows.sum() < 2:
            raise DegenerateInput(f"only {int(rows.sum())} input letter(s) have positive probability")
        kept = mass[np.ix_(rows, cols)]
        kept = kept / kept.sum()
        return cls(
            kept,
            tuple(lab for lab, keep in zip(output_labels, cols) if keep),
            tuple(lab for lab, keep in zip(input_labels, rows) if keep),
            pruned_in,
            pruned_out,
        )

    @property
    def q(self) -> int:
        return self.mass.shape[0]

    @property
    def n(self) -> int:
        return self.mass.shape[1]

    @property
    def p_x(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    @property
    def p_y(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def channel(self) -> np.ndarray:
        """Row-stochastic W(y|x)."""
        return self.mass / self.p_x[:, None]


def make_joint(input_dist, channel, output_labels=None) -> JointDistribution:
    """Form P_{X,Y}(x, y) = P_X(x) W(y|x) and prune zero-probability symbols.

    Parameters
    ----------
    input_dist : array_like, shape (q,)
    channel : array_like, shape (q, n)
        Row-stochastic transition matrix.
    output_labels : sequence, optional

    Raises
    ------
    NegativeEntry, NonStochastic, DegenerateInput
    """
    px = np.asarray(input_dist, dtype=np.float64)
    w = np.asarray(channel, dtype=np.float64)
    if px.ndim != 1 or w.ndim != 2 or w.shape[0] != px.shape[0]:
        raise ValueError("input_dist must have one entry per channel row")
    if np.any(px < 0) or np.any(w < 0):
        raise NegativeEntry("negative probability")
    if abs(px.sum() - 1.0) > INPUT_TOL:
        raise NonStochastic(f"input distribution sums to {px.sum()!r}")
    row_sums = w.sum(axis=1)
    bad = np.abs(row_sums - 1.0) > INPUT_TOL
    if np.any(bad):
        raise NonStochastic(f"channel rows {np.flatnonzero(bad).tolist()} are not stochastic")
    px = px / px.sum()
    w = w / row_sums[:, None]
    return JointDistribution.from_mass(px[:, None] * w, output_labels)


def _plogp(v: np.ndarray) -> float:
    v = v[v > 0]
    return float(np.sum(v * np.log(v)))


def entropy(p) -> float:
    """Shannon entropy of a probability array (any shape), 0 log 0 = 0."""
    return -_plogp(np.asarray(p, dtype=np.float64).ravel())


def mutual_information(joint: JointDistribution) -> float:
    """I(X;Y) in nats, summed term by term over positive cells."""
    m = joint.mass
    px = m.sum(axis=1)
    py = m.sum(axis=0)
    xs, ys = np.nonzero(m > 0)
    v = m[xs, ys]
    terms = v * (np.log(v) - np.log(px[xs]) - np.log(py[ys]))
    return max(float(np.sum(terms)), 0.0)


def conditional_entropy(joint: JointDistribution, given: str = "y") -> float:
    """H(X|Y) (given='y') or H(Y|X) (given='x')."""
    m = joint.mass
    marg = m.sum(axis=0) if given == "y" else m.sum(axis=1)
    return entropy(m) - entropy(marg)


def binary_entropy(p: float) -> float:
    """h2(p) in nats. Evaluated on min(p, 1-p) so that h2(p) == h2(1-p)."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"probability {p!r} outside [0, 1]")
    s = p if p <= 0.5 else 1.0 - p
    if s == 0.0:
        return 0.0
    return -s * math.log(s) - (1.0 - s) * math.log(1.0 - s)


def h2(p):
    """Vectorized binary entropy, same evaluation rule as :func:`binary_entropy`."""
    p = np.asarray(p, dtype=np.float64)
    s = np.where(p <= 0.5, p, 1.0 - p)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -s * np.log(s) - (1.0 - s) * np.log(1.0 - s)
    return np.where(s > 0, out, 0.0)


def binary_kl(p: float, r: float) -> float:
    """d2(p || r) = p ln(p/r) + (1-p) ln((1-p)/(1-r))."""
    if not (0.0 <= p <= 1.0 and 0.0 <= r <= 1.0):
        raise OutOfRange("probabilities must lie in [0, 1]")
    if (p > 0 and r == 0.0) or (p < 1 and r == 1.0):
        raise DivergenceInfinite(f"d2({p} || {r}) is infinite")
    total = 0.0
    if p > 0:
        total += p * math.log(p / r)
    if p < 1:
        total += (1.0 - p) * math.log((1.0 - p) / (1.0 - r))
    return max(total, 0.0)


@dataclass(frozen=True, eq=False)
class BinaryPosteriorChannel:
    """Binary-input channel seen through its output posteriors.

    ``mass[k]`` and ``post[k]`` describe entry ``k``; entries are sorted by
    posterior P(X = first input | Y). ``order`` lists source columns in sorted
    order and ``group[y]`` gives the entry that source column ``y`` belongs to.
    """

    mass: np.ndarray
    post: np.ndarray
    order: np.ndarray
    group: np.ndarray
    source: JointDistribution = field(repr=False)

    def __len__(self):
        return len(self.mass)

    @property
    def entries(self) -> list[tuple[float, float]]:
        return list(zip(self.mass.tolist(), self.post.tolist()))

    @property
    def original_index(self) -> np.ndarray:
        return self.order

    def to_joint(self) -> JointDistribution:
        """Joint over {0, 1} x entries (coalesced outputs become one column)."""
        mass = np.vstack([self.mass * self.post, self.mass * (1.0 - self.post)])
        return JointDistribution(mass, tuple(range(len(self.mass))), self.source.input_labels)

    def cond_entropy(self) -> float:
        """H(X|Y) = sum_k pi_k h2(p_k)."""
        return float(np.sum(self.mass * h2(self.post)))


def to_binary_view(joint: JointDistribution, coalesce: bool = True,
                   tol: float = COALESCE_TOL) -> BinaryPosteriorChannel:
    """Sort outputs by posterior of the first input letter, merging equal posteriors."""
    if joint.q != 2:
        raise NotBinary(f"binary view needs q = 2, got q = {joint.q}")
    m0 = joint.mass[0]
    py = joint.mass[0] + joint.mass[1]
    post = np.minimum(m0 / py, 1.0)
    order = np.argsort(post, kind="stable")
    sp = post[order]
    if coalesce and len(sp) > 1:
        starts = np.concatenate(([0], np.flatnonzero(np.diff(sp) > tol) + 1))
    else:
        starts = np.arange(len(sp))
    entry_of_sorted = np.repeat(np.arange(len(starts)), np.diff(np.append(starts, len(sp))))
    group = np.empty(len(sp), dtype=np.int64)
    group[order] = entry_of_sorted
    if len(starts) == len(sp):
        emass = py[order]
        epost = sp
    else:
        emass = np.add.reduceat(py[order], starts)
        epost = np.minimum(np.add.reduceat(m0[order], starts) / emass, 1.0)
    for arr in (emass, epost, order, group):
        arr.setflags(write=False)
    return BinaryPosteriorChannel(emass, epost, order, group, joint)


# --- file formats -----------------------------------------------------------

def joint_to_dict(joint: JointDistribution) -> dict:
    return {
        "q": joint.q,
        "labels": [str(lab) for lab in joint.output_labels],
        "pxy": joint.mass.tolist(),
    }


def joint_from_dict(doc: dict) -> JointDistribution:
    pxy = np.asarray(doc["pxy"], dtype=np.float64)
    if pxy.ndim != 2 or pxy.shape[0] != int(doc["q"]):
        raise ValueError("'pxy' must have q rows")
    labels = doc.get("labels")
    if labels is not None and len(labels) != pxy.shape[1]:
        raise ValueError("'labels' length does not match 'pxy' columns")
    return JointDistribution.from_mass(pxy, labels)


def read_channel(path) -> JointDistribution:
    with open(path) as fh:
        return joint_from_dict(json.load(fh))


def write_channel(joint: JointDistribution, path) -> None:
    with open(path, "w") as fh:
        json.dump(joint_to_dict(joint), fh)
        fh.write("\n")


def write_joint_csv(joint: JointDistribution, path, input_labels: Sequence = None) -> None:
    """CSV export with header ``x,y,p``; one row per positive cell."""
    inputs = input_labels or joint.input_labels
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "p"])
        for i, x in enumerate(inputs):
            for j, y in enumerate(joint.output_labels):
                v = joint.mass[i, j]
                if v > 0:
                    w.writerow([x, y, repr(float(v))])
