"""Upgrading for general input alphabets through the one-hot reduction.

Each conditional binary problem is upgraded by greedy splitting with budget
lam = floor(L^(1/(q-1))); the q-1 split maps are then combined into a joint
P*_{X,Z} over tuples z = (z_1, ..., z_{q-1}).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .binary_upgrade import (
    assemble_columns,
    greedy_split,
    onehot_rows,
    unpack_keys,
)
from .bounds import bound
from .dist import JointDistribution, mutual_information
from .errors import BudgetTooSmall, SupportTooLarge, TooLarge
from .onehot import AlphaChain, build_alpha_chain, lambda_of

MATERIALIZE_CAP = 10**6


@dataclass(frozen=True, eq=False)
class OneHotUpgradeResult:
    outcomes: list = field(repr=False)
    chain: AlphaChain = field(repr=False)
    z_labels: tuple = field(repr=False)
    pstar: JointDistribution = field(repr=False)
    delta_I: float
    bound: float
    lam: int
    elapsed: float

    @property
    def L_actual(self) -> int:
        return self.pstar.n

    def to_dict(self) -> dict:
        """JSON-ready summary; information values in nats, letters and ids 1-based."""
        rows = []
        for x in range(self.pstar.q):
            for j, z in enumerate(self.z_labels):
                v = float(self.pstar.mass[x, j])
                if v > 0:
                    rows.append([x + 1, [c + 1 for c in z], v])
        return {
            "mode": "upgrade",
            "q": self.pstar.q,
            "lambda": self.lam,
            "L_actual": self.L_actual,
            "delta_I": float(self.delta_I),
            "bound": float(self.bound),
            "surviving_posteriors": [o.z_post.tolist() for o in self.outcomes],
            "pxz": rows,
        }


def coordinate_betas(chain: AlphaChain, outcomes) -> list:
    """Per-coordinate (left, right, weight) arrays over all source columns.

    Columns outside a sub-problem's support go to symbol 0 with weight 1;
    they carry no probability under the conditioning event.
    """
    n = chain.dense.shape[2]
    betas = []
    for cols, out in zip(chain.cols, outcomes):
        left = np.zeros(n, dtype=np.int64)
        right = np.zeros(n, dtype=np.int64)
        weight = np.ones(n)
        lo, hi, a = out.column_betas()
        left[cols], right[cols], weight[cols] = lo, hi, a
        betas.append((left, right, weight))
    return betas


def assemble_pstar(chain: AlphaChain, outcomes, source: JointDistribution):
    """Combine the per-coordinate split maps into P*_{X,Z}.

    Each output y reaches at most 2^(q-1) tuples; only tuples with positive
    mass are kept.

    Returns
    -------
    pstar : JointDistribution
    z_labels : tuple of tuples
        Coordinate ranks (0-based) of each column of ``pstar``.
    """
    betas = coordinate_betas(chain, outcomes)
    for lo, hi, a in betas:
        if np.any((a < 0) | (a > 1)):
            raise SupportTooLarge("split weights outside [0, 1]")
    sizes = [o.L for o in outcomes]
    keys, p_z = assemble_columns(source.p_y, betas, sizes)
    coords = unpack_keys(keys, sizes)
    mass = onehot_rows(p_z, coords, [o.z_post for o in outcomes])
    z_labels = tuple(tuple(int(v) for v in c) for c in coords)
    return JointDistribution(mass, z_labels, source.input_labels), z_labels


def upgrade(joint: JointDistribution, L: int) -> OneHotUpgradeResult:
    """Upgrade ``joint`` to an output alphabet of at most ``L`` symbols."""
    t0 = time.perf_counter()
    q = joint.q
    if L < 1:
        raise BudgetTooSmall(f"upgrading needs L >= 1, got {L}")
    lam = lambda_of(L, q)
    if lam < 2:
        raise BudgetTooSmall(f"L={L} gives lambda={lam} < 2 for q={q}")
    chain = build_alpha_chain(joint)
    outcomes = [greedy_split(v, lam) for v in chain.views()]
    pstar, z_labels = assemble_pstar(chain, outcomes, joint)
    delta = mutual_information(pstar) - mutual_information(joint)
    return OneHotUpgradeResult(outcomes, chain, z_labels, pstar, delta,
                               bound("onehot-up", q, L), lam, time.perf_counter() - t0)


def materialize(result: OneHotUpgradeResult, source: JointDistribution) -> np.ndarray:
    """Full P*(x, z, y) table, evaluated term by term from the split maps.

    Shape is (q, |Z|, n) with Z ordered as ``result.z_labels``.
    """
    q, n = source.q, source.n
    if n * 2 ** (q - 1) > MATERIALIZE_CAP:
        raise TooLarge(f"{n} outputs x 2^{q - 1} tuples exceeds {MATERIALIZE_CAP}")
    betas = coordinate_betas(result.chain, result.outcomes)
    posts = [o.z_post for o in result.outcomes]
    z = np.array(result.z_labels, dtype=np.int64).reshape(-1, q - 1)
    # beta^{(i)}(z_i | y) for every (z, y)
    pzy = np.broadcast_to(source.p_y, (len(z), n)).copy()
    for i, (lo, hi, a) in enumerate(betas):
        zi = z[:, i][:, None]
        pzy *= np.where(zi == lo[None, :], a[None, :], 0.0) + \
            np.where((zi == hi[None, :]) & (lo != hi)[None, :], 1.0 - a[None, :], 0.0)
    # gamma chain: x = i needs X_1..X_{i-1} = 0 and X_i = 1
    out = np.empty((q, len(z), n))
    for x in range(q):
        g = np.ones(len(z))
        for i in range(q - 1):
            b = posts[i][z[:, i]]
            g = g * (b if i == x else 1.0 - b)
            if i == x:
                break
        out[x] = g[:, None] * pzy
    return out


def verify_upgrade_consistency(result: OneHotUpgradeResult, source: JointDistribution,
                               tol: float = 1e-10) -> dict:
    """Residuals of the structural properties of P*_{X,Z,Y}.

    Keys: ``sum`` (total mass minus one), ``marginal`` (sum over z against
    P_{X,Y}), ``markov`` (P*(x|z,y) against P*(x|z)), ``embedding``
    (conditional sub-problem laws against the split outcomes), ``pxz``
    (materialized against assembled P*_{X,Z}), ``delta_I`` and ``bound``,
    and ``passed``.
    """
    full = materialize(result, source)
    q = source.q
    rep = {}
    rep["sum"] = abs(full.sum() - 1.0)
    rep["marginal"] = float(np.max(np.abs(full.sum(axis=1) - source.mass)))
    pxz = full.sum(axis=2)
    rep["pxz"] = float(np.max(np.abs(pxz - result.pstar.mass)))
    pzy = full.sum(axis=0)
    pz = pzy.sum(axis=1)
    ok = pzy > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_zy = np.where(ok[None], full / np.where(ok, pzy, 1.0)[None], 0.0)
        cond_z = pxz / np.where(pz > 0, pz, 1.0)[None]
    rep["markov"] = float(np.max(np.where(ok[None], np.abs(cond_zy - cond_z[:, :, None]), 0.0)))
    z = np.array(result.z_labels, dtype=np.int64).reshape(-1, q - 1)
    emb = 0.0
    for j, out in enumerate(result.outcomes):
        # P(X_j, Z_j, Y | X >= j): rows x = j (X_j = 1) and x > j (X_j = 0)
        cond = full[j:].sum(axis=0)
        pcond = cond.sum()
        lhs = np.zeros((2, out.L, source.n))
        np.add.at(lhs[0], z[:, j], full[j])
        np.add.at(lhs[1], z[:, j], cond - full[j])
        lhs /= pcond
        rhs = np.zeros_like(lhs)
        lo, hi, a = coordinate_betas(result.chain, result.outcomes)[j]
        ay = result.chain.tails[j] / result.chain.m[j]
        b = out.z_post
        cols = np.arange(source.n)
        for target, w in ((lo, a), (hi, 1.0 - a)):
            keep = w > 0
            t, c, v = target[keep], cols[keep], (ay * w)[keep]
            np.add.at(rhs[0], (t, c), v * b[t])
            np.add.at(rhs[1], (t, c), v * (1.0 - b[t]))
        emb = max(emb, float(np.max(np.abs(lhs - rhs))))
    rep["embedding"] = emb
    rep["delta_I"] = float(result.delta_I)
    rep["bound"] = float(result.bound)
    rep["passed"] = bool(max(rep["sum"], rep["marginal"], rep["markov"], rep["embedding"],
                             rep["pxz"]) <= tol and result.delta_I <= result.bound + tol)
    return rep

