"""Seeded property suites behind ``chanquant verify``.

Every suite returns a :class:`SuiteReport` listing each invariant with the
largest residual seen. A residual is ``lhs - rhs`` for an inequality
``lhs <= rhs`` and an absolute difference for an identity, so an invariant
passes when its residual is at most its tolerance. The first instance that
violates an invariant is kept in a replayable form.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .binary_degrade import greedy_merge
from .binary_upgrade import greedy_split
from .bounds import (
    brute_force_delta_I,
    bound,
    concavity_gap_array,
    dp_optimal_degrade,
    exhaustive_interval_optimum,
    lemma_bound_array,
    sphere_packing_witnesses,
    sup_gap_array,
)
from .channels import random_channel, uniform01
from .dist import h2, joint_to_dict, to_binary_view
from .onehot_degrade import degrade
from .onehot_upgrade import upgrade, verify_upgrade_consistency

SUITES = ("lemma", "sphere", "claims", "bounds", "oracle")


def instance_seed(seed: int, k: int) -> int:
    """Seed of the k-th instance of a suite run."""
    return seed * 1_000_003 + k


@dataclass
class Invariant:
    name: str
    tol: float
    residual: float = -np.inf
    count: int = 0

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def line(self) -> str:
        return (f"{self.name}: max_residual={self.residual:.6g} tol={self.tol:g} "
                f"n={self.count} {'PASS' if self.passed else 'FAIL'}")


@dataclass
class SuiteReport:
    suite: str
    seed: int
    invariants: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def check(self, name: str, residual: float, tol: float = 0.0, instance=None) -> None:
        inv = self.invariants.setdefault(name, Invariant(name, tol))
        residual = float(residual)
        inv.count += 1
        if residual > inv.residual or np.isnan(residual):
            inv.residual = residual
        if (residual > tol or np.isnan(residual)) and instance is not None:
            if not any(f["invariant"] == name for f in self.failures):
                self.failures.append({"invariant": name, "residual": residual, **instance})

    @property
    def passed(self) -> bool:
        return all(inv.passed for inv in self.invariants.values())

    def lines(self) -> list:
        return [inv.line() for inv in self.invariants.values()]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "invariants": {k: {"max_residual": v.residual, "tol": v.tol, "count": v.count}
                           for k, v in self.invariants.items()},
            "failures": self.failures,
        }


def _draw_int(seed: int, count: int, lo: int, hi: int) -> np.ndarray:
    """``count`` integers uniform on lo..hi inclusive."""
    return lo + np.floor(uniform01(seed, count) * (hi - lo + 1)).astype(np.int64)


# --- suites -----------------------------------------------------------------

def lemma_suite(seed: int = 1, points: int = 10**6, pairs: int = 50, scan: int = 10**4,
                chunk: int = 250_000) -> SuiteReport:
    """Concavity gap against its closed-form bound; ternary search against a grid scan."""
    rep = SuiteReport("lemma", seed)
    done = 0
    block = 0
    while done < points:
        k = min(chunk, points - done)
        u = uniform01(instance_seed(seed, block), 3 * k).reshape(3, k)
        p0, p1 = np.minimum(u[0], u[1]), np.maximum(u[0], u[1])
        gap = concavity_gap_array(p0, p1, u[2])
        res = gap - lemma_bound_array(p0, p1)
        j = int(np.argmax(res))
        rep.check("gap <= lemma bound", res[j], 0.0,
                  {"p0": float(p0[j]), "p1": float(p1[j]), "alpha": float(u[2][j])})
        done += k
        block += 1
    u = uniform01(instance_seed(seed, block), 2 * pairs).reshape(2, pairs)
    p0, p1 = np.minimum(u[0], u[1]), np.maximum(u[0], u[1])
    _, top = sup_gap_array(p0, p1)
    grid = np.linspace(0.0, 1.0, scan)
    for a, b, v in zip(p0, p1, top):
        scanned = float(np.max(concavity_gap_array(a, b, grid)))
        rep.check("sup_gap vs grid scan", abs(v - scanned), 1e-8, {"p0": float(a), "p1": float(b)})
        rep.check("sup_gap <= lemma bound", v - float(lemma_bound_array(a, b)), 0.0,
                  {"p0": float(a), "p1": float(b)})
    return rep


def sphere_suite(seed: int = 1, vectors: int = 1000, max_n: int = 1000) -> SuiteReport:
    """Some adjacent pair of n+1 sorted posteriors has sup-gap at most 8/(n+1)^2."""
    rep = SuiteReport("sphere", seed)
    sizes = _draw_int(instance_seed(seed, 0), vectors, 1, max_n)
    vecs = [np.sort(uniform01(instance_seed(seed, k + 1), n + 1)) for k, n in enumerate(sizes.tolist())]
    vecs += [np.arange(n + 1) / n for n in (1, 10, 100, max_n)]
    for p, (_, v) in zip(vecs, sphere_packing_witnesses(vecs)):
        n = len(p) - 1
        rep.check("witness <= 8/(n+1)^2", v - 8.0 / (n + 1) ** 2, 0.0,
                  {"n": n, "posteriors": p.tolist()})
    return rep


def claims_suite(seed: int = 1, count: int = 100, max_n: int = 6, max_q: int = 3,
                 lam: int = 2, tol: float = 1e-10) -> SuiteReport:
    """Structural properties of the materialized P*_{X,Z,Y} on small instances."""
    rep = SuiteReport("claims", seed)
    qs = _draw_int(instance_seed(seed, 0), count, 2, max_q)
    ns = _draw_int(instance_seed(seed, 1), count, 2, max_n)
    for k, (q, n) in enumerate(zip(qs.tolist(), ns.tolist())):
        s = instance_seed(seed, k + 2)
        J = random_channel(q, n, s)
        L = lam ** (q - 1)
        r = verify_upgrade_consistency(upgrade(J, L), J, tol)
        inst = {"q": q, "n": n, "seed": s, "L": L, "joint": joint_to_dict(J)}
        rep.check("sum to one", r["sum"], tol, inst)
        rep.check("marginal P_XY", r["marginal"], tol, inst)
        rep.check("markov X-Z-Y", r["markov"], tol, inst)
        rep.check("sub-problem embedding", r["embedding"], tol, inst)
        rep.check("assembled P*_XZ", r["pxz"], tol, inst)
        rep.check("delta_I <= bound", r["delta_I"] - r["bound"], tol, inst)
    return rep


def bounds_suite(seed: int = 1, count: int = 20, max_n: int = 512, max_q: int = 5,
                 tol: float = 1e-12) -> SuiteReport:
    """Global and per-step bounds of the binary and one-hot algorithms."""
    rep = SuiteReport("bounds", seed)
    Ls = [2 ** k for k in range(1, 9) if 2 ** k < max_n]
    for k in range(count):
        s = instance_seed(seed, k)
        J = random_channel(2, max_n, s)
        v = to_binary_view(J)
        inst = {"q": 2, "n": max_n, "seed": s}
        for L in Ls:
            up = greedy_split(v, L)
            down = greedy_merge(v, L)
            rep.check("binary up <= 128/L^2", up.delta_I - 128.0 / L**2, tol, {**inst, "L": L})
            rep.check("binary down <= 64/L^2", down.delta_I - 64.0 / L**2, tol, {**inst, "L": L})
            if len(up.step_costs):
                rep.check("split step <= 256/m^3",
                          np.max(up.step_costs - 256.0 / up.step_sizes.astype(float) ** 3), tol,
                          {**inst, "L": L})
                rep.check("split costs sum to delta_I", abs(up.cost_sum - up.delta_I), 1e-10,
                          {**inst, "L": L})
            if len(down.step_costs):
                rep.check("merge step <= 128/m^3",
                          np.max(down.step_costs - 128.0 / down.step_sizes.astype(float) ** 3), tol,
                          {**inst, "L": L})
                rep.check("merge costs sum to delta_I", abs(down.cost_sum - down.delta_I), 1e-10,
                          {**inst, "L": L})
    for q in range(3, max_q + 1):
        for k in range(max(1, count // 4)):
            s = instance_seed(seed, 1000 * q + k)
            J = random_channel(q, min(max_n, 500), s)
            for lam in range(2, 9):
                L = lam ** (q - 1)
                inst = {"q": q, "n": J.n, "seed": s, "L": L}
                up = upgrade(J, L)
                down = degrade(J, L)
                rep.check("one-hot up <= 128(q-1)/lam^2", up.delta_I - bound("onehot-up", q, L), 1e-10, inst)
                rep.check("one-hot down <= 64(q-1)/lam^2", down.delta_I - bound("onehot-down", q, L), 1e-10, inst)
    return rep


def oracle_suite(seed: int = 1, count: int = 500, max_n: int = 64, max_L: int = 8,
                 exhaustive_n: int = 10) -> SuiteReport:
    """Greedy merge against the DP optimum, the DP against exhaustive enumeration."""
    rep = SuiteReport("oracle", seed)
    ns = _draw_int(instance_seed(seed, 0), count, 2, max_n)
    Ls = _draw_int(instance_seed(seed, 1), count, 1, max_L)
    for k, (n, L) in enumerate(zip(ns.tolist(), Ls.tolist())):
        s = instance_seed(seed, k + 2)
        J = random_channel(2, n, s)
        v = to_binary_view(J)
        inst = {"n": n, "L": L, "seed": s, "joint": joint_to_dict(J)}
        g = greedy_merge(v, L)
        d = dp_optimal_degrade(v, L)
        rep.check("dp <= greedy", d.delta_I - g.delta_I, 1e-12, inst)
        rep.check("greedy <= 64/L^2", g.delta_I - 64.0 / L**2, 1e-12, inst)
        rep.check("brute-force delta_I", abs(brute_force_delta_I(J, g.pxz) - g.delta_I), 1e-10, inst)
        if len(v) <= exhaustive_n:
            h_dp = float(np.sum(d.pxz.p_y * h2(d.pxz.mass[0] / d.pxz.p_y)))
            rep.check("dp = exhaustive", abs(h_dp - exhaustive_interval_optimum(v, L)), 1e-12, inst)
    return rep


def run_suite(name: str, seed: int = 1, **caps) -> SuiteReport:
    fn = {"lemma": lemma_suite, "sphere": sphere_suite, "claims": claims_suite,
          "bounds": bounds_suite, "oracle": oracle_suite}.get(name)
    if fn is None:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return fn(seed, **{k: v for k, v in caps.items() if v is not None})
