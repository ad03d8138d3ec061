"""Deterministic channel generators.

``random_channel`` draws from SplitMix64 (Steele, Lea and Flood's 64-bit
mixer over a Weyl sequence), implemented here with numpy uint64 arithmetic
so that a seed reproduces bit for bit on any platform:

    z = seed + (k + 1) * 0x9E3779B97F4A7C15          (mod 2^64)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

for the k-th draw. A uniform double is (z >> 11) * 2^-53 and an
exponential variate is -log1p(-u).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dist import JointDistribution, read_channel
from .errors import OutOfRange, TooLarge

GRID_CAP = 5_000_000

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Draws ``start .. start + count - 1`` of the SplitMix64 stream for ``seed``."""
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed % 2**64) + k * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniform01(seed: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits."""
    return (splitmix64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def compositions(q: int, M: int) -> np.ndarray:
    """All (a_1, ..., a_q) of non-negative integers summing to M, lexicographic order."""
    k = q - 1
    if k == 0:
        return np.array([[M]], dtype=np.int64)
    # stars and bars: bar positions c_1 < ... < c_k in 0..M+k-1
    bars = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(M + k), k)),
                       dtype=np.int64).reshape(-1, k)
    edges = np.column_stack((np.full(len(bars), -1), bars, np.full(len(bars), M + k)))
    return np.diff(edges, axis=1) - 1


def _n_compositions(q: int, M: int) -> int:
    from math import comb
    return comb(M + q - 1, q - 1)


def hard_grid_channel(q: int, M: int, cap: int = GRID_CAP) -> JointDistribution:
    """Outputs indexed by the compositions a of M into q parts, posterior a / M, uniform output mass.

    Posteriors cover the simplex on a regular grid, so no small output
    alphabet can represent them all well.
    """
    if q < 2 or M < q:
        raise OutOfRange(f"need q >= 2 and M >= q, got q={q}, M={M}")
    N = _n_compositions(q, M)
    if N > cap:
        raise TooLarge(f"{N} outputs exceeds cap {cap}")
    a = compositions(q, M)
    mass = a.T.astype(np.float64) / (M * N)
    labels = ["-".join(map(str, row)) for row in a.tolist()]
    return JointDistribution.from_mass(mass, labels)


def random_channel(q: int, n: int, seed: int) -> JointDistribution:
    """Posteriors uniform on the simplex (normalized exponentials), output masses 1/n.

    Draw ``y * q + x`` of the SplitMix64 stream feeds entry (x, y).
    """
    if q < 2 or n < 1:
        raise OutOfRange(f"need q >= 2 and n >= 1, got q={q}, n={n}")
    e = -np.log1p(-uniform01(seed, q * n)).reshape(n, q).T
    post = e / e.sum(axis=0)
    return JointDistribution.from_mass(post / n, [str(j) for j in range(n)])


def named_channel(kind: str, q: int) -> JointDistribution:
    """``noiseless``: identity channel; ``useless``: one output. Both with uniform input."""
    if q < 2:
        raise OutOfRange("q must be >= 2")
    if kind == "noiseless":
        return JointDistribution.from_mass(np.eye(q) / q, [str(j) for j in range(q)])
    if kind == "useless":
        return JointDistribution.from_mass(np.full((q, 1), 1.0 / q), ["0"])
    raise OutOfRange(f"unknown channel kind {kind!r}")


GENERATOR_KINDS = ("hard-grid", "random", "noiseless", "useless", "custom-file")


@dataclass(frozen=True)
class GeneratorSpec:
    """``kind:q:param:seed``; ``param`` is M for hard-grid, n for random, a path for custom-file."""

    kind: str
    q: int = 2
    param: str = "0"
    seed: int = 0

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        parts = text.split(":")
        if not parts[0]:
            raise ValueError(f"bad generator spec {text!r}")
        kind = parts[0]
        if kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {kind!r}; choose from {', '.join(GENERATOR_KINDS)}")
        if kind == "custom-file":
            return cls(kind, 0, ":".join(parts[1:]), 0)
        try:
            q = int(parts[1]) if len(parts) > 1 else 2
            param = parts[2] if len(parts) > 2 else "0"
            seed = int(parts[3]) if len(parts) > 3 else 0
        except ValueError as exc:
            raise ValueError(f"bad generator spec {text!r}") from exc
        return cls(kind, q, param, seed)

    def build(self) -> JointDistribution:
        if self.kind == "hard-grid":
            return hard_grid_channel(self.q, int(self.param))
        if self.kind == "random":
            return random_channel(self.q, int(self.param), self.seed)
        if self.kind in ("noiseless", "useless"):
            return named_channel(self.kind, self.q)
        if self.kind == "custom-file":
            return read_channel(self.param)
        raise OutOfRange(f"unknown generator kind {self.kind!r}")
