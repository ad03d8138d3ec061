import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chanquant.binary_degrade import greedy_merge
from chanquant.bounds import (
    DP_CAP,
    bound,
    bound_report,
    brute_force_delta_I,
    concavity_gap,
    concavity_gap_array,
    dp_optimal_degrade,
    exhaustive_interval_optimum,
    lemma_bound,
    sphere_packing_witness,
    sup_gap,
    sup_gap_closed_form,
)
from chanquant.channels import named_channel, random_channel, uniform01
from chanquant.dist import JointDistribution, to_binary_view
from chanquant.errors import NotSorted, OutOfRange, TooLargeForOracle

from conftest import h2_ref, random_view, view_of

LN2 = math.log(2)


def test_bound_formulas():
    assert bound("binary-up", 2, 4) == 8.0
    assert bound("binary-down", 2, 4) == 4.0
    assert bound("per-step-up", 2, 4) == 4.0
    assert bound("per-step-down", 2, 4) == 2.0
    assert bound("onehot-up", 3, 10) == pytest.approx(256 / 9)
    assert bound("onehot-up", 3, 10) / LN2 == pytest.approx(41.0367, abs=1e-4)
    assert bound("onehot-down", 3, 30) == pytest.approx(5.12)
    assert bound("onehot-down", 3, 30) / LN2 == pytest.approx(7.3866, abs=1e-4)
    assert bound_report("binary-up", 2, 4).value == 8.0
    with pytest.raises(OutOfRange):
        bound("onehot-up", 3, 3)
    with pytest.raises(OutOfRange):
        bound("sideways", 2, 4)


def test_concavity_gap_examples():
    assert concavity_gap(0.3, 0.3, 0.7) == 0.0
    assert concavity_gap(0.0, 1.0, 0.5) == pytest.approx(LN2, abs=1e-15)
    want = h2_ref(0.5) - 0.5 * h2_ref(0.2) - 0.5 * h2_ref(0.8)
    assert concavity_gap(0.2, 0.8, 0.5) == pytest.approx(want, abs=1e-15)
    assert concavity_gap(0.2, 0.8, 0.5) == pytest.approx(0.1927448, abs=1e-7)
    with pytest.raises(NotSorted):
        concavity_gap(0.8, 0.2, 0.5)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_gap_matches_entropy_form(a, b, alpha):
    p0, p1 = min(a, b), max(a, b)
    direct = h2_ref(alpha * p0 + (1 - alpha) * p1) - alpha * h2_ref(p0) - (1 - alpha) * h2_ref(p1)
    assert concavity_gap(p0, p1, alpha) == pytest.approx(direct, abs=1e-12)
    assert concavity_gap(p0, p1, alpha) >= 0.0


def test_lemma_bound_examples():
    assert lemma_bound(0.2, 0.8) == pytest.approx(min(0.6, 0.36 / 0.4))
    assert lemma_bound(0.0, 1.0) == 1.0
    assert lemma_bound(0.4, 0.4) == 0.0
    with pytest.raises(NotSorted):
        lemma_bound(0.5, 0.4)


def test_sup_gap_examples():
    assert sup_gap(0.3, 0.3)[1] == 0.0
    a, v = sup_gap(0.0, 1.0)
    # the maximizer is only resolvable to about sqrt(machine epsilon)
    assert a == pytest.approx(0.5, abs=1e-7) and v == pytest.approx(LN2, abs=1e-15)
    assert sup_gap(0.2, 0.8)[1] <= lemma_bound(0.2, 0.8)
    with pytest.raises(NotSorted):
        sup_gap(0.9, 0.1)


@given(st.floats(0, 1), st.floats(0, 1))
def test_sup_gap_against_scan_and_closed_form(a, b):
    p0, p1 = min(a, b), max(a, b)
    _, v = sup_gap(p0, p1)
    grid = np.linspace(0, 1, 10**4)
    scan = float(np.max(concavity_gap_array(p0, p1, grid[::10])))
    assert v >= scan - 1e-12
    assert v <= lemma_bound(p0, p1)
    if 0 < p0 < p1 < 1:
        assert sup_gap_closed_form(p0, p1)[1] == pytest.approx(v, abs=1e-9)


def test_sphere_packing_examples():
    assert sphere_packing_witness([0.0, 1.0]) == (1, pytest.approx(LN2))
    p = np.arange(101) / 100
    assert sphere_packing_witness(p)[1] <= 8 / 101**2
    pts = np.sort(uniform01(50, 51))
    i, v = sphere_packing_witness(pts)
    assert v <= 8 / 51**2 and 1 <= i <= 50
    # witness is the minimizing pair
    assert v == pytest.approx(min(sup_gap(a, b)[1] for a, b in zip(pts, pts[1:])), abs=1e-15)
    with pytest.raises(NotSorted):
        sphere_packing_witness([0.5, 0.2])
    with pytest.raises(OutOfRange):
        sphere_packing_witness([0.5])


def test_dp_examples():
    v = view_of([(0.25, 0.1), (0.25, 0.2), (0.25, 0.8), (0.25, 0.9)])
    assert dp_optimal_degrade(v, 4).delta_I == pytest.approx(0.0, abs=1e-15)
    assert dp_optimal_degrade(v, 2).labels.tolist() == [0, 0, 1, 1]
    # the 3 interval 2-partitions, enumerated by hand
    cost = lambda grp: sum(g[0] for g in grp) * h2_ref(sum(m * p for m, p in grp) / sum(m for m, _ in grp))
    e = v.entries
    parts = [(e[:1], e[1:]), (e[:2], e[2:]), (e[:3], e[3:])]
    best = min(range(3), key=lambda k: cost(parts[k][0]) + cost(parts[k][1]))
    assert best == 1


def test_dp_cap():
    with pytest.raises(TooLargeForOracle):
        dp_optimal_degrade(to_binary_view(random_channel(2, DP_CAP + 1, 0)), 4)


@given(st.integers(1, 10), st.integers(1, 6), st.integers(0, 2**32))
def test_dp_matches_exhaustive(n, L, seed):
    v = random_view(np.random.default_rng(seed), n)
    d = dp_optimal_degrade(v, L)
    h = float(np.sum(d.pxz.p_y * [h2_ref(min(p, 1.0)) for p in d.pxz.mass[0] / d.pxz.p_y]))
    assert h == pytest.approx(exhaustive_interval_optimum(v, L), abs=1e-12)
    assert d.delta_I <= greedy_merge(v, L).delta_I + 1e-12


def test_brute_force_examples():
    J = random_channel(2, 30, 1)
    assert brute_force_delta_I(J, J) == 0.0
    noiseless = named_channel("noiseless", 2)
    useless = named_channel("useless", 2)
    assert brute_force_delta_I(noiseless, useless) == pytest.approx(LN2, abs=1e-15)
    out = greedy_merge(to_binary_view(J), 5)
    assert brute_force_delta_I(J, out.pxz) == pytest.approx(out.delta_I, abs=1e-10)


def test_lemma_bound_tiny_gap_does_not_underflow():
    p0, p1 = 5e-324, 2.2250738585e-313
    # (p1 - p0)^2 / (2 p0) is far above the gap even though the square underflows
    assert lemma_bound(p0, p1) == p1 - p0
    assert sup_gap(p0, p1)[1] <= lemma_bound(p0, p1)
    assert lemma_bound(1e-200, 2e-200) == pytest.approx(0.5e-200, rel=1e-15)
