import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chanquant.binary_degrade import apply_quantizer, greedy_merge, merge_cost
from chanquant.channels import random_channel
from chanquant.dist import JointDistribution, mutual_information, to_binary_view
from chanquant.errors import BudgetTooSmall, PartialQuantizer, ZeroMass

from conftest import h2_ref, joint_from_rng, mi_ref, random_view, view_of


def test_merge_cost_examples():
    assert merge_cost(0.3, 0.4, 0.2, 0.4) == 0.0
    want = 0.5 * (h2_ref(0.5) - 0.5 * h2_ref(0.2) - 0.5 * h2_ref(0.8))
    assert merge_cost(0.25, 0.2, 0.25, 0.8) == pytest.approx(want, abs=1e-15)
    assert merge_cost(0.25, 0.2, 0.25, 0.8) == pytest.approx(0.0963724, abs=1e-7)
    assert merge_cost(0.5, 0.0, 0.5, 1.0) == pytest.approx(math.log(2), abs=1e-15)
    with pytest.raises(ZeroMass):
        merge_cost(0.0, 0.2, 0.5, 0.3)


def test_identity():
    v = view_of([(0.5, 0.2), (0.5, 0.7)])
    out = greedy_merge(v, 2)
    assert out.delta_I == 0.0 and out.L == 2


def test_duplicate_posteriors_merge_free():
    v = view_of([(0.25, 0.2), (0.25, 0.2), (0.25, 0.8), (0.25, 0.8)])
    out = greedy_merge(v, 2)
    assert out.labels.tolist() == [0, 0, 1, 1]
    assert out.delta_I == pytest.approx(0.0, abs=1e-15)


def test_random_512_bound():
    v = to_binary_view(random_channel(2, 512, 3))
    assert greedy_merge(v, 16).delta_I <= 0.25


def test_budget():
    with pytest.raises(BudgetTooSmall):
        greedy_merge(view_of([(0.5, 0.2), (0.5, 0.7)]), 0)
    out = greedy_merge(view_of([(0.5, 0.2), (0.5, 0.7)]), 1)
    assert out.L == 1 and out.delta_I == pytest.approx(mi_ref(out.view.source.mass), abs=1e-15)


def test_apply_quantizer():
    J = joint_from_rng(np.random.default_rng(5), 3, 6)
    same, _ = apply_quantizer(J, np.arange(6))
    np.testing.assert_array_equal(same.mass, J.mass)
    const, _ = apply_quantizer(J, np.zeros(6, dtype=int))
    assert const.n == 1 and mutual_information(const) == 0.0
    f = np.array([[0, 1], [1, 0], [0, 1], [2, 2], [1, 0], [0, 0]])
    agg, tuples = apply_quantizer(J, f)
    want = {}
    for y, t in enumerate(map(tuple, f)):
        want[t] = want.get(t, 0) + J.mass[:, y]
    assert [tuple(t) for t in tuples] == sorted(want)
    np.testing.assert_allclose(agg.mass, np.array([want[k] for k in sorted(want)]).T, atol=1e-15)
    with pytest.raises(PartialQuantizer):
        apply_quantizer(J, np.arange(5))
    with pytest.raises(PartialQuantizer):
        apply_quantizer(J, -np.ones(6, dtype=int))


def test_quantizer_csv(tmp_path):
    v = view_of([(0.25, 0.2), (0.25, 0.2), (0.25, 0.8), (0.25, 0.8)])
    greedy_merge(v, 2).write_csv(tmp_path / "q.csv")
    lines = (tmp_path / "q.csv").read_text().splitlines()
    assert lines[0] == "y,z" and {l.split(",")[1] for l in lines[1:]} == {"1", "2"}


@given(st.integers(2, 64), st.integers(1, 10), st.integers(0, 2**32))
def test_merge_invariants(n, L, seed):
    v = random_view(np.random.default_rng(seed), n)
    out = greedy_merge(v, L)
    lab = out.labels
    # contiguous, surjective, ascending
    assert lab[0] == 0 and np.all(np.diff(lab) >= 0) and np.all(np.diff(lab) <= 1)
    assert out.L == min(L, len(v))
    # cluster mass and posterior
    cm = np.bincount(lab, weights=v.mass)
    cp = np.bincount(lab, weights=v.mass * v.post) / cm
    np.testing.assert_allclose(out.pxz.p_y, cm, atol=1e-12, rtol=0)
    np.testing.assert_allclose(out.pxz.mass[0] / out.pxz.p_y, cp, atol=1e-12, rtol=0)
    assert out.delta_I >= -1e-12
    assert out.delta_I == pytest.approx(mi_ref(v.source.mass) - mi_ref(out.pxz.mass), abs=1e-12)
    assert out.cost_sum == pytest.approx(out.delta_I, abs=1e-10)
    assert np.all(out.step_costs <= 128.0 / out.step_sizes.astype(float) ** 3 + 1e-12)
    assert out.delta_I <= 64.0 / L**2 + 1e-12


def test_ties_lowest_left():
    # dyadic posteriors symmetric about 1/2: mirrored pairs cost exactly the same
    ps = [0.0, 0.25, 0.5, 0.75, 1.0]
    v = view_of([(0.2, p) for p in ps])
    costs = [merge_cost(0.2, ps[i], 0.2, ps[i + 1]) for i in range(4)]
    assert costs[0] == costs[3] and costs[1] == costs[2]
    first = min(range(4), key=lambda i: (costs[i], i))
    want = list(range(5))
    for j in range(first + 1, 5):
        want[j] -= 1
    assert greedy_merge(v, 4).labels.tolist() == want
