import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chanquant.binary_degrade import apply_quantizer, greedy_merge
from chanquant.channels import hard_grid_channel, random_channel
from chanquant.dist import to_binary_view
from chanquant.errors import BudgetTooSmall
from chanquant.onehot_degrade import degrade

from conftest import joint_from_rng, mi_ref


def test_binary_reduces_to_greedy_merge():
    J = random_channel(2, 300, 11)
    r = degrade(J, 12)
    b = greedy_merge(to_binary_view(J), 12)
    np.testing.assert_array_equal(r.pxz.mass, b.pxz.mass)
    assert r.delta_I == b.delta_I
    np.testing.assert_array_equal(r.f[:, 0], b.quantizer)


def test_bound_instance():
    r = degrade(hard_grid_channel(3, 40), 9)
    assert r.bound == pytest.approx(128 / 9)
    assert r.delta_I <= 128 / 9
    assert r.bound / math.log(2) == pytest.approx(20.5183, abs=1e-4)


def test_small_alphabet_lossless():
    J = random_channel(3, 3, 5)
    r = degrade(J, 9)
    assert r.delta_I == pytest.approx(0.0, abs=1e-12)
    assert r.L_actual == 3


def test_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        degrade(random_channel(3, 10, 1), 0)
    assert degrade(random_channel(3, 10, 1), 1).L_actual == 1


def test_quantizer_matches_direct_aggregation():
    J = random_channel(3, 12, 3)
    r = degrade(J, 4)
    table = {}
    for y, t in enumerate(map(tuple, r.f.tolist())):
        table[t] = table.get(t, np.zeros(3)) + J.mass[:, y]
    keys = sorted(table)
    assert [tuple(t) for t in r.z_tuples.tolist()] == keys
    np.testing.assert_allclose(r.pxz.mass, np.array([table[k] for k in keys]).T, atol=1e-15)
    # every source output lands in the column of its tuple
    for y, z in enumerate(r.z_index):
        assert tuple(r.z_tuples[z]) == tuple(r.f[y])


@given(st.integers(2, 5), st.integers(2, 60), st.integers(1, 5), st.integers(0, 2**32))
def test_degrade_invariants(q, n, lam, seed):
    J = joint_from_rng(np.random.default_rng(seed), q, n)
    L = lam ** (q - 1)
    r = degrade(J, L)
    assert r.L_actual <= L
    # column sums are the mass of each preimage
    pre = np.zeros(r.L_actual)
    np.add.at(pre, r.z_index, J.p_y)
    np.testing.assert_allclose(r.pxz.p_y, pre, atol=1e-12, rtol=0)
    assert -1e-12 <= r.delta_I <= r.bound + 1e-12
    assert r.delta_I == pytest.approx(mi_ref(J.mass) - mi_ref(r.pxz.mass), abs=1e-10)
    # loss is at most the chain-weighted sum of coordinate losses
    per = sum(m * o.delta_I for m, o in zip(r.chain.m, r.outcomes))
    assert r.delta_I <= per + 1e-10


def test_csv_and_json(tmp_path):
    J = random_channel(3, 8, 2)
    r = degrade(J, 4)
    r.write_csv(tmp_path / "q.csv", J.output_labels)
    lines = (tmp_path / "q.csv").read_text().splitlines()
    assert lines[0] == "y,z1,z2,z_id" and len(lines) == 9
    ids = {int(l.split(",")[-1]) for l in lines[1:]}
    assert ids == set(range(1, r.L_actual + 1))
    d = json.loads(json.dumps(r.to_dict()))
    assert d["mode"] == "degrade" and d["L_actual"] == r.L_actual
    assert sum(p for _, _, p in d["pxz"]) == pytest.approx(1.0)


def test_reexported_apply_quantizer():
    from chanquant import onehot_degrade
    assert onehot_degrade.apply_quantizer is apply_quantizer
