import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chanquant.binary_upgrade import greedy_split
from chanquant.channels import hard_grid_channel, random_channel
from chanquant.dist import JointDistribution, mutual_information, to_binary_view
from chanquant.errors import BudgetTooSmall, TooLarge
from chanquant.onehot_upgrade import (
    coordinate_betas,
    materialize,
    upgrade,
    verify_upgrade_consistency,
)

from conftest import joint_from_rng, mi_ref


def brute_pstar(result, J):
    """P*(x, z) by explicit summation over every (x, z, y)."""
    q = J.q
    betas = coordinate_betas(result.chain, result.outcomes)
    posts = [o.z_post for o in result.outcomes]
    sizes = [o.L for o in result.outcomes]
    out = {}
    for z in itertools.product(*(range(s) for s in sizes)):
        for y in range(J.n):
            w = J.p_y[y]
            for i, (lo, hi, a) in enumerate(betas):
                w *= (a[y] if z[i] == lo[y] else 0.0) + (1 - a[y] if z[i] == hi[y] and lo[y] != hi[y] else 0.0)
            if w == 0:
                continue
            for x in range(q):
                g = 1.0
                for i in range(q - 1):
                    b = posts[i][z[i]]
                    if i == x:
                        g *= b
                        break
                    g *= 1 - b
                out[(x, z)] = out.get((x, z), 0.0) + w * g
    return out


def test_binary_reduces_to_greedy_split():
    J = random_channel(2, 300, 11)
    r = upgrade(J, 12)
    b = greedy_split(to_binary_view(J), 12)
    np.testing.assert_array_equal(r.pstar.mass, b.pstar.mass)
    assert r.delta_I == b.delta_I


def test_large_budget_is_lossless():
    J = random_channel(3, 4, 2)
    r = upgrade(J, 16)
    assert r.lam == 4
    assert r.delta_I == pytest.approx(0.0, abs=1e-12)


def test_bound_instance():
    r = upgrade(hard_grid_channel(3, 40), 9)
    assert r.bound == pytest.approx(256 / 9)
    assert r.delta_I <= 256 / 9
    assert r.bound / math.log(2) == pytest.approx(41.0367, abs=1e-4)


def test_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        upgrade(random_channel(3, 10, 1), 3)
    with pytest.raises(BudgetTooSmall):
        upgrade(random_channel(2, 10, 1), 0)


def test_identity_embedding_is_relabeling():
    J = random_channel(3, 3, 8)
    r = upgrade(J, 9)
    assert r.L_actual == 3
    got = sorted(map(tuple, r.pstar.mass.T.round(15).tolist()))
    want = sorted(map(tuple, J.mass.T.round(15).tolist()))
    assert got == want
    rep = verify_upgrade_consistency(r, J)
    assert rep["marginal"] <= 1e-15 and rep["markov"] <= 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_toy_against_brute_force(seed):
    J = random_channel(3, 3 + seed % 2, seed)
    r = upgrade(J, 4)
    ref = brute_pstar(r, J)
    for j, z in enumerate(r.z_labels):
        for x in range(3):
            assert r.pstar.mass[x, j] == pytest.approx(ref.get((x, z), 0.0), abs=1e-15)
    assert sum(v for v in ref.values()) == pytest.approx(1.0, abs=1e-14)
    assert len({z for _, z in ref if ref[(_, z)] > 0}) == r.L_actual
    rep = verify_upgrade_consistency(r, J)
    assert rep["passed"] and rep["marginal"] <= 1e-12 and rep["markov"] <= 1e-12


def test_binary_marginal():
    J = random_channel(2, 40, 4)
    rep = verify_upgrade_consistency(upgrade(J, 4), J)
    assert rep["marginal"] <= 1e-12


@given(st.integers(2, 5), st.integers(2, 40), st.integers(2, 5), st.integers(0, 2**32))
def test_upgrade_invariants(q, n, lam, seed):
    J = joint_from_rng(np.random.default_rng(seed), q, n)
    L = lam ** (q - 1)
    r = upgrade(J, L)
    assert r.L_actual <= L
    np.testing.assert_allclose(r.pstar.p_x, J.p_x, atol=1e-10, rtol=0)
    assert abs(r.pstar.mass.sum() - 1) <= 1e-10
    assert -1e-10 <= r.delta_I <= r.bound + 1e-10
    assert r.delta_I == pytest.approx(mi_ref(r.pstar.mass) - mi_ref(J.mass), abs=1e-10)
    if n * 2 ** (q - 1) <= 2000:
        rep = verify_upgrade_consistency(r, J)
        assert rep["passed"], rep


def test_to_dict_round_trips_through_json():
    J = random_channel(3, 20, 6)
    d = json.loads(json.dumps(upgrade(J, 9).to_dict()))
    assert d["mode"] == "upgrade" and d["lambda"] == 3
    assert len(d["surviving_posteriors"]) == 2
    assert sum(p for _, _, p in d["pxz"]) == pytest.approx(1.0)
    assert min(min(z) for _, z, _ in d["pxz"]) == 1 and {x for x, _, _ in d["pxz"]} == {1, 2, 3}


def test_materialize_cap():
    J = random_channel(3, 300_000, 1)
    r = upgrade(J, 4)
    with pytest.raises(TooLarge):
        materialize(r, J)
