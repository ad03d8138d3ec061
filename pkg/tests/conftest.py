import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from chanquant.dist import JointDistribution

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def h2_ref(p):
    """Binary entropy written out independently of the package."""
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def mi_ref(mass):
    """I(X;Y) as H(X) + H(Y) - H(X,Y) with compensated sums."""
    mass = np.asarray(mass, dtype=float)
    H = lambda v: -math.fsum(x * math.log(x) for x in np.ravel(v) if x > 0)
    return H(mass.sum(axis=1)) + H(mass.sum(axis=0)) - H(mass)


def joint_from_rng(rng, q, n, sparsity=0.0):
    m = rng.random((q, n))
    if sparsity:
        m[rng.random((q, n)) < sparsity] = 0.0
        m[:, m.sum(axis=0) == 0] = rng.random((q, 1))
        m[m.sum(axis=1) == 0, 0] = 0.5
    return JointDistribution.from_mass(m / m.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def view_of(entries, coalesce=False):
    """Binary view whose entries are the given (mass, posterior) pairs."""
    from chanquant.dist import to_binary_view

    m = np.array([[pi * p for pi, p in entries], [pi * (1 - p) for pi, p in entries]])
    return to_binary_view(JointDistribution.from_mass(m / m.sum()), coalesce=coalesce)


def random_view(rng, n):
    from chanquant.dist import to_binary_view

    return to_binary_view(joint_from_rng(rng, 2, n))


# --- acceptance registry ----------------------------------------------------

@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, title, ok, detail)``."""
    store = request.config.__dict__.setdefault("_acceptance", {})

    def record(number, title, ok, detail=""):
        store[number] = (title, bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = getattr(config, "_acceptance", None)
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        title, ok, detail = store[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}")
