import numpy as np
import pytest

from bellkit.hilbert import random_unit
from bellkit.lhv import STRATEGIES, strategy_tables
from bellkit.schmidt import product_measurement
from bellkit.scenario import SETTINGS, JointTables

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def local_basis(rng):
    """Random orthonormal basis of C^2 as rows: a Haar-random ray and its complement."""
    a, b = random_unit(2, rng)
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def random_product_model_measurements(rng):
    """Four product measurements built from one set of local bases per party."""
    a, ap, b, bp = (local_basis(rng) for _ in range(4))
    pairs = {"AB": (a, b), "ABp": (a, bp), "ApB": (ap, b), "ApBp": (ap, bp)}
    return {tag: product_measurement(x, y, tag=tag) for tag, (x, y) in pairs.items()}


def random_product_state(rng):
    return np.kron(random_unit(2, rng), random_unit(2, rng))


# Extreme points of the no-signaling polytope: 16 local deterministic tables and
# 8 PR boxes (a XOR b = xy XOR alpha x XOR beta y XOR gamma), outcome 1 <-> bit 0.
def _pr_box(alpha, beta, gamma):
    tables = {}
    for tag, (x, y) in zip(SETTINGS, ((0, 0), (0, 1), (1, 0), (1, 1))):
        t = np.zeros(4)
        for a in (0, 1):
            for b in (0, 1):
                if a ^ b == (x * y) ^ (alpha * x) ^ (beta * y) ^ gamma:
                    t[2 * a + b] = 0.5
        tables[tag] = t
    return JointTables(**tables)


LOCAL_VERTICES = [strategy_tables(s).as_array() for s in STRATEGIES]
PR_VERTICES = [_pr_box(a, b, g).as_array() for a in (0, 1) for b in (0, 1) for g in (0, 1)]


def random_no_signaling_tables(rng):
    """Random point of the no-signaling polytope, mixing local and PR vertices."""
    verts = np.array(LOCAL_VERTICES + PR_VERTICES)
    k = rng.integers(2, 6)
    idx = rng.choice(len(verts), size=k, replace=False)
    w = rng.dirichlet(np.full(k, 0.5))
    arr = np.tensordot(w, verts[idx], axes=1)
    return JointTables(**dict(zip(SETTINGS, arr)))


def random_tables(rng):
    """Arbitrary tables: independent Dirichlet draws, sometimes with exact zeros."""
    out = {}
    for tag in SETTINGS:
        p = rng.dirichlet(np.full(4, rng.choice([0.2, 1.0, 5.0])))
        if rng.random() < 0.2:
            p[rng.integers(4)] = 0.0
            p = p / p.sum()
        out[tag] = p
    return JointTables(**out)
