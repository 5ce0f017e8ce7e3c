import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropbuild import _kernels as K

from oracles import plucker_ok, tls_ok

INF = K.INF
BACKENDS = ["python", "numpy"] + (["numba"] if K.HAVE_NUMBA else [])


def random_table(rng, n1, k, inf_rate=0.2):
    vals = [INF if rng.random() < inf_rate else Fraction(rng.randint(-6, 6), rng.randint(1, 3))
            for _ in combinations(range(n1), k)]
    if all(v == INF for v in vals):
        vals[0] = 0
    return vals


@given(st.integers(0, 10**6), st.integers(2, 7), st.data())
def test_backends_agree_on_plucker(seed, n1, data):
    k = data.draw(st.integers(1, n1 - 1))
    rng = random.Random(seed)
    vals = random_table(rng, n1, k, inf_rate=rng.choice([0, 0.2, 0.6]))
    hits = {b: K.plucker_violation(vals, n1, k, b) for b in BACKENDS}
    assert len(set(hits.values())) == 1, hits
    table = dict(zip(combinations(range(n1), k), vals))
    assert (hits["python"] is None) == plucker_ok(table, n1, k)


@given(st.integers(0, 10**6), st.integers(2, 7), st.data())
def test_backends_agree_on_circuits(seed, n1, data):
    k = data.draw(st.integers(1, n1 - 1))
    rng = random.Random(seed)
    vals = random_table(rng, n1, k)
    u = [INF if rng.random() < 0.2 else Fraction(rng.randint(-4, 4), rng.randint(1, 2)) for _ in range(n1)]
    hits = {b: K.circuit_violation(vals, u, n1, k, b) for b in BACKENDS}
    assert len(set(hits.values())) == 1, hits
    table = dict(zip(combinations(range(n1), k), vals))
    assert (hits["python"] is None) == tls_ok(table, u, n1, k)


def test_overflow_falls_back_to_exact_loops():
    n1, k = 4, 2
    huge = Fraction(1, 3) * (1 << 70)
    vals = [0, 0, 0, huge, 0, 0]
    assert K.encode(vals) is None
    for b in BACKENDS:
        assert K.plucker_violation(vals, n1, k, b) is None
    vals[3] = -huge
    assert all(K.plucker_violation(vals, n1, k, b) is not None for b in BACKENDS)


def test_backend_switch_roundtrip():
    old = K.set_backend("python")
    try:
        assert K.get_backend() == "python"
    finally:
        K.set_backend(old)
    with pytest.raises(ValueError):
        K.set_backend("gpu")


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("TROPBUILD_JIT", "0")
    assert K._default_backend() == "numpy"
    monkeypatch.setenv("TROPBUILD_JIT", "1")
    assert K._default_backend() == ("numba" if K.HAVE_NUMBA else "numpy")


def test_batched_orders():
    a = np.array([0, 12, -8, 7, 1024], dtype=np.int64)
    assert K.ord_p_batch(a, 2).tolist() == [K.NO_VAL, 2, 3, 0, 10]
    c = np.array([[0, 0, 3], [1, 0, 0], [0, 0, 0]], dtype=np.int64)
    assert K.ord_t_batch(c).tolist() == [2, 0, K.NO_VAL]


def test_trivial_ranges():
    assert K.plucker_violation([0], 1, 1) is None
    assert K.circuit_violation([0], [0, 0], 2, 2) is None
