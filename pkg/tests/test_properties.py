import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qentropy import analysis as an
from qentropy import circuit as circ
from qentropy import lemmas as lm
from qentropy.circuit import Gate
from qentropy.compiler import givens_qr_circuit, random_orthogonal

seeds = st.integers(0, 2**32 - 1)
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def _nonsingular(seed, n, kappa=50.0):
    rng = np.random.default_rng(seed)
    Q1 = random_orthogonal(n, rng)
    Q2 = random_orthogonal(n, rng)
    return Q1 @ np.diag(np.geomspace(1, kappa, n)) @ Q2.T, rng


@settings(max_examples=200, deadline=None)
@given(x=st.lists(finite, min_size=2, max_size=12), theta=st.floats(-10, 10), data=st.data())
def test_rotation_preserves_norm(x, theta, data):
    n = len(x)
    k = data.draw(st.integers(1, n - 1))
    l = data.draw(st.integers(k + 1, n))
    x = np.array(x)
    out = circ.apply_gate(x, Gate.rotation(k, l, theta))
    assert abs(np.linalg.norm(out) - np.linalg.norm(x)) <= 1e-12 * max(np.linalg.norm(x), 1e-300)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n=st.integers(1, 64))
def test_row_scale_invariance(seed, n):
    M, rng = _nonsingular(seed, n)
    d = np.exp(rng.uniform(-3, 3, n)) * rng.choice([-1, 1], n)
    Minv = np.linalg.inv(M)
    phi = an.quasi_entropy(M, Minv)
    assert abs(an.quasi_entropy(d[:, None] * M, Minv / d[None, :]) - phi) <= 1e-8 * max(1, abs(phi))
    c = float(rng.uniform(0.1, 10))
    assert abs(an.quasi_entropy(c * M, Minv / c) - phi) <= 1e-8 * max(1, abs(phi))


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n=st.integers(1, 40))
def test_duality(seed, n):
    M, _ = _nonsingular(seed, n)
    Minv = np.linalg.inv(M)
    phi = an.quasi_entropy(M, Minv)
    assert abs(an.quasi_entropy(Minv.T, M.T) - phi) <= 1e-8 * max(1, abs(phi))


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n=st.integers(1, 64))
def test_orthogonal_restriction(seed, n):
    Q = random_orthogonal(n, np.random.default_rng(seed))
    sq = Q**2
    shannon = float(-np.sum(np.where(sq > 0, sq * np.log2(np.where(sq > 0, sq, 1)), 0)))
    phi = an.quasi_entropy(Q, Q.T)
    assert abs(phi - shannon) <= 1e-10 * max(1, shannon)
    assert -1e-9 <= phi <= n * math.log2(n) + 1e-9 if n > 1 else abs(phi) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.sampled_from([2, 8, 33, 128, 256]), kappa=st.floats(1, 1e4))
def test_quasi_probability_rows_sum_to_one(seed, n, kappa):
    # float64 row sums carry an error floor near eps * kappa, so conditioning is bounded here
    M, _ = _nonsingular(seed, n, kappa)
    P = an.quasi_probabilities(M, np.linalg.inv(M), check=False)
    assert np.max(np.abs(P.sum(axis=1) - 1)) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(2, 6), theta=st.floats(-4, 4), data=st.data())
def test_morgenstern_at_most_doubles(seed, n, theta, data):
    M = np.random.default_rng(seed).standard_normal((n, n))
    k = data.draw(st.integers(1, n - 1))
    l = data.draw(st.integers(k + 1, n))
    before = an.morgenstern_potential(M)
    after = an.morgenstern_potential(circ.apply_gate(M, Gate.rotation(k, l, theta)))
    assert after <= 2 * before + 1e-9 * max(1.0, before)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, n=st.integers(2, 24), gates=st.integers(0, 80))
def test_dual_circuit_is_inverse_transpose(seed, n, gates):
    c = circ.random_circuit(n, gates, np.random.default_rng(seed), log2_c_range=1.0)
    d = circ.dual_circuit(c)
    M = circ.defining_matrix(c)
    assert np.max(np.abs(circ.defining_matrix(d) - np.linalg.inv(M).T)) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(seed=seeds, n=st.integers(2, 16), gates=st.integers(1, 120))
def test_incremental_phi_matches_full(seed, n, gates):
    c = circ.random_circuit(n, gates, np.random.default_rng(seed))
    t = circ.build_trace(c, checkpoint_every=7)
    for cp in t.checkpoints:
        assert abs(cp.phi_incremental - cp.phi_full) <= 1e-8 * max(1, abs(cp.phi_full))


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(1, 20))
def test_givens_roundtrip(seed, n):
    Q = random_orthogonal(n, np.random.default_rng(seed))
    r = givens_qr_circuit(Q, with_condition=False)
    assert r.reconstruction_error <= 1e-12 and r.rotation_count <= n * (n - 1) // 2


nonzero = st.floats(0.05, 20).flatmap(lambda v: st.sampled_from([v, -v]))


@settings(max_examples=40, deadline=None)
@given(q=st.tuples(*[st.floats(-5, 5)] * 4), t=nonzero, u=nonzero)
def test_gap_ratio_scale_invariant(q, t, u):
    w, x, y, z = q
    base = lm.gap_ratio(w, x, y, z)[0]
    assert abs(lm.gap_ratio(t * w, u * x, t * y, u * z)[0] - base) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(q=st.tuples(*[st.floats(-5, 5)] * 4))
def test_gap_ratio_bounded(q):
    assert lm.gap_ratio(*q)[0] <= lm.g_phi(math.pi / 4) + 1e-6
