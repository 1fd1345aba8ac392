import itertools
import math

import numpy as np
import pytest
from conftest import random_nonsingular

from qentropy import analysis as an
from qentropy.circuit import Circuit, Gate, build_trace
from qentropy.transforms import walsh_hadamard_matrix, wht_circuit


def test_fhat_examples():
    assert an.fhat(0, 7) == 0.0
    assert an.fhat(1, 1) == 0.0
    assert an.fhat(0.5, 0.5) == pytest.approx(0.5, abs=1e-15)
    # symmetric in the sign of the product: -p log|p|
    assert an.fhat(-0.5, 0.5) == pytest.approx(-0.5, abs=1e-15)
    assert an.fhat(1e-160, 1e-160) == 0.0


def test_fhat_no_negative_zero():
    assert math.copysign(1.0, an.fhat(-1.0, 1.0)) == 1.0


def test_phi_examples():
    for n in (1, 3, 7):
        assert an.quasi_entropy(np.eye(n)) == 0.0
    assert an.quasi_entropy(walsh_hadamard_matrix(4)) == pytest.approx(8.0, rel=1e-12)
    assert an.quasi_entropy(np.diag([3.0, 1 / 3])) == 0.0


def test_partial_examples(rng):
    M = random_nonsingular(5, rng)
    Minv = np.linalg.inv(M)
    assert an.partial_quasi_entropy(M, Minv, 5) == pytest.approx(an.quasi_entropy(M, Minv), rel=1e-12)
    B = np.eye(3)
    B[:2, :2] = walsh_hadamard_matrix(2)
    assert an.partial_quasi_entropy(B, None, 2) == pytest.approx(2.0, rel=1e-12)
    assert an.partial_quasi_entropy(np.eye(4), None, 2) == 0.0
    with pytest.raises(ValueError):
        an.partial_quasi_entropy(np.eye(4), None, 5)


def test_phi_matches_entrywise_oracle(rng):
    M = random_nonsingular(6, rng, kappa=30)
    Minv = np.linalg.inv(M)
    total = 0.0
    for i in range(6):
        for j in range(6):
            p = M[i, j] * Minv[j, i]
            total += -p * math.log2(abs(p)) if p else 0.0
    assert an.quasi_entropy(M, Minv) == pytest.approx(total, rel=1e-12)


def test_phi_rejects_bad_inverse():
    with pytest.raises(an.InverseResidualError):
        an.quasi_entropy(np.eye(2), 2 * np.eye(2))
    with pytest.raises(an.InverseResidualError):
        an.quasi_entropy(np.ones((2, 2)))


def test_quasi_prob_rows():
    rows = an.quasi_prob_rows(np.eye(3))
    for r in rows:
        np.testing.assert_array_equal(r.values, np.eye(3)[r.index - 1])
    c = s = 2**-0.5
    rows = an.quasi_prob_rows(np.array([[c, s], [-s, c]]))
    for r in rows:
        np.testing.assert_allclose(r.values, [0.5, 0.5], atol=1e-15)


def test_quasi_prob_row_sums(rng):
    M = rng.standard_normal((8, 8))
    for r in an.quasi_prob_rows(M):
        assert abs(r.total - 1.0) <= 1e-10


def test_spectral_norm_examples():
    assert an.spectral_norm(np.eye(4)) == pytest.approx(1.0, rel=1e-12)
    assert an.spectral_norm(np.diag([2.0, 1.0])) == pytest.approx(2.0, rel=1e-9)
    t = 0.3
    assert an.spectral_norm(np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]])) == pytest.approx(1.0)
    assert an.spectral_norm(np.zeros((3, 3))) == 0.0


@pytest.mark.parametrize("n", [3, 16, 64, 128])
def test_spectral_norm_vs_svd(n, rng):
    M = rng.standard_normal((n, n))
    est = an.spectral_norm_estimate(M)
    assert est.converged
    assert est.value == pytest.approx(np.linalg.svd(M, compute_uv=False)[0], rel=1e-6)


def test_spectral_norm_deterministic(rng):
    M = rng.standard_normal((20, 20))
    assert an.spectral_norm(M) == an.spectral_norm(M.copy())


def test_spectral_norm_cap_logged(caplog, rng):
    M = rng.standard_normal((30, 30))
    with caplog.at_level("WARNING"):
        an.spectral_norm(M, rtol=0.0, max_iter=3)
    assert "cap" in caplog.text


def test_condition_examples(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    assert an.condition_number(Q) == pytest.approx(1.0, rel=1e-9)
    assert an.condition_number(np.diag([4.0, 1.0])) == pytest.approx(4.0, rel=1e-9)
    assert an.condition_number(np.diag([10.0, 0.1])) == pytest.approx(100.0, rel=1e-9)
    M = random_nonsingular(10, rng, kappa=50)
    assert an.condition_number(M) == pytest.approx(50.0, rel=1e-6)
    assert an.condition_number_svd(M) == pytest.approx(50.0, rel=1e-9)


def test_uniform_condition_examples():
    u = an.uniform_condition_number(build_trace(wht_circuit(8), exact_cond=True))
    assert abs(u.value - 1.0) <= 1e-9 and u.exact
    u = an.uniform_condition_number(build_trace(Circuit(2, [Gate.constant(1, 3.0)]), exact_cond=True))
    assert u.value == pytest.approx(3.0, rel=1e-12)
    u = an.uniform_condition_number(build_trace(Circuit(3), exact_cond=True))
    assert u.value == 1.0 and u.exact


def test_uniform_condition_sampled_is_flagged():
    u = an.uniform_condition_number(build_trace(wht_circuit(8), cond_every=5))
    assert not u.exact and u.layers_covered < u.layers_total


def _morgenstern_oracle(M):
    r, c = M.shape
    best = 0.0
    for k in range(1, min(r, c) + 1):
        for I in itertools.combinations(range(r), k):
            for J in itertools.combinations(range(c), k):
                best = max(best, abs(np.linalg.det(M[np.ix_(I, J)])))
    return best


def test_morgenstern_examples(rng):
    for n in (1, 4, 10):
        assert an.morgenstern_potential(np.eye(n)) == pytest.approx(1.0, abs=1e-12)
    assert an.morgenstern_potential(np.array([[1.0, 1.0], [1.0, -1.0]])) == pytest.approx(2.0, rel=1e-12)
    assert an.morgenstern_potential(np.array([[-3.0]])) == 3.0
    M = rng.standard_normal((4, 5))
    assert an.morgenstern_potential(M) == pytest.approx(_morgenstern_oracle(M), rel=1e-12)
    with pytest.raises(ValueError):
        an.morgenstern_potential(np.eye(11))


def test_csv_roundtrip(tmp_path, rng):
    A = rng.standard_normal((3, 4))
    p = tmp_path / "m.csv"
    an.write_matrix_csv(p, A)
    np.testing.assert_array_equal(an.read_matrix_csv(p), A)


@pytest.mark.parametrize("text", ["1,2\n3\n", "", "1,nan\n2,3\n", "1,x\n"])
def test_csv_rejects(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ValueError):
        an.read_matrix_csv(p)
