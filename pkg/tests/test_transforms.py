import math

import numpy as np
import pytest

from qentropy import analysis as an
from qentropy.circuit import build_trace, defining_matrix, validate_circuit
from qentropy.transforms import (
    FFT_ROTATION_CONSTANT,
    TransformSpec,
    dft_real_embedding,
    fft_circuit,
    walsh_hadamard_matrix,
    wht_circuit,
)


def _wht_oracle(n):
    H = np.array([[1.0]])
    while H.shape[0] < n:
        H = np.block([[H, H], [H, -H]])
    return H / math.sqrt(n)


def _dft_oracle(m):
    F = np.fft.fft(np.eye(m), norm="ortho")
    return np.block([[F.real, -F.imag], [F.imag, F.real]])


def test_wht_examples():
    np.testing.assert_allclose(walsh_hadamard_matrix(2), np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    assert walsh_hadamard_matrix(4)[1, 2] == 0.5  # 1-based entry (2, 3)
    with pytest.raises(ValueError, match="power of 2"):
        walsh_hadamard_matrix(3)


@pytest.mark.parametrize("n", [1, 2, 8, 64])
def test_wht_matrix_vs_sylvester(n):
    F = walsh_hadamard_matrix(n)
    np.testing.assert_allclose(F, _wht_oracle(n), atol=1e-15)
    np.testing.assert_allclose(F @ F.T, np.eye(n), atol=1e-12)


def test_dft_examples():
    np.testing.assert_array_equal(dft_real_embedding(1), np.eye(2))
    D = dft_real_embedding(2)
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    np.testing.assert_allclose(D, np.block([[H, np.zeros((2, 2))], [np.zeros((2, 2)), H]]), atol=1e-15)


@pytest.mark.parametrize("m", [1, 3, 8, 32])
def test_dft_vs_numpy(m):
    D = dft_real_embedding(m)
    np.testing.assert_allclose(D, _dft_oracle(m), atol=1e-12)
    np.testing.assert_allclose(D @ D.T, np.eye(2 * m), atol=1e-12)


def test_wht_circuit_counts():
    c = wht_circuit(2)
    assert c.rotation_count == 1 and c.constant_count == 1
    assert wht_circuit(8).rotation_count == 12
    assert len(wht_circuit(1).gates) == 0


@pytest.mark.parametrize("n", [2, 4, 16, 128])
def test_wht_circuit_matrix(n):
    c = wht_circuit(n)
    assert c.rotation_count == n // 2 * int(math.log2(n))
    assert np.max(np.abs(defining_matrix(c) - _wht_oracle(n))) <= 1e-10
    assert validate_circuit(c) == []


def test_fft_examples():
    assert len(fft_circuit(1).gates) == 0
    assert np.max(np.abs(defining_matrix(fft_circuit(2)) - dft_real_embedding(2))) <= 1e-10


@pytest.mark.parametrize("m", [2, 4, 8, 16, 32])
def test_fft_circuit_matrix(m):
    c = fft_circuit(m)
    assert np.max(np.abs(defining_matrix(c) - _dft_oracle(m))) <= 1e-8
    assert c.rotation_count <= FFT_ROTATION_CONSTANT * m * math.log2(m)
    assert validate_circuit(c) == []


@pytest.mark.parametrize("m", [4, 8, 16])
def test_fft_trace_well_conditioned(m):
    u = an.uniform_condition_number(build_trace(fft_circuit(m), exact_cond=True))
    assert u.value <= 1 + 1e-8


@pytest.mark.parametrize("n", [2, 4, 8, 64, 256])
def test_phi_wht_is_n_log_n(n):
    assert an.quasi_entropy(walsh_hadamard_matrix(n)) == pytest.approx(n * math.log2(n), rel=1e-9)


@pytest.mark.parametrize("m", [4, 8, 16, 32])
def test_phi_dft_floor(m):
    n = 2 * m
    assert an.quasi_entropy(dft_real_embedding(m)) >= 0.5 * n * math.log2(n)


def test_wht_trace_monotone_bounded():
    t = build_trace(wht_circuit(16), exact_cond=True)
    d = t.delta_phi
    assert np.all(d >= -1e-12)
    assert np.max(np.abs(d)) <= 2 + 1e-12
    assert t.phi[0] == 0.0 and t.phi[-1] == pytest.approx(64.0, rel=1e-12)


def test_scale_option():
    c = wht_circuit(8, scale=3.0)
    assert c.constant_count == wht_circuit(8).constant_count + 8
    np.testing.assert_allclose(defining_matrix(c), 3.0 * _wht_oracle(8), atol=1e-12)
    t = build_trace(c)
    assert t.phi[-1] == pytest.approx(24.0, rel=1e-12)
    with pytest.raises(ValueError):
        wht_circuit(4, scale=0.0)


def test_transform_spec():
    assert TransformSpec("walsh_hadamard", 8).circuit().dim == 8
    np.testing.assert_array_equal(TransformSpec("dft_real", 8).matrix(), dft_real_embedding(4))
    for kind, n in [("walsh_hadamard", 6), ("dft_real", 6), ("dct", 4)]:
        with pytest.raises(ValueError):
            TransformSpec(kind, n)
