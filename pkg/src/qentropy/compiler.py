"""Compile dense matrices into rotation/constant circuits.

Orthogonal matrices go through Givens QR (column-major, bottom-up zeroing
on adjacent rows); nonsingular matrices go through an SVD
``A = U diag(s) V^T`` compiled as ``V^T`` rotations, then the singular
values as constants, then ``U`` rotations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .analysis import UniformCondition, uniform_condition_number
from .circuit import EXACT_COND_MAX_DIM, Circuit, Gate, build_trace, defining_matrix

ORTHO_TOL = 1e-8
SINGULAR_RTOL = 1e-10
# singular values this close to 1 are not emitted as constant gates
UNIT_TOL = 1e-12


class NotOrthogonalError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


@dataclass
class CompileResult:
    circuit: Circuit
    reconstruction_error: float
    rotation_count: int
    constant_count: int
    uniform_condition: UniformCondition | None

    def to_dict(self) -> dict:
        return {
            "dim": self.circuit.dim,
            "reconstruction_error": self.reconstruction_error,
            "rotation_count": self.rotation_count,
            "constant_count": self.constant_count,
            "uniform_condition": self.uniform_condition.to_dict() if self.uniform_condition else None,
        }


def _square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def orthogonal_gates(Q: np.ndarray) -> list[Gate]:
    """Gates whose product is the orthogonal matrix ``Q`` (no checks).

    Givens rotations ``G_r ... G_1`` reduce ``Q`` to a diagonal of signs
    ``S``; then ``Q = G_1^T ... G_r^T S``, so the circuit applies ``S`` first
    and the transposed rotations in reverse order.
    """
    R = np.array(Q, dtype=float)
    n = R.shape[0]
    zeroing: list[tuple[int, int, float]] = []
    for j in range(n - 1):
        for i in range(n - 1, j, -1):
            b = R[i, j]
            if b == 0.0:
                continue
            a = R[i - 1, j]
            theta = math.atan2(b, a)
            ct, st = math.cos(theta), math.sin(theta)
            top = R[i - 1].copy()
            R[i - 1] = ct * top + st * R[i]
            R[i] = -st * top + ct * R[i]
            R[i, j] = 0.0
            zeroing.append((i, i + 1, theta))  # 1-based (k, l)
    gates = [Gate.constant(i + 1, -1.0) for i in range(n) if R[i, i] < 0]
    gates += [Gate.rotation(k, l, -theta) for k, l, theta in reversed(zeroing)]
    return gates


def _finish(circuit: Circuit, A: np.ndarray, with_condition: bool) -> CompileResult:
    err = float(np.max(np.abs(defining_matrix(circuit) - A))) if A.size else 0.0
    cond = None
    if with_condition:
        exact = circuit.dim <= EXACT_COND_MAX_DIM
        trace = build_trace(circuit, phi=False, exact_cond=exact)
        cond = uniform_condition_number(trace)
    return CompileResult(circuit, err, circuit.rotation_count, circuit.constant_count, cond)


def givens_qr_circuit(A, tol: float = ORTHO_TOL, with_condition: bool = True) -> CompileResult:
    """At most ``n(n-1)/2`` rotations plus sign constants reproducing ``A``."""
    A = _square(A)
    n = A.shape[0]
    dev = float(np.max(np.abs(A @ A.T - np.eye(n)))) if n else 0.0
    if not dev <= tol:
        raise NotOrthogonalError(f"input is not orthogonal: max |A A^T - I| = {dev:.3e}")
    return _finish(Circuit(n, orthogonal_gates(A)), A, with_condition)


def _aligned_svd(A: np.ndarray):
    # permute/sign-flip singular triplets so V is as close to the identity as possible
    U, s, Vt = np.linalg.svd(A)
    V = Vt.T
    rows, cols = linear_sum_assignment(-np.abs(V))
    perm = cols[np.argsort(rows)]
    U, s, V = U[:, perm], s[perm], V[:, perm]
    signs = np.where(np.diag(V) < 0, -1.0, 1.0)
    return U * signs, s, V * signs


def svd_circuit(A, with_condition: bool = True) -> CompileResult:
    """``V^T`` rotations, singular-value constants, then ``U`` rotations."""
    A = _square(A)
    n = A.shape[0]
    s_all = np.linalg.svd(A, compute_uv=False)
    if n and not s_all[-1] > SINGULAR_RTOL * s_all[0]:
        raise SingularMatrixError(
            f"numerically singular: smallest singular value {s_all[-1]:.3e} vs largest {s_all[0]:.3e}"
        )
    U, s, V = _aligned_svd(A)
    gates = orthogonal_gates(V.T)
    gates += [Gate.constant(i + 1, float(si)) for i, si in enumerate(s) if abs(si - 1.0) > UNIT_TOL]
    gates += orthogonal_gates(U)
    return _finish(Circuit(n, gates), A, with_condition)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_conditioned(n: int, kappa: float, rng: np.random.Generator) -> np.ndarray:
    """Random matrix with singular values log-spaced in ``[1, kappa]``."""
    s = np.geomspace(1.0, kappa, n)
    return random_orthogonal(n, rng) @ np.diag(rng.permutation(s)) @ random_orthogonal(n, rng).T
