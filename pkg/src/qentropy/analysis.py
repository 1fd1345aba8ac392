"""Dense-matrix analytics: quasi-entropy, quasi-probabilities, norms and
the determinant potential.

Logarithms are base 2 throughout.
"""
from __future__ import annotations

import csv
import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .circuit import CircuitTrace

log = logging.getLogger(__name__)

# products below this magnitude are treated as exact zeros
UNDERFLOW = 1e-300
INVERSE_TOL = 1e-8


class InverseResidualError(ValueError):
    """Raised when a supplied or computed inverse fails the residual check."""


def fhat_product(p):
    """-p log2|p| with the p = 0 branch, evaluated elementwise."""
    p = np.asarray(p, dtype=float)
    a = np.abs(p)
    mask = a >= UNDERFLOW
    out = np.zeros_like(p)
    np.negative(p, out=out, where=mask)
    out[mask] *= np.log2(a[mask])
    out += 0.0  # no negative zeros
    return out if out.ndim else float(out)


def fhat(x, y):
    """Quasi-entropy kernel ``-x*y*log2|x*y|`` (zero when ``x*y == 0``)."""
    return fhat_product(np.multiply(x, y))


def invert(M: np.ndarray, tol: float = INVERSE_TOL) -> np.ndarray:
    """Dense LU inverse with a max-norm residual check."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    try:
        Minv = np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise InverseResidualError(f"matrix is singular: {exc}") from exc
    check_inverse(M, Minv, tol)
    return Minv


def inverse_residual(M: np.ndarray, Minv: np.ndarray) -> float:
    n = M.shape[0]
    return float(np.max(np.abs(M @ Minv - np.eye(n)))) if n else 0.0


def check_inverse(M: np.ndarray, Minv: np.ndarray, tol: float = INVERSE_TOL) -> None:
    if M.shape != Minv.shape or M.shape[0] != M.shape[1]:
        raise ValueError(f"shape mismatch: {M.shape} vs {Minv.shape}")
    res = inverse_residual(M, Minv)
    if not res <= tol:
        raise InverseResidualError(f"inverse residual {res:.3e} exceeds {tol:.1e}")


def _pair(M, Minv, check):
    M = np.asarray(M, dtype=float)
    if Minv is None:
        return M, invert(M)
    Minv = np.asarray(Minv, dtype=float)
    if check:
        check_inverse(M, Minv)
    return M, Minv


def quasi_probabilities(M: np.ndarray, Minv: np.ndarray | None = None, check: bool = True) -> np.ndarray:
    """Matrix of products ``M[i, j] * Minv[j, i]``; each row sums to one."""
    M, Minv = _pair(M, Minv, check)
    return M * Minv.T


def quasi_entropy(M: np.ndarray, Minv: np.ndarray | None = None, check: bool = True) -> float:
    """Quasi-entropy ``sum_ij fhat(M[i, j], Minv[j, i])``.

    For orthogonal ``M`` this is the summed Shannon entropy of the rows'
    squared entries. ``Minv`` is inverted (and checked) when omitted.
    """
    P = quasi_probabilities(M, Minv, check)
    return float(np.sum(fhat_product(P)))


def partial_quasi_entropy(M: np.ndarray, Minv: np.ndarray | None, n: int, check: bool = True) -> float:
    """Quasi-entropy restricted to the first ``n`` columns of ``M`` (all rows)."""
    M, Minv = _pair(M, Minv, check)
    if not 1 <= n <= M.shape[1]:
        raise ValueError(f"n={n} outside [1, {M.shape[1]}]")
    return float(np.sum(fhat_product(M[:, :n] * Minv[:n, :].T)))


@dataclass(frozen=True)
class QuasiProbRow:
    index: int  # 1-based row index
    values: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.values))


def quasi_prob_rows(M: np.ndarray, Minv: np.ndarray | None = None, check: bool = True) -> list[QuasiProbRow]:
    P = quasi_probabilities(M, Minv, check)
    return [QuasiProbRow(i + 1, P[i].copy()) for i in range(P.shape[0])]


@dataclass(frozen=True)
class NormEstimate:
    value: float
    iterations: int
    converged: bool


def _start_vector(n: int) -> np.ndarray:
    v = np.ones(n) / np.sqrt(n)
    v += 0.1 * np.random.default_rng(20240607).standard_normal(n) / np.sqrt(n)
    return v / np.linalg.norm(v)


def spectral_norm_estimate(M: np.ndarray, rtol: float = 1e-10, max_iter: int = 10_000) -> NormEstimate:
    """Largest singular value by power iteration on ``M^T M``.

    The start vector is fixed, so the estimate is reproducible.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return NormEstimate(0.0, 0, True)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    v = _start_vector(M.shape[1])
    sigma = 0.0
    for it in range(1, max_iter + 1):
        w = M @ v
        new = float(np.linalg.norm(w))
        if new == 0.0:
            # start vector in the null space; fall back to the largest column
            j = int(np.argmax(np.linalg.norm(M, axis=0)))
            v = np.zeros(M.shape[1])
            v[j] = 1.0
            if np.linalg.norm(M[:, j]) == 0.0:
                return NormEstimate(0.0, it, True)
            continue
        u = M.T @ w
        v = u / np.linalg.norm(u)
        if abs(new - sigma) <= rtol * new:
            return NormEstimate(new, it, True)
        sigma = new
    return NormEstimate(sigma, max_iter, False)


def spectral_norm(M: np.ndarray, rtol: float = 1e-10, max_iter: int = 10_000) -> float:
    est = spectral_norm_estimate(M, rtol, max_iter)
    if not est.converged:
        log.warning("power iteration hit the cap (%d) at %.6g", max_iter, est.value)
    return est.value


def condition_number(M: np.ndarray, Minv: np.ndarray | None = None) -> float:
    """``||M|| * ||M^-1||`` in spectral norm, both factors by power iteration."""
    if Minv is None:
        Minv = invert(M)
    return spectral_norm(M) * spectral_norm(Minv)


def condition_number_svd(M: np.ndarray) -> float:
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


@dataclass(frozen=True)
class UniformCondition:
    value: float
    exact: bool  # False: only sampled layers were covered, value is a lower bound on R
    layers_covered: int
    layers_total: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "exact": self.exact,
            "layers_covered": self.layers_covered,
            "layers_total": self.layers_total,
        }


def uniform_condition_number(trace: CircuitTrace) -> UniformCondition:
    kappa = np.asarray(trace.kappa, dtype=float)
    covered = ~np.isnan(kappa)
    # M_0 = Id always has condition number 1
    value = float(np.max(kappa[covered])) if covered.any() else 1.0
    return UniformCondition(value, bool(covered.all()), int(covered.sum()), len(kappa))


def morgenstern_potential(M: np.ndarray, max_size: int = 10) -> float:
    """Max |det| over all square submatrices, by exhaustive enumeration."""
    M = np.asarray(M, dtype=float)
    rows, cols = M.shape
    if min(rows, cols) > max_size:
        raise ValueError(f"min(rows, cols)={min(rows, cols)} exceeds the exhaustive cap {max_size}")
    best = float(np.max(np.abs(M))) if M.size else 0.0
    for k in range(2, min(rows, cols) + 1):
        J = np.array(list(itertools.combinations(range(cols), k)))
        for I in itertools.combinations(range(rows), k):
            # all column subsets at once: shape (len(J), k, k)
            subs = np.moveaxis(M[list(I)][:, J], 1, 0)
            best = max(best, float(np.max(np.abs(np.linalg.det(subs)))))
    return best


def read_matrix_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [[float(v) for v in r] for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    width = len(rows[0])
    for i, r in enumerate(rows, 1):
        if len(r) != width:
            raise ValueError(f"{path}: row {i} has {len(r)} entries, expected {width}")
    A = np.array(rows, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{path}: non-finite entries")
    return A


def write_matrix_csv(path: str | Path, A: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        for row in np.atleast_2d(A):
            w.writerow([repr(float(v)) for v in row])
