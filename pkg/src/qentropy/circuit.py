"""Rotation/constant gate circuits, their defining matrices and traces.

Indices on ``Gate`` and in circuit files are 1-based. A rotation on
coordinates ``(k, l)`` left-multiplies the pair by
``[[cos t, sin t], [-sin t, cos t]]``; a constant gate scales coordinate
``k`` by ``c``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .analysis import (
    condition_number,
    condition_number_svd,
    fhat_product,
    inverse_residual,
    quasi_entropy,
)

ROTATION = "rotation"
CONSTANT = "constant"
FILE_VERSION = 1
EXACT_COND_MAX_DIM = 256


class CircuitError(ValueError):
    pass


class DriftError(RuntimeError):
    """Maintained inverse drifted past tolerance even after re-inversion."""

    def __init__(self, step: int, residual: float, tol: float):
        super().__init__(f"inverse residual {residual:.3e} > {tol:.1e} at step {step}")
        self.step = step
        self.residual = residual


@dataclass(frozen=True)
class Gate:
    kind: str
    k: int
    l: int = 0
    theta: float = 0.0
    c: float = 0.0

    @classmethod
    def rotation(cls, k: int, l: int, theta: float) -> "Gate":
        return cls(ROTATION, int(k), int(l), float(theta), 0.0)

    @classmethod
    def constant(cls, k: int, c: float) -> "Gate":
        return cls(CONSTANT, int(k), 0, 0.0, float(c))

    @property
    def is_rotation(self) -> bool:
        return self.kind == ROTATION

    def encode(self) -> tuple[int, int, float, float]:
        """The ``(k, l, theta, c)`` record; ``c = 0`` for rotations, ``l = 0`` for constants."""
        return (self.k, self.l, self.theta, self.c)

    def to_record(self) -> dict:
        if self.is_rotation:
            return {"g": "rot", "k": self.k, "l": self.l, "theta": self.theta}
        return {"g": "const", "k": self.k, "c": self.c}

    @classmethod
    def from_record(cls, rec: dict) -> "Gate":
        g = rec.get("g")
        if g == "rot":
            return cls.rotation(rec["k"], rec["l"], rec["theta"])
        if g == "const":
            return cls.constant(rec["k"], rec["c"])
        raise CircuitError(f"unknown gate type {g!r}")

    def matrix(self, dim: int) -> np.ndarray:
        G = np.eye(dim)
        k = self.k - 1
        if self.is_rotation:
            l = self.l - 1
            ct, st = math.cos(self.theta), math.sin(self.theta)
            G[k, k], G[k, l], G[l, k], G[l, l] = ct, st, -st, ct
        else:
            G[k, k] = self.c
        return G


@dataclass
class Circuit:
    dim: int
    gates: list[Gate] = field(default_factory=list)
    io_dim: int | None = None

    def __post_init__(self):
        if self.io_dim is None:
            self.io_dim = self.dim
        self.gates = list(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    @property
    def extra_dim(self) -> int:
        return self.dim - self.io_dim

    @property
    def rotation_count(self) -> int:
        return sum(g.is_rotation for g in self.gates)

    @property
    def constant_count(self) -> int:
        return len(self.gates) - self.rotation_count

    def rotate(self, k: int, l: int, theta: float) -> "Circuit":
        self.gates.append(Gate.rotation(k, l, theta))
        return self

    def scale(self, k: int, c: float) -> "Circuit":
        self.gates.append(Gate.constant(k, c))
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        self.gates.extend(gates)
        return self

    def encode(self) -> list[tuple[int, int, float, float]]:
        return [g.encode() for g in self.gates]


def validate_circuit(circuit: Circuit) -> list[str]:
    """All invariant violations, as messages. Empty means valid."""
    out = []
    n = circuit.dim
    if n < 1:
        out.append(f"dim must be positive, got {n}")
    io = circuit.io_dim
    if not 1 <= io <= n:
        out.append(f"io_dim {io} outside [1, {n}]")
    elif n > io and n - io > io * math.log2(io):
        out.append(f"extra space N={n - io} exceeds n log2 n = {io * math.log2(io):.3g}")
    for i, g in enumerate(circuit.gates, 1):
        if g.kind == ROTATION:
            if not (1 <= g.k <= n and 1 <= g.l <= n):
                out.append(f"rotation gate {i}: index out of range (k={g.k}, l={g.l}, dim={n})")
            if g.k >= g.l:
                out.append(f"rotation gate {i}: requires k < l (k={g.k}, l={g.l})")
            if not math.isfinite(g.theta):
                out.append(f"rotation gate {i}: non-finite angle")
        elif g.kind == CONSTANT:
            if not 1 <= g.k <= n:
                out.append(f"constant gate {i}: index out of range (k={g.k}, dim={n})")
            if g.c == 0:
                out.append(f"constant gate {i}: c = 0")
            elif not math.isfinite(g.c):
                out.append(f"constant gate {i}: non-finite c")
        else:
            out.append(f"gate {i}: unknown kind {g.kind!r}")
    return out


def _check_gate(gate: Gate, dim: int) -> None:
    if gate.kind == ROTATION:
        if not (1 <= gate.k < gate.l <= dim):
            raise CircuitError(f"rotation indices ({gate.k}, {gate.l}) invalid for dim {dim}")
    elif gate.kind == CONSTANT:
        if not 1 <= gate.k <= dim:
            raise CircuitError(f"constant index {gate.k} invalid for dim {dim}")
        if gate.c == 0:
            raise CircuitError("constant gate with c = 0")
    else:
        raise CircuitError(f"unknown gate kind {gate.kind!r}")


def _apply_inplace(X: np.ndarray, gate: Gate, inverse_transpose: bool = False) -> None:
    # acts on axis 0; with inverse_transpose the dual gate is applied (c -> 1/c)
    k = gate.k - 1
    if gate.kind == ROTATION:
        l = gate.l - 1
        ct, st = math.cos(gate.theta), math.sin(gate.theta)
        xk = X[k].copy()
        xl = X[l]
        X[k] = ct * xk + st * xl
        X[l] = -st * xk + ct * xl
    elif inverse_transpose:
        X[k] /= gate.c
    else:
        X[k] *= gate.c


def apply_gate(state: Sequence[float] | np.ndarray, gate: Gate) -> np.ndarray:
    x = np.array(state, dtype=float)
    _check_gate(gate, x.shape[0])
    _apply_inplace(x, gate)
    return x


def simulate(circuit: Circuit, x: Sequence[float] | np.ndarray) -> np.ndarray:
    """Run the circuit on ``x`` (or on each column of a 2-D ``x``).

    An input of length ``io_dim`` is padded with zeros for the extra space.
    """
    x = np.array(x, dtype=float)
    if x.shape[0] == circuit.io_dim and circuit.io_dim != circuit.dim:
        pad = np.zeros((circuit.dim - circuit.io_dim,) + x.shape[1:])
        x = np.concatenate([x, pad])
    if x.shape[0] != circuit.dim:
        raise CircuitError(f"input length {x.shape[0]} does not match dim {circuit.dim}")
    for g in circuit.gates:
        _check_gate(g, circuit.dim)
        _apply_inplace(x, g)
    return x


def defining_matrix(circuit: Circuit, step: int | None = None) -> np.ndarray:
    """``M_step``: the map from the input layer to layer ``step`` (default: output)."""
    m = len(circuit.gates) if step is None else step
    if not 0 <= m <= len(circuit.gates):
        raise CircuitError(f"step {m} outside [0, {len(circuit.gates)}]")
    return simulate(Circuit(circuit.dim, circuit.gates[:m], circuit.io_dim), np.eye(circuit.dim))


def dual_circuit(circuit: Circuit) -> Circuit:
    """Same gates with every constant ``c`` replaced by ``1/c``.

    Its ``i``-th defining matrix is the inverse-transpose of the original's.
    """
    gates = [Gate.constant(g.k, 1.0 / g.c) if g.kind == CONSTANT else g for g in circuit.gates]
    return Circuit(circuit.dim, gates, circuit.io_dim)


def matrix_digest(M: np.ndarray, decimals: int = 9) -> str:
    """Short sha256 of the rounded matrix, stable across equivalent builds."""
    R = np.round(np.asarray(M, dtype=float), decimals) + 0.0  # folds -0.0 into 0.0
    return hashlib.sha256(np.ascontiguousarray(R).tobytes()).hexdigest()[:16]


def random_circuit(
    n: int,
    n_gates: int,
    rng: np.random.Generator,
    constant_fraction: float = 0.3,
    log2_c_range: float = 0.5,
) -> Circuit:
    """Seeded random circuit; constants are ``+-2**u`` with ``|u| <= log2_c_range``."""
    gates = []
    for _ in range(n_gates):
        if rng.random() < constant_fraction:
            c = float(2.0 ** rng.uniform(-log2_c_range, log2_c_range))
            if rng.random() < 0.5:
                c = -c
            gates.append(Gate.constant(int(rng.integers(1, n + 1)), c))
        else:
            k, l = sorted(rng.choice(n, size=2, replace=False) + 1)
            gates.append(Gate.rotation(int(k), int(l), float(rng.uniform(0, 2 * math.pi))))
    return Circuit(n, gates)


# --- traces -------------------------------------------------------------------


@dataclass(frozen=True)
class Checkpoint:
    step: int
    residual: float  # max |M M^-1 - I| before any re-inversion
    phi_incremental: float
    phi_full: float
    reinverted: bool

    @property
    def phi_error(self) -> float:
        return abs(self.phi_incremental - self.phi_full) / max(1.0, abs(self.phi_full))


@dataclass
class CircuitTrace:
    """Per-layer record of a circuit run; index ``i`` is layer ``i`` (0 = input).

    ``kappa`` is NaN on layers where it was not computed. ``pair_sum`` and
    ``cs_bound`` hold, for rotation layers, the two intermediate quantities of
    the per-gate bound chain (NaN elsewhere).
    """

    circuit: Circuit
    phi: np.ndarray
    phi_n: np.ndarray | None
    kappa: np.ndarray
    pair_sum: np.ndarray
    cs_bound: np.ndarray
    checkpoints: list[Checkpoint]
    M: np.ndarray
    dual: np.ndarray  # (M^-1)^T of the final layer
    snapshots: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    @property
    def Minv(self) -> np.ndarray:
        return self.dual.T

    @property
    def delta_phi(self) -> np.ndarray:
        return np.diff(self.phi)

    @property
    def kinds(self) -> list[str]:
        return [g.kind for g in self.circuit.gates]

    @property
    def max_phi_error(self) -> float:
        return max((c.phi_error for c in self.checkpoints), default=0.0)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checkpoints), default=0.0)

    @property
    def reinversions(self) -> list[int]:
        return [c.step for c in self.checkpoints if c.reinverted]


def _row_fhat(M: np.ndarray, D: np.ndarray, rows: Sequence[int], ncols: int | None) -> float:
    if ncols is None:
        return float(np.sum(fhat_product(M[rows] * D[rows])))
    return float(np.sum(fhat_product(M[rows, :ncols] * D[rows, :ncols])))


def build_trace(
    circuit: Circuit,
    phi: bool = True,
    phi_n: bool | None = None,
    cond_every: int | None = None,
    exact_cond: bool = False,
    checkpoint_every: int | None = None,
    drift_tol: float = 1e-8,
    keep_matrices: bool = False,
) -> CircuitTrace:
    """Run ``circuit`` from ``M_0 = Id`` maintaining ``M`` and ``(M^-1)^T``.

    ``(M^-1)^T`` evolves as the defining matrix of the dual circuit, so both
    are updated by row operations in O(dim) per gate, and the change in the
    quasi-entropy only involves the two touched rows.

    Checkpoints (every ``checkpoint_every`` gates, default ``4*dim``, plus the
    last layer) recompute the inverse residual and the full quasi-entropy. A
    residual above ``drift_tol`` triggers re-inversion from ``M``; if that
    still fails, :class:`DriftError` is raised.

    Condition numbers are computed at checkpoints (power iteration) unless
    ``cond_every`` is given; ``exact_cond`` computes them at every layer by SVD
    and is limited to ``dim <= 256``.
    """
    problems = validate_circuit(circuit)
    if problems:
        raise CircuitError("; ".join(problems))
    n = circuit.dim
    m = len(circuit.gates)
    if exact_cond and n > EXACT_COND_MAX_DIM:
        raise ValueError(f"exact condition mode is limited to dim <= {EXACT_COND_MAX_DIM}")
    if phi_n is None:
        phi_n = circuit.io_dim < n
    io = circuit.io_dim
    every = checkpoint_every or 4 * n
    ckpt_steps = set(range(every, m + 1, every)) | {m}

    M = np.eye(n)
    D = np.eye(n)
    phis = np.zeros(m + 1)
    phins = np.zeros(m + 1) if phi_n else None
    kappa = np.full(m + 1, np.nan)
    kappa[0] = 1.0
    pair_sum = np.full(m + 1, np.nan)
    cs_bound = np.full(m + 1, np.nan)
    checkpoints: list[Checkpoint] = []
    snapshots: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    if keep_matrices:
        snapshots[0] = (M.copy(), D.T.copy())

    cur, cur_n = 0.0, 0.0
    for i, g in enumerate(circuit.gates, 1):
        rows = [g.k - 1, g.l - 1] if g.kind == ROTATION else [g.k - 1]
        if phi:
            old = _row_fhat(M, D, rows, None)
        if phi_n:
            old_n = _row_fhat(M, D, rows, io)
        _apply_inplace(M, g)
        _apply_inplace(D, g, inverse_transpose=True)
        if phi:
            cur += _row_fhat(M, D, rows, None) - old
        if phi_n:
            cur_n += _row_fhat(M, D, rows, io) - old_n
        phis[i] = cur
        if phi_n:
            phins[i] = cur_n
        if g.kind == ROTATION:
            rk, rl = M[rows[0]], M[rows[1]]
            dk, dl = D[rows[0]], D[rows[1]]
            pair_sum[i] = float(np.sum(np.sqrt((rk * rk + rl * rl) * (dk * dk + dl * dl))))
            cs_bound[i] = math.sqrt(float(rk @ rk + rl @ rl) * float(dk @ dk + dl @ dl))

        if i in ckpt_steps:
            residual = inverse_residual(M, D.T)
            reinverted = False
            if not residual <= drift_tol:
                D = np.linalg.inv(M).T.copy()
                reinverted = True
                after = inverse_residual(M, D.T)
                if not after <= drift_tol:
                    raise DriftError(i, after, drift_tol)
            full = quasi_entropy(M, D.T, check=False) if phi else 0.0
            checkpoints.append(Checkpoint(i, residual, cur if phi else 0.0, full, reinverted))
        if exact_cond:
            kappa[i] = condition_number_svd(M)
        elif (cond_every and i % cond_every == 0) or (not cond_every and i in ckpt_steps):
            kappa[i] = condition_number(M, D.T)
        if keep_matrices:
            snapshots[i] = (M.copy(), D.T.copy())

    if not phi:
        phis[:] = np.nan
    return CircuitTrace(circuit, phis, phins, kappa, pair_sum, cs_bound, checkpoints, M, D, snapshots)


# --- file format --------------------------------------------------------------


def write_circuit(path: str | Path, circuit: Circuit) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in iter_records(circuit):
            fh.write(json.dumps(rec) + "\n")


def iter_records(circuit: Circuit) -> Iterator[dict]:
    yield {"version": FILE_VERSION, "dim": circuit.dim, "io_dim": circuit.io_dim}
    for g in circuit.gates:
        yield g.to_record()


def read_circuit(path: str | Path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh)


def parse_circuit(lines: Iterable[str]) -> Circuit:
    header = None
    gates = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CircuitError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if header is None:
            if rec.get("version") != FILE_VERSION:
                raise CircuitError(f"unsupported circuit file version {rec.get('version')!r}")
            header = rec
            continue
        try:
            gates.append(Gate.from_record(rec))
        except KeyError as exc:
            raise CircuitError(f"line {lineno}: missing field {exc}") from exc
        except CircuitError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from exc
    if header is None:
        raise CircuitError("empty circuit file")
    return Circuit(int(header["dim"]), gates, int(header.get("io_dim", header["dim"])))
