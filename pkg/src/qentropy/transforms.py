"""Walsh-Hadamard and real-embedded DFT matrices, and circuits computing them.

A 2x2 Hadamard butterfly ``(a, b) -> ((a+b)/sqrt2, (a-b)/sqrt2)`` on
coordinates ``k < l`` is a pi/4 rotation followed by ``constant(l, -1)``;
a swap is a pi/2 rotation followed by ``constant(l, -1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate

# every fft_circuit(m) with m >= 2 uses at most FFT_ROTATION_CONSTANT * m * log2(m) rotations
FFT_ROTATION_CONSTANT = 2.5


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def _require_pow2(n: int, name: str = "n") -> int:
    if not is_power_of_two(n):
        raise ValueError(f"{name} must be a power of 2, got {n}")
    return int(n)


def walsh_hadamard_matrix(n: int) -> np.ndarray:
    """``F[i, j] = (-1)**popcount(i & j) / sqrt(n)`` (0-based ``i, j``)."""
    n = _require_pow2(n)
    idx = np.arange(n)
    parity = np.vectorize(lambda v: bin(v).count("1") & 1)(idx[:, None] & idx[None, :])
    return np.where(parity == 1, -1.0, 1.0) / math.sqrt(n)


def dft_real_embedding(m: int) -> np.ndarray:
    """Real ``2m x 2m`` orthogonal matrix of the normalized ``m``-point DFT.

    Block layout: coordinates ``0..m-1`` hold real parts and ``m..2m-1``
    imaginary parts, so the matrix is ``[[Re F, -Im F], [Im F, Re F]]``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    k = np.arange(m)
    F = np.exp(-2j * np.pi * np.outer(k, k) / m) / math.sqrt(m)
    re, im = F.real, F.imag
    return np.block([[re, -im], [im, re]])


def _butterfly(k: int, l: int) -> list[Gate]:
    return [Gate.rotation(k, l, math.pi / 4), Gate.constant(l, -1.0)]


def _swap(k: int, l: int) -> list[Gate]:
    return [Gate.rotation(k, l, math.pi / 2), Gate.constant(l, -1.0)]


def _scaled(circuit: Circuit, scale: float | None) -> Circuit:
    if scale is not None and scale != 1.0:
        if scale == 0:
            raise ValueError("scale must be nonzero")
        circuit.extend(Gate.constant(k, scale) for k in range(1, circuit.dim + 1))
    return circuit


def wht_circuit(n: int, scale: float | None = None) -> Circuit:
    """In-place fast Walsh-Hadamard transform: ``(n/2) log2 n`` butterflies."""
    n = _require_pow2(n)
    c = Circuit(n)
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for j in range(start, start + h):
                c.extend(_butterfly(j + 1, j + h + 1))
        h *= 2
    return _scaled(c, scale)


def _bit_reverse(i: int, bits: int) -> int:
    return int(format(i, f"0{bits}b")[::-1], 2) if bits else 0


def fft_circuit(m: int, scale: float | None = None) -> Circuit:
    """Radix-2 decimation-in-time FFT on the block real/imaginary layout.

    Gate budget for ``m >= 2``: at most ``m`` rotations for the bit-reversal
    swaps, ``m log2 m`` for butterflies and ``(m/2) log2 m`` for twiddles.
    """
    m = _require_pow2(m, "m")
    c = Circuit(2 * m)
    bits = m.bit_length() - 1
    re = lambda p: p + 1  # noqa: E731  1-based coordinate of Re x[p]
    im = lambda p: p + m + 1  # noqa: E731
    for p in range(m):
        q = _bit_reverse(p, bits)
        if p < q:
            c.extend(_swap(re(p), re(q)))
            c.extend(_swap(im(p), im(q)))
    size = 2
    while size <= m:
        half = size // 2
        for start in range(0, m, size):
            for j in range(half):
                a, b = start + j, start + j + half
                if j:
                    # b *= exp(-2 pi i j / size): a rotation of (Re b, Im b)
                    c.rotate(re(b), im(b), 2 * math.pi * j / size)
                c.extend(_butterfly(re(a), re(b)))
                c.extend(_butterfly(im(a), im(b)))
        size *= 2
    return _scaled(c, scale)


@dataclass(frozen=True)
class TransformSpec:
    kind: str  # "walsh_hadamard" | "dft_real"
    n: int  # real dimension

    def __post_init__(self):
        if self.kind == "walsh_hadamard":
            _require_pow2(self.n)
        elif self.kind == "dft_real":
            if self.n % 2 or not is_power_of_two(self.n // 2):
                raise ValueError(f"dft_real needs n = 2m with m a power of 2, got {self.n}")
        else:
            raise ValueError(f"unknown transform kind {self.kind!r}")

    def matrix(self) -> np.ndarray:
        if self.kind == "walsh_hadamard":
            return walsh_hadamard_matrix(self.n)
        return dft_real_embedding(self.n // 2)

    def circuit(self, scale: float | None = None) -> Circuit:
        if self.kind == "walsh_hadamard":
            return wht_circuit(self.n, scale)
        return fft_circuit(self.n // 2, scale)
