"""Quasi-entropy potentials for rotation/constant linear circuits."""
from .analysis import (
    condition_number,
    fhat,
    invert,
    morgenstern_potential,
    partial_quasi_entropy,
    quasi_entropy,
    quasi_prob_rows,
    spectral_norm,
    uniform_condition_number,
)
from .circuit import (
    Circuit,
    CircuitTrace,
    Gate,
    apply_gate,
    build_trace,
    defining_matrix,
    dual_circuit,
    simulate,
    validate_circuit,
)
from .compiler import CompileResult, givens_qr_circuit, svd_circuit
from .transforms import dft_real_embedding, fft_circuit, walsh_hadamard_matrix, wht_circuit

__version__ = "0.1.0"
