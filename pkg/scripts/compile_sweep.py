"""Compile seeded random matrices and tabulate rotation counts, reconstruction
error and the uniform condition number of the resulting circuits.

    python scripts/compile_sweep.py --sizes 8 16 32 64 --kappas 1 10 100
"""
import argparse
import math
from dataclasses import dataclass, field

import numpy as np

from qentropy.analysis import quasi_entropy
from qentropy.compiler import givens_qr_circuit, random_conditioned, random_orthogonal, svd_circuit
from qentropy.lemmas import g_phi, rotation_lower_bound


@dataclass
class Config:
    sizes: list = field(default_factory=lambda: [8, 16, 32, 64])
    kappas: list = field(default_factory=lambda: [1.0, 10.0, 100.0])
    seed: int = 0


def run(cfg: Config):
    C = g_phi(math.pi / 4)
    rng = np.random.default_rng(cfg.seed)
    print(f"{'n':>4} {'kappa':>6} {'mode':>4} {'rot':>6} {'const':>6} {'err':>8} {'R':>8} {'phi':>8} {'phi/2CR':>8}")
    rows = []
    for n in cfg.sizes:
        for kappa in cfg.kappas:
            if kappa == 1.0:
                mode = "qr"
                A = random_orthogonal(n, rng)
                res = givens_qr_circuit(A)
            else:
                mode = "svd"
                A = random_conditioned(n, kappa, rng)
                res = svd_circuit(A)
            R = res.uniform_condition.value
            phi = quasi_entropy(A)
            bound = rotation_lower_bound(phi, C, R)
            rows.append((n, kappa, mode, res.rotation_count, res.constant_count, res.reconstruction_error, R, phi, bound))
            print(
                f"{n:>4} {kappa:>6g} {mode:>4} {res.rotation_count:>6} {res.constant_count:>6} "
                f"{res.reconstruction_error:>8.1e} {R:>8.2f} {phi:>8.2f} {bound:>8.2f}"
            )
    return rows


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    p.add_argument("--sizes", type=int, nargs="+", default=Config().sizes)
    p.add_argument("--kappas", type=float, nargs="+", default=Config().kappas)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    run(Config(a.sizes, a.kappas, a.seed))
