"""Quasi-entropy along transform circuits, written as one CSV per circuit.

    python scripts/phi_trajectory.py --sizes 16 64 256 --outdir runs/phi
"""
import argparse
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from qentropy.analysis import uniform_condition_number
from qentropy.circuit import ROTATION, build_trace
from qentropy.transforms import fft_circuit, wht_circuit


@dataclass
class Config:
    sizes: list = field(default_factory=lambda: [16, 64, 256])
    outdir: str = "runs/phi"


def run(cfg: Config):
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for n in cfg.sizes:
        for name, c in (("wht", wht_circuit(n)), ("dft", fft_circuit(n // 2))):
            t = build_trace(c, exact_cond=c.dim <= 256, cond_every=None if c.dim <= 256 else 4 * c.dim)
            with open(out / f"{name}{n}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["step", "gate_kind", "phi", "kappa"])
                for i, kind in enumerate(["input"] + t.kinds):
                    w.writerow([i, kind, t.phi[i], "" if math.isnan(t.kappa[i]) else t.kappa[i]])
            d = t.delta_phi[np.array(t.kinds) == ROTATION]
            rows.append(
                (name, n, c.rotation_count, t.phi[-1], n * math.log2(n), float(np.max(np.abs(d))),
                 uniform_condition_number(t).value)
            )
    print(f"{'kind':>4} {'n':>5} {'rot':>6} {'phi_final':>10} {'n log n':>8} {'max|dphi|':>9} {'R':>8}")
    for r in rows:
        print(f"{r[0]:>4} {r[1]:>5} {r[2]:>6} {r[3]:>10.3f} {r[4]:>8.1f} {r[5]:>9.4f} {r[6]:>8.5f}")
    return rows


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    p.add_argument("--sizes", type=int, nargs="+", default=Config().sizes)
    p.add_argument("--outdir", default=Config.outdir)
    a = p.parse_args()
    run(Config(a.sizes, a.outdir))
