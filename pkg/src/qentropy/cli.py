"""Command-line front end: ``gen``, ``analyze``, ``verify``, ``compile``.

Exit codes: 0 all in-hypothesis checks pass, 1 a check failed, 2 bad usage
or input.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, circuit as circ, compiler, lemmas, transforms

log = logging.getLogger("qentropy")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_C = float(lemmas.g_phi(math.pi / 4))
DEFAULT_C_SOURCE = "closed-form max of g on (0, pi/2], attained at pi/4"


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


# --- gen --------------------------------------------------------------------------


def cmd_gen(args) -> int:
    try:
        if args.kind == "wht":
            c = transforms.wht_circuit(args.size, args.scale)
            target = transforms.walsh_hadamard_matrix(args.size)
        else:
            c = transforms.fft_circuit(args.size, args.scale)
            target = transforms.dft_real_embedding(args.size)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.scale is not None:
        target = args.scale * target
    circ.write_circuit(args.output, c)
    M = circ.defining_matrix(c)
    _emit(
        {
            "kind": args.kind,
            "size": args.size,
            "dim": c.dim,
            "path": str(args.output),
            "rotation_count": c.rotation_count,
            "constant_count": c.constant_count,
            "max_error": float(np.max(np.abs(M - target))),
            "digest": circ.matrix_digest(M),
        },
        args.out,
    )
    return EXIT_OK


# --- analyze ------------------------------------------------------------------------


def _write_phi_csv(path: str, trace: circ.CircuitTrace) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "gate_kind", "phi", "phi_n", "kappa"])
        kinds = ["input"] + trace.kinds
        for i, kind in enumerate(kinds):
            phi_n = "" if trace.phi_n is None else repr(float(trace.phi_n[i]))
            kap = "" if math.isnan(trace.kappa[i]) else repr(float(trace.kappa[i]))
            w.writerow([i, kind, repr(float(trace.phi[i])), phi_n, kap])


def cmd_analyze(args) -> int:
    c = _load_circuit(args.circuit)
    try:
        trace = circ.build_trace(
            c,
            exact_cond=args.exact_cond,
            cond_every=args.cond_every,
            checkpoint_every=args.checkpoint_every,
        )
    except circ.DriftError as exc:
        print(f"error: numerical drift at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cond = analysis.uniform_condition_number(trace)
    C = args.C if args.C is not None else DEFAULT_C
    R = args.R if args.R is not None else cond.value
    report = {
        "circuit_path": str(args.circuit),
        "n": c.io_dim,
        "N": c.extra_dim,
        "rotation_count": c.rotation_count,
        "constant_count": c.constant_count,
        "uniform_condition": cond.to_dict(),
        "phi_initial": float(trace.phi[0]),
        "phi_final": float(trace.phi[-1]),
        "phi_n_final": None if trace.phi_n is None else float(trace.phi_n[-1]),
        "lower_bound_reference": {
            "value": lemmas.rotation_lower_bound(float(trace.phi[-1]), C, R),
            "C": C,
            "C_source": "user" if args.C is not None else DEFAULT_C_SOURCE,
            "R": R,
            "R_source": "user" if args.R is not None else ("trace" if cond.exact else "trace (lower bound)"),
        },
        "checkpoints": {
            "count": len(trace.checkpoints),
            "max_inverse_residual": trace.max_residual,
            "max_phi_relative_error": trace.max_phi_error,
            "reinversions": trace.reinversions,
        },
        "digest": circ.matrix_digest(trace.M),
        "seed": args.seed,
    }
    csv_path = args.phi_trace or args.csv
    if csv_path:
        _write_phi_csv(csv_path, trace)
    _emit(report, args.out)
    return EXIT_OK


# --- verify -------------------------------------------------------------------------


def _verify_delta(args):
    if not args.circuit:
        raise UsageError("verify delta needs --circuit")
    c = _load_circuit(args.circuit)
    exact = c.dim <= circ.EXACT_COND_MAX_DIM
    trace = circ.build_trace(c, exact_cond=exact, cond_every=None if exact else 1)
    C = args.C if args.C is not None else DEFAULT_C
    rep = lemmas.verify_gate_delta_bound(trace, C)
    rep.details["C_source"] = "user" if args.C is not None else DEFAULT_C_SOURCE
    return rep.to_dict(), rep.verdict


def _verify_flat_row(args):
    n_list = args.n or [16, 64, 256, 1024, 4096]
    for n in n_list:
        if n < 2:
            raise UsageError("--n values must be >= 2")
    C0 = args.C0 if args.C0 is not None else 0.2
    est = lemmas.estimate_C0(n_list, args.trials, args.seed)
    sweep = lemmas.sweep_perturbed_flat_row(n_list, C0, args.trials, args.seed)
    payload = sweep.to_dict()
    payload["value"] = est.value
    payload["details"]["C0_estimate"] = est.to_dict()
    payload["details"]["min_margin_at_radius"] = sweep.value
    return payload, sweep.verdict


def _verify_extra_space(args):
    if args.matrix:
        M = analysis.read_matrix_csv(args.matrix)
        n = args.n[0] if args.n else None
        if n is None:
            raise UsageError("verify extra-space with --matrix needs --n")
    else:
        n = args.n[0] if args.n else 64
        N = args.N if args.N is not None else n
        if not transforms.is_power_of_two(n):
            raise UsageError("n must be a power of 2")
        M = np.eye(n + N)
        M[:n, :n] = transforms.walsh_hadamard_matrix(n)
        if args.perturb and N:
            G = np.random.default_rng(args.seed).standard_normal((N, n))
            M[n:, :n] = G * (args.perturb / np.linalg.norm(G, 2))
    R = args.R if args.R is not None else 2.0
    C0 = args.C0 if args.C0 is not None else 0.2
    rep = lemmas.verify_extra_space_entropy(M, n, R=R, C0=C0)
    payload = {
        "lemma": "extra-space",
        "verdict": rep.verdict,
        "value": rep.phi_n,
        "bound": rep.phi_n_bound,
        "witness": None,
        "seed": args.seed,
        "samples": None,
        "grid": None,
        "details": rep.to_dict(),
    }
    return payload, rep.verdict


def cmd_verify(args) -> int:
    if args.suite == "lemma1":
        if args.samples < 1 or args.grid < 1024:
            raise UsageError("lemma1 needs --samples >= 1 and --grid >= 1024")
        rep = lemmas.verify_lemma1(args.samples, args.grid, args.seed)
        payload, ok = rep.to_dict(), rep.verdict
    elif args.suite == "delta":
        payload, ok = _verify_delta(args)
    elif args.suite == "appendixA":
        n_max = args.n[0] if args.n else 256
        rep = lemmas.sweep_quasi_entropy_range(args.samples, 2, n_max, seed=args.seed)
        payload, ok = rep.to_dict(), rep.verdict
    elif args.suite == "appendixB":
        payload, ok = _verify_flat_row(args)
    else:
        payload, ok = _verify_extra_space(args)
    _emit(payload, args.out)
    return EXIT_OK if ok else EXIT_FAIL


# --- compile ------------------------------------------------------------------------


def cmd_compile(args) -> int:
    A = analysis.read_matrix_csv(args.matrix)
    try:
        if args.mode == "qr":
            res = compiler.givens_qr_circuit(A)
        else:
            res = compiler.svd_circuit(A)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    circ.write_circuit(args.output, res.circuit)
    payload = res.to_dict()
    payload.update(mode=args.mode, path=str(args.output), digest=circ.matrix_digest(circ.defining_matrix(res.circuit)))
    _emit(payload, args.out)
    return EXIT_OK


def _load_circuit(path) -> circ.Circuit:
    try:
        c = circ.read_circuit(path)
    except (OSError, circ.CircuitError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read circuit {path}: {exc}") from exc
    problems = circ.validate_circuit(c)
    if problems:
        raise UsageError(f"invalid circuit {path}: " + "; ".join(problems[:5]))
    return c


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qentropy", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="also write the JSON payload to this path")
    common.add_argument("--json", action="store_true", help="JSON output (always on; kept for scripts)")
    common.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("gen", parents=[common], help="write a transform circuit")
    g.add_argument("kind", choices=["wht", "dft"])
    g.add_argument("size", type=int, help="n for wht, complex order m for dft")
    g.add_argument("output")
    g.add_argument("--scale", type=float, default=None)
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", parents=[common], help="trace a circuit file")
    a.add_argument("circuit")
    a.add_argument("--exact-cond", action="store_true", help="condition number at every layer (dim <= 256)")
    a.add_argument("--cond-every", type=int, default=None)
    a.add_argument("--checkpoint-every", type=int, default=None)
    a.add_argument("--phi-trace", default=None, help="CSV of (step, gate_kind, phi, phi_n, kappa)")
    a.add_argument("--csv", default=None, help="alias of --phi-trace")
    a.add_argument("--C", type=float, default=None)
    a.add_argument("--R", type=float, default=None)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=["lemma1", "delta", "appendixA", "appendixB", "extra-space"])
    v.add_argument("--samples", type=int, default=100_000)
    v.add_argument("--grid", type=int, default=1024)
    v.add_argument("--circuit", default=None)
    v.add_argument("--C", type=float, default=None)
    v.add_argument("--n", type=int, action="append", default=None)
    v.add_argument("--N", type=int, default=None)
    v.add_argument("--trials", type=int, default=10_000)
    v.add_argument("--R", type=float, default=None)
    v.add_argument("--C0", type=float, default=None)
    v.add_argument("--perturb", type=float, default=0.0, help="spectral norm of the garbage block")
    v.add_argument("--matrix", default=None)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compile", parents=[common], help="compile a CSV matrix into a circuit")
    c.add_argument("matrix")
    c.add_argument("output")
    c.add_argument("--mode", choices=["qr", "svd"], default="qr")
    c.set_defaults(func=cmd_compile)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
