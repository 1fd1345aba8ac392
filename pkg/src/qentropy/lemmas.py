"""Numerical checks of the inequalities behind the quasi-entropy lower bounds.

Covers the rotation-gap lemma (``alpha - beta`` of the two-row potential
``Psi`` against ``sqrt((w^2+y^2)(x^2+z^2))``), the per-gate change bound
along circuit traces, the two-sided range bound for ``sum fhat(x_i, y_i)``,
the perturbed flat row inequality and its radius constant, and the
extra-space partial entropy bound.

All randomized routines take an explicit seed; reductions are max/min so
results do not depend on evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .analysis import (
    condition_number,
    fhat,
    fhat_product,
    invert,
    partial_quasi_entropy,
    spectral_norm,
)
from .circuit import CONSTANT, ROTATION, CircuitTrace
from .transforms import walsh_hadamard_matrix

HALF_PI = math.pi / 2
Q_OFFSET = 1e-6  # grid points placed this far either side of the kinks of Psi
_CHUNK_ELEMS = 2_000_000


@dataclass
class LemmaEstimate:
    value: float
    sample_count: int
    grid_resolution: int
    seed: int | None
    tolerance: float
    witness: dict
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    lemma: str
    verdict: bool
    value: float | None
    bound: float | None
    witness: dict | None = None
    seed: int | None = None
    samples: int | None = None
    grid: int | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


# --- Psi and the rotation gap --------------------------------------------------


def psi(w, x, y, z):
    """``fhat(w, x) + fhat(y, z)``."""
    return fhat(w, x) + fhat(y, z)


def rotate_quadruple(w, x, y, z, theta):
    ct, st = np.cos(theta), np.sin(theta)
    return (w * ct + y * st, x * ct + z * st, -w * st + y * ct, -x * st + z * ct)


def psi_rotated(w, x, y, z, theta):
    """Psi after rotating both pairs ``(w, y)`` and ``(x, z)`` by ``theta``."""
    return psi(*rotate_quadruple(w, x, y, z, theta))


def _psi_grid(W, X, Y, Z, T):
    # W..Z: (B, 1); T: (B, G) or (G,)
    ct, st = np.cos(T), np.sin(T)
    p1 = (W * ct + Y * st) * (X * ct + Z * st)
    p2 = (Y * ct - W * st) * (Z * ct - X * st)
    return fhat_product(p1) + fhat_product(p2)


def _golden(f, lo, hi, maximize, iters=60):
    """Vectorized golden-section search on per-row brackets ``[lo, hi]``."""
    sgn = -1.0 if maximize else 1.0
    r = (math.sqrt(5) - 1) / 2
    a, b = lo.copy(), hi.copy()
    c = b - r * (b - a)
    d = a + r * (b - a)
    fc, fd = sgn * f(c), sgn * f(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - r * (b - a)
        new_d = a + r * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, sgn * f(new_c), fd)
        fd_next = np.where(left, fc, sgn * f(new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    x = (a + b) / 2
    return x, f(x)


def alpha_beta_batch(W, X, Y, Z, grid_resolution: int = 4096, refine: bool = True):
    """Sup and inf over theta of the rotated Psi, for arrays of quadruples.

    Psi is pi/2-periodic in theta, so one period is searched: a uniform grid,
    the analytic candidates ``(a+b)/2 + {0, pi/4}`` where ``a, b`` are the
    polar angles of ``(w, y)`` and ``(x, z)``, points just beside the kinks
    at ``a, b (mod pi/2)``, and golden-section refinement around the best
    grid cells. Returns ``(alpha, beta, theta_alpha, theta_beta)``.
    """
    W, X, Y, Z = (np.atleast_1d(np.asarray(v, dtype=float)).ravel() for v in (W, X, Y, Z))
    B = W.size
    grid = np.arange(grid_resolution) * (HALF_PI / grid_resolution)
    step = HALF_PI / grid_resolution
    alpha = np.empty(B)
    beta = np.empty(B)
    t_alpha = np.empty(B)
    t_beta = np.empty(B)
    chunk = max(1, _CHUNK_ELEMS // (grid_resolution + 8))
    for s in range(0, B, chunk):
        sl = slice(s, min(B, s + chunk))
        w, x, y, z = (v[sl, None] for v in (W, X, Y, Z))
        a = np.arctan2(y, w)
        b = np.arctan2(z, x)
        mid = (a + b) / 2
        cand = np.concatenate(
            [mid, mid + math.pi / 4, a - Q_OFFSET, a + Q_OFFSET, b - Q_OFFSET, b + Q_OFFSET], axis=1
        )
        T = np.concatenate([np.broadcast_to(grid, (w.shape[0], grid_resolution)), cand], axis=1)
        vals = _psi_grid(w, x, y, z, T)
        imax = np.argmax(vals, axis=1)
        imin = np.argmin(vals, axis=1)
        rows = np.arange(w.shape[0])
        amax, amin = vals[rows, imax], vals[rows, imin]
        tmax, tmin = T[rows, imax], T[rows, imin]
        if refine:
            ig = np.argmax(vals[:, :grid_resolution], axis=1)
            jg = np.argmin(vals[:, :grid_resolution], axis=1)

            def f(t, w=w[:, 0], x=x[:, 0], y=y[:, 0], z=z[:, 0]):
                return _psi_grid(w, x, y, z, t)

            for idx, maximize in ((ig, True), (jg, False)):
                center = grid[idx]
                t_opt, v_opt = _golden(f, center - step, center + step, maximize)
                if maximize:
                    better = v_opt > amax
                    amax = np.where(better, v_opt, amax)
                    tmax = np.where(better, t_opt, tmax)
                else:
                    better = v_opt < amin
                    amin = np.where(better, v_opt, amin)
                    tmin = np.where(better, t_opt, tmin)
        alpha[sl], beta[sl] = amax, amin
        t_alpha[sl], t_beta[sl] = np.mod(tmax, HALF_PI), np.mod(tmin, HALF_PI)
    return alpha, beta, t_alpha, t_beta


def alpha_beta(w, x, y, z, grid_resolution: int = 4096) -> tuple[float, float]:
    if grid_resolution < 1024:
        raise ValueError("grid_resolution must be at least 1024")
    a, b, _, _ = alpha_beta_batch(w, x, y, z, grid_resolution)
    return float(a[0]), float(b[0])


def gap_ratio(w, x, y, z, grid_resolution: int = 4096):
    """``(alpha - beta) / sqrt((w^2+y^2)(x^2+z^2))``, zero for degenerate pairs."""
    W, X, Y, Z = (np.atleast_1d(np.asarray(v, dtype=float)).ravel() for v in (w, x, y, z))
    a, b, _, _ = alpha_beta_batch(W, X, Y, Z, grid_resolution)
    denom = np.sqrt((W**2 + Y**2) * (X**2 + Z**2))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(denom > 0, (a - b) / np.where(denom > 0, denom, 1.0), 0.0)
    return out


class ProportionalError(ValueError):
    """The pairs ``(w, y)`` and ``(x, z)`` are zero or proportional."""


@dataclass(frozen=True)
class CanonicalForm:
    """``(w, y) = r(cos phi/2, sin phi/2)``, ``(x, z) = s(cos phi/2, -sin phi/2)``.

    The original quadruple satisfies
    ``psi_rotated(orig, t) == sign * psi_rotated(canonical, t - shift)``;
    ``swapped`` records that the roles of the two pairs were exchanged.
    """

    r: float
    s: float
    phi: float
    shift: float
    sign: int
    swapped: bool

    def quadruple(self) -> tuple[float, float, float, float]:
        h = self.phi / 2
        return (self.r * math.cos(h), self.s * math.cos(h), self.r * math.sin(h), -self.s * math.sin(h))


def _wrap(angle: float) -> float:
    # into (-pi, pi]
    a = math.fmod(angle + math.pi, 2 * math.pi)
    if a <= 0:
        a += 2 * math.pi
    return a - math.pi


def canonical_form(w: float, x: float, y: float, z: float, tol: float = 1e-12) -> CanonicalForm:
    r = math.hypot(w, y)
    s = math.hypot(x, z)
    if r == 0 or s == 0:
        raise ProportionalError("degenerate quadruple: a zero pair")
    a = math.atan2(y, w)
    b = math.atan2(z, x)
    d = _wrap(a - b)
    sign = 1
    if abs(d) > HALF_PI:
        # negate (w, y): Psi changes sign, alpha - beta does not
        a = _wrap(a + math.pi)
        d = _wrap(a - b)
        sign = -1
    swapped = False
    if d < 0:
        a, b, r, s, d = b, a, s, r, -d
        swapped = True
    if d <= tol:
        raise ProportionalError("proportional pairs: use the proportional-case branch")
    return CanonicalForm(r, s, d, a - d / 2, sign, swapped)


def _tlog2(t):
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, t, 1.0)
    return np.where(t > 0, t * np.log2(safe), 0.0)


def g_phi(phi):
    """Closed-form gap between the two extremal values of Psi in canonical form,
    per unit ``r*s``; defined on ``(0, pi/2]``."""
    p = np.asarray(phi, dtype=float)
    if np.any(~((p > 0) & (p <= HALF_PI + 1e-12))):
        raise ValueError("phi must lie in (0, pi/2]")
    c2 = np.cos(p / 2) ** 2
    s2 = np.sin(p / 2) ** 2
    cp = np.clip(np.cos(p), 0.0, None)
    last = _tlog2(cp) - cp  # cos(phi) * log2(cos(phi) / 2)
    out = np.abs(_tlog2(c2) - _tlog2(s2) - last)
    return out if out.ndim else float(out)


def estimate_lemma1_constant(
    samples: int = 100_000,
    grid_resolution: int = 1024,
    seed: int = 0,
    phi_points: int = 1_000_000,
    proportional_samples: int | None = None,
) -> LemmaEstimate:
    """Empirical supremum of the rotation gap ratio.

    Takes the max over (a) seeded random Gaussian quadruples evaluated by
    brute force, (b) ``g`` on a dense grid of ``(0, pi/2]`` and (c) random
    proportional / anti-proportional quadruples.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    W, X, Y, Z = rng.standard_normal((4, samples))
    ratios = gap_ratio(W, X, Y, Z, grid_resolution)
    i_rand = int(np.argmax(ratios))

    phis = np.linspace(HALF_PI / phi_points, HALF_PI, phi_points)
    gs = g_phi(phis)
    i_grid = int(np.argmax(gs))
    quarter = phis <= math.pi / 4 + 1e-15

    k = proportional_samples or max(100, samples // 10)
    ang = rng.uniform(0, 2 * math.pi, k)
    rr = np.exp(rng.uniform(-3, 3, k))
    ss = np.exp(rng.uniform(-3, 3, k)) * rng.choice([-1.0, 1.0], k)
    PW, PY = rr * np.cos(ang), rr * np.sin(ang)
    PX, PZ = ss * np.cos(ang), ss * np.sin(ang)
    pratios = gap_ratio(PW, PX, PY, PZ, grid_resolution)
    i_prop = int(np.argmax(pratios))

    parts = {
        "random": (float(ratios[i_rand]), {"w": W[i_rand], "x": X[i_rand], "y": Y[i_rand], "z": Z[i_rand]}),
        "phi_grid": (float(gs[i_grid]), {"phi": float(phis[i_grid])}),
        "proportional": (
            float(pratios[i_prop]),
            {"w": PW[i_prop], "x": PX[i_prop], "y": PY[i_prop], "z": PZ[i_prop]},
        ),
    }
    source = max(parts, key=lambda key: parts[key][0])
    value, wit = parts[source]
    witness = {"source": source, **{key: float(v) for key, v in wit.items()}}
    details = {
        "random_max": parts["random"][0],
        "phi_grid_max": parts["phi_grid"][0],
        "proportional_max": parts["proportional"][0],
        "proportional_min": float(np.min(pratios)),
        "g_max_up_to_quarter_pi": float(np.max(gs[quarter])),
        "g_max_up_to_half_pi": float(np.max(gs)),
        "phi_points": phi_points,
        "proportional_samples": k,
    }
    return LemmaEstimate(value, samples, grid_resolution, seed, 1e-6, witness, details)


def verify_lemma1(samples: int = 100_000, grid_resolution: int = 1024, seed: int = 0, tol: float = 1e-6):
    """No brute-force gap exceeds the closed-form extremal gap ``max g``."""
    est = estimate_lemma1_constant(samples, grid_resolution, seed)
    g_max = est.details["g_max_up_to_half_pi"]
    brute = max(est.details["random_max"], est.details["proportional_max"])
    return VerificationReport(
        "lemma1",
        bool(brute <= g_max + tol and math.isfinite(est.value)),
        est.value,
        g_max + tol,
        est.witness,
        seed,
        samples,
        grid_resolution,
        {"estimate": est.to_dict()},
    )


# --- per-gate bound along traces --------------------------------------------------


def verify_gate_delta_bound(trace: CircuitTrace, C: float, rel_tol: float = 1e-9) -> VerificationReport:
    """Check every layer's quasi-entropy change against the per-gate bound.

    Constant gates must leave the quasi-entropy unchanged. For rotations the
    chain ``|dPhi| <= C * pair_sum <= C * cs_bound <= 2 C kappa`` is checked
    link by link; where ``kappa`` was not computed the ``cs_bound`` link
    (which implies the ``kappa`` one) is used as the final bound.
    """
    phi = trace.phi
    delta = np.diff(phi)
    violations = []
    worst = 0.0
    rotations = constants = 0
    for i, g in enumerate(trace.circuit.gates, 1):
        d = float(delta[i - 1])
        slack = rel_tol * max(1.0, abs(phi[i]))
        if g.kind == CONSTANT:
            constants += 1
            if abs(d) > slack:
                violations.append({"step": i, "kind": CONSTANT, "delta": d, "bound": slack})
            continue
        rotations += 1
        ps, cs, kap = trace.pair_sum[i], trace.cs_bound[i], trace.kappa[i]
        final = 2 * C * kap if not math.isnan(kap) else C * cs
        checks = [
            ("lemma", abs(d), C * ps),
            ("cauchy_schwarz", ps, cs),
        ]
        if not math.isnan(kap):
            checks.append(("condition", cs, 2 * kap))
        checks.append(("final", abs(d), final))
        for link, lhs, rhs in checks:
            if lhs > rhs + slack * max(1.0, abs(rhs)):
                violations.append({"step": i, "kind": ROTATION, "link": link, "lhs": lhs, "rhs": rhs})
        if final > 0:
            worst = max(worst, abs(d) / final)
    return VerificationReport(
        "delta",
        not violations,
        worst,
        1.0,
        violations[0] if violations else None,
        details={
            "C": C,
            "rotations": rotations,
            "constants": constants,
            "violations": violations,
            "max_abs_delta_rotation": float(
                max((abs(delta[i]) for i, g in enumerate(trace.circuit.gates) if g.kind == ROTATION), default=0.0)
            ),
        },
    )


def rotation_lower_bound(phi_final: float, C: float, R: float) -> float:
    """Rotations needed to move the quasi-entropy from 0 to ``phi_final`` when
    each rotation changes it by at most ``2 C R``."""
    return phi_final / (2 * C * R)


# --- two-sided range bound ------------------------------------------------------


@dataclass(frozen=True)
class RangeCheck:
    holds: bool
    value: float
    bound: float
    slack: float
    alpha: float
    beta: float

    def __bool__(self) -> bool:
        return self.holds


def verify_quasi_entropy_range(x, y, tol: float = 1e-12) -> RangeCheck:
    """``|sum fhat(x_i, y_i)| <= ab log2 n + |ab log2(ab)|`` with ``a, b`` the norms."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape or x.size == 0:
        raise ValueError("x and y must be non-empty and of equal length")
    a, b = float(np.linalg.norm(x)), float(np.linalg.norm(y))
    ab = a * b
    value = float(np.sum(fhat(x, y)))
    bound = ab * math.log2(x.size) + (abs(ab * math.log2(ab)) if ab > 0 else 0.0)
    slack = bound - abs(value)
    return RangeCheck(slack >= -tol * max(1.0, bound), value, bound, slack, a, b)


def sweep_quasi_entropy_range(
    samples: int = 100_000,
    n_min: int = 2,
    n_max: int = 256,
    norm_range: tuple[float, float] = (1e-3, 1e3),
    seed: int = 0,
) -> VerificationReport:
    rng = np.random.default_rng(seed)
    lo, hi = np.log10(norm_range[0]), np.log10(norm_range[1])
    violations = []
    worst = None
    for t in range(samples):
        n = int(rng.integers(n_min, n_max + 1))
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        x *= 10 ** rng.uniform(lo, hi) / np.linalg.norm(x)
        y *= 10 ** rng.uniform(lo, hi) / np.linalg.norm(y)
        chk = verify_quasi_entropy_range(x, y)
        rel = chk.slack / max(1.0, chk.bound)
        if worst is None or rel < worst[0]:
            worst = (rel, t, n, chk)
        if not chk.holds:
            violations.append({"sample": t, "n": n, "value": chk.value, "bound": chk.bound})
    flat = [verify_quasi_entropy_range(np.full(n, n**-0.5), np.full(n, n**-0.5)) for n in (2, 16, n_max)]
    rel, t, n, chk = worst
    return VerificationReport(
        "appendixA",
        not violations,
        chk.value,
        chk.bound,
        {"sample": t, "n": n, "relative_slack": rel},
        seed,
        samples,
        None,
        {
            "violations": violations[:20],
            "violation_count": len(violations),
            "flat_case_slack": max(abs(c.slack) for c in flat),
        },
    )


# --- perturbed flat row -----------------------------------------------------------


@dataclass(frozen=True)
class FlatRowCheck:
    holds: bool
    value: float
    bound: float

    def __bool__(self) -> bool:
        return self.holds


def flat_row_value(n: int, eps) -> np.ndarray | float:
    """``sum_i fhat(1/sqrt n, 1/sqrt n + eps_i)``; ``eps`` may be ``(..., n)``."""
    eps = np.asarray(eps, dtype=float)
    u = 1.0 / math.sqrt(n)
    out = np.sum(fhat_product(u * (u + eps)), axis=-1)
    return out if np.ndim(out) else float(out)


def verify_perturbed_flat_row(n: int, eps) -> FlatRowCheck:
    eps = np.asarray(eps, dtype=float).ravel()
    if eps.size != n:
        raise ValueError(f"eps has length {eps.size}, expected {n}")
    value = flat_row_value(n, eps)
    bound = 0.75 * math.log2(n)
    return FlatRowCheck(value >= bound, value, bound)


def _structured_directions(n: int) -> dict[str, np.ndarray]:
    dirs = {"single_negative": -np.eye(1, n).ravel(), "flat_negative": -np.ones(n) / math.sqrt(n)}
    k = 2
    while k < n:
        d = np.zeros(n)
        d[:k] = -1.0 / math.sqrt(k)
        dirs[f"block{k}_negative"] = d
        k *= 2
    dirs["flat_positive"] = np.ones(n) / math.sqrt(n)
    return dirs


def _radius_thresholds(n: int, dirs: np.ndarray, rho_max: float, iters: int) -> np.ndarray:
    # per-direction bisection for the largest radius still satisfying the inequality
    bound = 0.75 * math.log2(n)
    out = np.empty(dirs.shape[0])
    chunk = max(1, _CHUNK_ELEMS // n)
    for s in range(0, dirs.shape[0], chunk):
        D = dirs[s : s + chunk]
        ok_top = flat_row_value(n, rho_max * D) >= bound
        lo = np.zeros(D.shape[0])
        hi = np.full(D.shape[0], rho_max)
        for _ in range(iters):
            mid = (lo + hi) / 2
            ok = flat_row_value(n, mid[:, None] * D) >= bound
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        out[s : s + chunk] = np.where(ok_top, rho_max, lo)
    return out


def estimate_C0(
    n_list=(16, 64, 256, 1024, 4096),
    trials: int = 10_000,
    seed: int = 0,
    rho_max: float = 1.0,
    iters: int = 40,
) -> LemmaEstimate:
    """Largest radius at which every probed perturbation keeps the flat row
    above ``(3/4) log2 n``, minimized over ``n``.

    Probes are ``trials`` random unit directions per ``n`` plus structured
    ones (one negative coordinate, negative blocks, the flat negative shift).
    Each direction gets its own bisection on ``[0, rho_max]``; the radius for
    ``n`` is the minimum over directions.
    """
    rng = np.random.default_rng(seed)
    per_n = {}
    best = None
    for n in n_list:
        structured = _structured_directions(n)
        names = list(structured)
        S = np.array([structured[k] for k in names])
        R = rng.standard_normal((trials, n))
        R /= np.linalg.norm(R, axis=1, keepdims=True)
        th_s = _radius_thresholds(n, S, rho_max, iters)
        th_r = _radius_thresholds(n, R, rho_max, iters)
        radius = float(min(th_s.min(), th_r.min()))
        order = np.argsort(th_s)
        per_n[n] = {
            "radius": radius,
            "random_min": float(th_r.min()),
            "structured": {names[j]: float(th_s[j]) for j in order},
            "worst": names[order[0]] if th_s.min() <= th_r.min() else "random",
        }
        if best is None or radius < best[0]:
            best = (radius, n)
    value, n_star = best
    witness = {"n": n_star, "direction": per_n[n_star]["worst"]}
    details = {"per_n": {str(k): v for k, v in per_n.items()}, "rho_max": rho_max, "n_list": list(n_list)}
    return LemmaEstimate(value, trials, iters, seed, rho_max / 2**iters, witness, details)


def sweep_perturbed_flat_row(n_list, radius: float, trials: int, seed: int = 0) -> VerificationReport:
    """Random perturbations with norm up to ``radius`` (plus structured ones at
    ``radius``) must all satisfy the flat row inequality."""
    rng = np.random.default_rng(seed)
    failures = []
    worst = None
    for n in n_list:
        E = rng.standard_normal((trials, n))
        E *= (radius * rng.uniform(0, 1, (trials, 1)) ** (1 / n)) / np.linalg.norm(E, axis=1, keepdims=True)
        S = radius * np.array(list(_structured_directions(n).values()))
        vals = np.concatenate([flat_row_value(n, E), flat_row_value(n, S), [flat_row_value(n, np.zeros(n))]])
        bound = 0.75 * math.log2(n)
        margin = float(np.min(vals - bound))
        if worst is None or margin < worst[0]:
            worst = (margin, n)
        if margin < 0:
            failures.append({"n": n, "margin": margin})
    return VerificationReport(
        "appendixB",
        not failures,
        worst[0],
        0.0,
        {"n": worst[1]},
        seed,
        trials,
        None,
        {"radius": radius, "failures": failures},
    )


# --- extra space ----------------------------------------------------------------


@dataclass
class ExtraSpaceReport:
    n: int
    N: int
    R: float
    C0: float
    top_left_error: float
    top_left_is_F: bool
    garbage_norm: float
    garbage_ok: bool
    condition: float
    condition_ok: bool
    N_ok: bool
    max_garbage_column: float
    garbage_columns_ok: bool
    max_dual_column: float
    dual_columns_ok: bool
    error_norm: float
    error_ok: bool
    min_garbage_row_sum: float
    garbage_rows_ok: bool
    min_top_row_sum: float
    top_rows_ok: bool
    phi_n: float
    phi_n_bound: float
    conclusion_ok: bool

    @property
    def hypotheses_hold(self) -> bool:
        return self.top_left_is_F and self.garbage_ok and self.condition_ok and self.N_ok

    @property
    def verdict(self) -> bool:
        """False only when the hypotheses hold and the conclusion fails."""
        return (not self.hypotheses_hold) or self.conclusion_ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hypotheses_hold"] = self.hypotheses_hold
        d["verdict"] = self.verdict
        return d


def verify_extra_space_entropy(
    M,
    n: int,
    R: float = 2.0,
    C0: float = 0.2,
    F: np.ndarray | None = None,
    tol: float = 1e-9,
) -> ExtraSpaceReport:
    """Check the extra-space hypotheses and partial-entropy bound for ``M``.

    ``M`` has side ``n + N``; its top-left ``n x n`` block should equal ``F``
    (Walsh-Hadamard by default) and its bottom-left ("garbage") block should
    have spectral norm at most ``C0 / R``. Intermediate quantities of the
    argument are reported alongside: column norms of the garbage block and of
    the matching block of ``(M^-1)^T``, the error ``[M^-1]_nn - F``, per-column
    garbage sums and per-row top sums of ``fhat``.
    """
    M = np.asarray(M, dtype=float)
    side = M.shape[0]
    if M.shape != (side, side) or not 1 <= n <= side:
        raise ValueError(f"bad shape {M.shape} for n={n}")
    N = side - n
    Minv = invert(M)
    if F is None:
        F = walsh_hadamard_matrix(n)
    top = M[:n, :n]
    G = M[n:, :n]
    Vt = Minv[:n, n:]  # rows are the columns v_j of [(M^-1)^T]_{rest, [n]}
    tl_err = float(np.max(np.abs(top - F)))
    g_norm = spectral_norm(G) if N else 0.0
    kappa = condition_number(M, Minv)
    E = Minv[:n, :n] - F
    e_norm = spectral_norm(E)
    log_n = math.log2(n) if n > 1 else 0.0
    if N:
        garbage_sums = np.sum(fhat(G.T, Vt), axis=1)  # per column j of the garbage block
        garbage_floor = -0.5 - 0.25 * math.log2(N)
        min_g = float(np.min(garbage_sums))
        max_u = float(np.max(np.linalg.norm(G, axis=0)))
        max_v = float(np.max(np.linalg.norm(Vt, axis=1)))
    else:
        garbage_floor, min_g, max_u, max_v = 0.0, 0.0, 0.0, 0.0
    top_sums = np.sum(fhat(top, Minv[:n, :n].T), axis=1)
    phi_n = partial_quasi_entropy(M, Minv, n, check=False)
    bound = 0.25 * n * log_n - 0.5 * n
    return ExtraSpaceReport(
        n=n,
        N=N,
        R=R,
        C0=C0,
        top_left_error=tl_err,
        top_left_is_F=tl_err <= tol,
        garbage_norm=g_norm,
        garbage_ok=g_norm <= C0 / R + tol,
        condition=kappa,
        condition_ok=kappa <= R * (1 + tol),
        N_ok=N <= n * log_n,
        max_garbage_column=max_u,
        garbage_columns_ok=max_u <= 1 / (4 * R) + tol,
        max_dual_column=max_v,
        dual_columns_ok=max_v <= R + tol,
        error_norm=e_norm,
        error_ok=e_norm <= C0 + tol,
        min_garbage_row_sum=min_g,
        garbage_rows_ok=min_g >= garbage_floor - tol,
        min_top_row_sum=float(np.min(top_sums)),
        top_rows_ok=float(np.min(top_sums)) >= 0.25 * log_n - tol,
        phi_n=phi_n,
        phi_n_bound=bound,
        conclusion_ok=phi_n >= bound - tol,
    )
