"""Heat-kernel diffusion drivers: single scale, many scales, error audit.

The pipeline is: estimate the spectral radius, rescale the operator to
[0, 2], choose the truncation order from a certified bound at the
largest effective scale, then run the three-term recurrence. The
multiscale entry point builds the recurrence basis once and recombines
it per scale, so m scales cost the same matvecs as the single largest
one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import ORDER_CAP
from .bounds import AUTO, BoundKind, SignalStats, log_bound_value, min_order, select_bound
from .chebyshev import build_basis, cheb_coefficients, combine
from .errors import ConvergenceError
from .graphs import GraphSignal, SparseSymMatrix

__all__ = ["DEFAULT_SEED", "DiffusionPlan", "DiffusionReport", "estimate_lambda_max",
           "make_plan", "expm_multiply", "expm_multiscale", "measure_errors"]

DEFAULT_SEED = 0

# power-iteration controls; rel_tol 1e-4 is plenty, the estimate is
# inflated afterwards anyway
_POWER_MIN_ITER = 10
_POWER_MAX_ITER = 10000
_POWER_INFLATE = 1.01


@dataclass(frozen=True)
class DiffusionPlan:
    """Everything decided before the first matvec of a diffusion run."""

    lambda_max: float
    lambda_estimated: bool
    scales: tuple[float, ...]
    tau_effs: tuple[float, ...]
    order: int
    kind: BoundKind
    tol: float
    bound: float
    setup_matvecs: int
    stats: SignalStats


@dataclass(frozen=True)
class DiffusionReport:
    """Per-scale record of what a diffusion run did and certified."""

    tau: float
    tau_eff: float
    order: int
    lambda_max: float
    kind: BoundKind
    bound: float
    tol: float
    matvecs: int
    setup_matvecs: int


def _power_iteration(op: SparseSymMatrix, rel_tol: float, seed: int,
                     max_iter: int) -> tuple[float, int]:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.n)
    v /= np.linalg.norm(v)
    rho_prev = math.inf
    hits = 0
    for it in range(1, max_iter + 1):
        w = op.matvec(v)
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            # v is (numerically) in the kernel and matvec count stays honest
            return 0.0, it
        rho = float(v @ w)
        v = w / norm_w
        if it >= _POWER_MIN_ITER and rho > 0.0:
            if abs(rho - rho_prev) <= rel_tol * rho:
                hits += 1
                if hits >= 2:  # two consecutive passes; one can be a fluke
                    return rho, it
            else:
                hits = 0
        rho_prev = rho
    raise ConvergenceError(
        f"power iteration did not settle within {max_iter} iterations"
    )


def estimate_lambda_max(op: SparseSymMatrix, rel_tol: float = 1e-4,
                        seed: int = DEFAULT_SEED, max_iter: int = _POWER_MAX_ITER) -> float:
    """Upper estimate of the largest eigenvalue by power iteration.

    The Rayleigh quotient is inflated by 1% so the rescaled spectrum
    stays inside [0, 2] even though the iterate only approaches the
    true value from below. Deterministic for a fixed seed.

    Parameters
    ----------
    op : SparseSymMatrix
        Symmetric positive-semidefinite operator.
    rel_tol : float, optional
        Relative change of the Rayleigh quotient at which to stop.
    seed : int, optional
        Seed for the starting vector.
    max_iter : int, optional
        Iteration budget; exceeding it raises ConvergenceError.

    Returns
    -------
    float
        Inflated eigenvalue estimate; exactly 0.0 for the zero operator.
    """
    rho, _ = _power_iteration(op, rel_tol, seed, max_iter)
    if rho == 0.0:
        return 0.0
    return rho * _POWER_INFLATE


def _as_signal(x) -> GraphSignal:
    return x if isinstance(x, GraphSignal) else GraphSignal(x)


def make_plan(op: SparseSymMatrix, signal, scales, tol: float,
              kind: BoundKind | str = AUTO, lambda_max: float | None = None,
              seed: int = DEFAULT_SEED) -> DiffusionPlan:
    """Resolve order, bound kind and rescaling for a set of scales.

    The order is chosen once, at the largest effective scale, so a
    shared basis serves every scale. `kind=AUTO` resolves to whichever
    new-bound variant is sharper for this signal at that scale.
    """
    sig = _as_signal(signal)
    if sig.n != op.n:
        raise ValueError(f"signal length {sig.n} does not match operator size {op.n}")
    scales = tuple(float(t) for t in scales)
    if not scales:
        raise ValueError("need at least one scale")
    for t in scales:
        if not math.isfinite(t) or t < 0.0:
            raise ValueError(f"scales must be finite and non-negative, got {t}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")

    setup = 0
    if lambda_max is None:
        lam, iters = _power_iteration(op, 1e-4, seed, _POWER_MAX_ITER)
        lam_hat = lam * _POWER_INFLATE if lam > 0.0 else 0.0
        setup = iters
        estimated = True
    else:
        lam_hat = float(lambda_max)
        if not math.isfinite(lam_hat) or lam_hat < 0.0:
            raise ValueError("lambda_max must be finite and non-negative")
        estimated = False

    tau_effs = tuple(lam_hat * t / 2.0 for t in scales)
    tau_top = max(tau_effs)
    stats = SignalStats.from_signal(sig)
    if kind == AUTO:
        resolved = select_bound(tau_top, stats)
    else:
        resolved = BoundKind(kind)
        if resolved in (BoundKind.NEW_SPECIFIC, BoundKind.BASELINE_SPECIFIC) \
                and stats.component_sum == 0.0:
            raise ValueError(
                f"{resolved.value} bound is undefined for a signal whose components sum to zero"
            )
    order = min_order(resolved, tau_top, tol, stats=stats)
    bound = math.exp(log_bound_value(resolved, order, tau_top, stats)) if tau_top > 0.0 else 0.0
    return DiffusionPlan(
        lambda_max=lam_hat,
        lambda_estimated=estimated,
        scales=scales,
        tau_effs=tau_effs,
        order=order,
        kind=resolved,
        tol=float(tol),
        bound=bound,
        setup_matvecs=setup,
        stats=stats,
    )


def _apply_streaming(op_scaled: SparseSymMatrix, x: np.ndarray, order: int,
                     tau_eff: float) -> np.ndarray:
    # identical operation order to build_basis + combine: the multiscale
    # path must agree with this one bitwise
    c = cheb_coefficients(tau_eff, order).coefficients
    y = (0.5 * c[0]) * x
    if order == 0:
        return y
    t_prev = x
    t_cur = op_scaled.matvec(x) - x
    y += c[1] * t_cur
    for k in range(2, order + 1):
        t_prev, t_cur = t_cur, 2.0 * (op_scaled.matvec(t_cur) - t_cur) - t_prev
        y += c[k] * t_cur
    return y


def _report_for(plan: DiffusionPlan, idx: int, matvecs: int) -> DiffusionReport:
    tau_eff = plan.tau_effs[idx]
    if tau_eff > 0.0:
        bound = math.exp(log_bound_value(plan.kind, plan.order, tau_eff, plan.stats))
    else:
        bound = 0.0
    return DiffusionReport(
        tau=plan.scales[idx],
        tau_eff=tau_eff,
        order=plan.order,
        lambda_max=plan.lambda_max,
        kind=plan.kind,
        bound=bound,
        tol=plan.tol,
        matvecs=matvecs,
        setup_matvecs=plan.setup_matvecs,
    )


def expm_multiply(op: SparseSymMatrix, x, tau: float, tol: float = 1e-5,
                  kind: BoundKind | str = AUTO, lambda_max: float | None = None,
                  seed: int = DEFAULT_SEED) -> tuple[np.ndarray, DiffusionReport]:
    """Apply the heat kernel at one scale with a certified order.

    Parameters
    ----------
    op : SparseSymMatrix
        Graph Laplacian (combinatorial or normalized).
    x : GraphSignal or array_like
        Input signal.
    tau : float
        Diffusion scale, >= 0.
    tol : float, optional
        Target for the certified squared relative error.
    kind : BoundKind or "auto", optional
        Which certificate selects the order.
    lambda_max : float, optional
        Known spectral radius; skips power iteration when given.
    seed : int, optional
        Seed for the power-iteration start vector.

    Returns
    -------
    (ndarray, DiffusionReport)
        The diffused signal and the run record.
    """
    sig = _as_signal(x)
    plan = make_plan(op, sig, [tau], tol, kind=kind, lambda_max=lambda_max, seed=seed)
    if plan.lambda_max == 0.0:
        return sig.values.copy(), _report_for(plan, 0, 0)
    op_scaled = op.scaled(2.0 / plan.lambda_max)
    y = _apply_streaming(op_scaled, sig.values, plan.order, plan.tau_effs[0])
    return y, _report_for(plan, 0, plan.order)


def expm_multiscale(op: SparseSymMatrix, x, scales, tol: float = 1e-5,
                    kind: BoundKind | str = AUTO, lambda_max: float | None = None,
                    seed: int = DEFAULT_SEED) -> list[tuple[np.ndarray, DiffusionReport]]:
    """Apply the heat kernel at many scales off one shared basis.

    The basis is built for the largest effective scale; every other
    scale reuses it with its own coefficient vector, adding no matvecs.
    Results match the single-scale path bitwise, in input order.
    """
    sig = _as_signal(x)
    plan = make_plan(op, sig, scales, tol, kind=kind, lambda_max=lambda_max, seed=seed)
    if plan.lambda_max == 0.0:
        return [(sig.values.copy(), _report_for(plan, i, 0)) for i in range(len(plan.scales))]
    op_scaled = op.scaled(2.0 / plan.lambda_max)
    cache = build_basis(op_scaled, sig, plan.order)
    out = []
    for i, tau_eff in enumerate(plan.tau_effs):
        coeffs = cheb_coefficients(tau_eff, plan.order)
        y = combine(cache, coeffs)
        out.append((y, _report_for(plan, i, plan.order)))
    return out


def measure_errors(op: SparseSymMatrix, x, tau: float, order: int,
                   lambda_max: float | None = None,
                   seed: int = DEFAULT_SEED) -> tuple[float, float]:
    """Measured squared relative errors of the rank-``order`` truncation.

    Computed against the dense spectral oracle, so only operators small
    enough for it are accepted. Returns the pair (input-relative,
    output-relative).
    """
    from .oracle import exact_diffusion

    sig = _as_signal(x)
    tau = float(tau)
    if tau < 0.0:
        raise ValueError("tau must be non-negative")
    lam_hat = estimate_lambda_max(op, seed=seed) if lambda_max is None else float(lambda_max)
    if lam_hat < 0.0:
        raise ValueError("lambda_max must be non-negative")
    if lam_hat == 0.0:
        y = sig.values.copy()
    else:
        op_scaled = op.scaled(2.0 / lam_hat)
        y = _apply_streaming(op_scaled, sig.values, int(order), lam_hat * tau / 2.0)
    w = exact_diffusion(op, sig.values, tau)
    diff = y - w
    err = float(diff @ diff)
    denom_in = sig.norm_sq
    denom_out = float(w @ w)
    if denom_out == 0.0:
        raise ValueError("exact diffusion is zero; output-relative error undefined")
    return err / denom_in, err / denom_out
