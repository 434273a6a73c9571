"""Chebyshev expansion of the heat kernel on a [0, 2] spectrum.

For an operator whose spectrum lives in ``[0, 2]`` the scalar function
``exp(-tau * lam)`` expands as

    h(lam) = c[0] / 2 + sum_{k >= 1} c[k] * T_k(lam - 1)

with ``c[k] = (-1)^k * 2 * exp(-tau) * I_k(tau)``. The coefficient vector
stores ``c[0]`` unhalved; the halving happens wherever the series is
evaluated. Basis vectors ``T_k(op - I) x`` depend on the operator and the
signal only, so one basis serves every diffusion scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bessel import bessel_ie_scaled
from .graphs import GraphSignal, SparseSymMatrix, _digest

__all__ = ["CoefficientSet", "ChebBasisCache", "cheb_coefficients", "build_basis",
           "combine", "eval_scalar"]

_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Chebyshev coefficients of the heat kernel at one effective scale.

    ``coefficients[0]`` is stored unhalved. Signs alternate: entry ``k``
    carries the sign ``(-1)^k`` for any positive scale.
    """

    tau_eff: float
    order: int
    coefficients: np.ndarray


@dataclass(frozen=True, eq=False)
class ChebBasisCache:
    """Stacked basis vectors ``T_k(op - I) x`` for ``k = 0..order``.

    Row ``k`` of ``vectors`` is the k-th basis vector. Fingerprints
    identify the operator and signal the basis was built from.
    """

    order: int
    vectors: np.ndarray
    operator_fingerprint: str
    signal_fingerprint: str


def cheb_coefficients(tau_eff: float, order: int) -> CoefficientSet:
    """Expansion coefficients of ``exp(-tau_eff * lam)`` up to ``order``.

    Parameters
    ----------
    tau_eff : float
        Effective (rescaled) diffusion scale, non-negative.
    order : int
        Truncation order; ``order + 1`` coefficients are returned.
    """
    order = int(order)
    if order < 0:
        raise ValueError("order must be non-negative")
    c = 2.0 * bessel_ie_scaled(order, tau_eff)
    c[1::2] *= -1.0
    c.flags.writeable = False
    return CoefficientSet(tau_eff=float(tau_eff), order=order, coefficients=c)


def _signal_values_and_fp(signal):
    if isinstance(signal, GraphSignal):
        return signal.values, signal.fingerprint
    x = np.ascontiguousarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("signal must be 1-d")
    return x, _digest(x)


def build_basis(op: SparseSymMatrix, signal, order: int) -> ChebBasisCache:
    """Build all basis vectors for ``signal`` under ``op``.

    ``op`` must already be rescaled so its spectrum sits inside
    ``[0, 2]``. Costs exactly ``order`` matrix-vector products; every
    intermediate vector is kept so later recombinations are matvec-free.
    """
    order = int(order)
    if order < 0:
        raise ValueError("order must be non-negative")
    x, sig_fp = _signal_values_and_fp(signal)
    if x.size != op.n:
        raise ValueError(f"signal length {x.size} does not match operator size {op.n}")
    vectors = np.empty((order + 1, op.n))
    vectors[0] = x
    if order >= 1:
        vectors[1] = op.matvec(vectors[0]) - vectors[0]
    for k in range(2, order + 1):
        vectors[k] = 2.0 * (op.matvec(vectors[k - 1]) - vectors[k - 1]) - vectors[k - 2]
    vectors.flags.writeable = False
    return ChebBasisCache(
        order=order,
        vectors=vectors,
        operator_fingerprint=op.fingerprint,
        signal_fingerprint=sig_fp,
    )


def combine(cache: ChebBasisCache, coeffs: CoefficientSet, compensated: bool = False):
    """Contract a coefficient set against a cached basis.

    Terms are added in ascending ``k``, matching the streaming
    single-scale path exactly so both produce bit-identical output.
    ``compensated`` switches on Kahan accumulation; plain summation is
    the default and is already well below bound tolerances.
    """
    if coeffs.order > cache.order:
        raise ValueError(
            f"basis of order {cache.order} cannot serve coefficients of order {coeffs.order}"
        )
    c = coeffs.coefficients
    v = cache.vectors
    y = (0.5 * c[0]) * v[0]
    if not compensated:
        for k in range(1, coeffs.order + 1):
            y += c[k] * v[k]
        return y
    carry = np.zeros_like(y)
    for k in range(1, coeffs.order + 1):
        term = c[k] * v[k] - carry
        tmp = y + term
        carry = (tmp - y) - term
        y = tmp
    return y


def eval_scalar(tau_eff: float, order: int, lam):
    """Evaluate the truncated expansion at scalar points in ``[0, 2]``.

    Accepts a float or an array; the return matches the input shape.
    """
    arr = np.asarray(lam, dtype=np.float64)
    if np.any(arr < -_DOMAIN_SLACK) or np.any(arr > 2.0 + _DOMAIN_SLACK):
        raise ValueError("lambda outside the rescaled spectral interval [0, 2]")
    c = cheb_coefficients(tau_eff, order).coefficients
    t = arr - 1.0
    p = np.full_like(arr, 0.5 * c[0])
    if order >= 1:
        t_prev = np.ones_like(arr)
        t_cur = t
        p = p + c[1] * t_cur
        for k in range(2, order + 1):
            t_prev, t_cur = t_cur, 2.0 * t * t_cur - t_prev
            p = p + c[k] * t_cur
    if np.isscalar(lam) or getattr(lam, "ndim", 0) == 0:
        return float(p)
    return p
