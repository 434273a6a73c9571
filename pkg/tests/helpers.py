"""Shared oracles and small graph builders for the test suite.

The Bessel oracle goes through mpmath at 50 digits so library output
can be checked against an implementation it shares no code with.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def ie_reference(k: int, tau: float) -> float:
    """Scaled modified Bessel value exp(-tau) * I_k(tau) at 50 digits."""
    t = mp.mpf(repr(float(tau)))
    return float(mp.besseli(k, t) * mp.e ** (-t))


def path_edges(n: int):
    return [(i, i + 1) for i in range(n - 1)]


def complete_edges(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def star_edges(n: int):
    # hub is node 0
    return [(0, i) for i in range(1, n)]


def dense_diffusion(dense_l: np.ndarray, x: np.ndarray, tau: float) -> np.ndarray:
    """Reference exp(-tau L) x via numpy's eigensolver, not ours."""
    lam, u = np.linalg.eigh(dense_l)
    return u @ (np.exp(-tau * lam) * (u.T @ x))
