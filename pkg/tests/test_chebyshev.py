"""Coefficients, basis recurrence, recombination, scalar evaluation."""

import math

import numpy as np
import pytest

from chebheat.chebyshev import (build_basis, cheb_coefficients, combine, eval_scalar)
from chebheat.graphs import GraphSignal, build_laplacian, erdos_renyi

# mpmath at 50 digits: +-2 exp(-tau) I_k(tau)
C0_TAU1 = 0.93151921518728087
C1_TAU1 = -0.4158208306994169
C0_TAU2 = 0.61701664510734208
C2_TAU2 = 0.18647806660946676


def test_frozen_coefficients():
    c = cheb_coefficients(1.0, 1).coefficients
    assert c[0] == pytest.approx(C0_TAU1, rel=1e-14)
    assert c[1] == pytest.approx(C1_TAU1, rel=1e-14)
    c2 = cheb_coefficients(2.0, 2).coefficients
    assert c2[0] == pytest.approx(C0_TAU2, rel=1e-14)
    assert c2[2] == pytest.approx(C2_TAU2, rel=1e-14)


def test_signs_alternate():
    for tau in (0.3, 1.0, 8.0, 45.0):
        c = cheb_coefficients(tau, 30).coefficients
        live = np.abs(c) > 0.0
        signs = np.sign(c[live])
        expected = np.where(np.arange(31)[live] % 2 == 0, 1.0, -1.0)
        np.testing.assert_array_equal(signs, expected)


def test_tau_zero_coefficients():
    c = cheb_coefficients(0.0, 4).coefficients
    np.testing.assert_array_equal(c, [2.0, 0.0, 0.0, 0.0, 0.0])


def test_invalid_arguments():
    with pytest.raises(ValueError):
        cheb_coefficients(-1.0, 3)
    with pytest.raises(ValueError):
        cheb_coefficients(1.0, -1)


def test_basis_satisfies_recurrence():
    L = build_laplacian(erdos_renyi(50, 0.15, seed=4), 50)
    lam = 14.0  # any upper estimate works for the recurrence identity
    op = L.scaled(2.0 / lam)
    x = GraphSignal(np.random.default_rng(0).standard_normal(50))
    cache = build_basis(op, x, 12)
    v = cache.vectors
    assert cache.order == 12 and v.shape == (13, 50)
    np.testing.assert_array_equal(v[0], x.values)
    scale = np.linalg.norm(x.values)
    # T_{k+1} = 2(A - I)T_k - T_{k-1} with A the scaled operator
    for k in range(1, 12):
        resid = v[k + 1] - (2.0 * (op.matvec(v[k]) - v[k]) - v[k - 1])
        assert np.max(np.abs(resid)) <= 1e-12 * scale


def test_basis_vectors_locked():
    L = build_laplacian([(0, 1)], 2).scaled(1.0)
    cache = build_basis(L, GraphSignal([1.0, 0.0]), 2)
    with pytest.raises(ValueError):
        cache.vectors[0][0] = 5.0


def test_combine_rejects_higher_order():
    L = build_laplacian([(0, 1)], 2).scaled(1.0)
    cache = build_basis(L, GraphSignal([1.0, 0.0]), 2)
    with pytest.raises(ValueError):
        combine(cache, cheb_coefficients(1.0, 3))


def test_combine_matches_dense_exponential():
    n = 30
    L = build_laplacian(erdos_renyi(n, 0.25, seed=9), n)
    dense = L.to_dense()
    lam = float(np.linalg.eigvalsh(dense).max()) * 1.01
    x = np.random.default_rng(3).standard_normal(n)
    tau = 0.8
    op = L.scaled(2.0 / lam)
    cache = build_basis(op, GraphSignal(x), 40)
    y = combine(cache, cheb_coefficients(lam * tau / 2.0, 40))
    lam_e, u = np.linalg.eigh(dense)
    ref = u @ (np.exp(-tau * lam_e) * (u.T @ x))
    assert np.max(np.abs(y - ref)) <= 1e-12 * np.linalg.norm(x)


def test_combine_compensated_close_to_plain():
    L = build_laplacian(erdos_renyi(40, 0.2, seed=6), 40)
    op = L.scaled(2.0 / 16.0)
    x = GraphSignal(np.random.default_rng(8).standard_normal(40))
    cache = build_basis(op, x, 25)
    coeffs = cheb_coefficients(5.0, 25)
    plain = combine(cache, coeffs)
    comp = combine(cache, coeffs, compensated=True)
    assert np.max(np.abs(plain - comp)) <= 1e-13 * np.linalg.norm(x.values)


def test_eval_scalar_endpoints():
    # at lambda = 0 every term is positive, so the truncation climbs toward
    # exp(0) = 1 from below and the order-0 value is exactly c0 / 2
    assert eval_scalar(1.0, 0, 0.0) == pytest.approx(0.5 * C0_TAU1, rel=1e-14)
    partials = [eval_scalar(1.0, order, 0.0) for order in (0, 2, 5, 17)]
    assert all(a < b for a, b in zip(partials, partials[1:]))
    assert partials[-1] == pytest.approx(1.0, abs=1e-13)
    # converged series hits exp(-tau * lambda) at both ends
    assert eval_scalar(1.0, 40, 2.0) == pytest.approx(math.exp(-2.0), abs=1e-15)
    assert eval_scalar(3.0, 60, 1.0) == pytest.approx(math.exp(-3.0), abs=1e-14)


def test_eval_scalar_vectorized_and_domain():
    vals = eval_scalar(2.0, 50, np.array([0.0, 1.0, 2.0]))
    ref = np.exp(-2.0 * np.array([0.0, 1.0, 2.0]))
    np.testing.assert_allclose(vals, ref, atol=1e-13)
    with pytest.raises(ValueError):
        eval_scalar(1.0, 5, 2.5)
