"""Closed-form qubit layer: parametrization, thresholds, cases,
canonical reduction."""

import numpy as np
import pytest
from math import pi, sqrt

from csapprox import (QubitParams, analytic_b3, b1_solution, b1_states,
                      b3_states, bloch_expectations, canonical_reduce,
                      exact_decomposition_weights, grid_oracle, k_threshold,
                      minimize, objective, pauli_eigenstate, permute_weights,
                      phi_threshold, qubit_from_params,
                      zero_distance_condition)

from conftest import random_qubit_params

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


# --- parametrization ------------------------------------------------------

def test_qubit_from_params_examples():
    assert np.allclose(qubit_from_params(QubitParams(0.0, 0.7, 1.0)).data,
                       np.diag([1.0, 0.0]))
    psi = np.array([sqrt(3) / 2, 0.5])
    assert np.allclose(qubit_from_params(QubitParams(0.25, 1.0, 0.0)).data,
                       np.outer(psi, psi))
    assert np.allclose(qubit_from_params(QubitParams(0.5, 0.0, 2.0)).data,
                       np.eye(2) / 2)


def test_qubit_params_validation():
    with pytest.raises(ValueError):
        QubitParams(1.5, 0.5, 0.0)
    with pytest.raises(ValueError):
        QubitParams(0.5, -0.1, 0.0)
    assert QubitParams(0.5, 0.5, 2 * pi + 0.5).phi == pytest.approx(0.5)


def test_bloch_expectations_examples(rng):
    assert np.allclose(bloch_expectations(QubitParams(0.5, 1.0, 0.0)),
                       (1, 0, 0))
    assert np.allclose(bloch_expectations(QubitParams(0.25, 1.0, 0.0)),
                       (sqrt(3) / 2, 0, 0.5))
    assert np.allclose(bloch_expectations(QubitParams(0.3, 0.0, 1.0)),
                       (0, 0, 0.4))
    # cross-check against Tr[rho sigma] on random params
    for p in random_qubit_params(rng, 20, canonical=False):
        rho = qubit_from_params(p).data
        expect = [np.trace(rho @ s).real for s in _SIGMA]
        assert np.allclose(bloch_expectations(p), expect, atol=1e-12)


def test_pauli_eigenstates_are_pure():
    for i in range(6):
        d = pauli_eigenstate(i).data
        assert np.trace(d).real == pytest.approx(1.0)
        assert np.allclose(d @ d, d)


# --- B1 solution ----------------------------------------------------------

def test_b1_solution_examples():
    dist, w = b1_solution(QubitParams(0.25, 1.0, 0.0))
    assert dist == pytest.approx(sqrt(3) / 2)
    assert np.allclose(w.values, [0.75, 0.25])
    dist, _ = b1_solution(QubitParams(0.3, 0.0, 1.0))
    assert dist == pytest.approx(0.0)
    p = QubitParams(0.5, 1.0, pi / 3)
    dist, _ = b1_solution(p)
    assert dist == pytest.approx(1.0)
    oracle = grid_oracle(qubit_from_params(p), b1_states(), 100)
    assert oracle.distance == pytest.approx(1.0, abs=2e-3)


def test_b1_weights_achieve_claimed_distance(rng):
    for p in random_qubit_params(rng, 20, canonical=False):
        dist, w = b1_solution(p)
        assert objective(qubit_from_params(p), b1_states(), w) \
            == pytest.approx(dist, abs=1e-12)


# --- thresholds and zero-distance region ----------------------------------

def test_k_threshold_examples():
    assert k_threshold(0.5, pi / 4) == pytest.approx(1 / sqrt(2))
    assert k_threshold(0.25, 0.0) == pytest.approx(1 / sqrt(3))
    assert k_threshold(0.0, 0.3) == 0.0
    with pytest.raises(ValueError):
        k_threshold(0.25, 2.0)


def test_k_threshold_boundary_is_zero_distance_boundary(rng):
    for _ in range(50):
        a = rng.uniform(0.05, 0.5)
        phi = rng.uniform(0, pi / 2)
        kth = min(k_threshold(a, phi), 1.0)
        sx, sy, sz = bloch_expectations(QubitParams(a, kth, phi))
        if k_threshold(a, phi) <= 1.0:
            assert sx + sy + sz == pytest.approx(1.0, abs=1e-12)


def test_zero_distance_condition_examples():
    assert zero_distance_condition(QubitParams(0.5, 0.0, 1.0))
    assert not zero_distance_condition(QubitParams(0.25, 1.0, 0.0))
    assert not zero_distance_condition(QubitParams(0.5, 1.0, pi / 4))


def test_threshold_condition_equivalence(rng):
    for p in random_qubit_params(rng, 1000):
        kth = k_threshold(p.a, p.phi) if p.a > 0 else np.inf
        below = p.k <= kth + 1e-12
        assert below == zero_distance_condition(p)


# --- exact decomposition --------------------------------------------------

def test_exact_decomposition_examples():
    w = exact_decomposition_weights(QubitParams(0.3, 0.0, 1.2))
    assert np.allclose(w.values, [0.7, 0.3, 0, 0, 0, 0])
    w = exact_decomposition_weights(QubitParams(0.5, 1 / sqrt(2), pi / 4))
    assert np.allclose(w.values, [0, 0, 0.5, 0, 0.5, 0], atol=1e-12)
    w = exact_decomposition_weights(QubitParams(0.25, 0.5, 0.0))
    assert w.values[0] == pytest.approx(0.53349, abs=1e-5)
    assert w.values[1] == pytest.approx(0.03349, abs=1e-5)
    assert w.values[2] == pytest.approx(0.43301, abs=1e-5)
    assert w.values[4] == pytest.approx(0.0, abs=1e-12)


def test_exact_decomposition_precondition():
    with pytest.raises(ValueError):
        exact_decomposition_weights(QubitParams(0.25, 1.0, 0.0))


def test_exact_decomposition_residual_grid():
    # quantified reconstruction check over the canonical grid,
    # restricted to the zero-distance region, fully vectorized
    n = 50
    a = np.linspace(0, 0.5, n)[:, None, None]
    k = np.linspace(0, 1, n)[None, :, None]
    phi = np.linspace(0, pi / 2, n)[None, None, :]
    s = np.sqrt(a * (1 - a))
    sx = 2 * k * s * np.cos(phi)
    sy = 2 * k * s * np.sin(phi)
    sz = 1 - 2 * a + 0 * sx
    inside = sx + sy + sz <= 1 + 1e-12
    p0 = 1 - a - k * s * (np.cos(phi) + np.sin(phi)) + 0 * sx
    p1 = a - k * s * (np.cos(phi) + np.sin(phi)) + 0 * sx
    p2, p4 = sx, sy
    total = p0 + p1 + p2 + p4
    # weights on the simplex wherever the condition holds
    assert np.all(np.abs(total[inside] - 1.0) <= 1e-12)
    assert p0[inside].min() >= -1e-12 and p1[inside].min() >= -1e-12
    # Bloch-space residual of the reconstruction is identically zero
    rx = sx - p2
    ry = sy - p4
    rz = sz - (p0 - p1)
    res = np.sqrt(rx ** 2 + ry ** 2 + rz ** 2)
    assert res[inside].max() <= 1e-12


# --- analytic cases -------------------------------------------------------

def test_phi_threshold_window():
    a, k = 0.25, 0.6
    pth = phi_threshold(a, k)
    assert 0.0 <= pth <= pi / 2
    # (1/4, 0.6, pi/4) sits inside the case-i window
    assert pth <= pi / 4 <= pi / 2 - pth


def test_analytic_b3_case_ii_value():
    res = analytic_b3(QubitParams(0.25, 1.0, 0.0))
    assert res.case_label == "case_ii"
    assert res.claimed_distance == pytest.approx(0.2588, abs=1e-4)
    assert res.alt_weights is not None


def test_analytic_b3_exact_case():
    res = analytic_b3(QubitParams(0.5, 0.5, pi / 4))
    assert res.case_label == "exact"
    assert res.claimed_distance == 0.0
    assert res.claimed_weights.sum() == pytest.approx(1.0)


def test_analytic_b3_case_i():
    res = analytic_b3(QubitParams(0.25, 0.6, pi / 4))
    assert res.case_label == "case_i"
    assert res.claimed_distance > 0.0


def test_analytic_b3_case_iii_mirrors_case_ii():
    lo = analytic_b3(QubitParams(0.25, 1.0, 0.05))
    hi = analytic_b3(QubitParams(0.25, 1.0, pi / 2 - 0.05))
    assert lo.case_label == "case_ii"
    assert hi.case_label == "case_iii"
    assert hi.claimed_distance == pytest.approx(lo.claimed_distance,
                                                abs=1e-12)


# --- canonical reduction --------------------------------------------------

def test_canonical_reduce_identity():
    p = QubitParams(0.3, 0.8, 0.2)
    reduced, perm = canonical_reduce(p)
    assert reduced == p
    assert perm == (0, 1, 2, 3, 4, 5)


def test_canonical_reduce_ranges(rng):
    for p in random_qubit_params(rng, 100, canonical=False):
        reduced, perm = canonical_reduce(p)
        assert 0.0 <= reduced.a <= 0.5 + 1e-12
        assert -1e-12 <= reduced.phi <= pi / 2 + 1e-12
        assert sorted(perm) == list(range(6))


def test_canonical_reduce_weight_pullback(rng):
    sset = b3_states()
    for p in random_qubit_params(rng, 20, canonical=False):
        reduced, perm = canonical_reduce(p)
        rho = qubit_from_params(p)
        res = minimize(qubit_from_params(reduced), sset)
        pulled = permute_weights(res.weights, perm)
        assert objective(rho, sset, pulled) \
            == pytest.approx(res.distance, abs=1e-9)
        assert minimize(rho, sset).distance \
            == pytest.approx(res.distance, abs=2e-4)
