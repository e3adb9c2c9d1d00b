"""Shared fixtures.

The numba kernels compile on first use; the session-scoped warmup
below pays that cost once so the timed acceptance tests measure
steady-state performance.
"""

import numpy as np
import pytest

from csapprox import (QubitParams, SolverOptions, b1_states, b3_states,
                      grid_oracle, minimize, qubit_from_params)
from csapprox.audit import _B3_BLOCH, solve_bloch_grid
from csapprox.qubit import bloch_expectations


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    p = QubitParams(0.25, 1.0, 0.0)
    rho = qubit_from_params(p)
    minimize(rho, b1_states())
    minimize(rho, b3_states())
    grid_oracle(rho, b3_states(), 10)
    grid_oracle(rho, b1_states(), 10)
    solve_bloch_grid(np.array([bloch_expectations(p)]), _B3_BLOCH)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_qubit_params(rng, n, canonical=True):
    a_hi = 0.5 if canonical else 1.0
    phi_hi = np.pi / 2 if canonical else 2 * np.pi
    return [QubitParams(float(a), float(k), float(phi))
            for a, k, phi in zip(rng.uniform(0, a_hi, n),
                                 rng.uniform(0, 1, n),
                                 rng.uniform(0, phi_hi, n))]


def random_density(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m).real


@pytest.fixture
def fast_opts():
    return SolverOptions(restarts=1)
