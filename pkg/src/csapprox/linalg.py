"""Dense complex matrix types and the operations built on them.

The value types are thin immutable wrappers around complex ndarrays:
``ComplexMatrix`` -> ``HermitianMatrix`` (symmetrized at construction)
-> ``DensityMatrix`` (unit trace, positive semidefinite).  Dimensions
here are small (<= a few dozen), so everything is dense and eager.
"""

from __future__ import annotations

import numpy as np

from . import backend

HERMITICITY_REJECT = 1e-8
TRACE_TOL = 1e-10
EIG_FLOOR = -1e-10


class EigenSolverError(RuntimeError):
    """Eigensolver failed to converge within the sweep cap."""


class ComplexMatrix:
    """Square complex matrix; entries frozen after construction."""

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError("expected a square matrix of dimension >= 1")
        arr = arr.copy()
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class HermitianMatrix(ComplexMatrix):
    """Hermitian matrix; near-Hermitian input is symmetrized, anything
    off by more than 1e-8 (max entry) is rejected as a genuine bug."""

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("expected a square matrix")
        dev = np.max(np.abs(arr - arr.conj().T)) if arr.size else 0.0
        if dev > HERMITICITY_REJECT:
            raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")
        super().__init__((arr + arr.conj().T) / 2.0)


class DensityMatrix(HermitianMatrix):
    """Unit-trace positive semidefinite Hermitian matrix."""

    def __init__(self, data):
        super().__init__(data)
        tr = float(np.trace(self._data).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} is not 1 within {TRACE_TOL}")
        evs, _ = hermitian_eigensystem(self)
        if evs[-1] < EIG_FLOOR:
            raise ValueError(f"negative eigenvalue {evs[-1]:.3e}")


def hermitian_eigensystem(a: HermitianMatrix):
    """Eigenvalues (descending) and eigenvector columns of a Hermitian
    matrix, so that a = V diag(w) V^dag."""
    w, v, conv = backend.get().eigh_herm(np.asarray(a.data))
    if not conv:
        raise EigenSolverError("Jacobi sweeps did not converge")
    return w, v


def trace_norm(a: HermitianMatrix) -> float:
    """Sum of absolute eigenvalues (= sum of singular values for
    Hermitian input)."""
    w, _ = hermitian_eigensystem(a)
    return float(np.sum(np.abs(w)))


def tensor_product(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product with row-major block layout:
    (A(x)B)[i*dimB+k, j*dimB+l] = A[i,j] B[k,l]."""
    return ComplexMatrix(np.kron(a.data, b.data))


def helstrom_probability(rho0: DensityMatrix, rho1: DensityMatrix) -> float:
    """Optimal success probability for discriminating two equiprobable
    states: 1/2 + ||rho0 - rho1||_1 / 4."""
    if rho0.dim != rho1.dim:
        raise ValueError("dimension mismatch")
    return 0.5 + 0.25 * trace_norm(HermitianMatrix(rho0.data - rho1.data))
