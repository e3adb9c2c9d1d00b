"""Closed-form qubit results for the six Pauli eigenstates.

The target qubit is parametrized by (a, k, phi):

    rho = [[1-a,                k*sqrt(a(1-a))*e^{-i phi}],
           [k*sqrt(a(1-a))*e^{i phi},                  a]]

The available sets are B1 = {|0>, |1>} and B3 = the six normalized
Pauli eigenstates, labeled 0..5 in the order +z, -z, +x, -x, +y, -y.

The three nonzero-distance closed-form cases below are *claimed*
formulas: a published erratum declares them invalid in part of the
parameter space, so nothing in this package treats their output as
ground truth.  ``csapprox.audit`` maps their failure region against
the numeric solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import atan, cos, pi, sin, sqrt

import numpy as np

from .linalg import DensityMatrix
from .solver import StateSet, Weights

ZERO_DIST_TOL = 1e-12
CASE_TIE_TOL = 1e-12

_KET = {
    0: np.array([1.0, 0.0], dtype=np.complex128),
    1: np.array([0.0, 1.0], dtype=np.complex128),
    2: np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0),
    3: np.array([1.0, -1.0], dtype=np.complex128) / np.sqrt(2.0),
    4: np.array([1.0, 1.0j], dtype=np.complex128) / np.sqrt(2.0),
    5: np.array([1.0, -1.0j], dtype=np.complex128) / np.sqrt(2.0),
}


@dataclass(frozen=True)
class QubitParams:
    """Target parametrization; phi is wrapped into [0, 2*pi)."""

    a: float
    k: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError("a must lie in [0, 1]")
        if not 0.0 <= self.k <= 1.0:
            raise ValueError("k must lie in [0, 1]")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * pi))


def pauli_eigenstate(i: int) -> DensityMatrix:
    v = _KET[i]
    return DensityMatrix(np.outer(v, v.conj()))


def b1_states() -> StateSet:
    return StateSet([pauli_eigenstate(0), pauli_eigenstate(1)], ["0", "1"])


def b3_states() -> StateSet:
    return StateSet([pauli_eigenstate(i) for i in range(6)],
                    [str(i) for i in range(6)])


def qubit_from_params(p: QubitParams) -> DensityMatrix:
    c = p.k * sqrt(p.a * (1.0 - p.a)) * np.exp(-1j * p.phi)
    return DensityMatrix(np.array([[1.0 - p.a, c],
                                   [np.conj(c), p.a]], dtype=np.complex128))


def bloch_expectations(p: QubitParams):
    """(<sx>, <sy>, <sz>) of the parametrized target."""
    s = sqrt(p.a * (1.0 - p.a))
    return (2.0 * p.k * s * cos(p.phi),
            2.0 * p.k * s * sin(p.phi),
            1.0 - 2.0 * p.a)


def b1_solution(p: QubitParams):
    """Optimal approximation over {|0>, |1>}: weights (1-a, a),
    distance 2 k sqrt(a(1-a))."""
    dist = 2.0 * p.k * sqrt(p.a * (1.0 - p.a))
    return dist, Weights(np.array([1.0 - p.a, p.a]))


def k_threshold(a: float, phi: float) -> float:
    """Coherence threshold below which the B3 distance vanishes."""
    if phi < -1e-12 or phi > pi / 2 + 1e-12:
        raise ValueError("phi must lie in [0, pi/2]; canonicalize first")
    if a <= 0.0:
        return 0.0
    return a / (sqrt(a * (1.0 - a)) * (cos(phi) + sin(phi)))


def zero_distance_condition(p: QubitParams) -> bool:
    """True iff <sx> + <sy> + <sz> <= 1 (canonical region)."""
    sx, sy, sz = bloch_expectations(p)
    return sx + sy + sz <= 1.0 + ZERO_DIST_TOL


def exact_decomposition_weights(p: QubitParams) -> Weights:
    """The four-state exact mixture available in the zero-distance
    region (weights are one valid choice; they are not unique)."""
    if not zero_distance_condition(p):
        raise ValueError("target is outside the zero-distance region")
    s = sqrt(p.a * (1.0 - p.a))
    cs = cos(p.phi) + sin(p.phi)
    w = np.array([
        1.0 - p.a - p.k * s * cs,
        p.a - p.k * s * cs,
        2.0 * p.k * s * cos(p.phi),
        0.0,
        2.0 * p.k * s * sin(p.phi),
        0.0,
    ])
    w = np.where(np.abs(w) < 1e-15, 0.0, w)
    return Weights(w)


def phi_threshold(a: float, k: float) -> float:
    """Claimed phase threshold separating the nonzero-distance cases
    (the erratum pins the known error to this parametrization)."""
    s = sqrt(a * (1.0 - a))
    rad = 5.0 * k * k * a * (1.0 - a) - a * a
    if rad < 0.0:
        rad = 0.0
    return 2.0 * atan((sqrt(rad) - 2.0 * k * s) / (a + k * s))


@dataclass
class AnalyticB3Result:
    """Closed-form output; claimed_weights are raw (possibly invalid
    outside the formulas' range) and alt_weights carries the second
    reading of the ambiguous case ii/iii radical."""

    case_label: str
    claimed_distance: float
    claimed_weights: np.ndarray
    alt_weights: np.ndarray | None = None


def analytic_b3(p: QubitParams) -> AnalyticB3Result:
    """Closed-form B3 approximation of a canonical-region target.

    Case selection: exact when <sx>+<sy>+<sz> <= 1; otherwise case i
    for k <= a/sqrt(a(1-a)) or phases inside [phi_th, pi/2 - phi_th],
    case ii/iii for phases below/above that window.  Boundary ties
    resolve to case i.  Output is paper-claimed only.
    """
    a, k, phi = p.a, p.k, p.phi
    s = sqrt(a * (1.0 - a))
    if zero_distance_condition(p):
        w = exact_decomposition_weights(p)
        return AnalyticB3Result("exact", 0.0, np.asarray(w.values))
    # outside the zero-distance region a is strictly inside (0, 1)
    kth = k_threshold(a, phi)
    if k <= a / s + CASE_TIE_TOL:
        case = "case_i"
    else:
        pth = phi_threshold(a, k)
        if phi < pth - CASE_TIE_TOL:
            case = "case_ii"
        elif phi > pi / 2 - pth + CASE_TIE_TOL:
            case = "case_iii"
        else:
            case = "case_i"
    if case == "case_i":
        dist = (2.0 / sqrt(3.0)) * sqrt(
            a * (1.0 - a) * (1.0 + sin(2.0 * phi))) * (k - kth)
        w = np.array([
            1.0 - 4.0 * a / 3.0 - (2.0 / 3.0) * k * s * (cos(phi) + sin(phi)),
            0.0,
            (2.0 / 3.0) * (a + k * s * (2.0 * cos(phi) - sin(phi))),
            0.0,
            (2.0 / 3.0) * (a + k * s * (2.0 * sin(phi) - cos(phi))),
            0.0,
        ])
        return AnalyticB3Result(case, dist, w)
    if case == "case_ii":
        dist = sqrt(max(0.0, 2.0 * a * (
            a - 2.0 * k * s * cos(phi)
            + k * k * (1.0 - a) * (2.0 - cos(phi) ** 2))))
        w = np.array([1.0 - a - k * s * cos(phi), 0.0,
                      a + k * s * cos(phi), 0.0, 0.0, 0.0])
        # variant reading: cos(phi) inside the radical, as printed
        rad = sqrt(max(0.0, a * (1.0 - a) * cos(phi)))
        alt = np.array([1.0 - a - k * rad, 0.0,
                        a + k * rad, 0.0, 0.0, 0.0])
        return AnalyticB3Result(case, dist, w, alt)
    dist = sqrt(max(0.0, 2.0 * a * (
        a - 2.0 * k * s * sin(phi)
        + k * k * (1.0 - a) * (2.0 - sin(phi) ** 2))))
    w = np.array([1.0 - a - k * s * sin(phi), 0.0, 0.0, 0.0,
                  a + k * s * sin(phi), 0.0])
    rad = sqrt(max(0.0, a * (1.0 - a) * sin(phi)))
    alt = np.array([1.0 - a - k * rad, 0.0, 0.0, 0.0,
                    a + k * rad, 0.0])
    return AnalyticB3Result("case_iii", dist, w, alt)


# --- canonical reduction -------------------------------------------------

_SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PHASE = np.diag([1.0, 1.0j]).astype(np.complex128)  # phi -> phi + pi/2


def _apply_steps(mat: np.ndarray, steps) -> np.ndarray:
    """Apply a list of ('u', W) / ('conj',) operations left to right."""
    out = mat
    for step in steps:
        if step[0] == "u":
            w = step[1]
            out = w @ out @ w.conj().T
        else:
            out = out.conj()
    return out


def _inverse_steps(steps):
    inv = []
    for step in reversed(steps):
        if step[0] == "u":
            inv.append(("u", step[1].conj().T))
        else:
            inv.append(("conj",))
    return inv


def canonical_reduce(p: QubitParams):
    """Reduce to a in [0, 1/2], phi in [0, pi/2] using the symmetries
    of the B3 set.

    Returns (p', perm) where perm maps any B3 weight vector q for the
    canonical target back to one for the original: w[perm[i]] = q[i]
    achieves the same distance.
    """
    steps = []
    a, k, phi = p.a, p.k, p.phi
    # fold phi into [0, pi/2) with powers of the phase gate
    n = int(np.floor(phi / (pi / 2.0) + 1e-12))
    phi = phi - n * (pi / 2.0)
    if phi < 0.0:
        phi = 0.0
    for _ in range(n % 4):
        steps.append(("u", _PHASE.conj().T))
    # fold a into [0, 1/2]: conjugate by sigma_x, then complex
    # conjugation to restore the sign of phi
    if a > 0.5:
        a = 1.0 - a
        steps.append(("u", _SX))
        steps.append(("conj",))
    reduced = QubitParams(a, k, phi)
    if not steps:
        return reduced, tuple(range(6))
    inv = _inverse_steps(steps)
    basis = [pauli_eigenstate(i).data for i in range(6)]
    perm = []
    for i in range(6):
        back = _apply_steps(basis[i], inv)
        match = [j for j in range(6)
                 if np.max(np.abs(back - basis[j])) < 1e-9]
        if len(match) != 1:
            raise RuntimeError("B3 symmetry did not permute the set")
        perm.append(match[0])
    return reduced, tuple(perm)


def permute_weights(weights, perm) -> Weights:
    """Pull canonical weights back through a canonical_reduce perm."""
    q = np.asarray(weights.values if isinstance(weights, Weights)
                   else weights, dtype=float)
    w = np.zeros_like(q)
    for i, wi in enumerate(q):
        w[perm[i]] += wi
    return Weights(w)
