"""Numeric audit of the closed-form B3 results.

An erratum to the closed forms states they are invalid in part of the
parameter space without saying where.  The audit maps the failure
region: on a canonical-region grid it compares each claimed result
against the distance its own weights actually achieve and against the
numeric solver, and reports three kinds of defects:

  weights_infeasible   claimed weights leave the probability simplex
  inconsistent         claimed distance != distance of claimed weights
  suboptimal           claimed weights are beaten by the solver

Grid points are processed in parallel worker threads (CSA_THREADS
caps the pool); results are merged by grid index, so output is
deterministic.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import pi

import numpy as np

from . import backend
from .qubit import QubitParams, analytic_b3, bloch_expectations
from .solver import SolverOptions

INCONSISTENT_TOL = 1e-6
SUBOPTIMAL_TOL = 1e-4
FEASIBLE_TOL = 1e-9

_B3_BLOCH = np.array([
    [0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
    [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0], [0.0, -1.0, 0.0],
])


def _shared_starts(m: int, opts: SolverOptions) -> np.ndarray:
    """Uniform center plus `restarts` random simplex points; shared
    across all grid points of a batch run."""
    rng = np.random.default_rng(opts.seed)
    g = rng.exponential(size=(opts.restarts, m))
    starts = np.empty((opts.restarts + 1, m))
    starts[0] = 1.0 / m
    starts[1:] = g / g.sum(axis=1, keepdims=True)
    return starts


def solve_bloch_grid(targets: np.ndarray, set_bloch: np.ndarray,
                     opts: SolverOptions | None = None,
                     chunk: int = 512):
    """Solve many qubit instances; threaded over chunks, merged by
    index.  Returns (distances, weights)."""
    opts = opts or SolverOptions()
    k = backend.get()
    starts = _shared_starts(set_bloch.shape[0], opts)
    n = targets.shape[0]
    bounds = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    dist = np.empty(n)
    wts = np.empty((n, set_bloch.shape[0]))

    def run(span):
        lo, hi = span
        f, p, _ = k.solve_bloch_batch(targets[lo:hi], set_bloch, starts,
                                      opts.step_scale, opts.max_iter)
        return lo, hi, f, p

    workers = backend.thread_count()
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for lo, hi, f, p in pool.map(run, bounds):
                dist[lo:hi] = f
                wts[lo:hi] = p
    else:
        for span in bounds:
            lo, hi, f, p = run(span)
            dist[lo:hi] = f
            wts[lo:hi] = p
    return dist, wts


def _bloch_distance(r: np.ndarray, w: np.ndarray) -> float:
    d = r - _B3_BLOCH.T @ w
    return float(np.sqrt(d @ d))


@dataclass
class AuditReport:
    grid: dict
    n_points: int
    counts: dict
    entries: list = field(default_factory=list)
    # full per-point arrays kept in memory for downstream checks
    params: np.ndarray | None = None
    case_labels: list | None = None
    claimed: np.ndarray | None = None
    achieved: np.ndarray | None = None
    oracle: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "grid": self.grid,
            "n_points": self.n_points,
            "counts": self.counts,
            "flagged": self.entries,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def audit_analytic(resolution=21, opts: SolverOptions | None = None,
                   a_range=(0.0, 0.5), k_range=(0.0, 1.0),
                   phi_range=(0.0, pi / 2)) -> AuditReport:
    """Run the closed-form audit on a canonical-region grid.

    `resolution` is either one int (same along a, k, phi) or a triple.
    Ranges may be restricted, e.g. to the zero-distance region.
    """
    opts = opts or SolverOptions()
    if np.isscalar(resolution):
        na = nk = nphi = int(resolution)
    else:
        na, nk, nphi = (int(x) for x in resolution)
    a_grid = np.linspace(a_range[0], a_range[1], na)
    k_grid = np.linspace(k_range[0], k_range[1], nk)
    phi_grid = np.linspace(phi_range[0], phi_range[1], nphi)

    params = []
    results = []
    targets = np.empty((na * nk * nphi, 3))
    idx = 0
    for a in a_grid:
        for k in k_grid:
            for phi in phi_grid:
                p = QubitParams(float(a), float(k), float(phi))
                params.append(p)
                targets[idx] = bloch_expectations(p)
                results.append(analytic_b3(p))
                idx += 1

    oracle, _ = solve_bloch_grid(targets, _B3_BLOCH, opts)

    counts = {"weights_infeasible": 0, "inconsistent": 0, "suboptimal": 0}
    entries = []
    claimed = np.empty(idx)
    achieved = np.empty(idx)
    labels = []
    for i, (p, res) in enumerate(zip(params, results)):
        w = res.claimed_weights
        claimed[i] = res.claimed_distance
        labels.append(res.case_label)
        ach = _bloch_distance(targets[i], w)
        achieved[i] = ach
        flags = []
        if w.min() < -FEASIBLE_TOL or abs(w.sum() - 1.0) > FEASIBLE_TOL:
            flags.append("weights_infeasible")
        if abs(res.claimed_distance - ach) > INCONSISTENT_TOL:
            flags.append("inconsistent")
        if ach > oracle[i] + SUBOPTIMAL_TOL:
            flags.append("suboptimal")
        if flags:
            for fl in flags:
                counts[fl] += 1
            entry = {
                "a": p.a, "k": p.k, "phi": p.phi,
                "case_label": res.case_label,
                "claimed_distance": res.claimed_distance,
                "achieved_distance": ach,
                "oracle_distance": float(oracle[i]),
                "flags": flags,
            }
            if res.alt_weights is not None:
                alt = res.alt_weights
                entry["alt_achieved_distance"] = _bloch_distance(
                    targets[i], alt)
                entry["alt_weights_feasible"] = bool(
                    alt.min() >= -FEASIBLE_TOL
                    and abs(alt.sum() - 1.0) <= FEASIBLE_TOL)
            entries.append(entry)

    grid = {
        "a": [float(a_range[0]), float(a_range[1]), na],
        "k": [float(k_range[0]), float(k_range[1]), nk],
        "phi": [float(phi_range[0]), float(phi_range[1]), nphi],
    }
    return AuditReport(
        grid=grid, n_points=idx, counts=counts, entries=entries,
        params=np.array([[p.a, p.k, p.phi] for p in params]),
        case_labels=labels, claimed=claimed, achieved=achieved,
        oracle=np.asarray(oracle))
