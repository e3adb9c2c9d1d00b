"""Multi-copy approximation: tensor sets and the inequality chain.

For N copies of a target and a single-copy set, three quantities are
compared (each bounds the next from below):

  d_corr   optimum over the full tensor set (correlations allowed)
  d_fact   optimum over factorized per-copy mixtures (not jointly
           convex; certified as a grid-checked stationary incumbent)
  d_prod   tensor power of the single-copy optimal mixture (no
           N-copy optimization at all)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from .linalg import DensityMatrix, HermitianMatrix, trace_norm
from .solver import (ApproximationResult, SolverOptions, StateSet, Weights,
                     minimize, objective)

TENSOR_SET_CAP = 4096
FACTORIZED_VAR_CAP = 24
CHAIN_SLACK = 2e-3


@dataclass(frozen=True)
class MultiCopyProblem:
    base_state: DensityMatrix
    base_set: StateSet
    copies: int

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        if len(self.base_set) ** self.copies > TENSOR_SET_CAP:
            raise ValueError("tensor set would exceed the budget guard")


def _kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def tensor_set(sset: StateSet, n: int) -> StateSet:
    """All n-fold ordered tensor products; labels concatenate in
    Kronecker (left-to-right) order."""
    if len(sset) ** n > TENSOR_SET_CAP:
        raise ValueError("tensor set would exceed the budget guard")
    if n == 1:
        return sset
    elements = []
    labels = []
    for combo in product(range(len(sset)), repeat=n):
        elements.append(DensityMatrix(
            _kron_all([sset.elements[i].data for i in combo])))
        labels.append("".join(sset.labels[i] for i in combo))
    return StateSet(elements, labels)


def _target_power(prob: MultiCopyProblem) -> DensityMatrix:
    return DensityMatrix(
        _kron_all([prob.base_state.data] * prob.copies))


def correlated_minimize(prob: MultiCopyProblem,
                        opts: SolverOptions | None = None
                        ) -> ApproximationResult:
    """Left-most chain quantity: full convex optimization over the
    tensor set."""
    return minimize(_target_power(prob), tensor_set(prob.base_set,
                                                    prob.copies), opts)


@dataclass
class FactorizedResult:
    per_copy_weights: list
    distance: float
    converged: bool
    iterations: int

    def to_dict(self):
        return {
            "distance": self.distance,
            "per_copy_weights": [[float(x) for x in w.values]
                                 for w in self.per_copy_weights],
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _factorized_objective(rho_n, base, weights):
    mix = _kron_all([np.tensordot(w, base, axes=1) for w in weights])
    return trace_norm(HermitianMatrix(rho_n - mix))


def _alternating_pass(rho_n_dm, sset, weights, opts):
    """One sweep of per-copy convex solves with the other copies frozen."""
    n = len(weights)
    base = sset.stacked()
    for j in range(n):
        factors = [np.tensordot(w, base, axes=1) for w in weights]
        elems = []
        for i in range(len(sset)):
            mats = list(factors)
            mats[j] = base[i]
            elems.append(DensityMatrix(_kron_all(mats)))
        sub = StateSet(elems, sset.labels)
        res = minimize(rho_n_dm, sub, opts)
        weights[j] = np.asarray(res.weights.values, dtype=float)
    return weights


def factorized_minimize(prob: MultiCopyProblem,
                        opts: SolverOptions | None = None
                        ) -> FactorizedResult:
    """Middle chain quantity: independent per-copy mixtures.

    The joint problem is not convex, so alternating convex solves are
    run from the single-copy optimum and 10 random seeds, and the
    incumbent is cross-checked on a coarse exhaustive grid when the
    number of free parameters is small.  Copy-exchange symmetry is
    never imposed, only observed.
    """
    opts = opts or SolverOptions()
    m = len(prob.base_set)
    n = prob.copies
    if n * m > FACTORIZED_VAR_CAP:
        raise ValueError("factorized optimization exceeds the budget guard")
    rho_n = _target_power(prob)
    base = prob.base_set.stacked()
    # each frozen-copies subproblem is convex; one restart suffices
    inner = SolverOptions(step_scale=opts.step_scale, max_iter=opts.max_iter,
                          restarts=1, seed=opts.seed)

    single = minimize(prob.base_state, prob.base_set, opts)
    seeds = [[np.asarray(single.weights.values, dtype=float).copy()
              for _ in range(n)]]
    rng = np.random.default_rng(opts.seed + 99)
    for _ in range(10):
        g = rng.exponential(size=(n, m))
        seeds.append([row / row.sum() for row in g])

    best_w = None
    best_f = np.inf
    passes = 0
    converged = False
    for seed in seeds:
        weights = [w.copy() for w in seed]
        prev = np.inf
        for _ in range(60):
            weights = _alternating_pass(rho_n, prob.base_set, weights, inner)
            f = _factorized_objective(rho_n.data, base, weights)
            passes += 1
            if prev - f < 1e-10:
                break
            prev = f
        f = _factorized_objective(rho_n.data, base, weights)
        if f < best_f - 1e-12:
            best_f = f
            best_w = weights
            converged = prev - f < 1e-8 or f <= 1e-12

    # coarse exhaustive cross-check of the nonconvex landscape
    free = n * (m - 1)
    if free <= 2:
        res = 50
        axes = [np.linspace(0.0, 1.0, res + 1)] * free
        for combo in product(*axes):
            weights = []
            vals = iter(combo)
            for _ in range(n):
                head = [next(vals) for _ in range(m - 1)]
                tail = 1.0 - sum(head)
                if tail < -1e-12:
                    weights = None
                    break
                weights.append(np.array(head + [max(tail, 0.0)]))
            if weights is None:
                continue
            f = _factorized_objective(rho_n.data, base, weights)
            if f < best_f - 1e-9:
                # grid found a better basin: polish from there
                weights = _alternating_pass(rho_n, prob.base_set,
                                            list(weights), inner)
                f = _factorized_objective(rho_n.data, base, weights)
                if f < best_f:
                    best_f = f
                    best_w = weights
    return FactorizedResult(
        per_copy_weights=[Weights(w) for w in best_w],
        distance=float(best_f), converged=converged, iterations=passes)


def product_of_single_opt(prob: MultiCopyProblem,
                          opts: SolverOptions | None = None) -> float:
    """Right-most chain quantity: single-copy optimal mixture, raised
    to the N-th tensor power with no further optimization."""
    single = minimize(prob.base_state, prob.base_set, opts)
    mix = np.tensordot(np.asarray(single.weights.values),
                       prob.base_set.stacked(), axes=1)
    rho_n = _kron_all([prob.base_state.data] * prob.copies)
    mix_n = _kron_all([mix] * prob.copies)
    return trace_norm(HermitianMatrix(rho_n - mix_n))


@dataclass
class ChainReport:
    copies: int
    d_corr: float
    d_fact: float
    d_prod: float
    weights_corr: Weights
    per_copy_weights: list
    corr_converged: bool
    fact_converged: bool

    def to_dict(self):
        return {
            "schema": 1,
            "copies": self.copies,
            "d_corr": self.d_corr,
            "d_fact": self.d_fact,
            "d_prod": self.d_prod,
            "weights_corr": [float(x) for x in self.weights_corr.values],
            "per_copy_weights": [[float(x) for x in w.values]
                                 for w in self.per_copy_weights],
            "corr_converged": self.corr_converged,
            "fact_converged": self.fact_converged,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def inequality_chain_report(prob: MultiCopyProblem,
                            opts: SolverOptions | None = None) -> ChainReport:
    """Compute d_corr <= d_fact <= d_prod (within solver slack)."""
    corr = correlated_minimize(prob, opts)
    fact = factorized_minimize(prob, opts)
    prod = product_of_single_opt(prob, opts)
    if corr.distance > fact.distance + CHAIN_SLACK:
        raise RuntimeError("chain violation: d_corr > d_fact beyond slack")
    if fact.distance > prod + CHAIN_SLACK:
        raise RuntimeError("chain violation: d_fact > d_prod beyond slack")
    return ChainReport(
        copies=prob.copies, d_corr=corr.distance, d_fact=fact.distance,
        d_prod=float(prod), weights_corr=corr.weights,
        per_copy_weights=fact.per_copy_weights,
        corr_converged=corr.converged, fact_converged=fact.converged)
