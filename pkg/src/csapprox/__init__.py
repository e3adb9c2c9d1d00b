"""Optimal convex approximation of quantum states.

Given a target density matrix and a finite set of available states,
find the mixture of the available states that is least distinguishable
from the target in trace norm.  Includes the closed-form qubit/Pauli
solutions, an independent numeric solver and grid oracle, an audit of
the closed forms, and multi-copy machinery.
"""

from . import backend
from .audit import AuditReport, audit_analytic
from .linalg import (ComplexMatrix, DensityMatrix, EigenSolverError,
                     HermitianMatrix, helstrom_probability,
                     hermitian_eigensystem, tensor_product, trace_norm)
from .multicopy import (ChainReport, FactorizedResult, MultiCopyProblem,
                        correlated_minimize, factorized_minimize,
                        inequality_chain_report, product_of_single_opt,
                        tensor_set)
from .qubit import (AnalyticB3Result, QubitParams, analytic_b3, b1_solution,
                    b1_states, b3_states, bloch_expectations,
                    canonical_reduce, exact_decomposition_weights,
                    k_threshold, pauli_eigenstate, permute_weights,
                    phi_threshold, qubit_from_params,
                    zero_distance_condition)
from .solver import (ApproximationResult, SolverOptions, StateSet, Weights,
                     grid_oracle, load_state_set, minimize, objective,
                     project_simplex, subgradient)

__version__ = "0.1.0"
