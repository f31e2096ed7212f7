"""Lowest eigenvalues of the fiber operators of the magnetic Robin Laplacian
on the unit ball, the effective eigenvalue e(b) = min_m lambda_m(b), and the
endpoint analysis of the underlying singular Sturm-Liouville problems."""

from .eigensolver import (
    ConvergenceError,
    EigenPair,
    ModeProblem,
    SolverConfig,
    assemble_matrix,
    coupling_matrix,
    smallest_eigenpair,
    solve_mode,
)
from .endpoint import (
    Endpoint,
    Verdict,
    classify_endpoint,
    frobenius_expansion,
    indicial_exponents,
    liouville_fd_eigenvalue,
    liouville_qhat,
)
from .legendre import BasisSpec, assoc_legendre_normalized, legendre_table
from .quadrature import QuadratureRule, gauss_chebyshev2, gauss_legendre, log_two_integral
from .spectrum import (
    TRIAL_THRESHOLD,
    BracketError,
    effective_eigenvalue,
    find_crossing,
    hf_derivative,
    monotonicity_report,
    rayleigh_quotient,
    robin_asymptotic,
    sweep,
)

__version__ = "0.1.0"
