"""Invariant solutions of Yamabe-type equations on CP^n and HP^n."""
from .errors import (ConfigError, DomainError, FoldNotFoundError, IntegrationError,
                     InvalidExponentError, NoConvergenceError, NumericalError,
                     PositivityError, YamabeError)
from .model import Family, ProblemSpec, SpaceSpec, bifurcation_eigenvalue
from .spectral import EigenPolynomial, count_zeros, eigenfunction
from .shooting import IntegratorConfig, OdeState, shoot
from .bvp import SolutionProfile, count_multiplicity, refine, scan
from .continuation import (Branch, BranchPoint, DegenerateSolution, branch_from,
                           find_degenerate, lambda_prime_zero, locate_bifurcations)

__version__ = "0.1.0"
