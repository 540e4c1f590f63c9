"""Composite Bernstein operators, the associated quadrature rule, moduli of
smoothness, and empirical checks of their error and Grüss-type bounds."""
from .errors import (
    CompBernError,
    ConvergenceError,
    DomainError,
    InvalidInputError,
    InvalidParameterError,
)
from .functions import CORPUS, RealFunction, get_function
from .kernels import BACKEND
from .moduli import KFunctionalEstimate, Moduli, ModulusEstimate, k_functional_upper, omega1, omega2, omega_tilde
from .operator_core import (
    Interval,
    NodeGrid,
    OperatorParams,
    TransferMatrix,
    affine_pullback,
    bernstein_eval,
    build_transfer_matrix,
    composite_eval,
    iterate_eval,
    node_grid,
    piecewise_linear_interp,
    second_moment,
)
from .quadrature import QuadratureRule, VarianceValue, apply_rule, build_rule, c2_error_bound, reference_integral, variance

__version__ = "0.1.0"
