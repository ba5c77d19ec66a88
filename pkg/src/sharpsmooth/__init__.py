"""Sharp constants for smoothing estimates with angular regularity."""
from .beta_core import (BetaSequence, ScanResult, beta_k, beta_tail_limit, beta_values, lambda_k,
                        scan_extrema)
from .errors import BracketError, DomainError, NonConvergenceError
from .estimates import (Equation, EquationSpec, SharpConstants, exact_identity_constants,
                        sharp_constants)
from .problem import (AngularSymbol, Dispersion, GeneralWeightProblem, Problem, RadialWeight,
                      Smoother, ThetaKind)
from .regimes import (IndexSet, RegimeLabel, RegimeReport, classify, h_ratio, k_star,
                      solve_k_of_tau, solve_tau_star, solve_tau_upper_star)
from .specfun import DEFAULT_QUAD, QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "AngularSymbol", "BetaSequence", "BracketError", "DEFAULT_QUAD", "Dispersion", "DomainError",
    "Equation", "EquationSpec", "GeneralWeightProblem", "IndexSet", "NonConvergenceError", "Problem",
    "QuadratureSpec", "RadialWeight", "RegimeLabel", "RegimeReport", "ScanResult", "SharpConstants",
    "Smoother", "ThetaKind", "beta_k", "beta_tail_limit", "beta_values", "classify",
    "exact_identity_constants", "h_ratio", "k_star", "lambda_k", "scan_extrema", "sharp_constants",
    "solve_k_of_tau", "solve_tau_star", "solve_tau_upper_star",
]
