"""Exact power-series solutions of Q-systems and Kirillov-Reshetikhin identity checks."""
from .series import LaurentPoly, SeriesError, TruncatedSeries, laurent_substitute, specialize
from .qsolve import (QSystemSpec, SolutionFamily, SolverError, check_convergence_property,
                     check_inversion_property, check_residual, power_combination, solve_general,
                     solve_specialized, solve_standard)
from .combinat import (coeff_K, coeff_R, gen_binom, series_K, series_K_specialized, series_R,
                       series_R_specialized)
from .liedata import AlgebraData, algebra, kr_matrices, parse_algebra, weyl_character, weyl_denominator
from .kr import (kr_canonical, kr_multiplicities, verify, verify_denominator,
                 verify_jacobian_denominator, verify_type_I)

__all__ = [
    "LaurentPoly", "SeriesError", "TruncatedSeries", "laurent_substitute", "specialize",
    "QSystemSpec", "SolutionFamily", "SolverError", "check_convergence_property",
    "check_inversion_property", "check_residual", "power_combination", "solve_general",
    "solve_specialized", "solve_standard", "coeff_K", "coeff_R", "gen_binom", "series_K",
    "series_K_specialized", "series_R", "series_R_specialized", "AlgebraData", "algebra",
    "kr_matrices", "parse_algebra", "weyl_character", "weyl_denominator", "kr_canonical",
    "kr_multiplicities", "verify", "verify_denominator", "verify_jacobian_denominator",
    "verify_type_I",
]
