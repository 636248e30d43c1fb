"""Fractional HJB / forward-backward sweep solver."""

from ._frachjb import (
    ProblemError,
    ProblemSpec,
    SolverAbort,
    caputo_derivative,
    coeff_A,
    coeff_B,
    coeff_C,
    gamma,
    log_gamma,
    parse_problem_file,
    parse_problem_text,
    rl_derivative,
    rl_integral_left,
    rl_integral_right,
    solve,
    verify,
)

__all__ = [
    "ProblemError",
    "ProblemSpec",
    "SolverAbort",
    "caputo_derivative",
    "coeff_A",
    "coeff_B",
    "coeff_C",
    "gamma",
    "log_gamma",
    "parse_problem_file",
    "parse_problem_text",
    "rl_derivative",
    "rl_integral_left",
    "rl_integral_right",
    "solve",
    "verify",
]
