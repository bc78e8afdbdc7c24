from .flow import FlowResult, divergence, solve_flow
from .problem import FlowProblem, LpProblem, LpSolution
from .simplex import solve_lp

__all__ = [
    "FlowProblem",
    "FlowResult",
    "LpProblem",
    "LpSolution",
    "divergence",
    "solve_flow",
    "solve_lp",
]
