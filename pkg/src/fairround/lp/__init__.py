from .models import (
    LpFailure,
    egalitarian_fractional,
    egalitarian_problem,
    pareto_improve,
    pareto_improve_blend,
    pareto_optimum_value,
    pareto_problem,
    proportional_fractional,
)
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, LpSolution, solve_simplex

__all__ = [
    "INFEASIBLE", "OPTIMAL", "UNBOUNDED", "LpFailure", "LpProblem", "LpSolution",
    "egalitarian_fractional", "egalitarian_problem", "pareto_improve",
    "pareto_improve_blend", "pareto_optimum_value", "pareto_problem",
    "proportional_fractional", "solve_simplex",
]
