from fmm_precond.discretize.assembly import ElementType, assemble_q1, assemble_q2
from fmm_precond.discretize.grid import Grid
from fmm_precond.discretize.problems import ProblemId, ProblemSpec, builtin_problems, make_problem
from fmm_precond.discretize.system import FemSystem, build_system

__all__ = ['ElementType', 'assemble_q1', 'assemble_q2', 'Grid', 'ProblemId', 'ProblemSpec', 'builtin_problems',
           'make_problem', 'FemSystem', 'build_system']
