from fmm_precond.krylov.bicgstab import bicgstab
from fmm_precond.krylov.gmres import arnoldi, gmres
from fmm_precond.krylov.operators import as_operator, identity_operator
from fmm_precond.krylov.report import SolveReport

__all__ = ['bicgstab', 'arnoldi', 'gmres', 'as_operator', 'identity_operator', 'SolveReport']
