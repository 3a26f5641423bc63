from fmm_precond.baselines.ic import IcFactors, IcPreconditioner, ic0
from fmm_precond.baselines.identity import IdentityPreconditioner, identity_precond
from fmm_precond.baselines.multigrid import GmgPreconditioner, MgHierarchy, build_hierarchy, mg_vcycle

__all__ = ['IcFactors', 'IcPreconditioner', 'ic0', 'IdentityPreconditioner', 'identity_precond',
           'GmgPreconditioner', 'MgHierarchy', 'build_hierarchy', 'mg_vcycle']
