from fmm_precond.bem.mesh import BoundaryMesh, discretize_boundary
from fmm_precond.bem.operators import assemble_dense, element_integral
from fmm_precond.bem.pipeline import (BemOperators, InnerSolverMethod, InnerSolverSettings, VolumeSources,
                                      evaluate_interior, solve_boundary_flux, volume_to_boundary)
from fmm_precond.bem.preconditioner import BemPreconditioner
from fmm_precond.bem.quadrature import Layer, QuadratureRule, gauss_legendre

__all__ = ['BoundaryMesh', 'discretize_boundary', 'assemble_dense', 'element_integral', 'BemOperators',
           'InnerSolverMethod', 'InnerSolverSettings', 'VolumeSources', 'evaluate_interior', 'solve_boundary_flux',
           'volume_to_boundary', 'BemPreconditioner', 'Layer', 'QuadratureRule', 'gauss_legendre']
