"""
The experiment catalog: E1-E8, one or more sweeps each, reproducing the reference iteration
tables and figures at desk scale. AMG columns are not reproduced.
"""

from typing import Dict, List

from fmm_precond.bem.pipeline import InnerSolverMethod
from fmm_precond.discretize.assembly import ElementType
from fmm_precond.discretize.problems import ProblemId
from fmm_precond.harness.config import ExperimentConfig, ExperimentKind, PreconditionerId, SolverId
from fmm_precond.utils.errors import ConfigurationError

MESH_LEVELS = [2.0 ** -5, 2.0 ** -6, 2.0 ** -7]
BASELINES = [PreconditionerId.GMG, PreconditionerId.FMM, PreconditionerId.IC]

CATALOG: Dict[str, List[ExperimentConfig]] = {
    'E1': [ExperimentConfig(experiment_id='E1', problem=ProblemId.P1, elements=[ElementType.Q1, ElementType.Q2],
                            h_values=MESH_LEVELS, kappas=[15.0],
                            notes='Q1 vs Q2 discretizations, P1, kappa = 15')],
    'E2': [ExperimentConfig(experiment_id='E2', problem=ProblemId.P1,
                            pairs=[(2.0 ** -4, 5.0), (2.0 ** -5, 10.0), (2.0 ** -6, 20.0), (2.0 ** -7, 40.0)],
                            preconditioners=BASELINES, notes='P1 with kappa * h = 0.3125')],
    'E3': [ExperimentConfig(experiment_id='E3', problem=ProblemId.P2, h_values=MESH_LEVELS, kappas=[5.0],
                            preconditioners=BASELINES, notes='P2 mesh refinement at kappa = 5')],
    'E4': [ExperimentConfig(experiment_id='E4', problem=ProblemId.P2, h_values=[2.0 ** -6], kappas=[0.8, 2.0, 5.0],
                            preconditioners=BASELINES, notes='P2 wavenumber sweep at h = 2^-6')],
    'E5': [ExperimentConfig(experiment_id='E5', problem=ProblemId.P4, h_values=MESH_LEVELS, mus=[1.0, 4.0, 6.0, 8.0],
                            preconditioners=BASELINES, notes='P4 with kappa = mu * sqrt(2)')],
    'E6': [ExperimentConfig(experiment_id='E6', problem=ProblemId.P2, h_values=[2.0 ** -5],
                            kappas=[2.0, 5.0, 7.0, 10.0], solvers=[SolverId.GMRES, SolverId.BICGSTAB],
                            notes='FMM-preconditioned GMRES vs BiCGSTAB on P2'),
           ExperimentConfig(experiment_id='E6', problem=ProblemId.P2, h_values=[2.0 ** -5], kappas=[5.0, 10.0],
                            epsilons=[1e-4], inner_solver=InnerSolverMethod.GMRES,
                            notes='boundary flux solved by FMM-matvec GMRES instead of the dense LU')],
    'E7': [ExperimentConfig(experiment_id='E7', problem=ProblemId.P2, h_values=[2.0 ** -5], kappas=[7.0],
                            preconditioners=BASELINES, epsilons=[1e-2, 1e-4, 1e-6],
                            notes='FMM precision vs convergence on P2, kappa = 7'),
           ExperimentConfig(experiment_id='E7', problem=ProblemId.P2, h_values=[2.0 ** -5], kappas=[0.0, 15.0],
                            preconditioners=[PreconditionerId.NONE], maxit=100,
                            notes='unpreconditioned GMRES: Poisson vs Helmholtz stagnation')],
    'E8': [ExperimentConfig(experiment_id='E8', kind=ExperimentKind.SPECTRUM, problem=ProblemId.P1,
                            h_values=[2.0 ** -5], kappas=[5.0, 10.0, 20.0, 40.0], preconditioners=[],
                            notes='indefiniteness of A as kappa grows'),
           ExperimentConfig(experiment_id='E8', kind=ExperimentKind.SPECTRUM, problem=ProblemId.P2,
                            h_values=[2.0 ** -5], kappas=[7.0], epsilons=[1e-2, 1e-4, 1e-6],
                            notes='clustering of the FMM-preconditioned spectrum')],
}


def experiment(experiment_id: str) -> List[ExperimentConfig]:
    try:
        return [config.copy(deep=True) for config in CATALOG[experiment_id.upper()]]
    except KeyError:
        raise ConfigurationError(f'unknown experiment {experiment_id!r}; known: {", ".join(sorted(CATALOG))}')
