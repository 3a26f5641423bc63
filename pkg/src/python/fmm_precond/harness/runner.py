import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.sparse.linalg import LinearOperator

from fmm_precond.baselines.ic import IcPreconditioner, ic0
from fmm_precond.baselines.identity import IdentityPreconditioner
from fmm_precond.baselines.multigrid import GmgPreconditioner
from fmm_precond.bem.pipeline import InnerSolverSettings
from fmm_precond.bem.preconditioner import BemPreconditioner
from fmm_precond.discretize.grid import Grid
from fmm_precond.discretize.problems import ProblemId, make_problem
from fmm_precond.discretize.system import FemSystem, build_system
from fmm_precond.fmm.config import FmmConfig
from fmm_precond.harness.config import (ExperimentCell, ExperimentConfig, ExperimentKind, PreconditionerId,
                                        ResultRow, SolverId, SpectrumRow)
from fmm_precond.krylov.bicgstab import bicgstab
from fmm_precond.krylov.gmres import gmres
from fmm_precond.special.kernels import Kernel
from fmm_precond.spectra.eigen import dense_eigenvalues, materialize, preconditioned, spectrum_report
from fmm_precond.utils.errors import FmmPrecondError

logger = logging.getLogger(__name__)

CELL_ERRORS = (FmmPrecondError, ValidationError, ArithmeticError, ValueError, np.linalg.LinAlgError, MemoryError)
"""
Failures confined to one cell or spectrum: recorded and skipped, never raised out of a sweep.
"""


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: List[ResultRow] = field(default_factory=list)
    spectra: List[SpectrumRow] = field(default_factory=list)
    eigenvalues: Dict[str, np.ndarray] = field(default_factory=dict)
    """
    Spectrum label -> eigenvalues, for the per-spectrum CSV and scatter files.
    """
    warnings: List[str] = field(default_factory=list)


def parameter_points(config: ExperimentConfig) -> List[Tuple[float, float, Optional[float]]]:
    """
    (h, κ, μ) triples of a sweep, in configuration order.
    """
    if config.pairs:
        return [(h, kappa, None) for h, kappa in config.pairs]
    if config.problem is ProblemId.P4:
        return [(h, mu * math.sqrt(2.0), mu) for h in config.h_values for mu in config.mus]
    return [(h, kappa, None) for h in config.h_values for kappa in config.kappas]


def cells_for(config: ExperimentConfig) -> List[ExperimentCell]:
    cells = []
    for element in config.elements:
        for h, kappa, mu in parameter_points(config):
            for preconditioner in config.preconditioners:
                epsilons = config.epsilons if preconditioner is PreconditionerId.FMM else [None]
                for solver in config.solvers:
                    for epsilon in epsilons:
                        cells.append(ExperimentCell(element=element, h=h, kappa=kappa, mu=mu,
                                                    preconditioner=preconditioner, solver=solver, epsilon=epsilon))
    return cells


def fmm_config_for(config: ExperimentConfig, kappa: float, epsilon: Optional[float]) -> FmmConfig:
    kernel = Kernel.for_wavenumber(kappa)
    if config.p is not None:
        return FmmConfig(kernel=kernel, p=config.p, theta=config.theta, ncrit=config.ncrit, backend=config.backend,
                         seed=config.seed)
    return FmmConfig(kernel=kernel, epsilon=epsilon, theta=config.theta, ncrit=config.ncrit, backend=config.backend,
                     seed=config.seed)


def system_for(config: ExperimentConfig, element, h: float, kappa: float, mu: Optional[float]) -> FemSystem:
    if config.problem is ProblemId.P4:
        problem = make_problem(config.problem, mu=mu)
    else:
        problem = make_problem(config.problem, kappa=kappa)
    return build_system(problem, Grid.for_mesh_level(problem.bounds, h), element)


def build_preconditioner(config: ExperimentConfig, cell: ExperimentCell, system: FemSystem,
                         notes: List[str], metadata: Dict[str, str]) -> Tuple[LinearOperator, Optional[FmmConfig]]:
    if cell.preconditioner is PreconditionerId.FMM:
        fmm = fmm_config_for(config, system.kappa, cell.epsilon)
        settings = InnerSolverSettings(method=config.inner_solver)
        metadata['inner_solver'] = settings.method.name
        metadata['fmm_backend'] = fmm.backend.name
        return BemPreconditioner.for_system(system, fmm, settings), fmm
    if cell.preconditioner is PreconditionerId.IC:
        factors = ic0(system.A)
        if factors.shift:
            notes.append(f'IC shift {factors.shift:.3g}')
        metadata['ic_shift'] = repr(factors.shift)
        return IcPreconditioner(factors), None
    if cell.preconditioner is PreconditionerId.GMG:
        preconditioner = GmgPreconditioner.for_system(system)
        metadata.update(preconditioner.hierarchy.metadata)
        return preconditioner, None
    return IdentityPreconditioner(system.n), None


def run_cell(config: ExperimentConfig, cell: ExperimentCell) -> ResultRow:
    """
    Assemble, precondition and solve one cell. Failures are recorded in the row, never raised.
    """
    notes: List[str] = []
    metadata: Dict[str, str] = {}
    report = None
    fmm = None
    start = time.monotonic()
    try:
        system = system_for(config, cell.element, cell.h, cell.kappa, cell.mu)
        M, fmm = build_preconditioner(config, cell, system, notes, metadata)
        if cell.solver is SolverId.GMRES:
            restart = config.restart or config.maxit
            report = gmres(system.A, system.b, M=M, tol=config.tol, restart=restart,
                           max_outer=-(-config.maxit // restart), maxiter=config.maxit)
        else:
            report = bicgstab(system.A, system.b, M=M, tol=config.tol, maxit=config.maxit)
        metadata.update(report.metadata)
        metadata['matvecs'] = str(report.matvecs)
        if isinstance(M, BemPreconditioner) and M.warnings:
            notes.append(f'{len(M.warnings)} inner solves hit their cap')
    except CELL_ERRORS as e:
        logger.warning('%s cell %s failed: %s', config.experiment_id, cell.json(), e)
        notes.append(f'{type(e).__name__}: {e}'.replace('\n', ' '))
    elapsed = time.monotonic() - start

    converged = bool(report is not None and report.converged)
    row = ResultRow(experiment=config.experiment_id, problem=config.problem.value, element=cell.element.value,
                    h=cell.h, kappa=cell.kappa, mu=cell.mu, preconditioner=cell.preconditioner.value,
                    solver=cell.solver.value, epsilon=cell.epsilon if fmm is not None else None,
                    p=fmm.p if fmm is not None else None, theta=fmm.theta if fmm is not None else None,
                    iterations=report.iterations if converged else config.maxit, converged=converged,
                    final_residual=report.final_residual if report is not None else None,
                    wall_time_s=elapsed if config.record_timings else None, notes='; '.join(notes),
                    residual_history=report.residual_history if report is not None else [], metadata=metadata)
    logger.info('%s %s h=%.4g kappa=%.4g %s/%s eps=%s: %s after %d iterations', config.experiment_id,
                config.problem.value, cell.h, cell.kappa, cell.preconditioner.value, cell.solver.value,
                cell.epsilon, 'converged' if converged else 'not converged', row.iterations)
    return row


def _spectrum_label(config: ExperimentConfig, system: FemSystem, operator: str, epsilon: Optional[float]) -> str:
    label = f'{config.problem.value}_n{system.grid.n}_kappa{system.kappa:g}_{operator}'
    return label if epsilon is None else f'{label}_eps{epsilon:g}'


def run_spectra(config: ExperimentConfig) -> ExperimentResult:
    """
    Dense spectra of A and, for each FMM precision, of M⁻¹A.
    """
    result = ExperimentResult(config)
    for element in config.elements:
        for h, kappa, mu in parameter_points(config):
            system = system_for(config, element, h, kappa, mu)
            operators = [('A', None)]
            if PreconditionerId.FMM in config.preconditioners:
                operators += [('fmm', epsilon) for epsilon in config.epsilons]
            for name, epsilon in operators:
                try:
                    if name == 'A':
                        matrix = system.A.toarray()
                    else:
                        M = BemPreconditioner.for_system(system, fmm_config_for(config, system.kappa, epsilon),
                                                         InnerSolverSettings(method=config.inner_solver))
                        # first apply builds the FMM plans and factors before columns go parallel
                        M.matvec(np.eye(system.n, 1, dtype=complex).ravel())
                        matrix = materialize(preconditioned(system.A, M), system.n, workers=config.threads)
                    eigenvalues = dense_eigenvalues(matrix)
                except CELL_ERRORS as e:
                    message = f'{config.experiment_id} spectrum {name} kappa={kappa:g} eps={epsilon}: {e}'
                    logger.warning(message)
                    result.warnings.append(message)
                    continue
                report = spectrum_report(eigenvalues)
                label = _spectrum_label(config, system, name, epsilon)
                result.eigenvalues[label] = eigenvalues
                result.spectra.append(SpectrumRow(experiment=config.experiment_id, problem=config.problem.value,
                                                  h=h, kappa=system.kappa, operator=name, epsilon=epsilon,
                                                  n=system.n, n_negative_real=report.n_negative_real,
                                                  min_abs=report.min_abs, max_abs=report.max_abs,
                                                  cluster_radius=report.cluster_radius,
                                                  median_abs=report.median_abs))
                logger.info('%s spectrum %s: %d negative real parts, min |lambda| %.3e, cluster radius %.3e',
                            config.experiment_id, label, report.n_negative_real, report.min_abs,
                            report.cluster_radius)
    return result


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """
    Run every cell of a sweep (in parallel up to config.threads) and return rows sorted by cell.
    """
    if config.kind is ExperimentKind.SPECTRUM:
        return run_spectra(config)
    cells = sorted(cells_for(config), key=ExperimentCell.sort_key)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(lambda cell: run_cell(config, cell), cells))
    else:
        rows = [run_cell(config, cell) for cell in cells]
    result = ExperimentResult(config, rows=rows)
    result.warnings = [f'{row.preconditioner} h={row.h:g} kappa={row.kappa:g}: {row.notes}' for row in rows
                       if row.notes]
    return result
