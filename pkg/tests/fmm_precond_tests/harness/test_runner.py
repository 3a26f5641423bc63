import pytest

from fmm_precond.bem.pipeline import InnerSolverMethod
from fmm_precond.discretize.assembly import ElementType
from fmm_precond.discretize.problems import ProblemId
from fmm_precond.harness.config import ExperimentCell, ExperimentConfig, ExperimentKind, PreconditionerId, SolverId
from fmm_precond.harness.runner import cells_for, fmm_config_for, run_cell, run_experiment


@pytest.fixture
def config():
    return ExperimentConfig(experiment_id='tiny', problem=ProblemId.P1, h_values=[1 / 16], kappas=[5.0],
                            preconditioners=[PreconditionerId.FMM, PreconditionerId.NONE], epsilons=[1e-6],
                            record_timings=False)


def cell(preconditioner, element=ElementType.Q1, solver=SolverId.GMRES, epsilon=None):
    return ExperimentCell(element=element, h=1 / 16, kappa=5.0, preconditioner=preconditioner, solver=solver,
                          epsilon=epsilon)


def test_fmm_cell_beats_unpreconditioned(config):
    fmm = run_cell(config, cell(PreconditionerId.FMM, epsilon=1e-6))
    none = run_cell(config, cell(PreconditionerId.NONE))
    assert fmm.converged
    assert fmm.iterations < config.maxit
    assert fmm.p is not None and fmm.theta == config.theta and fmm.epsilon == 1e-6
    assert fmm.metadata['inner_solver'] == 'LU'
    assert fmm.final_residual <= config.tol
    assert not none.converged
    assert none.iterations == config.maxit
    assert none.p is None and none.epsilon is None
    assert fmm.wall_time_s is None


def test_baseline_cells_record_metadata(config):
    gmg = run_cell(config, cell(PreconditionerId.GMG))
    ic = run_cell(config, cell(PreconditionerId.IC, solver=SolverId.BICGSTAB))
    assert gmg.metadata['smoother']
    assert 'matvecs' in gmg.metadata
    assert float(ic.metadata['ic_shift']) >= 0.0
    assert ic.solver == 'bicgstab'
    assert len(gmg.residual_history) >= 1


def test_failures_become_rows(config):
    row = run_cell(config, cell(PreconditionerId.GMG, element=ElementType.Q2))
    assert not row.converged
    assert row.iterations == config.maxit
    assert 'ConfigurationError' in row.notes
    assert row.final_residual is None


def test_explicit_order_overrides_epsilon(config):
    assert fmm_config_for(config.with_overrides(p=9), 5.0, 1e-2).p == 9
    assert fmm_config_for(config, 0.0, 1e-6).kernel.kappa == 0.0


def test_threads_do_not_change_results(config):
    serial = run_experiment(config)
    parallel = run_experiment(config.with_overrides(threads=2))
    assert [row.dict() for row in serial.rows] == [row.dict() for row in parallel.rows]
    assert [row.preconditioner for row in serial.rows] == ['fmm', 'none']
    assert len(serial.rows) == len(cells_for(config))


def test_spectrum_sweep_clusters():
    config = ExperimentConfig(experiment_id='spectra', kind=ExperimentKind.SPECTRUM, problem=ProblemId.P2,
                              h_values=[1 / 8], kappas=[2.0], epsilons=[1e-4])
    result = run_experiment(config)
    assert [row.operator for row in result.spectra] == ['A', 'fmm']
    a, fmm = result.spectra
    assert a.n == fmm.n == 49
    assert fmm.cluster_radius < a.cluster_radius
    assert sorted(result.eigenvalues) == ['P2_n8_kappa2_A', 'P2_n8_kappa2_fmm_eps0.0001']
    assert all(len(values) == 49 for values in result.eigenvalues.values())


def test_invalid_fmm_settings_become_rows(config):
    row = run_cell(config.with_overrides(p=40), cell(PreconditionerId.FMM, epsilon=1e-6))
    assert not row.converged
    assert 'ValidationError' in row.notes
    assert '\n' not in row.notes
    assert row.residual_history == []


def test_inner_gmres_cell_converges(config):
    row = run_cell(config.with_overrides(inner_solver=InnerSolverMethod.GMRES, epsilons=[1e-4]),
                   cell(PreconditionerId.FMM, epsilon=1e-4))
    assert row.metadata['inner_solver'] == 'GMRES'
    assert row.converged
    assert 'inner solves hit their cap' not in row.notes
