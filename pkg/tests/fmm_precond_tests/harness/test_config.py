import pytest

from fmm_precond.bem.pipeline import InnerSolverMethod
from fmm_precond.discretize.problems import ProblemId
from fmm_precond.harness.config import (ExperimentCell, ExperimentConfig, PreconditionerId, ResultRow, SolverId,
                                        SpectrumRow, load_config)
from fmm_precond.utils.errors import ConfigurationError
from fmm_precond_tests.testutils.serialization import roundtrip

SWEEP = '''
problem = "P1"
h_values = [0.0625]
kappas = [5.0]
preconditioners = ["fmm", "none"]
maxit = 30

[fmm]
epsilon = 1e-4
theta = 0.5
'''


def test_roundtrip_result_objects():
    roundtrip(ResultRow)
    roundtrip(SpectrumRow)
    roundtrip(ExperimentCell)


def test_enums_accept_values_and_names():
    assert PreconditionerId('fmm') is PreconditionerId.FMM
    assert PreconditionerId('FMM') is PreconditionerId.FMM
    assert SolverId('BICGSTAB') is SolverId.BICGSTAB
    with pytest.raises(ValueError):
        PreconditionerId('amg')


def test_load_config(tmp_path):
    path = tmp_path / 'sweep.toml'
    path.write_text(SWEEP)
    config = load_config(path)
    assert config.experiment_id == 'sweep'
    assert config.problem is ProblemId.P1
    assert config.preconditioners == [PreconditionerId.FMM, PreconditionerId.NONE]
    assert config.epsilons == [1e-4]
    assert config.theta == 0.5
    assert config.maxit == 30
    assert config.inner_solver is InnerSolverMethod.LU
    assert config.restart is None


def test_overrides_win_over_the_file(tmp_path):
    path = tmp_path / 'sweep.toml'
    path.write_text(SWEEP)
    config = load_config(path, maxit=10, out_dir='elsewhere', record_timings=False, seed=None)
    assert config.maxit == 10
    assert config.out_dir == 'elsewhere'
    assert config.record_timings is False
    assert config.seed == 0


def test_bad_files_are_configuration_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / 'missing.toml')
    broken = tmp_path / 'broken.toml'
    broken.write_text('problem = ')
    with pytest.raises(ConfigurationError):
        load_config(broken)
    invalid = tmp_path / 'invalid.toml'
    invalid.write_text('problem = "P1"\nh_values = [0.0625]\nkappas = [5.0]\ntol = 2.0\n')
    with pytest.raises(ConfigurationError):
        load_config(invalid)


def test_parameter_grid_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(experiment_id='x', problem=ProblemId.P1, h_values=[0.0625])
    with pytest.raises(ValueError):
        ExperimentConfig(experiment_id='x', problem=ProblemId.P4, h_values=[0.0625], kappas=[1.0])
    with pytest.raises(ValueError):
        ExperimentConfig(experiment_id='x', problem=ProblemId.P1, h_values=[0.9], kappas=[1.0])
    pairs = ExperimentConfig(experiment_id='x', problem=ProblemId.P1, pairs=[(0.0625, 5.0)])
    assert pairs.pairs == [(0.0625, 5.0)]


def test_with_overrides_revalidates():
    config = ExperimentConfig(experiment_id='x', problem=ProblemId.P1, h_values=[0.0625], kappas=[5.0])
    assert config.with_overrides(maxit=5, threads=None).maxit == 5
    with pytest.raises(ValueError):
        config.with_overrides(maxit=0)


@pytest.mark.parametrize('epsilon', [0.0, 1e-30, 0.9])
def test_precisions_outside_the_supported_range_are_rejected(epsilon):
    with pytest.raises(ValueError):
        ExperimentConfig(experiment_id='x', problem=ProblemId.P1, h_values=[0.0625], kappas=[1.0],
                         epsilons=[1e-4, epsilon])
