import json

import numpy as np
import pytest

from fmm_precond.harness.config import ResultRow
from fmm_precond.utils.common import RunReport, run_id_for
from fmm_precond.utils.errors import ConfigurationError, DomainError, FmmPrecondError, InnerSolveError, SingularError
from fmm_precond.utils.serialization import CamelModel


class _Payload(CamelModel):
    wave_number: complex
    samples: np.ndarray


def test_run_id_is_deterministic():
    assert run_id_for('E2', 0) == run_id_for('E2', 0)
    assert run_id_for('E2', 0) != run_id_for('E2', 1)
    assert run_id_for('E2', 0) != run_id_for('E3', 0)


def test_json_is_camel_case_with_complex_pairs():
    payload = _Payload(wave_number=2 - 3j, samples=np.array([1.0, 2.5]))
    data = json.loads(payload.json(by_alias=True))
    assert data == {'waveNumber': [2.0, -3.0], 'samples': [1.0, 2.5]}


def test_run_report_envelope():
    row = ResultRow(experiment='E3', problem='P2', element='Q1', h=1 / 32, kappa=5.0, preconditioner='fmm',
                    solver='gmres', iterations=4, converged=True, final_residual=3e-7, wall_time_s=None)
    report = RunReport(run_id=run_id_for('E3', 0), experiment_id='E3', seed=0, warnings=None, result=[row])
    data = json.loads(report.json(by_alias=True))
    assert data['experimentId'] == 'E3'
    assert data['runId'] == str(run_id_for('E3', 0))
    assert data['result'][0]['finalResidual'] == 3e-7
    assert data['result'][0]['preconditioner'] == 'fmm'


def test_error_hierarchy():
    assert issubclass(DomainError, ValueError)
    assert issubclass(ConfigurationError, ValueError)
    assert issubclass(SingularError, ZeroDivisionError)
    with pytest.raises(FmmPrecondError):
        raise DomainError('out of range')


def test_inner_solve_error_carries_partial_flux():
    flux = np.ones(3, dtype=complex)
    error = InnerSolveError('cap reached', flux=flux)
    assert error.flux is flux
    assert str(error) == 'cap reached'
