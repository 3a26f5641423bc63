import json

import numpy as np

from fmm_precond.discretize.problems import ProblemId
from fmm_precond.harness.config import CSV_COLUMNS, ExperimentConfig, PreconditionerId, ResultRow, SpectrumRow
from fmm_precond.harness.emit import (emit_csv, emit_eigenvalues_csv, emit_experiment, emit_svg_convergence,
                                      format_value)
from fmm_precond.harness.runner import ExperimentResult
from fmm_precond.utils.common import run_id_for


def make_row(**changes) -> ResultRow:
    data = dict(experiment='E0', problem='P1', element='Q1', h=0.0625, kappa=5.0, preconditioner='fmm',
                solver='gmres', epsilon=1e-6, p=8, theta=0.4, iterations=7, converged=True, final_residual=3e-7,
                wall_time_s=None, residual_history=[1.0, 1e-3, 3e-7])
    data.update(changes)
    return ResultRow(**data)


def test_format_value():
    assert format_value(None) == ''
    assert format_value(True) == 'true'
    assert format_value(np.bool_(False)) == 'false'
    assert format_value(np.int64(12)) == '12'
    assert format_value(0.1) == '0.10000000000000001'
    assert float(format_value(1 / 3)) == 1 / 3
    assert format_value(PreconditionerId.GMG) == 'gmg'


def test_csv_layout(tmp_path):
    path = emit_csv([make_row(), make_row(converged=False, iterations=20, notes='IC shift 0.1; x')], tmp_path / 'r.csv')
    lines = path.read_text().split('\n')
    assert lines[0] == ','.join(CSV_COLUMNS)
    first = lines[1].split(',')
    assert first[CSV_COLUMNS.index('mu')] == ''
    assert first[CSV_COLUMNS.index('converged')] == 'true'
    assert first[CSV_COLUMNS.index('iterations')] == '7'
    assert first[CSV_COLUMNS.index('wall_time_s')] == ''
    assert lines[2].endswith('IC shift 0.1; x')
    assert lines[3] == ''


def test_eigenvalue_csv(tmp_path):
    path = emit_eigenvalues_csv(np.array([1 + 2j, -0.5]), tmp_path / 'eig.csv')
    assert path.read_text() == 're,im\n1,2\n-0.5,0\n'


def test_svg_is_reproducible(tmp_path):
    histories = {'fmm': [1.0, 1e-2, 1e-7], 'none': [1.0, 0.5, 0.4, 0.0]}
    first = emit_svg_convergence(histories, tmp_path / 'a.svg', title='E0')
    second = emit_svg_convergence(histories, tmp_path / 'b.svg', title='E0')
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().lstrip().startswith('<?xml')


def test_emit_experiment(tmp_path):
    config = ExperimentConfig(experiment_id='E0', problem=ProblemId.P1, h_values=[0.0625], kappas=[5.0])
    spectrum = SpectrumRow(experiment='E0', problem='P1', h=0.0625, kappa=5.0, operator='A', n=225,
                           n_negative_real=3, min_abs=0.01, max_abs=5.0, cluster_radius=4.0, median_abs=2.0)
    results = [ExperimentResult(config, rows=[make_row()], warnings=['something']),
               ExperimentResult(config, spectra=[spectrum], eigenvalues={'P1_A': np.array([1.0, 2.0j])})]
    written = emit_experiment('E0', results, tmp_path, seed=3)

    target = tmp_path / 'E0'
    assert written['results'] == target / 'results.csv'
    assert (target / 'convergence.svg').exists()
    assert (target / 'spectra.csv').read_text().startswith('experiment,problem,h,kappa,operator')
    assert (target / 'eigenvalues' / 'P1_A.csv').exists()
    assert (target / 'eigenvalues' / 'P1_A.svg').exists()

    report = json.loads((target / 'report.json').read_text())
    assert report['runId'] == str(run_id_for('E0', 3))
    assert report['warnings'] == ['something']
    assert report['result']['rows'][0]['iterations'] == 7
    assert report['result']['spectra'][0]['nNegativeReal'] == 3
    assert len(report['result']['configs']) == 2
