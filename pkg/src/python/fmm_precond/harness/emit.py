import csv
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from fmm_precond.harness.config import CSV_COLUMNS, ExperimentConfig, ResultRow, SpectrumRow
from fmm_precond.utils.common import RunReport, run_id_for
from fmm_precond.utils.serialization import CamelModel

logger = logging.getLogger(__name__)

SPECTRUM_COLUMNS = ['experiment', 'problem', 'h', 'kappa', 'operator', 'epsilon', 'n', 'n_negative_real', 'min_abs',
                    'max_abs', 'cluster_radius', 'median_abs']

# fixed ids and no timestamp keep the SVG output stable across reruns
SVG_RC = {'svg.hashsalt': 'fmm-precond', 'svg.fonttype': 'none'}
SVG_METADATA = {'Date': None}


class ExperimentSummary(CamelModel):
    """
    Payload of the JSON run report: the sweep(s) that ran and everything they produced.
    """

    configs: List[ExperimentConfig]
    rows: List[ResultRow] = []
    spectra: List[SpectrumRow] = []


def format_value(value) -> str:
    """
    CSV cell text: floats at full precision ('%.17g'), booleans lowercase, missing values empty.
    """
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return '%.17g' % float(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _write_table(records: Iterable[Mapping], columns: Sequence[str], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for record in records:
            writer.writerow([format_value(record.get(column)) for column in columns])
    logger.debug('wrote %s', path)
    return path


def emit_csv(rows: Sequence[ResultRow], path) -> Path:
    return _write_table((row.dict() for row in rows), CSV_COLUMNS, path)


def emit_spectra_csv(rows: Sequence[SpectrumRow], path) -> Path:
    return _write_table((row.dict() for row in rows), SPECTRUM_COLUMNS, path)


def emit_eigenvalues_csv(eigenvalues, path) -> Path:
    """
    One eigenvalue per line as re,im.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    return _write_table(({'re': z.real, 'im': z.imag} for z in eigenvalues), ['re', 'im'], path)


def emit_svg_convergence(histories: Mapping[str, Sequence[float]], path, title: str = '') -> Path:
    """
    Semilog plot of relative residual against iteration, one line per labelled history.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(SVG_RC):
        figure = Figure(figsize=(6.4, 4.8))
        axes = figure.add_subplot()
        for label, history in histories.items():
            if len(history):
                axes.semilogy(np.arange(len(history)), np.maximum(history, 1e-300), marker='.', label=label)
        axes.set_xlabel('iteration')
        axes.set_ylabel('relative residual')
        if title:
            axes.set_title(title)
        if histories:
            axes.legend(fontsize='x-small')
        figure.savefig(path, format='svg', metadata=SVG_METADATA)
    return path


def emit_svg_scatter(spectra: Mapping[str, np.ndarray], path, title: str = '') -> Path:
    """
    Eigenvalues in the complex plane, one marker series per labelled spectrum.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(SVG_RC):
        figure = Figure(figsize=(6.4, 4.8))
        axes = figure.add_subplot()
        for label, eigenvalues in spectra.items():
            eigenvalues = np.asarray(eigenvalues, dtype=complex)
            axes.scatter(eigenvalues.real, eigenvalues.imag, s=4, label=label)
        axes.axvline(0.0, color='grey', linewidth=0.5)
        axes.set_xlabel('Re')
        axes.set_ylabel('Im')
        if title:
            axes.set_title(title)
        if spectra:
            axes.legend(fontsize='x-small')
        figure.savefig(path, format='svg', metadata=SVG_METADATA)
    return path


def emit_json(report: RunReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.json(by_alias=True, indent=2))
    return path


def _history_label(row: ResultRow) -> str:
    label = f'{row.element} h={row.h:g} kappa={row.kappa:g} {row.preconditioner}/{row.solver}'
    return label if row.epsilon is None else f'{label} eps={row.epsilon:g}'


def emit_experiment(experiment_id: str, results: Sequence, out_dir, seed: int = 0) -> Dict[str, Path]:
    """
    Write everything one catalog entry produced under out_dir/experiment_id: results.csv and
    convergence.svg for solve sweeps, spectra.csv plus per-spectrum eigenvalue CSVs and scatter
    plots for spectrum sweeps, and report.json for both.
    """
    target = Path(out_dir) / experiment_id
    rows = [row for result in results for row in result.rows]
    spectra = [row for result in results for row in result.spectra]
    warnings = [w for result in results for w in result.warnings]
    written = {}
    if rows:
        written['results'] = emit_csv(rows, target / 'results.csv')
        written['convergence'] = emit_svg_convergence({_history_label(row): row.residual_history for row in rows},
                                                      target / 'convergence.svg', title=experiment_id)
    if spectra:
        written['spectra'] = emit_spectra_csv(spectra, target / 'spectra.csv')
        for result in results:
            for label, eigenvalues in result.eigenvalues.items():
                emit_eigenvalues_csv(eigenvalues, target / 'eigenvalues' / f'{label}.csv')
                emit_svg_scatter({label: eigenvalues}, target / 'eigenvalues' / f'{label}.svg', title=label)
    summary = ExperimentSummary(configs=[result.config for result in results], rows=rows, spectra=spectra)
    report = RunReport(run_id=run_id_for(experiment_id, seed), experiment_id=experiment_id, seed=seed,
                       warnings=warnings or None, result=summary)
    written['report'] = emit_json(report, target / 'report.json')
    logger.info('%s: wrote %s', experiment_id, ', '.join(str(p) for p in written.values()))
    return written
