from fmm_precond.harness.catalog import CATALOG, experiment
from fmm_precond.harness.config import (CSV_COLUMNS, ExperimentCell, ExperimentConfig, ExperimentKind,
                                        PreconditionerId, ResultRow, SolverId, SpectrumRow, load_config)
from fmm_precond.harness.emit import emit_csv, emit_experiment, emit_svg_convergence, emit_svg_scatter
from fmm_precond.harness.matrix_market import export_matrix, read_matrix
from fmm_precond.harness.runner import ExperimentResult, cells_for, run_cell, run_experiment, run_spectra

__all__ = ['CATALOG', 'experiment', 'CSV_COLUMNS', 'ExperimentCell', 'ExperimentConfig', 'ExperimentKind',
           'PreconditionerId', 'ResultRow', 'SolverId', 'SpectrumRow', 'load_config', 'emit_csv', 'emit_experiment',
           'emit_svg_convergence', 'emit_svg_scatter', 'export_matrix', 'read_matrix', 'ExperimentResult',
           'cells_for', 'run_cell', 'run_experiment', 'run_spectra']
