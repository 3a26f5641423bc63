from fmm_precond.spectra.eigen import (SpectrumReport, dense_eigenvalues, eigenpair_backward_error, materialize,
                                       preconditioned, spectrum_report)

__all__ = ['SpectrumReport', 'dense_eigenvalues', 'eigenpair_backward_error', 'materialize', 'preconditioned',
           'spectrum_report']
