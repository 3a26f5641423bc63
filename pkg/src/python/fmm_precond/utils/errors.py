from typing import Optional

import numpy as np


class FmmPrecondError(Exception):
    """
    Base class for every error raised by the workbench.
    """


class DomainError(FmmPrecondError, ValueError):
    """
    Argument outside the mathematical domain of a function, e.g. Y_n at x <= 0.
    """


class SingularError(FmmPrecondError, ZeroDivisionError):
    """
    Kernel evaluated at coincident source and target, or a collocation point on a foreign element.
    """


class DegenerateError(FmmPrecondError):
    """
    Too many coincident points to split below ncrit before reaching the tree's depth cap.
    """


class KernelNotSupportedError(FmmPrecondError):
    """
    Kernel/backend combination with no implementation, e.g. 3D kernels on the FMM backend.
    """


class ConfigurationError(FmmPrecondError, ValueError):
    """
    Invalid experiment or solver configuration.
    """


class BreakdownError(FmmPrecondError):
    """
    Krylov recurrence broke down (zero inner product or stalled Arnoldi step).
    """


class FactorizationError(FmmPrecondError):
    """
    Incomplete factorization failed for every diagonal shift tried.
    """


class SizeError(FmmPrecondError):
    """
    Dense materialization requested beyond the memory guard.
    """


class NoConvergenceError(FmmPrecondError):
    """
    Dense eigenvalue iteration failed to converge.
    """


class InnerSolveError(FmmPrecondError):
    """
    Inner boundary-flux solve hit its iteration cap. The partial flux and the inner solve report
    are attached so that the caller may decide to accept them.
    """

    def __init__(self, message: str, flux: Optional[np.ndarray] = None, report=None):
        super().__init__(message)
        self.flux = flux
        self.report = report
