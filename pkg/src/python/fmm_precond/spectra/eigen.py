import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
from scipy.linalg import LinAlgError, eigvals, lu_factor, lu_solve
from scipy.sparse.linalg import aslinearoperator

from fmm_precond.utils.errors import DomainError, NoConvergenceError, SizeError
from fmm_precond.utils.serialization import CamelModel

logger = logging.getLogger(__name__)

MAX_DENSE = 4096


def materialize(op, n: Optional[int] = None, workers: int = 1) -> np.ndarray:
    """
    Dense matrix of a linear operator, column j being op(e_j). Columns may be computed by several
    threads; each column is independent.
    """
    op = aslinearoperator(op)
    n = n if n is not None else op.shape[1]
    if op.shape != (n, n):
        raise DomainError(f'operator of shape {op.shape} is not {n} x {n}')
    if n > MAX_DENSE:
        raise SizeError(f'refusing to materialize a {n} x {n} operator (limit {MAX_DENSE})')

    def column(j):
        unit = np.zeros(n, dtype=complex)
        unit[j] = 1.0
        return np.asarray(op.matvec(unit), dtype=complex).reshape(-1)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(column, range(n)))
    else:
        columns = [column(j) for j in range(n)]
    return np.column_stack(columns) if columns else np.zeros((0, 0), dtype=complex)


def dense_eigenvalues(matrix) -> np.ndarray:
    """
    All eigenvalues of a dense square matrix (LAPACK: Hessenberg reduction and shifted QR).
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError('eigenvalues need a square matrix')
    if matrix.shape[0] > MAX_DENSE:
        raise SizeError(f'{matrix.shape[0]} x {matrix.shape[0]} is beyond the dense limit {MAX_DENSE}')
    try:
        values = eigvals(matrix, check_finite=True)
    except (LinAlgError, ValueError) as e:
        raise NoConvergenceError(f'dense eigenvalue iteration failed: {e}')
    return np.asarray(values, dtype=complex)


def eigenpair_backward_error(matrix, eigenvalues, samples: int = 5, seed: int = 0) -> float:
    """
    Largest ‖Av - λv‖/‖A‖ over a random sample of eigenvalues, with v recovered by two steps of
    inverse iteration at a slightly perturbed shift.
    """
    matrix = np.asarray(matrix, dtype=complex)
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    n = matrix.shape[0]
    norm = np.linalg.norm(matrix, 2) or 1.0
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(eigenvalues), size=min(samples, len(eigenvalues)), replace=False)
    worst = 0.0
    for k in picks:
        lam = eigenvalues[k]
        shift = lam + 1e-10 * norm * (1 + 1j)
        lu = lu_factor(matrix - shift * np.eye(n))
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        for _ in range(2):
            v = lu_solve(lu, v)
            v = v / np.linalg.norm(v)
        worst = max(worst, float(np.linalg.norm(matrix @ v - lam * v) / norm))
    return worst


class SpectrumReport(CamelModel):
    """
    Clustering metrics of a spectrum; all recomputed from the eigenvalue list.
    """

    eigenvalues: List[complex]

    n_negative_real: int
    """
    Number of eigenvalues with Re λ < 0.
    """

    min_abs: float

    max_abs: float

    cluster_radius: float
    """
    max |λ - 1|.
    """

    median_abs: float


def spectrum_report(eigenvalues) -> SpectrumReport:
    values = np.asarray(eigenvalues, dtype=complex)
    if values.size == 0:
        raise DomainError('empty spectrum')
    magnitudes = np.abs(values)
    return SpectrumReport(eigenvalues=[complex(v) for v in values],
                          n_negative_real=int(np.sum(values.real < 0)),
                          min_abs=float(magnitudes.min()),
                          max_abs=float(magnitudes.max()),
                          cluster_radius=float(np.max(np.abs(values - 1.0))),
                          median_abs=float(np.median(magnitudes)))


def preconditioned(A, M):
    """
    The operator M⁻¹A as a composition, for materializing preconditioned spectra.
    """
    return aslinearoperator(M) * aslinearoperator(A)
