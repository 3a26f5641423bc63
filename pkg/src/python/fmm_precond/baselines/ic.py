import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, spsolve_triangular

from fmm_precond.utils.errors import DomainError, FactorizationError

logger = logging.getLogger(__name__)

SHIFTS = (1e-3, 1e-2, 1e-1, 1.0)


@dataclass
class IcFactors:
    """
    Zero-fill incomplete Cholesky factor L with L Lᵀ ≈ A + shift·I.
    """

    L: sp.csr_matrix
    shift: float = 0.0


def _ic0_attempt(lower: sp.csr_matrix, shift: float) -> sp.csr_matrix:
    """
    Row-oriented IC(0) on the pattern of ``lower`` (lower triangle of A, diagonal included).
    Raises FactorizationError on a non-positive pivot.
    """
    n = lower.shape[0]
    indptr, indices, data = lower.indptr, lower.indices, lower.data
    rows = []
    diagonal = np.zeros(n)
    for i in range(n):
        row = {}
        cols = indices[indptr[i]:indptr[i + 1]]
        vals = data[indptr[i]:indptr[i + 1]]
        a_ii = shift
        for j, a_ij in zip(cols, vals):
            if j == i:
                a_ii += a_ij
                continue
            row_j = rows[j]
            s = a_ij - sum(l_ik * row_j[k] for k, l_ik in row.items() if k in row_j)
            row[j] = s / diagonal[j]
        pivot = a_ii - sum(v * v for v in row.values())
        if not pivot > 0:
            raise FactorizationError(f'non-positive pivot {pivot:.3e} in row {i} (shift {shift:.3e})')
        diagonal[i] = math.sqrt(pivot)
        rows.append(row)

    out_rows, out_cols, out_vals = [], [], []
    for i, row in enumerate(rows):
        for j, v in row.items():
            out_rows.append(i)
            out_cols.append(j)
            out_vals.append(v)
        out_rows.append(i)
        out_cols.append(i)
        out_vals.append(diagonal[i])
    L = sp.csr_matrix((out_vals, (out_rows, out_cols)), shape=(n, n))
    L.sort_indices()
    return L


def ic0(A, shifts: Sequence[float] = SHIFTS) -> IcFactors:
    """
    IC(0) of a real symmetric matrix. On pivot breakdown the factorization is retried on
    A + α·diagMax·I for increasing α; the absolute shift used is recorded.
    """
    A = sp.csr_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise DomainError('IC(0) needs a square matrix')
    if np.iscomplexobj(A.data):
        if np.any(A.data.imag != 0):
            raise DomainError('IC(0) is implemented for real symmetric matrices')
        A = A.real.tocsr()
    lower = sp.tril(A, format='csr')
    lower.sort_indices()
    try:
        return IcFactors(_ic0_attempt(lower, 0.0), 0.0)
    except FactorizationError as e:
        logger.info('IC(0) breakdown without shift: %s', e)
    diag_max = float(np.max(np.abs(A.diagonal())))
    for alpha in shifts:
        shift = alpha * diag_max
        try:
            factors = IcFactors(_ic0_attempt(lower, shift), shift)
            logger.warning('IC(0) needed a diagonal shift of %.3e (alpha=%g)', shift, alpha)
            return factors
        except FactorizationError as e:
            logger.info('IC(0) breakdown with alpha=%g: %s', alpha, e)
    raise FactorizationError(f'IC(0) failed for every shift {list(shifts)} x diagMax={diag_max:.3e}')


class IcPreconditioner(LinearOperator):
    """
    z = (L Lᵀ)⁻¹ r by two sparse triangular solves, real and imaginary parts separately.
    """

    def __init__(self, factors: IcFactors):
        self.factors = factors
        self._lower = factors.L
        self._upper = factors.L.T.tocsr()
        super().__init__(dtype=np.complex128, shape=factors.L.shape)

    @classmethod
    def from_matrix(cls, A) -> 'IcPreconditioner':
        return cls(ic0(A))

    def _solve_real(self, r: np.ndarray) -> np.ndarray:
        y = spsolve_triangular(self._lower, r, lower=True)
        return spsolve_triangular(self._upper, y, lower=False)

    def _matvec(self, r):
        r = np.asarray(r, dtype=complex).reshape(-1)
        return self._solve_real(r.real) + 1j * self._solve_real(r.imag)
