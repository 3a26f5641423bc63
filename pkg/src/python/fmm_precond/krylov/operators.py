from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from fmm_precond.utils.errors import DomainError


class CountingOperator(LinearOperator):
    """
    Wraps an operator and counts its applications.
    """

    def __init__(self, op):
        self.op = aslinearoperator(op)
        self.count = 0
        super().__init__(dtype=np.complex128, shape=self.op.shape)

    def _matvec(self, x):
        self.count += 1
        return np.asarray(self.op.matvec(np.asarray(x, dtype=complex)), dtype=complex).reshape(-1)


def as_operator(op, n: Optional[int] = None) -> CountingOperator:
    """
    Any matrix, sparse matrix or LinearOperator as a square counting operator of dimension n.
    """
    wrapped = CountingOperator(op)
    rows, cols = wrapped.shape
    if rows != cols or (n is not None and rows != n):
        raise DomainError(f'operator of shape {wrapped.shape} does not match dimension {n}')
    return wrapped


def identity_operator(n: int) -> LinearOperator:
    return LinearOperator(shape=(n, n), dtype=np.complex128, matvec=lambda x: np.array(x, dtype=complex).reshape(-1))
