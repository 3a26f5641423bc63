import numpy as np
from scipy.sparse.linalg import LinearOperator


class IdentityPreconditioner(LinearOperator):
    """
    M⁻¹ = I; the unpreconditioned baseline.
    """

    def __init__(self, n: int):
        super().__init__(dtype=np.complex128, shape=(n, n))

    def _matvec(self, r):
        return np.array(r, dtype=complex).reshape(-1)


def identity_precond(n: int) -> IdentityPreconditioner:
    return IdentityPreconditioner(n)
