import logging

import numpy as np

from fmm_precond.krylov.operators import as_operator, identity_operator
from fmm_precond.krylov.report import ITERATION_COUNTING, SolveReport
from fmm_precond.utils.errors import BreakdownError, DomainError

logger = logging.getLogger(__name__)

BREAKDOWN = 1e-30


def bicgstab(A, b, M=None, tol: float = 1e-6, maxit: int = 20, x0=None) -> SolveReport:
    """
    Right-preconditioned BiCGSTAB. Every full step is two half steps, each one preconditioned
    matvec, and each half step counts as one iteration with its true residual in the history.
    """
    b = np.asarray(b, dtype=complex).reshape(-1)
    n = len(b)
    b_norm = np.linalg.norm(b)
    if b_norm == 0:
        raise DomainError('bicgstab needs a nonzero right-hand side')
    A = as_operator(A, n)
    M = as_operator(M if M is not None else identity_operator(n), n)

    if x0 is None:
        x = np.zeros(n, dtype=complex)
        r = b.copy()
    else:
        x = np.array(x0, dtype=complex).reshape(-1)
        r = b - A.matvec(x)
    r_hat = r.copy()
    history = [np.linalg.norm(r) / b_norm]
    rho_old = alpha = omega = 1.0
    p = v = np.zeros(n, dtype=complex)
    iterations = 0
    metadata = {'iteration_counting': ITERATION_COUNTING,
                'matvecs_per_iteration': '1 preconditioned + 1 true-residual check',
                'full_steps': '0'}

    def record(candidate):
        history.append(np.linalg.norm(b - A.matvec(candidate)) / b_norm)
        logger.debug('bicgstab iteration %d: relative residual %.3e', iterations, history[-1])

    while history[-1] > tol and iterations < maxit:
        rho = np.vdot(r_hat, r)
        if abs(rho) <= BREAKDOWN * np.linalg.norm(r_hat) * np.linalg.norm(r):
            raise BreakdownError(f'bicgstab: rho = 0 at iteration {iterations + 1}')
        if iterations == 0:
            p = r.copy()
        else:
            p = r + (rho / rho_old) * (alpha / omega) * (p - omega * v)
        p_hat = M.matvec(p)
        v = A.matvec(p_hat)
        denominator = np.vdot(r_hat, v)
        if denominator == 0:
            raise BreakdownError(f'bicgstab: (r_hat, v) = 0 at iteration {iterations + 1}')
        alpha = rho / denominator
        s = r - alpha * v
        iterations += 1
        record(x + alpha * p_hat)
        if history[-1] <= tol or iterations >= maxit:
            x = x + alpha * p_hat
            break

        s_hat = M.matvec(s)
        t = A.matvec(s_hat)
        tt = np.vdot(t, t)
        omega = np.vdot(t, s) / tt if tt != 0 else 0.0
        if omega == 0:
            raise BreakdownError(f'bicgstab: omega = 0 at iteration {iterations + 1}')
        x = x + alpha * p_hat + omega * s_hat
        r = s - omega * t
        rho_old = rho
        iterations += 1
        metadata['full_steps'] = str(iterations // 2)
        record(x)

    converged = bool(history[-1] <= tol)
    return SolveReport(iterations=iterations, residual_history=[float(h) for h in history], converged=converged,
                       solution=x, matvecs=A.count, preconditioner_applies=M.count, metadata=metadata)
