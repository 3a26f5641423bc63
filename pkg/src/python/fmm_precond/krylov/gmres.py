"""
Right-preconditioned restarted GMRES with modified Gram-Schmidt Arnoldi and complex Givens
rotations.

Iterates solve A M⁻¹ x̂ = b with x = M⁻¹ x̂, so the least-squares residual tracked by the
rotations is the true residual of x (up to roundoff). Within a restart cycle the history holds
those rotation estimates; the entry closing each cycle is recomputed from b - Ax.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from fmm_precond.krylov.operators import as_operator, identity_operator
from fmm_precond.krylov.report import ITERATION_COUNTING, SolveReport
from fmm_precond.utils.errors import BreakdownError, DomainError

logger = logging.getLogger(__name__)

HAPPY_BREAKDOWN = 1e-14


def _givens(a: complex, b: float) -> Tuple[float, complex]:
    """
    Rotation (c, s) with [c, s; -conj(s), c] [a; b] = [t; 0] for real b >= 0.
    """
    t = np.hypot(abs(a), b)
    if t == 0.0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, 1.0
    return abs(a) / t, (a / abs(a)) * np.conj(b) / t


def arnoldi_step(op, V: np.ndarray, H: np.ndarray, j: int) -> float:
    """
    Extend the Krylov basis by one vector with modified Gram-Schmidt. Column j of H receives the
    projections; returns the norm of the new direction before normalization (the subdiagonal).
    """
    w = op(V[:, j])
    for i in range(j + 1):
        H[i, j] = np.vdot(V[:, i], w)
        w = w - H[i, j] * V[:, i]
    h_next = np.linalg.norm(w)
    H[j + 1, j] = h_next
    if h_next > 0:
        V[:, j + 1] = w / h_next
    return h_next


def arnoldi(A, r0, steps: int, M=None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Basis V (n × steps+1) and Hessenberg H ((steps+1) × steps) of the right-preconditioned
    Krylov space of A M⁻¹ started from r0.
    """
    r0 = np.asarray(r0, dtype=complex)
    n = len(r0)
    A = as_operator(A, n)
    M = as_operator(M if M is not None else identity_operator(n), n)
    V = np.zeros((n, steps + 1), dtype=complex)
    H = np.zeros((steps + 1, steps), dtype=complex)
    V[:, 0] = r0 / np.linalg.norm(r0)
    for j in range(steps):
        if arnoldi_step(lambda v: A.matvec(M.matvec(v)), V, H, j) == 0:
            return V[:, :j + 1], H[:j + 1, :j]
    return V, H


def gmres(A, b, M=None, tol: float = 1e-6, restart: int = 20, max_outer: int = 20,
          maxiter: Optional[int] = None, x0=None) -> SolveReport:
    """
    Solve Ax = b by GMRES(restart) with right preconditioner M (identity when None).

    At most ``max_outer`` restart cycles and ``maxiter`` Arnoldi steps in total
    (default ``restart * max_outer``). Convergence means ‖b - Ax‖/‖b‖ <= tol.
    """
    b = np.asarray(b, dtype=complex).reshape(-1)
    n = len(b)
    b_norm = np.linalg.norm(b)
    if b_norm == 0:
        raise DomainError('gmres needs a nonzero right-hand side')
    if restart < 1 or max_outer < 1:
        raise DomainError('restart and max_outer must be >= 1')
    A = as_operator(A, n)
    M = as_operator(M if M is not None else identity_operator(n), n)
    maxiter = restart * max_outer if maxiter is None else maxiter

    if x0 is None:
        x = np.zeros(n, dtype=complex)
        r = b.copy()
    else:
        x = np.array(x0, dtype=complex).reshape(-1)
        r = b - A.matvec(x)
    history = [np.linalg.norm(r) / b_norm]
    iterations = 0
    outer = 0
    metadata = {'iteration_counting': ITERATION_COUNTING}

    while history[-1] > tol and iterations < maxiter and outer < max_outer:
        outer += 1
        steps = min(restart, maxiter - iterations)
        beta = np.linalg.norm(r)
        V = np.zeros((n, steps + 1), dtype=complex)
        H = np.zeros((steps + 1, steps), dtype=complex)
        cs = np.zeros(steps)
        sn = np.zeros(steps, dtype=complex)
        g = np.zeros(steps + 1, dtype=complex)
        V[:, 0] = r / beta
        g[0] = beta

        k = 0
        happy = False
        for j in range(steps):
            h_next = arnoldi_step(lambda v: A.matvec(M.matvec(v)), V, H, j)
            column_norm = np.linalg.norm(H[:j + 2, j])
            for i in range(j):
                hij = H[i, j]
                H[i, j] = cs[i] * hij + sn[i] * H[i + 1, j]
                H[i + 1, j] = -np.conj(sn[i]) * hij + cs[i] * H[i + 1, j]
            cs[j], sn[j] = _givens(H[j, j], h_next)
            H[j, j] = cs[j] * H[j, j] + sn[j] * h_next
            H[j + 1, j] = 0.0
            g[j + 1] = -np.conj(sn[j]) * g[j]
            g[j] = cs[j] * g[j]
            iterations += 1
            k = j + 1
            estimate = abs(g[j + 1]) / b_norm
            if h_next <= HAPPY_BREAKDOWN * column_norm:
                happy = True
                break
            if estimate <= tol or j == steps - 1:
                break
            history.append(estimate)

        if np.any(np.diag(H[:k, :k]) == 0):
            raise BreakdownError(f'singular Hessenberg factor after {iterations} iterations')
        y = solve_triangular(H[:k, :k], g[:k])
        x = x + M.matvec(V[:, :k] @ y)
        r = b - A.matvec(x)
        history.append(np.linalg.norm(r) / b_norm)
        logger.debug('gmres cycle %d: %d iterations, relative residual %.3e', outer, iterations, history[-1])
        if happy and history[-1] > tol:
            raise BreakdownError(f'Arnoldi breakdown without convergence after {iterations} iterations '
                                 f'(relative residual {history[-1]:.3e})')

    converged = bool(history[-1] <= tol)
    return SolveReport(iterations=iterations, residual_history=[float(h) for h in history], converged=converged,
                       solution=x, matvecs=A.count, preconditioner_applies=M.count, metadata=metadata)
