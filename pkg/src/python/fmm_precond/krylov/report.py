from typing import Dict, List, Optional

import numpy as np

from fmm_precond.utils.serialization import CamelModel

ITERATION_COUNTING = 'one iteration = one preconditioned matvec (GMRES: one Arnoldi step; BiCGSTAB: one half step)'


class SolveReport(CamelModel):
    """
    Outcome of one Krylov solve. The residual history is indexed by iteration, starting from the
    initial guess, and holds relative residual norms ‖b - Ax_k‖/‖b‖.
    """

    iterations: int
    """
    Iterations taken, counted per ITERATION_COUNTING.
    """

    residual_history: List[float]
    """
    Relative residual after each iteration; entry 0 belongs to the initial guess.
    """

    converged: bool
    """
    True iff the last history entry is at or below the tolerance.
    """

    solution: Optional[np.ndarray]
    """
    Final iterate, complex.
    """

    matvecs: int = 0
    """
    Operator applications, including residual checks.
    """

    preconditioner_applies: int = 0

    metadata: Dict[str, str] = {}
    """
    Free-form provenance, e.g. the iteration counting convention or the breakdown reason.
    """

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]
