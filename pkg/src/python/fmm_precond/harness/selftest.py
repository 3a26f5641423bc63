import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, splu

from fmm_precond.bem.preconditioner import BemPreconditioner
from fmm_precond.discretize.grid import Grid
from fmm_precond.discretize.problems import ProblemId, make_problem
from fmm_precond.discretize.system import build_system
from fmm_precond.fmm.config import FmmConfig
from fmm_precond.fmm.direct import direct_sum
from fmm_precond.fmm.evaluate import evaluate
from fmm_precond.krylov.gmres import gmres
from fmm_precond.special.functions import bessel_j, bessel_y
from fmm_precond.special.kernels import Kernel

logger = logging.getLogger(__name__)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def _bessel_values() -> Tuple[bool, str]:
    error = max(abs(bessel_j(0, 1.0) - 0.7651976866), abs(bessel_y(0, 1.0) - 0.0882569642),
                abs(bessel_j(1, 1.0) - 0.4400505857), abs(bessel_y(1, 1.0) + 0.7812128213))
    return error < 1e-9, f'max deviation {error:.2e}'


def _fmm_against_direct(seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    points = rng.uniform(0.0, 1.0, size=(800, 2))
    charges = rng.standard_normal(800) + 1j * rng.standard_normal(800)
    worst = 0.0
    for kappa in (0.0, 5.0):
        config = FmmConfig(kernel=Kernel.for_wavenumber(kappa), p=12, ncrit=32)
        exact = direct_sum(config.kernel, points, charges, points)
        approx = evaluate(points, charges, points, config)
        worst = max(worst, np.linalg.norm(approx - exact) / np.linalg.norm(exact))
    return worst < 1e-5, f"relative error {worst:.2e} at p = 12"


def _exact_preconditioner_one_step(seed: int) -> Tuple[bool, str]:
    system = build_system(make_problem(ProblemId.P1, kappa=5.0), Grid.for_mesh_level((0.0, 1.0), 1 / 8))
    lu = splu(system.A.tocsc().astype(complex))
    inverse = LinearOperator(system.A.shape, matvec=lu.solve, dtype=complex)
    report = gmres(system.A, system.b, M=inverse, tol=1e-8, restart=5, max_outer=1)
    return report.converged and report.iterations == 1, f'{report.iterations} iterations'


def _preconditioner_linearity(seed: int) -> Tuple[bool, str]:
    system = build_system(make_problem(ProblemId.P1, kappa=5.0), Grid.for_mesh_level((0.0, 1.0), 1 / 8))
    M = BemPreconditioner.for_system(system, FmmConfig(kernel=Kernel.for_wavenumber(5.0), p=8, seed=seed))
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(system.n), rng.standard_normal(system.n)
    a, b = 0.3 - 1.2j, 2.0
    combined = M.matvec(a * x + b * y)
    separate = a * M.matvec(x) + b * M.matvec(y)
    error = np.linalg.norm(combined - separate) / np.linalg.norm(separate)
    return error < 1e-10, f'relative defect {error:.2e}'


CHECKS: List[Tuple[str, Callable]] = [
    ('bessel reference values', lambda seed: _bessel_values()),
    ('fmm matches direct summation', _fmm_against_direct),
    ('exact preconditioner converges in one step', _exact_preconditioner_one_step),
    ('bem preconditioner is linear', _preconditioner_linearity),
]


def selftest(seed: int = 0) -> List[Check]:
    """
    Fast property sweep over the numerical core; each check runs in well under a minute.
    """
    results = []
    for name, check in CHECKS:
        try:
            passed, detail = check(seed)
        except Exception as e:  # a crashing check is a failed check
            passed, detail = False, f'{type(e).__name__}: {e}'
        logger.log(logging.INFO if passed else logging.ERROR, '%s: %s (%s)', name, 'ok' if passed else 'FAILED',
                   detail)
        results.append(Check(name, bool(passed), detail))
    return results
