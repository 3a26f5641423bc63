"""
Built-in test problems for ∇²u + κ²u = f in Ω, u = g on Γ.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from fmm_precond.utils.errors import DomainError

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


class ProblemId(Enum):
    """
    Catalog identifiers of the model problems.
    """

    P1 = 'P1'
    """
    Unit square, f = (κ² - 5π²) sin(πx) sin(2πy), g = 0; exact u = sin(πx) sin(2πy).
    """

    P2 = 'P2'
    """
    [-1, 1]², Gaussian source f = exp(-10((y - 1)² + (x - 0.5)²)), g = 0.
    """

    P3 = 'P3'
    """
    Unit square, f = 1, g = 0; the Poisson (κ = 0) sanity problem.
    """

    P4 = 'P4'
    """
    Unit square, κ = μ√2, exact u = x² sin(μx) cos(μy) imposed on the boundary.
    """


@dataclass(frozen=True)
class ProblemSpec:
    identifier: ProblemId
    bounds: Tuple[float, float]
    kappa: float
    source: Field
    dirichlet: Field
    exact: Optional[Field] = None
    mu: Optional[float] = None

    def __post_init__(self):
        if self.kappa < 0 or not math.isfinite(self.kappa):
            raise DomainError('kappa must be finite and >= 0')


def _zero(x, y):
    return np.zeros_like(np.asarray(x, dtype=float))


def problem_p1(kappa: float = 15.0) -> ProblemSpec:
    def exact(x, y):
        return np.sin(np.pi * x) * np.sin(2 * np.pi * y)

    def source(x, y):
        return (kappa ** 2 - 5 * np.pi ** 2) * exact(x, y)

    return ProblemSpec(ProblemId.P1, (0.0, 1.0), kappa, source, _zero, exact=exact)


def problem_p2(kappa: float = 5.0) -> ProblemSpec:
    def source(x, y):
        return np.exp(-10.0 * ((y - 1.0) ** 2 + (x - 0.5) ** 2))

    return ProblemSpec(ProblemId.P2, (-1.0, 1.0), kappa, source, _zero)


def problem_p3(kappa: float = 0.0) -> ProblemSpec:
    def source(x, y):
        return np.ones_like(np.asarray(x, dtype=float))

    return ProblemSpec(ProblemId.P3, (0.0, 1.0), kappa, source, _zero)


def problem_p4(mu: float = 1.0) -> ProblemSpec:
    def exact(x, y):
        return x ** 2 * np.sin(mu * x) * np.cos(mu * y)

    def source(x, y):
        return 2 * np.sin(mu * x) * np.cos(mu * y) + 4 * mu * x * np.cos(mu * x) * np.cos(mu * y)

    return ProblemSpec(ProblemId.P4, (0.0, 1.0), mu * math.sqrt(2.0), source, exact, exact=exact, mu=mu)


def make_problem(identifier: ProblemId, kappa: Optional[float] = None, mu: Optional[float] = None) -> ProblemSpec:
    """
    Instantiate a catalog problem; P4 is parametrized by μ, the others by κ.
    """
    if identifier is ProblemId.P4:
        if mu is None:
            raise DomainError('P4 is parametrized by mu')
        return problem_p4(mu)
    factory = {ProblemId.P1: problem_p1, ProblemId.P2: problem_p2, ProblemId.P3: problem_p3}[identifier]
    return factory() if kappa is None else factory(kappa)


def builtin_problems() -> List[ProblemSpec]:
    """
    The catalog with default parameters: P1 at κ = 15, P2 at κ = 5, P3 at κ = 0, P4 at μ = 1.
    """
    return [problem_p1(), problem_p2(), problem_p3(), problem_p4()]
