import math
from enum import Enum
from typing import Optional

from pydantic import root_validator, validator

from fmm_precond.special.functions import MAX_ORDER
from fmm_precond.special.kernels import Kernel
from fmm_precond.tree.quadtree import DEFAULT_NCRIT
from fmm_precond.tree.traversal import DEFAULT_THETA
from fmm_precond.utils.errors import DomainError
from fmm_precond.utils.serialization import CamelModel

DEFAULT_ORDER = 6
MIN_EPSILON = 1e-12
MAX_EPSILON = 0.5


def accuracy_to_order(epsilon: float) -> int:
    """
    Expansion order delivering roughly ``epsilon`` relative precision: one order per decimal digit.
    """
    if not MIN_EPSILON <= epsilon <= MAX_EPSILON:
        raise DomainError(f'epsilon must lie in [{MIN_EPSILON}, {MAX_EPSILON}]')
    # tolerance keeps exact powers of ten from rounding up a whole order
    return max(1, math.ceil(-math.log10(epsilon) - 1e-9))


class Backend(Enum):
    """
    How N-body kernel sums are evaluated.
    """

    DIRECT = 'DIRECT'
    """
    Exact O(N²) summation; the accuracy oracle for everything else.
    """

    FMM = 'FMM'
    """
    Tree-based fast multipole evaluation with expansions of order p.
    """

    DEGRADED_DIRECT = 'DEGRADED_DIRECT'
    """
    Exact summation with every kernel entry perturbed by a seeded relative error of size
    epsilon, simulating a truncated FMM without building one.
    """


class FmmConfig(CamelModel):
    """
    Everything needed to evaluate f(y_j) = Σ_i w_i K(y_j, x_i) for one kernel.
    """

    kernel: Kernel
    """
    Green's function and wavenumber.
    """

    p: int = DEFAULT_ORDER
    """
    Expansion order; overwritten by accuracy_to_order(epsilon) when epsilon is given.
    """

    theta: float = DEFAULT_THETA
    """
    Multipole acceptance parameter in (0, 1]; smaller is more accurate and slower.
    """

    ncrit: int = DEFAULT_NCRIT
    """
    Maximum number of bodies per leaf cell.
    """

    backend: Backend = Backend.FMM

    epsilon: Optional[float]
    """
    Requested relative precision. Drives p, and the perturbation size of DEGRADED_DIRECT.
    """

    seed: int = 0
    """
    Seed of the DEGRADED_DIRECT perturbations.
    """

    workers: int = 1
    """
    Number of threads sharing the near-field and far-field work.
    """

    @validator('theta')
    def _check_theta(cls, theta):
        if not 0.0 < theta <= 1.0:
            raise ValueError('theta must lie in (0, 1]')
        return theta

    @validator('ncrit', 'workers')
    def _check_positive(cls, value):
        if value < 1:
            raise ValueError('must be >= 1')
        return value

    @root_validator(skip_on_failure=True)
    def _order_from_epsilon(cls, values):
        epsilon = values.get('epsilon')
        if epsilon is not None:
            try:
                values['p'] = accuracy_to_order(epsilon)
            except DomainError as e:
                raise ValueError(str(e))
        p = values.get('p')
        if p < 1 or 2 * p > MAX_ORDER:
            raise ValueError(f'expansion order must lie in [1, {MAX_ORDER // 2}]')
        return values

    @property
    def effective_epsilon(self) -> float:
        return self.epsilon if self.epsilon is not None else 10.0 ** (-self.p)

    def order_for_radius(self, radius: float) -> Optional[int]:
        """
        Expansion order for cells of the given radius. Laplace cells use p throughout. A
        Helmholtz series only starts converging once its order passes κR, so a Helmholtz cell
        gets p + ⌈κR⌉ terms; None when that exceeds the supported Bessel range and the cell
        must stay in the near field.
        """
        if not self.kernel.is_helmholtz:
            return self.p
        order = self.p + max(0, math.ceil(self.kernel.kappa * radius - 1e-9))
        return order if 2 * order <= MAX_ORDER else None

    @property
    def max_far_radius(self) -> Optional[float]:
        """
        Largest cell radius whose order still fits the Bessel range; bigger cells never
        interact through expansions.
        """
        if not self.kernel.is_helmholtz:
            return None
        return (MAX_ORDER // 2 - self.p) / self.kernel.kappa
