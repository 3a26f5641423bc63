"""
Green's kernels for the Laplace and Helmholtz operators in 2D and 3D, their normal
derivatives with respect to the source point, and the analytic integrals used for
singular self-interactions.

Sign conventions: ``G`` is the outgoing fundamental solution of ``-(∇² + κ²)``. The
separation vector used by the normal derivative is ``source - target`` and the normal is
attached to the source, so that the double-layer integral over a closed boundary seen from
an interior point tends to ``-1`` for the Laplace kernel.
"""

import math
from enum import Enum

import numpy as np
from pydantic import root_validator

from fmm_precond.special.functions import hankel1
from fmm_precond.utils.errors import DomainError, SingularError
from fmm_precond.utils.serialization import CamelModel

EULER_GAMMA_EXP = 1.781072418
"""
exp(Euler's constant), to the precision used by the element-diagonal formula.
"""


class KernelType(Enum):
    """
    Free-space Green's functions supported by the workbench.
    """

    LAPLACE_2D = 'LAPLACE_2D'
    """
    -(1/2π) ln r.
    """

    HELMHOLTZ_2D = 'HELMHOLTZ_2D'
    """
    (i/4) H^1_0(κr).
    """

    LAPLACE_3D = 'LAPLACE_3D'
    """
    1/(4πr); direct summation only.
    """

    HELMHOLTZ_3D = 'HELMHOLTZ_3D'
    """
    e^{iκr}/(4πr); direct summation only.
    """


class Kernel(CamelModel):
    """
    A kernel family together with its wavenumber. Helmholtz kernels need κ > 0; Laplace
    kernels always carry κ = 0.
    """

    kernel_type: KernelType
    """
    Which Green's function to evaluate.
    """

    kappa: float = 0.0
    """
    Wavenumber κ in inverse length units.
    """

    @root_validator(skip_on_failure=True)
    def _check_kappa(cls, values):
        kernel_type, kappa = values.get('kernel_type'), values.get('kappa')
        if not math.isfinite(kappa):
            raise ValueError('kappa must be finite')
        if kernel_type in (KernelType.HELMHOLTZ_2D, KernelType.HELMHOLTZ_3D):
            if kappa <= 0:
                raise ValueError('Helmholtz kernels require kappa > 0; use a Laplace kernel for kappa = 0')
        else:
            values['kappa'] = 0.0
        return values

    @classmethod
    def for_wavenumber(cls, kappa: float, dimension: int = 2) -> 'Kernel':
        """
        Helmholtz kernel for κ > 0, or the matching Laplace kernel when κ = 0.
        """
        if dimension == 2:
            kernel_type = KernelType.HELMHOLTZ_2D if kappa > 0 else KernelType.LAPLACE_2D
        else:
            kernel_type = KernelType.HELMHOLTZ_3D if kappa > 0 else KernelType.LAPLACE_3D
        return cls(kernel_type=kernel_type, kappa=kappa)

    @property
    def dimension(self) -> int:
        return 2 if self.kernel_type in (KernelType.LAPLACE_2D, KernelType.HELMHOLTZ_2D) else 3

    @property
    def is_helmholtz(self) -> bool:
        return self.kernel_type in (KernelType.HELMHOLTZ_2D, KernelType.HELMHOLTZ_3D)


def kernel_of_distance(kernel: Kernel, r: np.ndarray) -> np.ndarray:
    """
    G as a function of distance, r > 0 assumed (callers mask coincident pairs).
    """
    r = np.asarray(r, dtype=float)
    kt = kernel.kernel_type
    if kt is KernelType.HELMHOLTZ_2D:
        return 0.25j * hankel1(0, kernel.kappa * r)
    if kt is KernelType.LAPLACE_2D:
        return (-np.log(r) / (2.0 * np.pi)).astype(complex)
    if kt is KernelType.HELMHOLTZ_3D:
        return np.exp(1j * kernel.kappa * r) / (4.0 * np.pi * r)
    return (1.0 / (4.0 * np.pi * r)).astype(complex)


def kernel_radial_derivative(kernel: Kernel, r: np.ndarray) -> np.ndarray:
    """
    dG/dr, r > 0 assumed. The normal derivative is this times r_n = (r⃗·n̂)/r.
    """
    r = np.asarray(r, dtype=float)
    kt = kernel.kernel_type
    kappa = kernel.kappa
    if kt is KernelType.HELMHOLTZ_2D:
        return -0.25j * kappa * hankel1(1, kappa * r)
    if kt is KernelType.LAPLACE_2D:
        return (-1.0 / (2.0 * np.pi * r)).astype(complex)
    if kt is KernelType.HELMHOLTZ_3D:
        return (1j * kappa * r - 1.0) / (4.0 * np.pi * r ** 2) * np.exp(1j * kappa * r)
    return (-1.0 / (4.0 * np.pi * r ** 2)).astype(complex)


def _separation(kernel: Kernel, source, target):
    source = np.asarray(source, dtype=float)
    target = np.asarray(target, dtype=float)
    if source.shape[-1] != kernel.dimension or target.shape[-1] != kernel.dimension:
        raise DomainError(f'{kernel.kernel_type.name} expects {kernel.dimension}D points')
    d = source - target
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0.0):
        raise SingularError('Green\'s function is singular at r = 0')
    return d, r


def greens(kernel: Kernel, source, target):
    """
    G(source, target); broadcasts over leading dimensions of the point arrays.
    Symmetric in its two point arguments.
    """
    _, r = _separation(kernel, source, target)
    value = kernel_of_distance(kernel, r)
    return value if np.ndim(value) else complex(value)


def greens_normal_derivative(kernel: Kernel, source, target, normal):
    """
    ∂G/∂n at the source point: G'(r)·r_n with r_n = ((source - target)·n̂)/r.
    The 3D Helmholtz form keeps the directional factor r_n that the 2D form carries.
    """
    d, r = _separation(kernel, source, target)
    normal = np.asarray(normal, dtype=float)
    r_n = np.sum(d * normal, axis=-1) / r
    value = kernel_radial_derivative(kernel, r) * r_n
    return value if np.ndim(value) else complex(value)


def singular_diagonal_2d(kappa: float, width: float) -> complex:
    """
    ∫ H^1_0(κ r_m) dΓ over a flat element of the given width, measured from its own
    midpoint (small-argument form):
    ``w + i(2/π) w [ln(γκw/4) - 1]``. Multiply by i/4 for the single-layer diagonal.
    Accurate to about 1% for κw <= 0.5.
    """
    if not width > 0:
        raise DomainError('element width must be positive')
    if not kappa > 0:
        raise DomainError('kappa must be positive; use laplace_singular_diagonal_2d for kappa = 0')
    return complex(width, (2.0 / math.pi) * width * (math.log(EULER_GAMMA_EXP * kappa * width / 4.0) - 1.0))


def laplace_singular_diagonal_2d(width: float) -> float:
    """
    ∫ -(1/2π) ln|s| ds over [-w/2, w/2], the Laplace single-layer self-integral.
    """
    if not width > 0:
        raise DomainError('element width must be positive')
    return -(width / (2.0 * math.pi)) * (math.log(width / 2.0) - 1.0)


def single_layer_self_integral(kernel: Kernel, width: float) -> complex:
    """
    ∫ G dΓ over an element from its own midpoint, for either 2D kernel.
    """
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        return 0.25j * singular_diagonal_2d(kernel.kappa, width)
    if kernel.kernel_type is KernelType.LAPLACE_2D:
        return complex(laplace_singular_diagonal_2d(width))
    raise DomainError('element self-integrals are defined for 2D kernels only')


def cell_mean_kernel(kernel: Kernel, area) -> np.ndarray:
    """
    Mean of G over a square cell of the given area centred at the evaluation point,
    from the small-argument expansion of H^1_0 and the exact mean of ln r over a square.
    """
    side = np.sqrt(np.asarray(area, dtype=float))
    if np.any(side <= 0):
        raise DomainError('cell area must be positive')
    mean_log_r = np.log(side) - 0.5 * math.log(2.0) - 1.5 + math.pi / 4.0
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        log_term = math.log(EULER_GAMMA_EXP * kernel.kappa / 2.0) + mean_log_r
        return 0.25j * (1.0 + (2.0j / math.pi) * log_term)
    if kernel.kernel_type is KernelType.LAPLACE_2D:
        return (-mean_log_r / (2.0 * math.pi)).astype(complex)
    raise DomainError('cell averages are defined for 2D kernels only')
