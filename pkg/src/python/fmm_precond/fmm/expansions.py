"""
Multipole and local expansions for the 2D Laplace and Helmholtz kernels.

Helmholtz expansions use Graf's addition theorem with the singular basis
``S_m(z) = H^1_m(κ|z|) e^{im arg z}`` (multipoles) and the regular basis
``R_m(z) = J_m(κ|z|) e^{im arg z}`` (locals), orders ``-p..p``. Laplace expansions are the
complex-logarithm power series of Greengard and Rokhlin: ``a_0 log(z - c) + Σ a_k (z - c)^{-k}``
for multipoles and ``Σ b_l (z - c)^l`` for locals, orders ``0..p``. Coefficients carry no
kernel prefactor; i/4 (Helmholtz) and -Re(·)/2π (Laplace) are applied on evaluation.

Every operator is linear in the charges, so the same building blocks serve both the
standalone operations below and the batched pipeline in :mod:`fmm_precond.fmm.evaluate`:
``*_terms`` map bodies to coefficient contributions and ``*_matrices`` return one
translation matrix per shift vector.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import comb

from fmm_precond.special.functions import bessel_j, hankel1
from fmm_precond.special.kernels import Kernel, KernelType
from fmm_precond.utils.errors import DomainError, KernelNotSupportedError


class ExpansionKind(Enum):
    """
    Which side of a well-separated pair an expansion represents.
    """

    MULTIPOLE = 'MULTIPOLE'
    """
    Field of sources inside the cell, valid outside it.
    """

    LOCAL = 'LOCAL'
    """
    Field of distant sources, valid inside the cell.
    """


def n_coefficients(kernel: Kernel, p: int) -> int:
    _check_kernel(kernel)
    return 2 * p + 1 if kernel.kernel_type is KernelType.HELMHOLTZ_2D else p + 1


@dataclass
class Expansion:
    kernel: Kernel
    order: int
    center: np.ndarray
    coefficients: np.ndarray
    kind: ExpansionKind

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.shape != (n_coefficients(self.kernel, self.order),):
            raise DomainError('coefficient vector length does not match kernel and order')
        if not np.all(np.isfinite(self.coefficients)):
            raise DomainError('expansion coefficients must be finite')

    @classmethod
    def zero(cls, kernel: Kernel, order: int, center, kind: ExpansionKind) -> 'Expansion':
        return cls(kernel, order, center, np.zeros(n_coefficients(kernel, order), dtype=complex), kind)


def _check_kernel(kernel: Kernel):
    if kernel.kernel_type not in (KernelType.HELMHOLTZ_2D, KernelType.LAPLACE_2D):
        raise KernelNotSupportedError(f'no expansions for {kernel.kernel_type.name}; use the DIRECT backend')


def _complex(points) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return points[:, 0] + 1j * points[:, 1]


def _regular(kappa: float, orders: np.ndarray, z: np.ndarray) -> np.ndarray:
    """
    R_m(z) for every z (rows) and order (columns).
    """
    return bessel_j(orders[None, :], kappa * np.abs(z)[:, None]) * np.exp(1j * orders[None, :] * np.angle(z)[:, None])


def _singular(kappa: float, orders: np.ndarray, z: np.ndarray) -> np.ndarray:
    return hankel1(orders[None, :], kappa * np.abs(z)[:, None]) * np.exp(1j * orders[None, :] * np.angle(z)[:, None])


def _shift_index(p: int, p_in: int) -> np.ndarray:
    """
    idx[k, m] = (m - k) + p + p_in for output orders k in -p..p and input orders m in -p_in..p_in,
    positions of order m - k in an array of orders -(p + p_in)..(p + p_in).
    """
    return np.arange(2 * p_in + 1)[None, :] - np.arange(2 * p + 1)[:, None] + 2 * p


def _input_order(kernel: Kernel, p: int, p_in: Optional[int]) -> int:
    if p_in is None:
        return p
    if kernel.kernel_type is KernelType.LAPLACE_2D and p_in != p:
        raise DomainError('Laplace translations keep the expansion order')
    return p_in


# --- body terms -------------------------------------------------------------------------------

def p2m_terms(kernel: Kernel, p: int, offsets: np.ndarray, normals: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Multipole contribution of a unit charge (or unit dipole along ``normals``) at each offset
    ``x_i - c``; one row per body.
    """
    _check_kernel(kernel)
    z = _complex(offsets)
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        kappa = kernel.kappa
        if normals is None:
            return np.conj(_regular(kappa, np.arange(-p, p + 1), z))
        nu = _complex(normals)[:, None]
        wide = np.conj(_regular(kappa, np.arange(-p - 1, p + 2), z))
        return 0.5 * kappa * (np.conj(nu) * wide[:, :-2] - nu * wide[:, 2:])

    k = np.arange(1, p + 1)
    terms = np.zeros((len(z), p + 1), dtype=complex)
    if normals is None:
        terms[:, 0] = 1.0
        terms[:, 1:] = -np.power(z[:, None], k[None, :]) / k[None, :]
    else:
        nu = _complex(normals)[:, None]
        terms[:, 1:] = -nu * np.power(z[:, None], k[None, :] - 1)
    return terms


def l2p_terms(kernel: Kernel, p: int, offsets: np.ndarray) -> np.ndarray:
    """
    Local basis evaluated at each target offset ``y_j - c``.
    """
    _check_kernel(kernel)
    z = _complex(offsets)
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        return _regular(kernel.kappa, np.arange(-p, p + 1), z)
    return np.power(z[:, None], np.arange(p + 1)[None, :])


def multipole_terms(kernel: Kernel, p: int, offsets: np.ndarray) -> np.ndarray:
    """
    Multipole basis evaluated at each target offset ``y_j - c`` (targets outside the cell).
    """
    _check_kernel(kernel)
    z = _complex(offsets)
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        return _singular(kernel.kappa, np.arange(-p, p + 1), z)
    terms = np.power(z[:, None], -np.arange(p + 1)[None, :].astype(float))
    terms[:, 0] = np.log(z)
    return terms


def finalize(kernel: Kernel, values: np.ndarray) -> np.ndarray:
    """
    Apply the kernel prefactor to a summed expansion.
    """
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        return 0.25j * values
    return (-values.real / (2.0 * np.pi)).astype(complex)


# --- translation matrices ---------------------------------------------------------------------

def m2m_matrices(kernel: Kernel, p: int, shifts: np.ndarray, p_in: Optional[int] = None) -> np.ndarray:
    """
    Matrices T with ``parent = T @ child`` for shifts ``child_center - parent_center``. The
    parent has order ``p``, the child order ``p_in`` (default ``p``).
    """
    _check_kernel(kernel)
    p_in = _input_order(kernel, p, p_in)
    z = _complex(shifts)
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        # M'_k = Σ_m M_m R_{m-k}(c_parent - c_child)
        orders = np.arange(-p - p_in, p + p_in + 1)
        return _regular(kernel.kappa, orders, -z)[:, _shift_index(p, p_in)]

    out = np.zeros((len(z), p + 1, p + 1), dtype=complex)
    out[:, 0, 0] = 1.0
    for l in range(1, p + 1):
        out[:, l, 0] = -np.power(z, l) / l
        for k in range(1, l + 1):
            out[:, l, k] = np.power(z, l - k) * comb(l - 1, k - 1, exact=True)
    return out


def m2l_matrices(kernel: Kernel, p: int, shifts: np.ndarray, p_in: Optional[int] = None) -> np.ndarray:
    """
    Matrices C with ``local = C @ multipole`` for shifts ``source_center - target_center``; the
    local expansion has order ``p``, the multipole order ``p_in`` (default ``p``).
    """
    _check_kernel(kernel)
    p_in = _input_order(kernel, p, p_in)
    z = _complex(shifts)
    if np.any(z == 0):
        raise DomainError('multipole-to-local shift must be nonzero')
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        # L_n = Σ_m M_m S_{m-n}(c_target - c_source)
        orders = np.arange(-p - p_in, p + p_in + 1)
        return _singular(kernel.kappa, orders, -z)[:, _shift_index(p, p_in)]

    out = np.zeros((len(z), p + 1, p + 1), dtype=complex)
    inv = 1.0 / z
    out[:, 0, 0] = np.log(-z)
    for k in range(1, p + 1):
        out[:, 0, k] = (-1) ** k * np.power(inv, k)
    for l in range(1, p + 1):
        out[:, l, 0] = -np.power(inv, l) / l
        for k in range(1, p + 1):
            out[:, l, k] = comb(l + k - 1, k - 1, exact=True) * (-1) ** k * np.power(inv, l + k)
    return out


def l2l_matrices(kernel: Kernel, p: int, shifts: np.ndarray, p_in: Optional[int] = None) -> np.ndarray:
    """
    Matrices D with ``child = D @ parent`` for shifts ``child_center - parent_center``; child
    order ``p``, parent order ``p_in`` (default ``p``).
    """
    _check_kernel(kernel)
    p_in = _input_order(kernel, p, p_in)
    z = _complex(shifts)
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        # L'_k = Σ_n L_n R_{n-k}(c_child - c_parent)
        orders = np.arange(-p - p_in, p + p_in + 1)
        return _regular(kernel.kappa, orders, z)[:, _shift_index(p, p_in)]

    out = np.zeros((len(z), p + 1, p + 1), dtype=complex)
    for k in range(p + 1):
        for l in range(k, p + 1):
            out[:, k, l] = comb(l, k, exact=True) * np.power(z, l - k)
    return out


# --- operations on single expansions ----------------------------------------------------------

def _real_charges(kernel: Kernel, charges: np.ndarray) -> np.ndarray:
    charges = np.asarray(charges)
    if kernel.kernel_type is KernelType.LAPLACE_2D and np.iscomplexobj(charges) and np.any(charges.imag != 0):
        raise DomainError('Laplace expansions take real charges; split complex charges into channels')
    return charges.real if kernel.kernel_type is KernelType.LAPLACE_2D else charges


def p2m(kernel: Kernel, p: int, positions, charges, center, normals=None) -> Expansion:
    """
    Multipole expansion of the given bodies about ``center``.
    """
    offsets = np.atleast_2d(np.asarray(positions, dtype=float)) - np.asarray(center, dtype=float)
    charges = _real_charges(kernel, charges)
    coefficients = np.asarray(charges) @ p2m_terms(kernel, p, offsets, normals)
    return Expansion(kernel, p, center, coefficients, ExpansionKind.MULTIPOLE)


def _translated(expansion: Expansion, matrix: np.ndarray, center, kind: ExpansionKind) -> Expansion:
    return Expansion(expansion.kernel, expansion.order, center, matrix @ expansion.coefficients, kind)


def m2m(child: Expansion, parent_center) -> Expansion:
    if child.kind is not ExpansionKind.MULTIPOLE:
        raise DomainError('m2m expects a multipole expansion')
    shift = child.center - np.asarray(parent_center, dtype=float)
    return _translated(child, m2m_matrices(child.kernel, child.order, shift)[0], parent_center,
                       ExpansionKind.MULTIPOLE)


def m2l(source: Expansion, target_center) -> Expansion:
    if source.kind is not ExpansionKind.MULTIPOLE:
        raise DomainError('m2l expects a multipole expansion')
    shift = source.center - np.asarray(target_center, dtype=float)
    return _translated(source, m2l_matrices(source.kernel, source.order, shift)[0], target_center,
                       ExpansionKind.LOCAL)


def l2l(parent: Expansion, child_center) -> Expansion:
    if parent.kind is not ExpansionKind.LOCAL:
        raise DomainError('l2l expects a local expansion')
    shift = np.asarray(child_center, dtype=float) - parent.center
    return _translated(parent, l2l_matrices(parent.kernel, parent.order, shift)[0], child_center,
                       ExpansionKind.LOCAL)


def l2p(local: Expansion, targets) -> np.ndarray:
    """
    Potentials represented by a local expansion at targets inside its cell.
    """
    if local.kind is not ExpansionKind.LOCAL:
        raise DomainError('l2p expects a local expansion')
    offsets = np.atleast_2d(np.asarray(targets, dtype=float)) - local.center
    return finalize(local.kernel, l2p_terms(local.kernel, local.order, offsets) @ local.coefficients)


def evaluate_multipole(multipole: Expansion, targets) -> np.ndarray:
    """
    Potentials represented by a multipole expansion at targets outside its cell.
    """
    if multipole.kind is not ExpansionKind.MULTIPOLE:
        raise DomainError('evaluate_multipole expects a multipole expansion')
    offsets = np.atleast_2d(np.asarray(targets, dtype=float)) - multipole.center
    return finalize(multipole.kernel, multipole_terms(multipole.kernel, multipole.order, offsets)
                    @ multipole.coefficients)
