from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from fmm_precond.bem.mesh import BoundaryMesh
from fmm_precond.utils.errors import DomainError

DEFAULT_POINTS = 4


class Layer(Enum):
    """
    Boundary integral operators of constant-element collocation.
    """

    SINGLE = 'SINGLE'
    """
    ∫ G q dΓ.
    """

    DOUBLE = 'DOUBLE'
    """
    ∫ ∂G/∂n u dΓ, normal derivative at the integration point.
    """


@dataclass(frozen=True)
class QuadratureRule:
    """
    Gauss-Legendre nodes and weights on (-1, 1).
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)


def gauss_legendre(n: int = DEFAULT_POINTS) -> QuadratureRule:
    if n < 1:
        raise DomainError('a quadrature rule needs at least one point')
    nodes, weights = leggauss(n)
    return QuadratureRule(nodes, weights)


def element_quadrature(mesh: BoundaryMesh, rule: QuadratureRule) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Quadrature points of every element (element-major), their weights including the Jacobian
    |J| = w/2, and the owning element of each point.
    """
    s = 0.5 * (rule.nodes + 1.0)
    points = mesh.start[:, None, :] + s[None, :, None] * (mesh.end - mesh.start)[:, None, :]
    weights = 0.5 * mesh.widths[:, None] * rule.weights[None, :]
    owner = np.repeat(np.arange(len(mesh)), len(rule))
    return points.reshape(-1, 2), weights.ravel(), owner
