"""
Element integrals of the single- and double-layer operators and their dense assembly, the
reference against which the FMM-accelerated boundary operators are checked.
"""

import numpy as np

from fmm_precond.bem.mesh import BoundaryMesh
from fmm_precond.bem.quadrature import Layer, QuadratureRule, element_quadrature, gauss_legendre
from fmm_precond.fmm.direct import kernel_block
from fmm_precond.special.kernels import (Kernel, greens, greens_normal_derivative,
                                         single_layer_self_integral)
from fmm_precond.utils.errors import SingularError

ON_ELEMENT = 1e-12


def diagonal_value(kernel: Kernel, layer: Layer, width: float) -> complex:
    """
    Integral over an element seen from its own midpoint: the analytic single-layer self term, and
    zero for the double layer since r⃗ ⊥ n̂ along a straight element.
    """
    if layer is Layer.DOUBLE:
        return 0j
    return single_layer_self_integral(kernel, width)


def element_integral(mesh: BoundaryMesh, index: int, point, layer: Layer, kernel: Kernel,
                     rule: QuadratureRule = None) -> complex:
    """
    ∫ K(point, x) dΓ_x over element ``index`` by Gauss quadrature, |J| = w/2; the singular
    diagonal when ``point`` is the element's own midpoint.
    """
    rule = rule or gauss_legendre()
    point = np.asarray(point, dtype=float)
    start, end = mesh.start[index], mesh.end[index]
    width = mesh.widths[index]
    tangent = (end - start) / width
    offset = point - start
    along = float(offset @ tangent)
    across = abs(float(offset[0] * tangent[1] - offset[1] * tangent[0]))
    if across <= ON_ELEMENT * width and 0.0 < along < width:
        if np.hypot(*(point - mesh.midpoints[index])) <= ON_ELEMENT * width:
            return diagonal_value(kernel, layer, width)
        raise SingularError(f'collocation point {point} lies inside element {index}')

    s = 0.5 * (rule.nodes + 1.0)
    sources = start[None, :] + s[:, None] * (end - start)[None, :]
    targets = np.broadcast_to(point, sources.shape)
    if layer is Layer.SINGLE:
        values = greens(kernel, sources, targets)
    else:
        values = greens_normal_derivative(kernel, sources, targets, np.broadcast_to(mesh.normals[index], sources.shape))
    return complex(0.5 * width * np.sum(rule.weights * values))


def assemble_dense(mesh: BoundaryMesh, kernel: Kernel, layer: Layer, rule: QuadratureRule = None,
                   targets=None) -> np.ndarray:
    """
    Dense matrix of element integrals: rows are targets (the collocation midpoints when
    ``targets`` is None, with analytic diagonals), columns are elements.
    """
    rule = rule or gauss_legendre()
    points, weights, owner = element_quadrature(mesh, rule)
    collocation = targets is None
    targets = mesh.midpoints if collocation else np.asarray(targets, dtype=float)
    normals = mesh.normals[owner] if layer is Layer.DOUBLE else None
    block = kernel_block(kernel, points, targets, normals) * weights[None, :]
    matrix = block.reshape(len(targets), len(mesh), len(rule)).sum(axis=2)
    if collocation:
        matrix[np.diag_indices(len(mesh))] = [diagonal_value(kernel, layer, w) for w in mesh.widths]
    return matrix


def own_element_quadrature(mesh: BoundaryMesh, kernel: Kernel, layer: Layer, rule: QuadratureRule) -> np.ndarray:
    """
    Per element, the plain quadrature sum of the element's own points seen from its midpoint; the
    part of a quadrature-point sum that the analytic diagonal replaces.
    """
    points, weights, owner = element_quadrature(mesh, rule)
    targets = mesh.midpoints[owner]
    if layer is Layer.SINGLE:
        values = greens(kernel, points, targets)
    else:
        values = greens_normal_derivative(kernel, points, targets, mesh.normals[owner])
    return np.bincount(owner, weights=(values * weights).real, minlength=len(mesh)) + 1j * np.bincount(
        owner, weights=(values * weights).imag, minlength=len(mesh))
