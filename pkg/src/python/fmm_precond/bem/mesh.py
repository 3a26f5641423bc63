from dataclasses import dataclass
from typing import Tuple

import numpy as np

from fmm_precond.utils.errors import DomainError


@dataclass(frozen=True)
class BoundaryMesh:
    """
    Straight constant elements tiling the boundary of a square counterclockwise, starting at
    the lower-left corner. Element k runs from ``start[k]`` to ``end[k]``; its unknown is
    collocated at ``midpoints[k]``.
    """

    start: np.ndarray
    end: np.ndarray
    midpoints: np.ndarray
    widths: np.ndarray
    normals: np.ndarray
    """
    Outward unit normals.
    """

    def __len__(self) -> int:
        return len(self.widths)

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.widths))

    @property
    def tangents(self) -> np.ndarray:
        return (self.end - self.start) / self.widths[:, None]


def discretize_boundary(bounds: Tuple[float, float], n_per_side: int) -> BoundaryMesh:
    """
    Split each side of the square [lower, upper]² into ``n_per_side`` equal elements.
    """
    if n_per_side < 2:
        raise DomainError('n_per_side must be >= 2')
    lower, upper = bounds
    if not upper > lower:
        raise DomainError('bounds must satisfy lower < upper')
    corners = np.array([[lower, lower], [upper, lower], [upper, upper], [lower, upper], [lower, lower]])
    t = np.arange(n_per_side + 1) / n_per_side
    points = []
    for side in range(4):
        a, b = corners[side], corners[side + 1]
        points.append(a[None, :] + t[:-1, None] * (b - a)[None, :])
    points.append(corners[:1])
    points = np.vstack(points)
    start, end = points[:-1], points[1:]
    d = end - start
    widths = np.hypot(d[:, 0], d[:, 1])
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / widths[:, None]
    return BoundaryMesh(start=start, end=end, midpoints=0.5 * (start + end), widths=widths, normals=normals)
