from dataclasses import dataclass
from typing import Tuple

import numpy as np

from fmm_precond.utils.errors import DomainError


@dataclass(frozen=True)
class Grid:
    """
    Uniform grid of n × n square cells on [lower, upper]².
    """

    lower: float
    upper: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError('a grid needs at least 2 cells per side')
        if not self.upper > self.lower:
            raise DomainError('grid bounds must satisfy lower < upper')

    @classmethod
    def for_mesh_level(cls, bounds: Tuple[float, float], h: float) -> 'Grid':
        """
        Grid with n = round(1/h) cells per side, whatever the domain size; ``h`` names a mesh
        level rather than a spacing.
        """
        return cls(bounds[0], bounds[1], int(round(1.0 / h)))

    @property
    def bounds(self) -> Tuple[float, float]:
        return self.lower, self.upper

    @property
    def h(self) -> float:
        return (self.upper - self.lower) / self.n

    def nodes_per_side(self, order: int = 1) -> int:
        return order * self.n + 1

    def node_coordinates(self, order: int = 1) -> np.ndarray:
        """
        Lattice nodes of a degree-``order`` element mesh, x fastest.
        """
        t = np.linspace(self.lower, self.upper, self.nodes_per_side(order))
        xx, yy = np.meshgrid(t, t)
        return np.column_stack([xx.ravel(), yy.ravel()])

    def boundary_mask(self, order: int = 1) -> np.ndarray:
        m = self.nodes_per_side(order)
        ix, iy = np.meshgrid(np.arange(m), np.arange(m))
        return ((ix == 0) | (iy == 0) | (ix == m - 1) | (iy == m - 1)).ravel()

    def coarsened(self) -> 'Grid':
        if self.n % 2:
            raise DomainError('only grids with an even number of cells can be coarsened')
        return Grid(self.lower, self.upper, self.n // 2)
