import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from fmm_precond.utils.errors import DegenerateError, DomainError

logger = logging.getLogger(__name__)

DEFAULT_NCRIT = 64
DEFAULT_MAX_LEVEL = 24
ROOT_MARGIN = 1e-6


@dataclass
class Cell:
    """
    One square of the quadtree. Bodies of the cell occupy the contiguous range
    ``[body_begin, body_end)`` of the tree's permuted body arrays.
    """

    index: int
    center: np.ndarray
    half_width: float
    level: int
    body_begin: int
    body_end: int
    parent: int = -1
    children: List[int] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def n_bodies(self) -> int:
        return self.body_end - self.body_begin

    @property
    def radius(self) -> float:
        """
        Radius of the circle circumscribing the square.
        """
        return self.half_width * math.sqrt(2.0)


@dataclass
class Tree:
    """
    Quadtree over a 2D point set. ``cells`` are stored in level order (root first) and
    ``positions``/``charges`` hold the bodies permuted into cell order;
    ``permutation[k]`` is the original index of the body stored at position ``k``.
    """

    cells: List[Cell]
    positions: np.ndarray
    charges: Optional[np.ndarray]
    permutation: np.ndarray
    ncrit: int
    max_level: int
    extra: dict = field(default_factory=dict)

    @property
    def root(self) -> Cell:
        return self.cells[0]

    @property
    def n_bodies(self) -> int:
        return len(self.permutation)

    @property
    def depth(self) -> int:
        return max(c.level for c in self.cells)

    def leaves(self) -> List[Cell]:
        return [c for c in self.cells if c.is_leaf]

    def to_tree_order(self, values: np.ndarray) -> np.ndarray:
        """
        Reorder per-body values from the caller's ordering into tree ordering.
        """
        return np.asarray(values)[self.permutation]

    def to_original_order(self, values: np.ndarray) -> np.ndarray:
        """
        Inverse of :meth:`to_tree_order`.
        """
        values = np.asarray(values)
        out = np.empty_like(values)
        out[self.permutation] = values
        return out

    def with_charges(self, charges: np.ndarray) -> 'Tree':
        """
        Same geometry carrying a new charge vector (given in original order).
        """
        return Tree(cells=self.cells, positions=self.positions, charges=self.to_tree_order(charges),
                    permutation=self.permutation, ncrit=self.ncrit, max_level=self.max_level, extra=self.extra)


def _root_box(points: np.ndarray):
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    center = 0.5 * (lo + hi)
    extent = float(np.max(hi - lo))
    if extent == 0.0:
        extent = max(1.0, float(np.max(np.abs(center))))
    return center, 0.5 * extent * (1.0 + ROOT_MARGIN)


def build_tree(points, charges=None, ncrit: int = DEFAULT_NCRIT, max_level: int = DEFAULT_MAX_LEVEL) -> Tree:
    """
    Build a quadtree by recursive subdivision of the smallest enclosing square (expanded by a
    small relative margin). A cell becomes a leaf once it holds at most ``ncrit`` bodies or sits at
    ``max_level``.
    Points on a split line go to the child with the larger coordinate; children are ordered
    SW, SE, NW, NE. Construction runs breadth-first so that cells come out in level order.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 1:
        raise DomainError('build_tree expects an (N, 2) array with N >= 1')
    if not np.all(np.isfinite(points)):
        raise DomainError('point coordinates must be finite')
    if ncrit < 1:
        raise DomainError('ncrit must be >= 1')

    n = points.shape[0]
    order = np.arange(n)
    center, half_width = _root_box(points)
    cells = [Cell(index=0, center=center, half_width=half_width, level=0, body_begin=0, body_end=n)]
    queue = deque([0])
    while queue:
        cell = cells[queue.popleft()]
        if cell.n_bodies <= ncrit:
            continue
        ids = order[cell.body_begin:cell.body_end]
        local = points[ids]
        if cell.level >= max_level:
            coincident = int(np.unique(local, axis=0, return_counts=True)[1].max())
            if coincident > ncrit:
                raise DegenerateError(f'{coincident} coincident points exceed ncrit={ncrit} and cannot be separated')
            continue
        quadrant = (local[:, 0] >= cell.center[0]).astype(int) + 2 * (local[:, 1] >= cell.center[1]).astype(int)
        sort = np.argsort(quadrant, kind='stable')
        order[cell.body_begin:cell.body_end] = ids[sort]
        counts = np.bincount(quadrant, minlength=4)

        child_half = 0.5 * cell.half_width
        begin = cell.body_begin
        for q in range(4):
            if counts[q] == 0:
                continue
            offset = np.array([(1 if q & 1 else -1) * child_half, (1 if q & 2 else -1) * child_half])
            child = Cell(index=len(cells), center=cell.center + offset, half_width=child_half,
                         level=cell.level + 1, body_begin=begin, body_end=begin + int(counts[q]),
                         parent=cell.index)
            begin += int(counts[q])
            cell.children.append(child.index)
            cells.append(child)
            queue.append(child.index)

    tree_charges = None
    if charges is not None:
        charges = np.asarray(charges)
        if charges.shape[0] != n:
            raise DomainError('charges must match the number of points')
        tree_charges = charges[order]
    tree = Tree(cells=cells, positions=points[order], charges=tree_charges, permutation=order,
                ncrit=ncrit, max_level=max_level)
    logger.debug('built quadtree: %d bodies, %d cells, %d leaves, depth %d',
                 n, len(cells), len(tree.leaves()), tree.depth)
    return tree
