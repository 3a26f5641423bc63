import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from fmm_precond.tree.quadtree import Cell, Tree
from fmm_precond.utils.errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_THETA = 0.4


@dataclass
class InteractionLists:
    """
    Result of a dual-tree traversal. Pairs are ``(source_cell_index, target_cell_index)``.
    Far pairs are handled through expansions, near pairs (leaf-leaf) by direct summation.
    """

    far_pairs: List[Tuple[int, int]] = field(default_factory=list)
    near_pairs: List[Tuple[int, int]] = field(default_factory=list)

    def near_sources_by_target(self) -> dict:
        out = {}
        for s, t in self.near_pairs:
            out.setdefault(t, []).append(s)
        return out

    def far_sources_by_target(self) -> dict:
        out = {}
        for s, t in self.far_pairs:
            out.setdefault(t, []).append(s)
        return out


def is_well_separated(source: Cell, target: Cell, theta: float) -> bool:
    """
    Multipole acceptance criterion: |c_S - c_T| > (R_S + R_T) / θ.
    """
    distance = float(np.hypot(*(source.center - target.center)))
    return distance > (source.radius + target.radius) / theta


def dual_traversal(source_tree: Tree, target_tree: Tree, theta: float = DEFAULT_THETA,
                   max_radius: Optional[float] = None) -> InteractionLists:
    """
    Simultaneous traversal of a source and a target tree. Pairs passing the MAC become far
    pairs; leaf-leaf pairs failing it become near pairs; otherwise the larger cell is split
    (the target on ties). Every (source body, target body) pair is covered exactly once.

    When ``max_radius`` is given, cells with a larger radius never form far pairs.
    """
    if not 0.0 < theta <= 1.0:
        raise DomainError('theta must lie in (0, 1]')
    lists = InteractionLists()
    stack = [(0, 0)]
    while stack:
        s_idx, t_idx = stack.pop()
        source = source_tree.cells[s_idx]
        target = target_tree.cells[t_idx]
        too_big = max_radius is not None and max(source.radius, target.radius) > max_radius
        if not too_big and is_well_separated(source, target, theta):
            lists.far_pairs.append((s_idx, t_idx))
        elif source.is_leaf and target.is_leaf:
            lists.near_pairs.append((s_idx, t_idx))
        elif source.is_leaf or (not target.is_leaf and target.half_width >= source.half_width):
            # reversed so that children pop in SW..NE order
            for child in reversed(target.children):
                stack.append((s_idx, child))
        else:
            for child in reversed(source.children):
                stack.append((child, t_idx))
    logger.debug('dual traversal: %d far pairs, %d near pairs (theta=%.3g)',
                 len(lists.far_pairs), len(lists.near_pairs), theta)
    return lists
