from fmm_precond.tree.quadtree import Cell, Tree, build_tree
from fmm_precond.tree.traversal import InteractionLists, dual_traversal

__all__ = ['Cell', 'Tree', 'build_tree', 'InteractionLists', 'dual_traversal']
