import numpy as np
import pytest

from fmm_precond.tree.quadtree import build_tree
from fmm_precond.utils.errors import DegenerateError, DomainError


@pytest.fixture
def points():
    return np.random.default_rng(7).uniform(-1.0, 1.0, size=(1000, 2))


def test_leaves_respect_ncrit(points):
    tree = build_tree(points, ncrit=16)
    assert all(leaf.n_bodies <= 16 for leaf in tree.leaves())
    assert sum(leaf.n_bodies for leaf in tree.leaves()) == len(points)


def test_bodies_lie_in_their_cells(points):
    tree = build_tree(points, ncrit=16)
    for cell in tree.cells:
        inside = tree.positions[cell.body_begin:cell.body_end]
        assert np.all(np.abs(inside - cell.center) <= cell.half_width * (1 + 1e-12))


def test_children_partition_parent(points):
    tree = build_tree(points, ncrit=16)
    for cell in tree.cells:
        if cell.is_leaf:
            continue
        children = [tree.cells[c] for c in cell.children]
        assert children[0].body_begin == cell.body_begin
        assert children[-1].body_end == cell.body_end
        for a, b in zip(children, children[1:]):
            assert a.body_end == b.body_begin
        assert all(c.level == cell.level + 1 and c.parent == cell.index for c in children)


def test_cells_are_in_level_order(points):
    tree = build_tree(points, ncrit=16)
    levels = [cell.level for cell in tree.cells]
    assert levels == sorted(levels)
    assert tree.root.n_bodies == len(points)


def test_permutation_roundtrip(points):
    charges = np.arange(len(points), dtype=float)
    tree = build_tree(points, charges, ncrit=16)
    assert sorted(tree.permutation) == list(range(len(points)))
    assert np.array_equal(tree.positions, points[tree.permutation])
    assert np.array_equal(tree.to_original_order(tree.charges), charges)
    assert np.array_equal(tree.with_charges(2 * charges).charges, 2 * tree.charges)


def test_single_point_and_small_sets():
    tree = build_tree(np.array([[0.3, 0.4]]))
    assert len(tree.cells) == 1 and tree.root.is_leaf


def test_coincident_points_are_degenerate():
    points = np.vstack([np.zeros((10, 2)), [[1.0, 1.0]]])
    with pytest.raises(DegenerateError):
        build_tree(points, ncrit=4, max_level=6)


def test_max_level_cells_become_leaves():
    points = np.random.default_rng(8).uniform(size=(1000, 2))
    tree = build_tree(points, ncrit=32, max_level=2)
    assert tree.depth == 2
    assert all(c.is_leaf for c in tree.cells if c.level == 2)
    assert any(c.n_bodies > 32 for c in tree.leaves())
    assert sum(c.n_bodies for c in tree.leaves()) == 1000


def test_invalid_input():
    with pytest.raises(DomainError):
        build_tree(np.zeros((0, 2)))
    with pytest.raises(DomainError):
        build_tree(np.zeros((5, 3)))
    with pytest.raises(DomainError):
        build_tree(np.array([[0.0, np.nan]]))
    with pytest.raises(DomainError):
        build_tree(np.zeros((3, 2)), charges=np.zeros(2))
