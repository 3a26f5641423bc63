import numpy as np
import pytest

from fmm_precond.tree.quadtree import build_tree
from fmm_precond.tree.traversal import dual_traversal, is_well_separated
from fmm_precond.utils.errors import DomainError


def _coverage(source_tree, target_tree, lists):
    counts = np.zeros((target_tree.n_bodies, source_tree.n_bodies), dtype=int)
    for s, t in lists.far_pairs + lists.near_pairs:
        source, target = source_tree.cells[s], target_tree.cells[t]
        counts[target.body_begin:target.body_end, source.body_begin:source.body_end] += 1
    return counts


@pytest.mark.parametrize('theta', [0.3, 0.4, 0.7, 1.0])
def test_every_body_pair_covered_once(theta):
    rng = np.random.default_rng(3)
    tree = build_tree(rng.uniform(0.0, 1.0, size=(400, 2)), ncrit=8)
    lists = dual_traversal(tree, tree, theta)
    assert np.all(_coverage(tree, tree, lists) == 1)
    assert lists.far_pairs


def test_distinct_source_and_target_trees():
    rng = np.random.default_rng(4)
    sources = build_tree(rng.uniform(0.0, 1.0, size=(300, 2)), ncrit=10)
    targets = build_tree(rng.uniform(-0.5, 2.0, size=(200, 2)), ncrit=5)
    lists = dual_traversal(sources, targets, 0.5)
    assert np.all(_coverage(sources, targets, lists) == 1)


def test_far_pairs_pass_the_acceptance_criterion():
    tree = build_tree(np.random.default_rng(5).uniform(0.0, 1.0, size=(500, 2)), ncrit=8)
    lists = dual_traversal(tree, tree, 0.4)
    for s, t in lists.far_pairs:
        assert is_well_separated(tree.cells[s], tree.cells[t], 0.4)
    for s, t in lists.near_pairs:
        assert tree.cells[s].is_leaf and tree.cells[t].is_leaf


def test_max_radius_keeps_big_cells_near():
    tree = build_tree(np.random.default_rng(6).uniform(0.0, 1.0, size=(500, 2)), ncrit=8)
    lists = dual_traversal(tree, tree, 0.7, max_radius=0.1)
    for s, t in lists.far_pairs:
        assert max(tree.cells[s].radius, tree.cells[t].radius) <= 0.1
    assert np.all(_coverage(tree, tree, lists) == 1)


def test_near_and_far_lookups():
    tree = build_tree(np.random.default_rng(8).uniform(0.0, 1.0, size=(300, 2)), ncrit=8)
    lists = dual_traversal(tree, tree, 0.4)
    near = lists.near_sources_by_target()
    assert sum(len(v) for v in near.values()) == len(lists.near_pairs)
    assert sum(len(v) for v in lists.far_sources_by_target().values()) == len(lists.far_pairs)


def test_invalid_theta():
    tree = build_tree(np.random.default_rng(9).uniform(size=(20, 2)))
    with pytest.raises(DomainError):
        dual_traversal(tree, tree, 0.0)
    with pytest.raises(DomainError):
        dual_traversal(tree, tree, 1.5)
