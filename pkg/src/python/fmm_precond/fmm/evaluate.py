"""
The FMM evaluation pipeline: upward pass (P2M, M2M), interaction (M2L), downward pass
(L2L, L2P) and near field (P2P), over a source and a target quadtree.

A plan holds everything that depends on geometry only (trees, interaction lists, body terms and
translation matrices), so one plan serves any number of charge vectors; this is how the
boundary-element preconditioner reuses its operators across Krylov iterations.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional

import numpy as np

from fmm_precond.fmm.config import Backend, FmmConfig
from fmm_precond.fmm.direct import DirectSum, kernel_block
from fmm_precond.fmm.expansions import (finalize, l2l_matrices, l2p_terms, m2l_matrices, m2m_matrices,
                                        n_coefficients, p2m_terms)
from fmm_precond.special.kernels import KernelType
from fmm_precond.tree.quadtree import Cell, Tree, build_tree
from fmm_precond.tree.traversal import dual_traversal
from fmm_precond.utils.errors import DomainError, KernelNotSupportedError

logger = logging.getLogger(__name__)

M2L_CHUNK = 2048
CACHE_ENTRIES = 1 << 23


def _run_ordered(fn: Callable, items: list, workers: int) -> list:
    """
    Map over items, in parallel when asked; results always come back in item order.
    """
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _levels(tree: Tree) -> List[np.ndarray]:
    depth = tree.depth
    by_level = [[] for _ in range(depth + 1)]
    for cell in tree.cells:
        by_level[cell.level].append(cell.index)
    return [np.asarray(ids, dtype=int) for ids in by_level]


def _leaf_of_body(tree: Tree) -> np.ndarray:
    out = np.empty(tree.n_bodies, dtype=int)
    for cell in tree.leaves():
        out[cell.body_begin:cell.body_end] = cell.index
    return out


def _centers(tree: Tree, ids) -> np.ndarray:
    return np.array([tree.cells[i].center for i in ids]).reshape(-1, 2)


def _level_orders(config: FmmConfig, tree: Tree) -> List[Optional[int]]:
    root = tree.root.radius
    return [config.order_for_radius(root / 2 ** level) for level in range(tree.depth + 1)]


def _leaves_by_level(tree: Tree) -> Dict[int, List[Cell]]:
    out = {}
    for cell in sorted(tree.leaves(), key=lambda c: c.body_begin):
        out.setdefault(cell.level, []).append(cell)
    return out


def _leaf_bodies(leaves: List[Cell]):
    """
    Concatenated body indices of the given leaves and the offset of each leaf within them.
    """
    bodies = np.concatenate([np.arange(c.body_begin, c.body_end) for c in leaves])
    starts = np.cumsum([0] + [c.n_bodies for c in leaves[:-1]])
    return bodies, starts


class _FmmPipeline:
    """
    Geometry-dependent state of one FMM evaluation. Charges given to :meth:`apply` are in the
    caller's source order, results come back in the caller's target order.

    Every level of a tree has one expansion order (see :meth:`FmmConfig.order_for_radius`).
    Coefficients of all cells share one array, wide enough for the largest order, and a cell
    of order q only uses the band of orders -q..q (Laplace: 0..q) in it.
    """

    def __init__(self, config: FmmConfig, sources: np.ndarray, targets: np.ndarray,
                 normals: Optional[np.ndarray]):
        self.config = config
        kernel = config.kernel
        self.kernel = kernel
        self.source_tree = build_tree(sources, ncrit=config.ncrit)
        self.target_tree = build_tree(targets, ncrit=config.ncrit)
        self.lists = dual_traversal(self.source_tree, self.target_tree, config.theta,
                                    max_radius=config.max_far_radius)
        st, tt = self.source_tree, self.target_tree
        self.normals = None if normals is None else np.asarray(normals, dtype=float)[st.permutation]
        self.src_orders = _level_orders(config, st)
        self.tgt_orders = _level_orders(config, tt)
        self.p = max([q for q in self.src_orders + self.tgt_orders if q is not None], default=config.p)
        self.ncoef = n_coefficients(kernel, self.p)

        # upward pass: per leaf level, leaves ordered by body range so that reduceat sums each leaf's bodies
        self.p2m = []
        source_leaf = _leaf_of_body(st)
        for level, leaves in _leaves_by_level(st).items():
            q = self.src_orders[level]
            if q is None:
                continue
            bodies, starts = _leaf_bodies(leaves)
            ids = np.array([c.index for c in leaves], dtype=int)
            offsets = st.positions[bodies] - _centers(st, source_leaf[bodies])
            normals_ = None if self.normals is None else self.normals[bodies]
            self.p2m.append((ids, bodies, starts, self._band(q), p2m_terms(kernel, q, offsets, normals_)))

        self.src_levels = []
        for level, ids in enumerate(_levels(st)[1:], start=1):
            q_child, q_parent = self.src_orders[level], self.src_orders[level - 1]
            if q_parent is None or len(ids) == 0:
                continue
            parents = np.array([st.cells[i].parent for i in ids], dtype=int)
            shifts = _centers(st, ids) - _centers(st, parents)
            self.src_levels.append((ids, parents, self._band(q_child), self._band(q_parent),
                                    m2m_matrices(kernel, q_parent, shifts, p_in=q_child)))

        far = np.asarray(self.lists.far_pairs, dtype=int).reshape(-1, 2)
        src_level = np.array([st.cells[s].level for s in far[:, 0]], dtype=int)
        tgt_level = np.array([tt.cells[t].level for t in far[:, 1]], dtype=int)
        self.m2l_chunks = []
        for ls, lt in sorted(set(zip(src_level.tolist(), tgt_level.tolist()))):
            group = far[(src_level == ls) & (tgt_level == lt)]
            q_src, q_tgt = self.src_orders[ls], self.tgt_orders[lt]
            for i in range(0, len(group), M2L_CHUNK):
                part = group[i:i + M2L_CHUNK]
                self.m2l_chunks.append((part[:, 0], part[:, 1], q_src, q_tgt))
        self._m2l_cache = None
        if len(far) * self.ncoef ** 2 <= CACHE_ENTRIES:
            self._m2l_cache = [self._m2l_matrices(i) for i in range(len(self.m2l_chunks))]

        self.tgt_levels = []
        for level, ids in enumerate(_levels(tt)[1:], start=1):
            q_child, q_parent = self.tgt_orders[level], self.tgt_orders[level - 1]
            if q_parent is None or len(ids) == 0:
                continue
            parents = np.array([tt.cells[i].parent for i in ids], dtype=int)
            shifts = _centers(tt, ids) - _centers(tt, parents)
            self.tgt_levels.append((ids, parents, self._band(q_child), self._band(q_parent),
                                    l2l_matrices(kernel, q_child, shifts, p_in=q_parent)))

        self.l2p = []
        target_leaf = _leaf_of_body(tt)
        for level, leaves in _leaves_by_level(tt).items():
            q = self.tgt_orders[level]
            if q is None:
                continue
            bodies, _ = _leaf_bodies(leaves)
            leaf = target_leaf[bodies]
            terms = l2p_terms(kernel, q, tt.positions[bodies] - _centers(tt, leaf))
            self.l2p.append((bodies, leaf, self._band(q), terms))

        # near field: per target leaf, the concatenated source bodies of its near leaves
        self.near = []
        total = 0
        for t_idx, s_list in sorted(self.lists.near_sources_by_target().items()):
            target = tt.cells[t_idx]
            body_ids = np.concatenate([np.arange(st.cells[s].body_begin, st.cells[s].body_end)
                                       for s in sorted(s_list, key=lambda s: st.cells[s].body_begin)])
            self.near.append((slice(target.body_begin, target.body_end), body_ids))
            total += target.n_bodies * len(body_ids)
        self._near_cache = None
        if total <= CACHE_ENTRIES:
            self._near_cache = [self._near_block(i) for i in range(len(self.near))]
        logger.debug('fmm plan: %d sources, %d targets, orders %s/%s, %d far pairs, %d near pairs, near cache %s',
                     st.n_bodies, tt.n_bodies, self.src_orders, self.tgt_orders, len(far),
                     len(self.lists.near_pairs), self._near_cache is not None)

    def _band(self, q: Optional[int]) -> np.ndarray:
        """
        Columns of the shared coefficient array used by a cell of order ``q``.
        """
        if q is None:
            return np.zeros(0, dtype=int)
        if self.kernel.kernel_type is KernelType.HELMHOLTZ_2D:
            return np.arange(self.p - q, self.p + q + 1)
        return np.arange(q + 1)

    def _m2l_matrices(self, index: int) -> np.ndarray:
        src, tgt, q_src, q_tgt = self.m2l_chunks[index]
        shifts = _centers(self.source_tree, src) - _centers(self.target_tree, tgt)
        return m2l_matrices(self.kernel, q_tgt, shifts, p_in=q_src)

    def _near_block(self, index: int) -> np.ndarray:
        rows, body_ids = self.near[index]
        normals = None if self.normals is None else self.normals[body_ids]
        return kernel_block(self.kernel, self.source_tree.positions[body_ids],
                            self.target_tree.positions[rows], normals)

    def _apply_tree_order(self, q: np.ndarray) -> np.ndarray:
        workers = self.config.workers
        st, tt = self.source_tree, self.target_tree

        multipoles = np.zeros((len(st.cells), self.ncoef), dtype=complex)
        for ids, bodies, starts, band, terms in self.p2m:
            multipoles[ids[:, None], band[None, :]] = np.add.reduceat(terms * q[bodies, None], starts, axis=0)
        for ids, parents, child_band, parent_band, matrices in reversed(self.src_levels):
            np.add.at(multipoles, (parents[:, None], parent_band[None, :]),
                      np.einsum('ckm,cm->ck', matrices, multipoles[ids[:, None], child_band[None, :]]))

        def m2l_chunk(i):
            src, _, q_src, _ = self.m2l_chunks[i]
            matrices = self._m2l_cache[i] if self._m2l_cache is not None else self._m2l_matrices(i)
            band = self._band(q_src)
            return np.einsum('pnm,pm->pn', matrices, multipoles[src[:, None], band[None, :]])

        locals_ = np.zeros((len(tt.cells), self.ncoef), dtype=complex)
        for i, part in enumerate(_run_ordered(m2l_chunk, list(range(len(self.m2l_chunks))), workers)):
            _, tgt, _, q_tgt = self.m2l_chunks[i]
            np.add.at(locals_, (tgt[:, None], self._band(q_tgt)[None, :]), part)
        for ids, parents, child_band, parent_band, matrices in self.tgt_levels:
            locals_[ids[:, None], child_band[None, :]] += np.einsum(
                'ckn,cn->ck', matrices, locals_[parents[:, None], parent_band[None, :]])

        summed = np.zeros(tt.n_bodies, dtype=complex)
        for bodies, leaf, band, terms in self.l2p:
            summed[bodies] = np.sum(terms * locals_[leaf[:, None], band[None, :]], axis=1)
        out = finalize(self.kernel, summed)

        def near_chunk(i):
            block = self._near_cache[i] if self._near_cache is not None else self._near_block(i)
            return block @ q[self.near[i][1]]

        for i, part in enumerate(_run_ordered(near_chunk, list(range(len(self.near))), workers)):
            out[self.near[i][0]] += part
        return out

    def apply(self, charges: np.ndarray) -> np.ndarray:
        q = self.source_tree.to_tree_order(charges)
        if self.kernel.kernel_type is KernelType.LAPLACE_2D and np.any(q.imag != 0):
            # Laplace expansions need real weights: real and imaginary channels separately
            out = self._apply_tree_order(q.real.astype(complex)) + 1j * self._apply_tree_order(
                q.imag.astype(complex))
        else:
            out = self._apply_tree_order(q)
        return self.target_tree.to_original_order(out)


class FmmPlan:
    """
    Evaluator of f(y_j) = Σ_i w_i K(y_j, x_i) (or the dipole sum with ∂K/∂n at the source when
    ``normals`` are given) over fixed sources and targets, for the backend named in ``config``.
    """

    def __init__(self, sources, targets, config: FmmConfig, normals=None):
        self.config = config
        self.sources = np.asarray(sources, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        if self.sources.ndim != 2 or self.targets.ndim != 2 or len(self.sources) == 0:
            raise DomainError('sources and targets must be non-empty (N, d) arrays')
        if normals is not None and np.shape(normals) != self.sources.shape:
            raise DomainError('normals must have one entry per source')
        self.n_sources, self.n_targets = len(self.sources), len(self.targets)

        backend = config.backend
        if backend is Backend.FMM and config.kernel.dimension != 2:
            raise KernelNotSupportedError(
                f'{config.kernel.kernel_type.name} has no multipole expansions; use the DIRECT backend')
        if backend is Backend.FMM and len(self.targets) > 0:
            self._impl = _FmmPipeline(config, self.sources, self.targets, normals)
        else:
            degradation = config.effective_epsilon if backend is Backend.DEGRADED_DIRECT else None
            cache = len(self.sources) * len(self.targets) <= CACHE_ENTRIES
            self._impl = DirectSum(config.kernel, self.sources, self.targets, normals=normals,
                                   degradation=degradation, seed=config.seed, workers=config.workers, cache=cache)

    def apply(self, charges) -> np.ndarray:
        charges = np.asarray(charges, dtype=complex)
        if charges.shape != (self.n_sources,):
            raise DomainError(f'expected {self.n_sources} charges, got shape {charges.shape}')
        if self.n_targets == 0:
            return np.zeros(0, dtype=complex)
        return self._impl.apply(charges)

    __call__ = apply


def evaluate(sources, charges, targets, config: FmmConfig, normals=None) -> np.ndarray:
    """
    One-shot evaluation of the kernel sum at ``targets``; see :class:`FmmPlan`.
    """
    return FmmPlan(sources, targets, config, normals=normals).apply(charges)
