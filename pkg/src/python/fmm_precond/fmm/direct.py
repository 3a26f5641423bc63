"""
Direct summation: dense kernel blocks, the near-field P2P kernel and the O(N²) oracle.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from fmm_precond.special.kernels import Kernel, kernel_of_distance, kernel_radial_derivative
from fmm_precond.utils.errors import DomainError

logger = logging.getLogger(__name__)

CHUNK_ENTRIES = 1 << 21


def kernel_block(kernel: Kernel, sources: np.ndarray, targets: np.ndarray,
                 normals: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Dense (targets × sources) matrix of K(y_j, x_i), or of ∂K/∂n at the source when ``normals``
    are given. Entries with coincident source and target are zero.
    """
    sources = np.asarray(sources, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if sources.shape[-1] != kernel.dimension or targets.shape[-1] != kernel.dimension:
        raise DomainError(f'{kernel.kernel_type.name} expects {kernel.dimension}D points')
    d = sources[None, :, :] - targets[:, None, :]
    r = np.sqrt(np.sum(d * d, axis=-1))
    coincident = r == 0.0
    safe_r = np.where(coincident, 1.0, r)
    if normals is None:
        block = kernel_of_distance(kernel, safe_r)
    else:
        r_n = np.sum(d * np.asarray(normals, dtype=float)[None, :, :], axis=-1) / safe_r
        block = kernel_radial_derivative(kernel, safe_r) * r_n
    block[coincident] = 0.0
    return block


def p2p(kernel: Kernel, sources, charges, targets, normals=None) -> np.ndarray:
    """
    Near-field contribution Σ_i w_i K(y_j, x_i) of one source set to one target set, summed in
    source index order and skipping coincident pairs.
    """
    return kernel_block(kernel, sources, targets, normals) @ np.asarray(charges, dtype=complex)


def _chunks(n_targets: int, n_sources: int) -> List[slice]:
    rows = max(1, CHUNK_ENTRIES // max(1, n_sources))
    return [slice(i, min(i + rows, n_targets)) for i in range(0, n_targets, rows)]


class DirectSum:
    """
    Exact summation over fixed geometry, reusable for many charge vectors. Kernel blocks are
    cached per target chunk when ``cache`` is set. With ``degradation`` every entry is scaled by
    ``1 + degradation·η``, η uniform in [-1, 1] and seeded by ``seed`` and the chunk index.
    """

    def __init__(self, kernel: Kernel, sources, targets, normals=None, degradation: Optional[float] = None,
                 seed: int = 0, workers: int = 1, cache: bool = True):
        self.kernel = kernel
        self.sources = np.asarray(sources, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        self.normals = None if normals is None else np.asarray(normals, dtype=float)
        self.degradation = degradation
        self.seed = seed
        self.workers = workers
        self.chunks = _chunks(len(self.targets), len(self.sources))
        self._blocks = [None] * len(self.chunks) if cache else None

    def _block(self, index: int) -> np.ndarray:
        if self._blocks is not None and self._blocks[index] is not None:
            return self._blocks[index]
        rows = self.chunks[index]
        block = kernel_block(self.kernel, self.sources, self.targets[rows], self.normals)
        if self.degradation:
            rng = np.random.default_rng([self.seed, index])
            block = block * (1.0 + self.degradation * rng.uniform(-1.0, 1.0, size=block.shape))
        if self._blocks is not None:
            self._blocks[index] = block
        return block

    def apply(self, charges) -> np.ndarray:
        charges = np.asarray(charges, dtype=complex)
        if charges.shape != (len(self.sources),):
            raise DomainError('charges must have one entry per source')
        out = np.zeros(len(self.targets), dtype=complex)

        def run(index):
            return self._block(index) @ charges

        if self.workers > 1 and len(self.chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                parts = list(pool.map(run, range(len(self.chunks))))
        else:
            parts = [run(i) for i in range(len(self.chunks))]
        for rows, part in zip(self.chunks, parts):
            out[rows] = part
        return out


def direct_sum(kernel: Kernel, sources, charges, targets, normals=None) -> np.ndarray:
    """
    Exact O(N²) summation; the oracle for the FMM backend.
    """
    return DirectSum(kernel, sources, targets, normals=normals, cache=False).apply(charges)
