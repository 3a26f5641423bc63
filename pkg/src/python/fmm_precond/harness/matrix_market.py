import logging
from pathlib import Path
from typing import Tuple

import numpy as np
import scipy.io
import scipy.sparse as sp

logger = logging.getLogger(__name__)


def export_matrix(A, b, path) -> Tuple[Path, Path]:
    """
    Write A as a complex general Matrix Market file at path and b next to it as <stem>_rhs.mtx,
    both in coordinate format; b is an n x 1 matrix whose zero entries are implicit.
    """
    path = Path(path)
    if path.suffix != '.mtx':
        path = path.with_suffix('.mtx')
    path.parent.mkdir(parents=True, exist_ok=True)
    rhs_path = path.with_name(f'{path.stem}_rhs.mtx')
    scipy.io.mmwrite(str(path), sp.coo_matrix(A, dtype=complex), field='complex', symmetry='general')
    rhs = sp.coo_matrix(np.asarray(b, dtype=complex).reshape(-1, 1))
    scipy.io.mmwrite(str(rhs_path), rhs, field='complex', symmetry='general')
    logger.info('exported %dx%d matrix (%d non-zeros) to %s', A.shape[0], A.shape[1], sp.csr_matrix(A).nnz, path)
    return path, rhs_path


def read_matrix(path) -> Tuple[sp.csr_matrix, np.ndarray]:
    path = Path(path)
    A = sp.csr_matrix(scipy.io.mmread(str(path)))
    rhs = scipy.io.mmread(str(path.with_name(f'{path.stem}_rhs.mtx')))
    if sp.issparse(rhs):
        rhs = rhs.toarray()
    b = np.asarray(rhs, dtype=complex).reshape(-1)
    return A, b
