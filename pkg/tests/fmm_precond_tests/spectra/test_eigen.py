import math

import numpy as np
import pytest
from scipy.sparse.linalg import LinearOperator

from fmm_precond.spectra.eigen import (MAX_DENSE, dense_eigenvalues, eigenpair_backward_error, materialize,
                                       preconditioned, spectrum_report)
from fmm_precond.utils.errors import DomainError, SizeError


@pytest.fixture
def matrix():
    rng = np.random.default_rng(71)
    return rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))


def test_materialize_recovers_the_matrix(matrix):
    op = LinearOperator(matrix.shape, matvec=lambda v: matrix @ v, dtype=complex)
    assert np.allclose(materialize(op), matrix)
    assert np.allclose(materialize(op, 30, workers=4), matrix)


def test_materialize_size_guard():
    huge = LinearOperator((MAX_DENSE + 1, MAX_DENSE + 1), matvec=lambda v: v, dtype=complex)
    with pytest.raises(SizeError):
        materialize(huge)
    with pytest.raises(DomainError):
        materialize(np.eye(3), 4)


def test_eigenvalues_of_a_diagonal_matrix():
    values = dense_eigenvalues(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(np.sort(values.real), [-1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        dense_eigenvalues(np.ones((2, 3)))


def test_backward_error_is_tiny(matrix):
    assert eigenpair_backward_error(matrix, dense_eigenvalues(matrix)) < 1e-10


def test_spectrum_report():
    report = spectrum_report([1.0, -1.0, 2j])
    assert report.n_negative_real == 1
    assert report.min_abs == pytest.approx(1.0)
    assert report.max_abs == pytest.approx(2.0)
    assert report.cluster_radius == pytest.approx(math.sqrt(5.0))
    assert report.median_abs == pytest.approx(1.0)
    with pytest.raises(DomainError):
        spectrum_report([])


def test_exactly_preconditioned_spectrum_is_one(matrix):
    product = materialize(preconditioned(matrix, np.linalg.inv(matrix)))
    report = spectrum_report(dense_eigenvalues(product))
    assert report.cluster_radius < 1e-10


def test_eigenvalues_sum_to_the_trace(matrix):
    values = dense_eigenvalues(matrix)
    assert len(values) == 30
    assert abs(values.sum() - np.trace(matrix)) <= 1e-6 * abs(np.trace(matrix))


def test_companion_matrix_roots():
    roots = np.array([-2.0, -0.5, 0.25, 1.0, 1.5 + 0.5j, 1.5 - 0.5j, 3.0, 4.0])
    coefficients = np.poly(roots)
    companion = np.zeros((8, 8), dtype=complex)
    companion[0, :] = -coefficients[1:]
    companion[np.arange(1, 8), np.arange(7)] = 1.0
    values = dense_eigenvalues(companion)
    assert all(np.min(np.abs(values - root)) < 1e-8 for root in roots)


def test_symmetric_input_has_real_spectrum(matrix):
    symmetric = matrix.real + matrix.real.T
    values = dense_eigenvalues(symmetric)
    assert np.max(np.abs(values.imag)) <= 1e-8 * np.linalg.norm(symmetric, 2)
