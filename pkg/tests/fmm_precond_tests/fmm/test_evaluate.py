import numpy as np
import pytest

from fmm_precond.fmm.config import Backend, FmmConfig
from fmm_precond.fmm.direct import DirectSum, direct_sum, kernel_block
from fmm_precond.fmm.evaluate import FmmPlan, evaluate
from fmm_precond.special.kernels import Kernel, KernelType, greens
from fmm_precond.utils.errors import DomainError, KernelNotSupportedError


def _relative(approx, exact):
    return np.linalg.norm(approx - exact) / np.linalg.norm(exact)


@pytest.fixture
def bodies():
    rng = np.random.default_rng(21)
    points = rng.uniform(0.0, 1.0, size=(600, 2))
    charges = rng.standard_normal(600) + 1j * rng.standard_normal(600)
    return points, charges


def test_single_pair_matches_greens():
    kernel = Kernel.for_wavenumber(1.0)
    config = FmmConfig(kernel=kernel, backend=Backend.DIRECT)
    value = evaluate(np.array([[1.0, 0.0]]), np.ones(1), np.array([[0.0, 0.0]]), config)
    assert value[0] == pytest.approx(-0.0220642411 + 0.1912994216j, abs=1e-9)


def test_kernel_block_skips_coincident_points():
    kernel = Kernel.for_wavenumber(2.0)
    points = np.array([[0.0, 0.0], [0.5, 0.0]])
    block = kernel_block(kernel, points, points)
    assert block[0, 0] == 0 and block[1, 1] == 0
    assert block[0, 1] == pytest.approx(greens(kernel, points[1], points[0]))


@pytest.mark.parametrize('kappa', [0.0, 5.0])
def test_fmm_matches_direct(kappa, bodies):
    points, charges = bodies
    config = FmmConfig(kernel=Kernel.for_wavenumber(kappa), p=12, ncrit=16)
    exact = direct_sum(config.kernel, points, charges, points)
    assert _relative(evaluate(points, charges, points, config), exact) < 1e-5


def test_error_decreases_with_order(bodies):
    points, charges = bodies
    kernel = Kernel.for_wavenumber(5.0)
    exact = direct_sum(kernel, points, charges, points)
    errors = [_relative(evaluate(points, charges, points, FmmConfig(kernel=kernel, p=p, ncrit=16)), exact)
              for p in (3, 12)]
    assert errors[1] < errors[0]


def test_dipole_sum_matches_direct(bodies):
    points, charges = bodies
    angles = np.random.default_rng(22).uniform(0.0, 2 * np.pi, size=len(points))
    normals = np.column_stack([np.cos(angles), np.sin(angles)])
    targets = np.random.default_rng(23).uniform(0.0, 1.0, size=(300, 2))
    config = FmmConfig(kernel=Kernel.for_wavenumber(4.0), p=12, ncrit=16)
    exact = direct_sum(config.kernel, points, charges, targets, normals=normals)
    assert _relative(evaluate(points, charges, targets, config, normals=normals), exact) < 1e-4


def test_plan_is_reusable_and_linear(bodies):
    points, charges = bodies
    plan = FmmPlan(points, points, FmmConfig(kernel=Kernel.for_wavenumber(3.0), p=8, ncrit=16))
    other = np.random.default_rng(24).standard_normal(len(points))
    combined = plan.apply(2.0 * charges - 1j * other)
    assert np.allclose(combined, 2.0 * plan.apply(charges) - 1j * plan.apply(other), rtol=1e-12, atol=1e-12)


def test_workers_do_not_change_results(bodies):
    points, charges = bodies
    serial = evaluate(points, charges, points, FmmConfig(kernel=Kernel.for_wavenumber(3.0), p=6, ncrit=16))
    threaded = evaluate(points, charges, points,
                        FmmConfig(kernel=Kernel.for_wavenumber(3.0), p=6, ncrit=16, workers=4))
    assert np.allclose(serial, threaded, rtol=1e-14, atol=0)


def test_direct_backend_is_exact(bodies):
    points, charges = bodies
    config = FmmConfig(kernel=Kernel.for_wavenumber(2.0), backend=Backend.DIRECT)
    assert np.allclose(evaluate(points, charges, points, config),
                       kernel_block(config.kernel, points, points) @ charges, rtol=1e-13)


def test_degraded_direct_is_seeded(bodies):
    points, charges = bodies
    kernel = Kernel.for_wavenumber(2.0)
    exact = direct_sum(kernel, points, charges, points)
    first = evaluate(points, charges, points,
                     FmmConfig(kernel=kernel, backend=Backend.DEGRADED_DIRECT, epsilon=1e-3, seed=1))
    again = evaluate(points, charges, points,
                     FmmConfig(kernel=kernel, backend=Backend.DEGRADED_DIRECT, epsilon=1e-3, seed=1))
    other = evaluate(points, charges, points,
                     FmmConfig(kernel=kernel, backend=Backend.DEGRADED_DIRECT, epsilon=1e-3, seed=2))
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)
    assert 0 < _relative(first, exact) < 5e-3


def test_three_dimensional_kernels_need_direct():
    points = np.random.default_rng(25).uniform(size=(50, 3))
    kernel = Kernel(kernel_type=KernelType.LAPLACE_3D)
    with pytest.raises(KernelNotSupportedError):
        FmmPlan(points, points, FmmConfig(kernel=kernel))
    values = evaluate(points, np.ones(50), points, FmmConfig(kernel=kernel, backend=Backend.DIRECT))
    assert np.all(values.real > 0)


def test_bad_charges_are_rejected(bodies):
    points, _ = bodies
    plan = FmmPlan(points, points, FmmConfig(kernel=Kernel.for_wavenumber(1.0), backend=Backend.DIRECT))
    with pytest.raises(DomainError):
        plan.apply(np.ones(3))
    with pytest.raises(DomainError):
        DirectSum(plan.config.kernel, points, points).apply(np.ones(3))


@pytest.mark.parametrize('kappa', [1.0, 10.0])
def test_error_falls_with_each_order(kappa):
    rng = np.random.default_rng(27)
    points = rng.uniform(0.0, 1.0, size=(500, 2))
    charges = rng.standard_normal(500) + 1j * rng.standard_normal(500)
    kernel = Kernel.for_wavenumber(kappa)
    exact = direct_sum(kernel, points, charges, points)
    errors = [_relative(evaluate(points, charges, points, FmmConfig(kernel=kernel, p=p)), exact)
              for p in (2, 4, 6, 8)]
    assert all(later <= earlier for earlier, later in zip(errors, errors[1:]))
    for p, error in zip((2, 4, 6, 8), errors):
        assert error < 10.0 ** (1 - p)


def test_epsilon_changes_the_far_field(bodies):
    points, charges = bodies
    kernel = Kernel.for_wavenumber(7.0)
    results = [evaluate(points, charges, points, FmmConfig(kernel=kernel, epsilon=epsilon, ncrit=16))
               for epsilon in (1e-2, 1e-4)]
    exact = direct_sum(kernel, points, charges, points)
    assert _relative(results[1], exact) < _relative(results[0], exact) < 1e-1


def test_vanishing_theta_is_all_near(bodies):
    points, charges = bodies
    kernel = Kernel.for_wavenumber(6.0)
    plan = FmmPlan(points, points, FmmConfig(kernel=kernel, theta=1e-6, ncrit=16))
    assert len(plan._impl.lists.far_pairs) == 0
    exact = evaluate(points, charges, points, FmmConfig(kernel=kernel, backend=Backend.DIRECT))
    assert _relative(plan.apply(charges), exact) <= 1e-12


@pytest.mark.slow
def test_reference_accuracy_by_order():
    rng = np.random.default_rng(26)
    points = rng.uniform(0.0, 1.0, size=(2000, 2))
    charges = rng.standard_normal(2000)
    kernel = Kernel.for_wavenumber(10.0)
    exact = direct_sum(kernel, points, charges, points)
    errors = [_relative(evaluate(points, charges, points, FmmConfig(kernel=kernel, p=p, theta=0.4)), exact)
              for p in (2, 4, 6)]
    assert errors[0] <= 1e-1 and errors[1] <= 1e-3 and errors[2] <= 1e-5
    assert errors[0] > errors[1] > errors[2]
