import numpy as np
import pytest

from fmm_precond.baselines.identity import identity_precond
from fmm_precond.baselines.multigrid import (GmgPreconditioner, build_hierarchy, helmholtz_matrix, mg_vcycle,
                                             prolongation, prolongation_1d)
from fmm_precond.discretize.assembly import ElementType
from fmm_precond.discretize.grid import Grid
from fmm_precond.discretize.problems import ProblemId, make_problem
from fmm_precond.discretize.system import build_system
from fmm_precond.krylov.gmres import gmres
from fmm_precond.utils.errors import ConfigurationError


def test_prolongation_interpolates_linearly():
    P = prolongation_1d(8)
    assert P.shape == (7, 3)
    coarse = np.array([1.0, 2.0, 3.0])
    assert np.allclose(P @ coarse, [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 1.5])
    assert prolongation(8).shape == (49, 9)


def test_galerkin_coarse_operator_equals_rediscretization():
    fine, coarse = Grid(0.0, 1.0, 16), Grid(0.0, 1.0, 8)
    P = prolongation(16)
    galerkin = (P.T @ helmholtz_matrix(fine, 3.0) @ P).toarray()
    assert np.allclose(galerkin, helmholtz_matrix(coarse, 3.0).toarray())


def test_hierarchy_depth():
    hierarchy = build_hierarchy(Grid(0.0, 1.0, 64), 0.0)
    assert [level.grid.n for level in hierarchy.levels] == [64, 32, 16, 8]
    assert hierarchy.metadata['cycle'] == 'V(2,2)'
    odd = build_hierarchy(Grid(0.0, 1.0, 30), 0.0)
    assert [level.grid.n for level in odd.levels] == [30, 15]


def test_vcycle_is_a_fast_poisson_solver():
    system = build_system(make_problem(ProblemId.P3), Grid(0.0, 1.0, 32))
    hierarchy = build_hierarchy(system.grid, 0.0, system.A)
    x = np.zeros(system.n, dtype=complex)
    for _ in range(6):
        x = x + mg_vcycle(hierarchy, system.b - system.A @ x)
    assert np.linalg.norm(system.b - system.A @ x) < 1e-4 * np.linalg.norm(system.b)


def test_vcycle_is_linear():
    hierarchy = build_hierarchy(Grid(0.0, 1.0, 16), 5.0)
    rng = np.random.default_rng(61)
    x, y = rng.standard_normal(225), rng.standard_normal(225)
    assert np.allclose(mg_vcycle(hierarchy, x + 2j * y), mg_vcycle(hierarchy, x) + 2j * mg_vcycle(hierarchy, y))


def test_gmg_preconditioned_gmres_beats_identity():
    system = build_system(make_problem(ProblemId.P2, kappa=2.0), Grid.for_mesh_level((-1.0, 1.0), 1 / 32))
    with_mg = gmres(system.A, system.b, M=GmgPreconditioner.for_system(system), tol=1e-6, restart=20, max_outer=1)
    without = gmres(system.A, system.b, M=identity_precond(system.n), tol=1e-6, restart=20, max_outer=1)
    assert with_mg.converged
    assert with_mg.final_residual < without.final_residual


def test_q2_systems_are_rejected():
    system = build_system(make_problem(ProblemId.P1, kappa=5.0), Grid(0.0, 1.0, 8), ElementType.Q2)
    with pytest.raises(ConfigurationError):
        GmgPreconditioner.for_system(system)


def test_default_hierarchy_is_a_diffusion_solve():
    system = build_system(make_problem(ProblemId.P1, kappa=5.0), Grid(0.0, 1.0, 16))
    metadata = GmgPreconditioner.for_system(system).hierarchy.metadata
    assert metadata['hierarchy_kappa'] == '0'
    assert metadata['coarse_operator'] == 're-discretized Q1'
    own = GmgPreconditioner.for_system(system, kappa=None).hierarchy
    assert own.metadata['hierarchy_kappa'] == '5'
    assert abs(own.levels[0].A - system.A).max() == 0


def test_gmg_converges_at_low_wavenumber():
    system = build_system(make_problem(ProblemId.P1, kappa=5.0), Grid.for_mesh_level((0.0, 1.0), 1 / 16))
    report = gmres(system.A, system.b, M=GmgPreconditioner.for_system(system), tol=1e-6, restart=30, max_outer=1)
    assert report.converged
    assert report.iterations <= 20


@pytest.mark.slow
def test_gmg_stalls_at_high_wavenumber():
    system = build_system(make_problem(ProblemId.P1, kappa=20.0), Grid.for_mesh_level((0.0, 1.0), 1 / 64))
    report = gmres(system.A, system.b, M=GmgPreconditioner.for_system(system), tol=1e-6, restart=20, max_outer=1)
    assert not report.converged
