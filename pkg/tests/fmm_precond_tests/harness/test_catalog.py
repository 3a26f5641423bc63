import math

import pytest

from fmm_precond.bem.pipeline import InnerSolverMethod
from fmm_precond.discretize.assembly import ElementType
from fmm_precond.harness.catalog import CATALOG, experiment
from fmm_precond.harness.config import ExperimentKind, PreconditionerId, SolverId
from fmm_precond.harness.runner import cells_for, parameter_points
from fmm_precond.utils.errors import ConfigurationError


def test_catalog_has_every_experiment():
    assert sorted(CATALOG) == ['E1', 'E2', 'E3', 'E4', 'E5', 'E6', 'E7', 'E8']
    for experiment_id, configs in CATALOG.items():
        assert all(config.experiment_id == experiment_id for config in configs)


def test_lookup_returns_copies():
    first = experiment('e2')[0]
    first.maxit = 99
    assert experiment('E2')[0].maxit == 20
    with pytest.raises(ConfigurationError):
        experiment('E9')


def test_cell_counts():
    e1 = experiment('E1')[0]
    cells = cells_for(e1)
    assert len(cells) == 6
    assert {cell.element for cell in cells} == {ElementType.Q1, ElementType.Q2}

    e7 = experiment('E7')
    assert len(cells_for(e7[0])) == 5
    assert [cell.epsilon for cell in cells_for(e7[0]) if cell.preconditioner is PreconditionerId.FMM] == \
        [1e-2, 1e-4, 1e-6]
    assert e7[1].maxit == 100

    e6 = experiment('E6')[0]
    assert {cell.solver for cell in cells_for(e6)} == {SolverId.GMRES, SolverId.BICGSTAB}


def test_pairs_and_mus():
    assert [(h, kappa) for h, kappa, _ in parameter_points(experiment('E2')[0])] == \
        [(1 / 16, 5.0), (1 / 32, 10.0), (1 / 64, 20.0), (1 / 128, 40.0)]
    points = parameter_points(experiment('E5')[0])
    assert len(points) == 12
    assert all(kappa == pytest.approx(mu * math.sqrt(2.0)) for _, kappa, mu in points)


def test_spectrum_sweeps():
    e8 = experiment('E8')
    assert all(config.kind is ExperimentKind.SPECTRUM for config in e8)
    assert e8[0].preconditioners == []
    assert e8[1].epsilons == [1e-2, 1e-4, 1e-6]


def test_inner_gmres_sweep():
    inner = [config for config in experiment('E6') if config.inner_solver is InnerSolverMethod.GMRES]
    assert len(inner) == 1
    assert {cell.preconditioner for cell in cells_for(inner[0])} == {PreconditionerId.FMM}
