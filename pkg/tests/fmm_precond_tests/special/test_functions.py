import numpy as np
import pytest

from fmm_precond.special.functions import MAX_ORDER, bessel_j, bessel_y, hankel1
from fmm_precond.utils.errors import DomainError


def test_reference_values():
    assert bessel_j(0, 1.0) == pytest.approx(0.7651976866, abs=1e-10)
    assert bessel_y(0, 1.0) == pytest.approx(0.0882569642, abs=1e-10)
    assert bessel_j(1, 1.0) == pytest.approx(0.4400505857, abs=1e-10)
    assert bessel_y(1, 1.0) == pytest.approx(-0.7812128213, abs=1e-10)
    assert hankel1(0, 1.0) == pytest.approx(0.7651976866 + 0.0882569642j, abs=1e-10)


def test_negative_orders_reflect():
    x = np.linspace(0.1, 30.0, 50)
    for n in (1, 2, 7):
        assert np.allclose(bessel_j(-n, x), (-1) ** n * bessel_j(n, x))
        assert np.allclose(bessel_y(-n, x), (-1) ** n * bessel_y(n, x))


def test_wronskian():
    # J_{n+1} Y_n - J_n Y_{n+1} = 2/(πx)
    x = np.geomspace(1e-2, 80.0, 40)
    for n in (0, 3, 10):
        w = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x)
        assert np.allclose(w, 2.0 / (np.pi * x), rtol=1e-9)


def test_broadcasts_over_order_and_argument():
    n = np.arange(4)[:, None]
    x = np.array([0.5, 1.0, 2.0])[None, :]
    assert hankel1(n, x).shape == (4, 3)


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel_y(0, 0.0)
    with pytest.raises(DomainError):
        hankel1(0, -1.0)
    with pytest.raises(DomainError):
        bessel_j(MAX_ORDER + 1, 1.0)
    with pytest.raises(DomainError):
        bessel_j(0, np.inf)
    assert bessel_j(0, 0.0) == 1.0
