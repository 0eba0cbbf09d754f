import pytest

from pfaffform.dipole import (
    BudgetExhausted,
    chart_integrand,
    integrate_dipole_numeric,
    positive_on_samples,
)


def test_theta_integral_by_quadrature():
    r = integrate_dipole_numeric(1)
    assert r.scheme == "quadrature"
    assert abs(r.estimate - 1) < 1e-3
    assert r.error < 1e-3


def test_d5_integral_by_monte_carlo():
    r = integrate_dipole_numeric(2)
    assert r.scheme == "monte_carlo"
    assert abs(r.estimate - 1) < 2e-2


def test_monte_carlo_is_seeded():
    a = integrate_dipole_numeric(1, scheme="monte_carlo", budget=200_000, tol=1.0, seed=4)
    b = integrate_dipole_numeric(1, scheme="monte_carlo", budget=200_000, tol=1.0, seed=4)
    assert a == b
    assert abs(a.estimate - 1) < 0.1


def test_budget_exhaustion_raises():
    with pytest.raises(BudgetExhausted):
        integrate_dipole_numeric(2, budget=1000, tol=1e-6)


@pytest.mark.parametrize("i", [1, 2, 3])
def test_integrand_positive(i):
    assert positive_on_samples(i)


def test_chart_dimension():
    assert chart_integrand(2).dim == 4


def test_bad_arguments():
    with pytest.raises(ValueError):
        integrate_dipole_numeric(0)
    with pytest.raises(ValueError):
        integrate_dipole_numeric(1, scheme="simpson")
