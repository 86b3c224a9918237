import math

import numpy as np
import pytest
from scipy import integrate

from ndblackbody.closedform import energy_density
from ndblackbody.errors import ConvergenceError, DomainError
from ndblackbody.quadrature import (
    adaptive_integrate,
    bose_integral,
    bose_tail_bound,
    bose_upper_limit,
    radial_energy_density,
)
from ndblackbody.specfun import gamma, zeta


@pytest.mark.parametrize("n, expected", [
    (3, 6.493939402266829),
    (3, math.pi ** 4 / 15),
    (1, 1.6449340668482264),
    (2, 2.4041138063191885),
])
def test_bose_integral_values(n, expected):
    res = bose_integral(n)
    assert res.value == pytest.approx(expected, rel=1e-12)
    assert res.abs_error_estimate >= 0
    assert res.n_evaluations > 0


@pytest.mark.parametrize("n", [1, 1.5, 2, 3, 4.5, 7, 9])
def test_bose_integral_identity(n):
    assert bose_integral(n).value == pytest.approx(gamma(n + 1) * zeta(n + 1), rel=1e-10)


@pytest.mark.parametrize("n", [0.5, 1.5, 2.5, 6.0])
def test_bose_integral_against_scipy(n):
    ref, _ = integrate.quad(lambda x: x ** n * math.exp(-x) / -math.expm1(-x), 0, math.inf, epsabs=0, epsrel=1e-12, limit=200)
    assert bose_integral(n).value == pytest.approx(ref, rel=1e-10)


def test_error_estimate_is_honest():
    n = 1.5
    res = bose_integral(n, rel_tol=1e-8)
    exact = gamma(n + 1) * zeta(n + 1)
    assert abs(res.value - exact) <= res.abs_error_estimate + 1e-15 * exact


@pytest.mark.parametrize("n", [1, 1.5, 2, 3, 4.5, 7, 9])
def test_tail_bound(n):
    total = gamma(n + 1) * zeta(n + 1)
    assert bose_tail_bound(n) <= 1e-14 * total
    # bound really bounds: compare with the tail integral from a shorter cut
    x_cut = 2 * n + 10
    tail, _ = integrate.quad(lambda x: x ** n * math.exp(-x) / -math.expm1(-x), x_cut, math.inf, epsabs=0, epsrel=1e-10)
    assert tail <= bose_tail_bound(n, x_cut)
    assert bose_upper_limit(n) == 60 + 10 * n


@pytest.mark.parametrize("n", [0.0, -1.0])
def test_bose_domain(n):
    with pytest.raises(DomainError):
        bose_integral(n)


def test_rel_tol_floor():
    with pytest.raises(DomainError):
        bose_integral(2, rel_tol=1e-15)


def test_nonconvergence_reported():
    with pytest.raises(ConvergenceError):
        adaptive_integrate(lambda x: 1.0 / np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, rel_tol=1e-14, max_evals=500)


def test_adaptive_integrate_polynomial():
    res = adaptive_integrate(lambda x: x ** 5, 0.0, 2.0)
    assert res.value == pytest.approx(64 / 6, rel=1e-14)


@pytest.mark.parametrize("D, species, expected", [
    (4, "scalar", 0.3289868133696453),
    (4, "photon", 0.6579736267392906),
    (2, "scalar", math.pi / 6),
])
def test_radial_energy_density_values(D, species, expected):
    assert radial_energy_density(D, species, 1.0).value == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("D", range(2, 11))
@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0])
def test_radial_matches_closed_form(D, tau):
    got = radial_energy_density(D, "scalar", tau).value
    exact = energy_density(D, "scalar", tau)
    assert abs(got - exact) / exact <= 1e-9
