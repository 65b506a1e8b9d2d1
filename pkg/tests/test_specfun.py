import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ineqlab.errors import DomainError
from ineqlab.specfun import gamma, log_gamma, log_sphere_area, sphere_area, stirling_ratio

mp.mp.dps = 30


def test_log_gamma_half():
    # Gamma(1/2) = sqrt(pi)
    assert log_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-13)


def test_log_gamma_factorial():
    # Gamma(5) = 4!
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-13)


def test_log_gamma_three_halves():
    assert log_gamma(1.5) == pytest.approx(-0.12078223763524522, rel=1e-12)


def test_log_gamma_accuracy_against_reference():
    # relative error <= 1e-12 on [1e-3, 1e4] (relative to max(|ln Gamma|, 1)
    # since ln Gamma vanishes at 1 and 2)
    worst = 0.0
    for t in np.geomspace(1e-3, 1e4, 800):
        ref = float(mp.loggamma(mp.mpf(float(t))))
        err = abs(log_gamma(float(t)) - ref) / max(abs(ref), 1.0)
        worst = max(worst, err)
    assert worst <= 1e-12


def test_log_gamma_domain_errors():
    for bad in (0.0, -1.0, math.nan, math.inf):
        with pytest.raises(DomainError):
            log_gamma(bad)


@given(st.floats(min_value=0.1, max_value=1e3))
@settings(max_examples=300)
def test_recurrence(t):
    # Gamma(t+1) = t Gamma(t)
    assert abs(log_gamma(t + 1.0) - log_gamma(t) - math.log(t)) <= 1e-11


@pytest.mark.parametrize("n", range(1, 21))
def test_half_integer_closed_form(n):
    # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
    exact = math.factorial(2 * n) * math.sqrt(math.pi) / (4.0 ** n * math.factorial(n))
    assert gamma(n + 0.5) == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("dim,expected", [
    (2, 2.0 * math.pi),
    (3, 4.0 * math.pi),
    (4, 2.0 * math.pi ** 2),
])
def test_sphere_area_values(dim, expected):
    assert sphere_area(dim) == pytest.approx(expected, rel=1e-13)


def test_sphere_area_domain():
    with pytest.raises(DomainError):
        sphere_area(0)


def test_log_sphere_area_large_dim():
    # direct sphere_area underflows around N ~ 1e3; the log stays usable
    val = log_sphere_area(100000)
    assert math.isfinite(val)
    assert sphere_area(1) == pytest.approx(2.0, rel=1e-13)


def test_stirling_ratio_values():
    # frozen from a 30-digit reference evaluation
    assert stirling_ratio(1.0) == pytest.approx(1.0844375514192275, rel=1e-12)
    assert stirling_ratio(100.0) == pytest.approx(1.0008336778720121, rel=1e-3)
    assert abs(stirling_ratio(100.0) - 1.0) <= 1e-3
    assert abs(stirling_ratio(10000.0) - 1.0) <= 1e-5
    assert stirling_ratio(10000.0) == pytest.approx(1.0000083333680529, rel=1e-9)


def test_stirling_ratio_monotone_to_one():
    ts = np.geomspace(1.0, 1e4, 200)
    vals = [stirling_ratio(float(t)) for t in ts]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 1.0


def test_stirling_ratio_domain():
    with pytest.raises(DomainError):
        stirling_ratio(-2.0)
