import math

import mpmath as mp
import pytest

from ineqlab.constants import Params, constant, log_sobolev_constant
from ineqlab.errors import DomainError

mp.mp.dps = 30


def mp_sobolev(N, p):
    N = mp.mpf(N)
    p = mp.mpf(p)
    fac = mp.mpf(1) if p == 1 else ((N - p) / (p - 1)) ** (p - 1)
    ratio = mp.gamma(N / p) * mp.gamma(N + 1 - N / p) / (mp.gamma(N) * mp.gamma(1 + N / 2))
    return mp.pi ** (p / 2) * N * fac * ratio ** (p / N)


def test_hardy_value():
    assert constant("hardy", Params(N=3, p=2.0)) == 0.25


def test_sobolev_cross_check():
    # closed form vs the independent expression 3 (pi/2)^(4/3)
    val = constant("sobolev", Params(N=3, p=2.0))
    assert val == pytest.approx(5.477904089531332, rel=1e-10)
    assert val == pytest.approx(3.0 * (math.pi / 2.0) ** (4.0 / 3.0), rel=1e-10)


@pytest.mark.parametrize("N,p", [(3, 2.0), (4, 2.0), (4, 3.0), (5, 1.5), (3, 1.0)])
def test_sobolev_against_reference(N, p):
    assert constant("sobolev", Params(N=N, p=p)) == \
        pytest.approx(float(mp_sobolev(N, p)), rel=1e-12)


def test_critical_exponent():
    assert constant("critical_exponent", Params(N=3, p=2.0)) == pytest.approx(6.0)


def test_moser_alpha():
    assert constant("moser_alpha", Params(N=2, p=2.0)) == \
        pytest.approx(4.0 * math.pi, rel=1e-13)


def test_logsob():
    assert constant("logsob", Params(N=3, p=2.0, n=1)) == \
        pytest.approx(0.23419932609727664, rel=1e-13)


def test_critical_hardy():
    assert constant("critical_hardy", Params(N=2, p=2.0)) == pytest.approx(0.25)


def test_p_one_continuity():
    # the ((N-p)/(p-1))^(p-1) factor is 1 by continuity at p = 1, and the
    # formula stays continuous approaching from above
    v1 = constant("sobolev", Params(N=3, p=1.0))
    v1eps = constant("sobolev", Params(N=3, p=1.0 + 1e-7))
    assert v1 == pytest.approx(v1eps, rel=1e-4)


def test_domain_errors():
    with pytest.raises(DomainError):
        constant("hardy", Params(N=3, p=3.0))
    with pytest.raises(DomainError):
        constant("sobolev", Params(N=3, p=4.0))
    with pytest.raises(DomainError):
        constant("lower_dim_coeff", Params(N=3, p=2.0, m=None))
    with pytest.raises(DomainError):
        constant("logsob", Params(N=3, p=2.0))
    with pytest.raises(DomainError):
        constant("no_such_kind", Params())


def test_hardy_vanishes_at_critical():
    vals = [constant("hardy", Params(N=3, p=3.0 - 10.0 ** (-k))) for k in range(1, 7)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-17


def test_sobolev_decay_band():
    # S_{N,p} / (N-p)^(p-1) stays inside a fixed positive band as p -> N
    N = 3
    lo, hi = math.inf, 0.0
    for delta in [0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-6]:
        p = N - delta
        ratio = constant("sobolev", Params(N=N, p=p)) / delta ** (p - 1.0)
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    assert 0.0 < lo <= hi < math.inf
    assert hi / lo <= 10.0


def test_lower_dim_coeff_limit():
    # -> ((m-p)/p)^p as N grows; the gap shrinks
    m, p = 3, 2.0
    gap2 = abs(constant("lower_dim_coeff", Params(N=100, p=p, m=m)) - 0.25)
    gap4 = abs(constant("lower_dim_coeff", Params(N=10000, p=p, m=m)) - 0.25)
    assert gap4 < gap2
    assert gap4 < 0.005


def test_lower_dim_coeff_survives_huge_N():
    val = constant("lower_dim_coeff", Params(N=100000, p=2.0, m=3))
    assert math.isfinite(val) and val > 0.0


def test_log_sobolev_constant_matches_exp():
    assert math.exp(log_sobolev_constant(4, 2.0)) == \
        pytest.approx(constant("sobolev", Params(N=4, p=2.0)), rel=1e-14)
