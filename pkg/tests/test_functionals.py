import math

import numpy as np
import pytest

from ineqlab.constants import Params, constant
from ineqlab.errors import DomainError, SingularityError
from ineqlab.functionals import (evaluate, grad_energy, radial_lemma_margin,
                                 test_family)
from ineqlab.grid import RadialFn, RadialGrid, ball_grid, space_grid

TOL_FACTOR = 1e-4  # deficit >= -1e-4 * max(|lhs|, |rhs|, 1) on sharp kinds


def quad_tol(rep):
    return TOL_FACTOR * max(abs(rep.lhs), abs(rep.rhs), 1.0)


# -- closed-form spot checks --------------------------------------------------

def test_hardy_cone_closed_form(cone3):
    rep = evaluate("hardy", cone3, Params(N=3, p=2.0))
    # int u^2/|x|^2 = 4 pi / 3, int |grad u|^2 = 4 pi / 3, deficit = pi
    assert rep.diagnostics["raw_integral"] == pytest.approx(4.0 * math.pi / 3.0, rel=1e-7)
    assert rep.rhs == pytest.approx(4.0 * math.pi / 3.0, rel=1e-7)
    assert rep.lhs == pytest.approx(0.25 * 4.0 * math.pi / 3.0, rel=1e-7)
    assert rep.deficit == pytest.approx(math.pi, rel=1e-6)


def test_hardy_zero_function(ball3):
    u = RadialFn.ball(ball3, np.zeros(ball3.count))
    rep = evaluate("hardy", u, Params(N=3, p=2.0))
    assert rep.lhs == 0.0 and rep.rhs == 0.0


def test_sobolev_bubble_equality(bubble3):
    rep = evaluate("sobolev", bubble3, Params(N=3, p=2.0))
    assert abs(rep.deficit) <= 0.01 * rep.rhs


def test_hardy_singular_input(ball3):
    # u(0) != 0 against the bare critical power |x|^-N is non-integrable
    u = RadialFn.ball(ball3, 1.0 - ball3.nodes)
    with pytest.raises(SingularityError):
        evaluate("critical_hardy", u, Params(N=3, p=3.0, a=1.0, beta=0.0))


def test_log_sobolev_gaussian_equality():
    g = RadialGrid(1, 1e-8, 40.0, 4096)
    u = test_family("gaussian", Params(N=1, p=2.0), g, sigma=1.0)
    rep = evaluate("log_sobolev", u, Params(N=1, p=2.0, n=1))
    target = -1.4189385332046727   # -(1 + ln 2 pi)/2
    assert rep.lhs == pytest.approx(target, abs=1e-6)
    assert rep.rhs == pytest.approx(target, abs=1e-6)
    assert abs(rep.deficit) <= 1e-9


def test_log_sobolev_rescales_input():
    g = RadialGrid(1, 1e-8, 40.0, 2048)
    u = test_family("gaussian", Params(N=1, p=2.0), g, sigma=1.0)
    u2 = u.with_values(3.0 * u.values, 3.0 * u.deriv_values)
    r1 = evaluate("log_sobolev", u, Params(N=1, n=1))
    r2 = evaluate("log_sobolev", u2, Params(N=1, n=1))
    assert r2.lhs == pytest.approx(r1.lhs, abs=1e-10)
    assert "warning" in r2.diagnostics


def test_trudinger_moser_report(ball2_aligned):
    u = test_family("moser_seq", Params(N=2, p=2.0), ball2_aligned, k=100)
    alpha = 0.9 * constant("moser_alpha", Params(N=2, p=2.0))
    rep = evaluate("trudinger_moser", u, Params(N=2, p=2.0, alpha=alpha))
    assert rep.lhs > 0.0
    assert rep.diagnostics["constant_estimate"] == \
        pytest.approx(rep.lhs / rep.diagnostics["domain_measure"], rel=1e-12)
    assert rep.deficit == 0.0  # rhs is C_est * |Omega| by construction


def test_trudinger_moser_needs_gradient(ball2):
    u = RadialFn.ball(ball2, np.zeros(ball2.count))
    with pytest.raises(DomainError):
        evaluate("trudinger_moser", u, Params(N=2, p=2.0, alpha=1.0))


def test_critical_hardy_constant_slot(cone2):
    sharp = evaluate("critical_hardy", cone2, Params(N=2, p=2.0, a=1.0, beta=2.0))
    assert sharp.diagnostics["constant"] == pytest.approx(0.25)
    shifted = evaluate("critical_hardy", cone2, Params(N=2, p=2.0, a=2.0, beta=5.0))
    assert shifted.diagnostics["constant"] is None
    assert shifted.lhs == pytest.approx(shifted.diagnostics["raw_integral"])
    flagged = evaluate("critical_hardy", cone2, Params(N=2, p=2.0, a=1.0, beta=5.0))
    assert "warning" in flagged.diagnostics


def test_domain_kind_mismatch(bubble3):
    with pytest.raises(DomainError):
        evaluate("critical_hardy", bubble3, Params(N=3, p=3.0))
    with pytest.raises(DomainError):
        evaluate("alvino", bubble3, Params(N=3, p=3.0))


def test_q_norm_bound_ratio(cone3):
    rep = evaluate("q_norm_bound", cone3, Params(N=3, p=3.0, q=12.0))
    assert rep.diagnostics["ratio"] == pytest.approx(rep.lhs / rep.rhs, rel=1e-12)
    with pytest.raises(DomainError):
        evaluate("q_norm_bound", cone3, Params(N=3, p=3.0, q=2.0))


def test_q_norm_ratio_bounded_above(cone3):
    # the ratio estimates the unknown uniform constant; it must stay bounded
    # over the geometric q ladder.  (It decays like q^(-(N-1)/N) for any
    # fixed function, so only the upper bound is meaningful.)
    N = 3
    ratios = []
    for j in range(11):
        q = 2.0 ** (j + 1) * N
        rep = evaluate("q_norm_bound", cone3, Params(N=N, p=3.0, q=q))
        ratios.append(rep.diagnostics["ratio"])
    assert max(ratios) <= 1.0
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


# -- radial lemma -------------------------------------------------------------

def test_radial_lemma_zero(ball2):
    u = RadialFn.ball(ball2, np.zeros(ball2.count))
    assert radial_lemma_margin(u) == 0.0


def test_radial_lemma_truncated_log(ball2_aligned):
    # the truncated logarithm is the equality profile; the margin is
    # certified nonnegative (the kink convention biases the energy up)
    u = test_family("moser_seq", Params(N=2, p=2.0), ball2_aligned, k=10)
    assert radial_lemma_margin(u) >= 0.0


def test_radial_lemma_cone(cone3):
    assert radial_lemma_margin(cone3) >= 0.0


# -- test families ------------------------------------------------------------

def test_cone_midpoint(ball3, cone3):
    mid = np.interp(math.log(0.5), ball3.s, cone3.values)
    assert mid == pytest.approx(0.5, abs=1e-9)


def test_moser_unit_energy(ball2_aligned):
    u = test_family("moser_seq", Params(N=2, p=2.0), ball2_aligned, k=100)
    assert grad_energy(u, 2.0) ** 0.5 == pytest.approx(1.0, abs=1e-3)


def test_gaussian_normalized():
    g = RadialGrid(1, 1e-8, 40.0, 2048)
    u = test_family("gaussian", Params(N=1, p=2.0), g, sigma=0.7)
    from ineqlab.grid import volume_integral
    assert volume_integral(g, u.values ** 2) == pytest.approx(1.0, abs=1e-10)


def test_family_parameter_validation(ball3):
    p = Params(N=3, p=2.0)
    with pytest.raises(DomainError):
        test_family("moser_seq", p, ball3, k=1)
    with pytest.raises(DomainError):
        test_family("hardy_seq", p, ball3, eps=0.9)   # >= (N-p)/p
    with pytest.raises(DomainError):
        test_family("log_power", p, ball3, theta=-1.0)
    with pytest.raises(DomainError):
        test_family("gaussian", p, ball3, sigma=0.0)
    with pytest.raises(DomainError):
        test_family("nope", p, ball3)


# -- nonnegative deficits across the family x parameter matrix ----------------

def _sharp_cases():
    cases = []
    for N in (2, 3):
        grid = ball_grid(N, 1.0, 4001)
        p = 2.0 if N > 2 else 1.5
        par = Params(N=N, p=p)
        ball_members = [
            ("cone", test_family("cone", par, grid)),
            ("log_power", test_family("log_power", par, grid, theta=(N - 1.0) / N)),
            ("hardy_seq", test_family("hardy_seq", par, grid, eps=0.3 * (N - p) / p)),
            ("moser_seq", test_family("moser_seq", par, grid, k=1000)),
        ]
        for name, u in ball_members:
            if p < N:
                cases.append((f"hardy/{name}/N{N}", "hardy", u, par))
                cases.append((f"sobolev/{name}/N{N}", "sobolev", u, par))
                cases.append((f"improved_sobolev/{name}/N{N}", "improved_sobolev", u, par))
                cases.append((f"improved_hardy/{name}/N{N}", "improved_hardy", u, par))
            crit = Params(N=N, p=float(N), a=1.0, beta=float(N))
            cases.append((f"critical_hardy/{name}/N{N}", "critical_hardy", u, crit))
            cases.append((f"alvino/{name}/N{N}", "alvino", u, Params(N=N, p=float(N))))
    space = space_grid(3, 4096)
    bub = test_family("talenti_bubble", Params(N=3, p=2.0), space)
    cases.append(("hardy/bubble/N3", "hardy", bub, Params(N=3, p=2.0)))
    cases.append(("sobolev/bubble/N3", "sobolev", bub, Params(N=3, p=2.0)))
    space_m = space_grid(3, 4096)
    bub_m = test_family("talenti_bubble", Params(N=3, p=2.0), space_m)
    cases.append(("lower_dim/bubble/m3N5", "lower_dim", bub_m, Params(N=5, p=2.0, m=3)))
    g1 = RadialGrid(1, 1e-8, 40.0, 2048)
    for sig in (0.6, 1.0, 1.7):
        gau = test_family("gaussian", Params(N=1, p=2.0), g1, sigma=sig)
        cases.append((f"log_sobolev/gaussian{sig}", "log_sobolev", gau, Params(N=1, n=1)))
    return cases


@pytest.mark.parametrize("label,kind,u,par",
                         _sharp_cases(), ids=lambda c: c if isinstance(c, str) else "")
def test_sharp_deficits_nonnegative(label, kind, u, par):
    rep = evaluate(kind, u, par)
    assert rep.deficit >= -quad_tol(rep), label


# -- scaling covariance --------------------------------------------------------

@pytest.mark.parametrize("lam", [0.25, 4.0])
def test_hardy_scaling_covariance(lam):
    # u(lambda r) has the same lhs/rhs ratio: build the dilated profile in
    # closed form so only quadrature enters
    g = space_grid(3, 4096)
    par = Params(N=3, p=2.0)

    def bubble(r):
        return (1.0 + r ** 2) ** -0.5

    def bubble_d(r):
        return -r * (1.0 + r ** 2) ** -1.5

    u1 = RadialFn.whole_space(g, bubble(g.nodes), bubble_d(g.nodes), tail_tol=math.inf)
    u2 = RadialFn.whole_space(g, bubble(lam * g.nodes), lam * bubble_d(lam * g.nodes),
                              tail_tol=math.inf)
    r1 = evaluate("hardy", u1, par)
    r2 = evaluate("hardy", u2, par)
    q1 = r1.lhs / r1.rhs
    q2 = r2.lhs / r2.rhs
    assert abs(q1 - q2) / q1 <= 1e-6


# -- exponential-integrability dichotomy ---------------------------------------

def test_trudinger_moser_dichotomy(ball2_aligned):
    alpha_star = constant("moser_alpha", Params(N=2, p=2.0))
    ks = (10, 100, 1000, 10000)

    sub = []
    sup = []
    for k in ks:
        u = test_family("moser_seq", Params(N=2, p=2.0), ball2_aligned, k=k)
        sub.append(evaluate("trudinger_moser", u,
                            Params(N=2, p=2.0, alpha=0.9 * alpha_star)).lhs)
        sup.append(evaluate("trudinger_moser", u,
                            Params(N=2, p=2.0, alpha=1.1 * alpha_star)).lhs)
    # subcritical: bounded along the sequence (growth <= 10%)
    assert max(sub) <= 1.1 * sub[0]
    # supercritical: unbounded growth, tracking the inner-disk closed form
    # pi k^(alpha/(2 pi) - 2) = pi k^0.2 (ratio 10^0.6 across the k-range)
    assert sup[-1] / sup[0] >= 2.0
    assert all(a < b for a, b in zip(sup, sup[1:]))
    inner = [math.pi * k ** 0.2 for k in ks]
    assert sup[-1] / sup[0] >= 0.5 * inner[-1] / inner[0]
