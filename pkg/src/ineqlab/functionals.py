"""Left- and right-hand sides of the inequalities, plus built-in test families.

Each evaluate() kind fills an InequalityReport whose lhs already carries the
inequality's own constant (when the sharp constant is known); rhs is always
the gradient energy except for the exponential-integrability report, whose
right side is only known up to an undetermined constant and is therefore
reported through the raw ratio in diagnostics.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .constants import Params, constant, log_sobolev_constant
from .errors import DomainError, InconsistencyError
from .grid import (BALL, WHOLE_SPACE, RadialFn, RadialGrid, derivative_values,
                   log_volume_integral, tail_exponent, volume_integral,
                   weighted_integral, weighted_q_norm)
from .specfun import log_sphere_area

INEQUALITY_KINDS = (
    "hardy",
    "sobolev",
    "trudinger_moser",
    "critical_hardy",
    "alvino",
    "log_sobolev",
    "improved_sobolev",
    "improved_hardy",
    "lower_dim",
    "q_norm_bound",
)

FAMILY_KINDS = ("cone", "talenti_bubble", "moser_seq", "hardy_seq", "log_power", "gaussian")

_BALL_ONLY = {"trudinger_moser", "critical_hardy", "alvino", "improved_sobolev",
              "improved_hardy"}


@dataclass
class InequalityReport:
    kind: str
    params: Params
    lhs: float
    rhs: float
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @property
    def deficit(self) -> float:
        return self.rhs - self.lhs


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

def smoothstep(x):
    """Quintic smoothstep: 0 below 0, 1 above 1, C^2 joins at both ends."""
    x = np.clip(x, 0.0, 1.0)
    return x ** 3 * (10.0 + x * (-15.0 + 6.0 * x))


def smoothstep_deriv(x):
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = 30.0 * xi ** 2 * (1.0 - xi) ** 2
    return out


def grad_energy(u: RadialFn, p: float) -> float:
    """omega int |du/dr|^p r^(N-1) dr, using analytic derivatives when attached."""
    dv = derivative_values(u)
    return volume_integral(u.grid, np.abs(dv) ** p)


def _boundary_weight(grid: RadialGrid, R: float, gamma: float) -> np.ndarray:
    """1 - (r/R)^gamma, computed as -expm1(gamma ln(r/R)) for edge accuracy."""
    return -np.expm1(gamma * (grid.s - math.log(R)))


def _cancelled_boundary_ratio(u: RadialFn, gamma: float) -> np.ndarray:
    """|u| / (1 - (r/R)^gamma) with the 0/0 outer node linearly extrapolated in s."""
    wb = _boundary_weight(u.grid, u.radius, gamma)
    q = np.empty_like(wb)
    q[:-1] = np.abs(u.values[:-1]) / wb[:-1]
    q[-1] = max(2.0 * q[-2] - q[-3], 0.0)
    return q


def _require_kind(u: RadialFn, kind: str) -> None:
    if kind in _BALL_ONLY and u.kind != BALL:
        raise DomainError(f"{kind} requires a compactly supported ball function")


def _attach_tail(report: InequalityReport, u: RadialFn) -> None:
    if u.kind == WHOLE_SPACE:
        report.diagnostics["tail_exponent"] = tail_exponent(u)


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def evaluate(kind: str, u: RadialFn, params: Params) -> InequalityReport:
    """Evaluate both sides of the named inequality for the radial function u."""
    if kind not in INEQUALITY_KINDS:
        raise DomainError(f"unknown inequality kind {kind!r}")
    _require_kind(u, kind)
    if params.N != u.grid.N and kind not in ("lower_dim", "log_sobolev"):
        raise DomainError(f"params.N = {params.N} does not match grid dimension {u.grid.N}")
    return _DISPATCH[kind](u, params)


def _eval_hardy(u: RadialFn, params: Params) -> InequalityReport:
    params.require_subcritical()
    p = params.p
    raw = weighted_integral(u.with_values(np.abs(u.values) ** p), -p)
    c = constant("hardy", params)
    rep = InequalityReport("hardy", params, c * raw, grad_energy(u, p),
                           {"raw_integral": raw, "constant": c})
    _attach_tail(rep, u)
    return rep


def _eval_sobolev(u: RadialFn, params: Params) -> InequalityReport:
    params.require_subcritical()
    p = params.p
    pstar = constant("critical_exponent", params)
    norm = weighted_q_norm(u, pstar)
    c = constant("sobolev", params)
    rep = InequalityReport("sobolev", params, c * norm ** p, grad_energy(u, p),
                           {"critical_norm": norm, "constant": c,
                            "critical_exponent": pstar})
    _attach_tail(rep, u)
    return rep


def _eval_trudinger_moser(u: RadialFn, params: Params) -> InequalityReport:
    N = params.N
    alpha = params.alpha
    if alpha is None or alpha <= 0.0:
        raise DomainError("exponential functional needs alpha > 0")
    gn = grad_energy(u, N) ** (1.0 / N)
    if gn == 0.0:
        raise DomainError("exponential functional needs a nonzero gradient norm")
    expo = alpha * (np.abs(u.values) / gn) ** (N / (N - 1.0))
    with np.errstate(over="ignore"):
        integrand = np.exp(expo)
    lhs = volume_integral(u.grid, integrand)
    measure = u.domain_measure
    c_est = lhs / measure
    return InequalityReport("trudinger_moser", params, lhs, c_est * measure,
                            {"constant_estimate": c_est, "domain_measure": measure,
                             "grad_norm": gn, "max_exponent": float(np.max(expo))})


def _eval_critical_hardy(u: RadialFn, params: Params) -> InequalityReport:
    N = params.N
    if N < 2:
        raise DomainError("critical Hardy needs N >= 2")
    a = params.a
    beta = params.beta if params.beta is not None else float(N)
    if a < 1.0:
        raise DomainError(f"need a >= 1, got a = {a}")
    raw = weighted_integral(u.with_values(np.abs(u.values) ** N), -float(N),
                            (a, beta, u.radius))
    diags: Dict[str, object] = {"raw_integral": raw, "a": a, "beta": beta}
    sharp = (a == 1.0 and beta == float(N))
    if sharp:
        c = constant("critical_hardy", params)
        lhs = c * raw
        diags["constant"] = c
    else:
        # only the sharp boundary-singular case carries a known constant
        lhs = raw
        diags["constant"] = None
        if a == 1.0:
            diags["warning"] = ("a = 1 with beta != N is outside the proven range of "
                                "the interior-singularity construction")
    return InequalityReport("critical_hardy", params, lhs, grad_energy(u, N), diags)


def _eval_alvino(u: RadialFn, params: Params) -> InequalityReport:
    N = params.N
    sigma = math.log(u.radius) - u.grid.s
    mask = sigma >= 1e-12
    ratio = np.zeros_like(sigma)
    ratio[mask] = np.abs(u.values[mask]) / sigma[mask] ** ((N - 1.0) / N)
    idx = int(np.argmax(ratio))
    sup = float(ratio[idx])
    omega = u.grid.omega
    return InequalityReport("alvino", params, omega * sup ** N, grad_energy(u, N),
                            {"sup_ratio": sup, "sup_radius": float(u.grid.nodes[idx]),
                             "constant": omega})


def _eval_log_sobolev(u: RadialFn, params: Params) -> InequalityReport:
    n = params.n if params.n is not None else u.grid.N
    if n != u.grid.N:
        raise DomainError(f"entropy inequality in dimension n = {n} needs a grid of "
                          f"matching dimension, got {u.grid.N}")
    norm2 = volume_integral(u.grid, u.values ** 2)
    if norm2 <= 0.0:
        raise DomainError("entropy inequality needs a nonzero function")
    scale = 1.0 / math.sqrt(norm2)
    v = u.values * scale
    dv = derivative_values(u) * scale
    v2 = v ** 2
    ent = np.zeros_like(v2)
    pos = v2 > 0.0
    ent[pos] = v2[pos] * np.log(v2[pos])
    lhs = volume_integral(u.grid, ent)
    grad = volume_integral(u.grid, dv ** 2)
    rhs = 0.5 * n * math.log(2.0 / (math.pi * math.e * n) * grad)
    diags = {"normalization_scale": scale, "grad_energy": grad, "n": n}
    if abs(norm2 - 1.0) > 1e-8:
        diags["warning"] = f"input had unit-norm defect {norm2 - 1.0:.3e}; rescaled internally"
    return InequalityReport("log_sobolev", params, lhs, rhs, diags)


def _eval_improved_sobolev(u: RadialFn, params: Params) -> InequalityReport:
    params.require_subcritical()
    N, p = params.N, params.p
    if p <= 1.0:
        raise DomainError("the boundary-weight transform needs p > 1")
    gamma = (N - p) / (p - 1.0)
    pstar = N * p / (N - p)
    weight_pow = (N - 1.0) * p / (N - p)
    wb = _boundary_weight(u.grid, u.radius, gamma)
    av = np.abs(u.values)
    log_int = np.full(u.grid.count, -math.inf)
    ok = (av > 0.0) & (wb > 0.0)
    log_int[ok] = pstar * np.log(av[ok]) - weight_pow * np.log(wb[ok])
    log_raw = log_volume_integral(u.grid, log_int)
    log_lhs = log_sobolev_constant(N, p) + (p / pstar) * log_raw
    lhs = math.exp(log_lhs) if log_lhs < 700.0 else math.inf
    return InequalityReport("improved_sobolev", params, lhs, grad_energy(u, p),
                            {"log_raw_integral": log_raw, "gamma": gamma,
                             "critical_exponent": pstar})


def _eval_improved_hardy(u: RadialFn, params: Params) -> InequalityReport:
    params.require_subcritical()
    N, p = params.N, params.p
    if p <= 1.0:
        raise DomainError("the boundary-weight transform needs p > 1")
    gamma = (N - p) / (p - 1.0)
    q = _cancelled_boundary_ratio(u, gamma)
    raw = volume_integral(u.grid, q ** p * u.grid.nodes ** (-p), check_blowup=True)
    c = constant("hardy", params)
    return InequalityReport("improved_hardy", params, c * raw, grad_energy(u, p),
                            {"raw_integral": raw, "constant": c, "gamma": gamma})


def _eval_lower_dim(u: RadialFn, params: Params) -> InequalityReport:
    N, p, m = params.N, params.p, params.m
    if m is None or m != u.grid.N:
        raise DomainError("lower-dimensional inequality needs params.m equal to the "
                          "grid dimension of u")
    if not (1.0 <= p < m <= N):
        raise DomainError(f"need 1 <= p < m <= N, got p = {p}, m = {m}, N = {N}")
    q_exp = N * p / (N - p)
    weight = -(N - m) * p / (N - p)
    norm = weighted_q_norm(u, q_exp, power=weight)
    coeff = constant("lower_dim_coeff", params)
    rep = InequalityReport("lower_dim", params, coeff * norm ** p, grad_energy(u, p),
                           {"coefficient": coeff, "weighted_norm": norm,
                            "norm_exponent": q_exp, "weight_power": weight})
    _attach_tail(rep, u)
    return rep


def _eval_q_norm_bound(u: RadialFn, params: Params) -> InequalityReport:
    N = params.N
    q = params.q
    if q is None or q <= N:
        raise DomainError(f"the high-norm bound needs q > N, got q = {q}")
    gn = grad_energy(u, N) ** (1.0 / N)
    lhs = weighted_q_norm(u, q)
    measure = u.domain_measure
    rhs = q ** ((N - 1.0) / N - 1.0 / q) * measure ** (1.0 / q) * gn
    ratio = lhs / rhs if rhs > 0.0 else math.inf
    return InequalityReport("q_norm_bound", params, lhs, rhs,
                            {"ratio": ratio, "grad_norm": gn, "q": q})


_DISPATCH = {
    "hardy": _eval_hardy,
    "sobolev": _eval_sobolev,
    "trudinger_moser": _eval_trudinger_moser,
    "critical_hardy": _eval_critical_hardy,
    "alvino": _eval_alvino,
    "log_sobolev": _eval_log_sobolev,
    "improved_sobolev": _eval_improved_sobolev,
    "improved_hardy": _eval_improved_hardy,
    "lower_dim": _eval_lower_dim,
    "q_norm_bound": _eval_q_norm_bound,
}


# ---------------------------------------------------------------------------
# pointwise bound
# ---------------------------------------------------------------------------

def radial_lemma_margin(u: RadialFn) -> float:
    """min over nodes of [omega^(-1/N) |grad u|_N (ln R/r)^((N-1)/N) - |u(r)|].

    A nonnegative margin certifies the pointwise bound numerically.  The
    normalization factor omega^(-1/N) comes out of the Hoelder derivation.
    """
    if u.kind != BALL:
        raise DomainError("the pointwise bound applies to ball functions")
    N = u.grid.N
    gn = grad_energy(u, N) ** (1.0 / N)
    if gn == 0.0:
        if float(np.max(np.abs(u.values))) > 0.0:
            raise InconsistencyError("zero gradient norm for a nonzero function")
        return 0.0
    sigma = np.clip(math.log(u.radius) - u.grid.s, 0.0, None)
    bound = math.exp(-log_sphere_area(N) / N) * gn * sigma ** ((N - 1.0) / N)
    return float(np.min(bound - np.abs(u.values)))


# ---------------------------------------------------------------------------
# built-in test families
# ---------------------------------------------------------------------------

def _cutoff(grid: RadialGrid, R: float):
    """C^2 cutoff: 1 on [0, R/2], quintic descent to 0 at R; returns (eta, eta')."""
    x = (grid.nodes - 0.5 * R) / (0.5 * R)
    eta = 1.0 - smoothstep(x)
    deta = -smoothstep_deriv(x) * (2.0 / R)
    return eta, deta


def test_family(kind: str, params: Params, grid: RadialGrid,
                k: Optional[int] = None, eps: Optional[float] = None,
                theta: Optional[float] = None, sigma: Optional[float] = None) -> RadialFn:
    """Construct a named test profile on the given grid.

    cone, moser_seq(k), hardy_seq(eps), log_power(theta) live on the ball
    B_R with R = grid.r_max; talenti_bubble and gaussian(sigma) live on the
    whole space.  Analytic derivative samples are attached throughout.
    """
    r = grid.nodes
    N = grid.N
    if kind == "cone":
        R = grid.r_max
        vals = np.clip(1.0 - r / R, 0.0, None)
        # interior-limit slope at the boundary node: the energy integral runs
        # over the open ball
        dvals = np.full_like(vals, -1.0 / R)
        return RadialFn.ball(grid, vals, dvals)

    if kind == "talenti_bubble":
        p = params.p
        if not (1.0 < p < N):
            raise DomainError(f"bubble profile needs 1 < p < N, got p = {p}, N = {N}")
        pp = p / (p - 1.0)
        expo = (N - p) / p
        base = 1.0 + r ** pp
        vals = base ** (-expo)
        dvals = -expo * base ** (-expo - 1.0) * pp * r ** (pp - 1.0)
        return RadialFn.whole_space(grid, vals, dvals)

    if kind == "moser_seq":
        if k is None or k < 2:
            raise DomainError(f"concentration profile needs integer k >= 2, got {k}")
        R = grid.r_max
        lnk = math.log(k)
        amp = math.exp(-log_sphere_area(N) / N)
        inner = r <= R / k
        vals = np.where(inner, amp * lnk ** ((N - 1.0) / N),
                        amp * np.log(R / np.maximum(r, 1e-300)) / lnk ** (1.0 / N))
        vals = np.clip(vals, 0.0, None)
        # the kink node carries the annulus-side slope (interior limit; the
        # small resulting energy overestimate keeps equality margins safe,
        # and the tolerance absorbs 1-ulp node placement)
        dvals = np.where(r < (R / k) * (1.0 - 1e-12), 0.0,
                         -amp / (r * lnk ** (1.0 / N)))
        return RadialFn.ball(grid, vals, dvals)

    if kind == "hardy_seq":
        p = params.p
        lam_max = (N - p) / p
        if eps is None or not (0.0 < eps < lam_max):
            raise DomainError(f"spike profile needs eps in (0, {lam_max}), got {eps}")
        R = grid.r_max
        lam = lam_max - eps
        eta, deta = _cutoff(grid, R)
        pw = r ** (-lam)
        vals = pw * eta
        dvals = -lam * r ** (-lam - 1.0) * eta + pw * deta
        return RadialFn.ball(grid, vals, dvals)

    if kind == "log_power":
        if theta is None or theta <= 0.0:
            raise DomainError(f"log-power profile needs theta > 0, got {theta}")
        R = grid.r_max
        eta, deta = _cutoff(grid, R)
        sig = np.clip(math.log(R) - grid.s, 0.0, None)
        vals = sig ** theta * eta
        dvals = np.zeros_like(vals)
        pos = sig > 0.0
        dvals[pos] = (-theta * sig[pos] ** (theta - 1.0) / r[pos]) * eta[pos] \
            + sig[pos] ** theta * deta[pos]
        return RadialFn.ball(grid, vals, dvals)

    if kind == "gaussian":
        if sigma is None or sigma <= 0.0:
            raise DomainError(f"gaussian profile needs sigma > 0, got {sigma}")
        raw = np.exp(-r ** 2 / (4.0 * sigma ** 2))
        norm2 = volume_integral(grid, raw ** 2)
        c = 1.0 / math.sqrt(norm2)
        vals = c * raw
        dvals = -r / (2.0 * sigma ** 2) * vals
        return RadialFn.whole_space(grid, vals, dvals)

    raise DomainError(f"unknown test family {kind!r}")
