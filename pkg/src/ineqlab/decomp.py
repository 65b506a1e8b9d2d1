"""Annulus decomposition machinery behind the critical Hardy bound.

A bump g built from quintic smoothsteps tiles the line, Sum_k g(t - k) = 1,
and phi_k(r) = g(ln(1/r) - k)^(1/N) gives a radial family with
Sum_k phi_k^N = 1 supported on the log-dyadic annuli e^-(k+2) < r < e^-k.
Per-annulus weighted bounds with the weights b_k assemble into the
boundary-shifted critical Hardy inequality; its constant is not known, so
the reports carry raw ratios rather than asserted deficits.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Tuple, Union

import numpy as np

from .constants import Params
from .errors import DomainError, InconsistencyError
from .functionals import InequalityReport, smoothstep, smoothstep_deriv
from .grid import BALL, RadialFn, derivative_values, volume_integral, weighted_integral

EXP_DECAY = "exp_decay"
_SERIES_TERMS = 10 ** 4


def bump(t):
    """Partition bump: rises S on [0,1], falls 1-S on [1,2], zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    rise = (t > 0.0) & (t < 1.0)
    fall = (t >= 1.0) & (t < 2.0)
    out[rise] = smoothstep(t[rise])
    out[fall] = 1.0 - smoothstep(t[fall] - 1.0)
    return out


def bump_deriv(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    rise = (t > 0.0) & (t < 1.0)
    fall = (t >= 1.0) & (t < 2.0)
    out[rise] = smoothstep_deriv(t[rise])
    out[fall] = -smoothstep_deriv(t[fall] - 1.0)
    return out


@dataclass(frozen=True)
class Partition:
    """Radial partition with Sum_k phi_k(r)^N = 1 on (0, 1)."""

    N: int

    def phi(self, k: int, r) -> np.ndarray:
        """phi_k(r) = g(ln(1/r) - k)^(1/N), supported on (e^-(k+2), e^-k)."""
        r = np.asarray(r, dtype=float)
        return bump(-np.log(r) - k) ** (1.0 / self.N)

    def grad_phi(self, k: int, r) -> np.ndarray:
        """d phi_k / dr by the chain rule on the analytic bump."""
        r = np.asarray(r, dtype=float)
        t = -np.log(r) - k
        g = bump(t)
        gp = bump_deriv(t)
        out = np.zeros_like(g)
        pos = g > 0.0
        out[pos] = -(1.0 / self.N) * g[pos] ** (1.0 / self.N - 1.0) * gp[pos] / r[pos]
        return out

    def support_window(self, k: int) -> Tuple[float, float]:
        return math.exp(-(k + 2.0)), math.exp(-float(k))

    def contributing_indices(self, r: float) -> List[int]:
        """Indices with phi_k(r) > 0; at most two for any radius."""
        t = -math.log(r)
        lo = int(math.ceil(t - 2.0))
        return [k for k in range(lo, lo + 3) if 0.0 < t - k < 2.0
                and bump(np.array([t - k]))[0] > 0.0]

    def partition_sum(self, r) -> np.ndarray:
        """Sum_k phi_k(r)^N, telescoping to 1 on (0, 1)."""
        r = np.asarray(r, dtype=float)
        t = -np.log(r)
        k0 = np.floor(t - 1.0)
        return bump(t - k0) + bump(t - (k0 + 1.0)) + bump(t - (k0 - 1.0))


def build_partition(N: int) -> Partition:
    if N < 2:
        raise DomainError(f"partition dimension must be >= 2, got {N}")
    return Partition(N)


# ---------------------------------------------------------------------------
# admissibility of the decomposition scale
# ---------------------------------------------------------------------------

FKind = Union[str, Callable[[float], float]]


def _scale_fn(f_kind: FKind) -> Callable[[float], float]:
    if f_kind == EXP_DECAY:
        return lambda t: math.exp(-t)
    if callable(f_kind):
        return f_kind
    raise DomainError(f"unknown decomposition scale {f_kind!r}")


def admissibility_value(f_kind: FKind, N: int, k: int) -> float:
    """(f(k+2) (ln(f(k)/f(k+2)))^(-(N-1)/N))^(1/k) for the scale function f.

    A positive uniform lower bound over k is what keeps the divided
    information from vanishing in the limit.  For f(t) = e^-t the value is
    (e^-(k+2) 2^(-(N-1)/N))^(1/k), computed here in log domain.
    """
    if k < 1:
        raise DomainError(f"index k must be >= 1, got {k}")
    if N < 2:
        raise DomainError(f"dimension must be >= 2, got {N}")
    if f_kind == EXP_DECAY:
        log_val = (-(k + 2.0) - (N - 1.0) / N * math.log(2.0)) / k
        return math.exp(log_val)
    f = _scale_fn(f_kind)
    fk, fk2 = f(float(k)), f(float(k + 2))
    if not (fk > fk2 > 0.0):
        raise DomainError(f"scale function must be positive decreasing: "
                          f"f({k}) = {fk}, f({k + 2}) = {fk2}")
    return (fk2 * math.log(fk / fk2) ** (-(N - 1.0) / N)) ** (1.0 / k)


def ode_margin(f_kind: FKind, C: float, t_range: Tuple[float, float],
               samples: int = 2001) -> float:
    """min over t of f'(t) + C f(t); nonnegative certifies f'(t) >= -C f(t)."""
    if C <= 0.0:
        raise DomainError(f"need C > 0, got {C}")
    lo, hi = t_range
    if not (lo < hi):
        raise DomainError(f"empty t range {t_range!r}")
    t = np.linspace(lo, hi, samples)
    if f_kind == EXP_DECAY:
        vals = np.exp(-t)
        derivs = -vals
    else:
        f = _scale_fn(f_kind)
        vals = np.array([f(x) for x in t])
        h = 1e-6 * max(1.0, hi - lo)
        derivs = np.array([(f(x + h) - f(x - h)) / (2.0 * h) for x in t])
    return float(np.min(derivs + C * vals))


# ---------------------------------------------------------------------------
# per-annulus inequality and assembly
# ---------------------------------------------------------------------------

def annulus_weight(k: int, N: int, beta: float) -> float:
    """Weight b_k: k^(N-beta) for k >= 1, 1 for k in {0, -1}, 0 below."""
    if k >= 1:
        return float(k) ** (N - beta)
    if k in (0, -1):
        return 1.0
    return 0.0


def _localized(u: RadialFn, part: Partition, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """u_k = u phi_k and its derivative (product rule, analytic phi')."""
    r = u.grid.nodes
    phi = part.phi(k, r)
    dphi = part.grad_phi(k, r)
    du = derivative_values(u)
    return u.values * phi, du * phi + u.values * dphi


def annulus_check(u: RadialFn, part: Partition, k: int, a: float,
                  beta: float) -> InequalityReport:
    """Localized weighted bound on the annulus A_k with weight b_k."""
    if u.kind != BALL or not math.isclose(u.radius, 1.0):
        raise DomainError("annulus machinery works on the unit ball")
    if a <= 1.0:
        raise DomainError(f"annulus weight needs a > 1, got a = {a}")
    N = u.grid.N
    uk, duk = _localized(u, part, k)
    if k <= -2 and float(np.max(np.abs(uk))) > 1e-14 * max(1.0, float(np.max(np.abs(u.values)))):
        raise InconsistencyError(f"annulus k = {k} lies outside the unit ball but "
                                 "the localized function is not numerically zero")
    # the shifted log weight is bounded on (0, 1]; truncated annulus pieces
    # must not trip the origin-blowup heuristic
    lhs = weighted_integral(u.with_values(np.abs(uk) ** N), -float(N), (a, beta),
                            check_singularity=False)
    grad = volume_integral(u.grid, np.abs(duk) ** N)
    bk = annulus_weight(k, N, beta)
    rhs = bk * grad
    diags: Dict[str, object] = {
        "b_k": bk, "k": k, "grad_energy": grad,
        "ratio": (lhs / rhs if rhs > 0.0 else (0.0 if lhs == 0.0 else math.inf)),
    }
    if k >= 1:
        # per-annulus subcritical exponent and its Hardy constant, diagnostics only
        pk = N - 1.0 / k
        diags["p_k"] = pk
        diags["hardy_constant_pk"] = ((N - pk) / pk) ** pk
    if beta <= 2.0 * N:
        diags["warning"] = f"beta = {beta} <= 2N; the assembled series does not converge"
    params = Params(N=N, p=float(N), a=a, beta=beta)
    return InequalityReport("annulus", params, lhs, rhs, diags)


def assemble_critical_hardy(u: RadialFn, a: float, beta: float) -> InequalityReport:
    """Direct evaluation of the boundary-shifted critical Hardy integrals.

    lhs integrates |u|^N / (|x|^N ln(a/|x|)^beta) over the unit ball; rhs is
    the gradient N-energy.  Diagnostics mirror the assembly: the
    partition-summed bound Sum_k b_k |grad u_k|_N^N and the truncated series
    tail Sum k^(-1-(beta-2N)).
    """
    if u.kind != BALL or not math.isclose(u.radius, 1.0):
        raise DomainError("assembly works on the unit ball")
    if a <= 1.0:
        raise DomainError(f"assembly needs a > 1, got a = {a}")
    N = u.grid.N
    part = build_partition(N)
    lhs = weighted_integral(u.with_values(np.abs(u.values) ** N), -float(N), (a, beta),
                            check_singularity=False)
    rhs = volume_integral(u.grid, np.abs(derivative_values(u)) ** N)
    k_max = int(math.ceil(-math.log(u.grid.r_min))) + 1
    partition_bound = 0.0
    for k in range(-1, k_max + 1):
        uk, duk = _localized(u, part, k)
        partition_bound += annulus_weight(k, N, beta) * \
            volume_integral(u.grid, np.abs(duk) ** N)
    ks = np.arange(1, _SERIES_TERMS + 1, dtype=float)
    tail = float(np.sum(ks ** (-1.0 - (beta - 2.0 * N))))
    diags: Dict[str, object] = {
        "partition_bound": partition_bound,
        "series_tail": tail,
        "k_max": k_max,
        "ratio": rhs / lhs if lhs > 0.0 else math.inf,
    }
    if beta <= 2.0 * N:
        diags["warning"] = f"beta = {beta} <= 2N; series tail diverges (truncated value shown)"
    params = Params(N=N, p=float(N), a=a, beta=beta)
    return InequalityReport("assembled_critical_hardy", params, lhs, rhs, diags)


def annulus_range(u: RadialFn) -> Iterable[int]:
    """Indices whose support window intersects the sampled radial range."""
    lo = int(math.floor(-math.log(u.grid.r_max))) - 1
    hi = int(math.ceil(-math.log(u.grid.r_min)))
    return range(lo, hi + 1)
