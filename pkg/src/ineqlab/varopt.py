"""Rayleigh-quotient descent for best-constant estimation.

The quotient numerator and denominator are explicit functions of the node
values (trapezoid sums composed with the discrete radial derivative), so the
descent uses their exact gradients.  Minimization runs on ln(quotient): the
quotient is homogeneous of degree zero in the node values, and the log
damping keeps step sizes meaningful across its scale-free landscape.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .constants import Params
from .errors import DomainError, NumericalError
from .functionals import evaluate, test_family
from .grid import RadialFn, RadialGrid
from .limits import SweepTable

QUOTIENT_KINDS = ("hardy", "sobolev", "critical_hardy")

ARMIJO = 1e-4
MIN_STEP = 1e-14


@dataclass(frozen=True)
class QuotientSpec:
    kind: str
    params: Params
    grid: RadialGrid

    def __post_init__(self):
        if self.kind not in QUOTIENT_KINDS:
            raise DomainError(f"unknown quotient kind {self.kind!r}")
        if self.kind in ("hardy", "sobolev"):
            self.params.require_subcritical()
        if self.grid.N != self.params.N:
            raise DomainError("grid dimension must match params.N")


class DiscreteQuotient:
    """Gradient energy over the kind-specific denominator, on fixed nodes."""

    def __init__(self, spec: QuotientSpec):
        self.spec = spec
        grid = spec.grid
        self.r = grid.nodes
        n = grid.count
        # volume weights: omega * trapezoid(s) * r^N
        self.V = grid.omega * grid.trapezoid_weights() * self.r ** grid.N
        # derivative stencil denominators
        self.c_int = 1.0 / (self.r[2:] - self.r[:-2])
        self.a0 = 1.0 / (-3.0 * self.r[0] + 4.0 * self.r[1] - self.r[2])
        self.b1 = 1.0 / (3.0 * self.r[-1] - 4.0 * self.r[-2] + self.r[-3])
        self.n = n
        p = spec.params.p
        N = spec.params.N
        if spec.kind == "hardy":
            self.p_den = p
            self.den_w = self.V * self.r ** (-p)
        elif spec.kind == "critical_hardy":
            if p != N:
                raise DomainError("critical quotient runs at p = N")
            sigma = math.log(grid.r_max) - grid.s
            w = np.zeros(n)
            pos = sigma > 0.0
            w[pos] = self.r[pos] ** (-float(N)) * sigma[pos] ** (-float(N))
            self.p_den = float(N)
            self.den_w = self.V * w
        else:
            self.p_den = N * p / (N - p)     # critical exponent
            self.den_w = self.V
        self.p = p
        # Descent metric.  The Euclidean gradient is useless here: volume
        # weights span dozens of decades, and the pointwise functional
        # derivative g/V is singular wherever the iterate has a conical kink.
        # Steepest descent is therefore taken in a Sobolev metric built from
        # two symmetric positive pieces: the diagonal map to the functional
        # derivative in the log-radius variable (r^2/V makes the underlying
        # flow uniformly parabolic in s), and a screened-Laplacian smoother
        # (I - tau d^2/ds^2)^(-1) that tames high-frequency spikes.
        m = self.r ** 2 / self.V
        self._m_sqrt = np.sqrt(m / float(np.max(m)))
        tau = 1.0
        freqs = np.pi * np.arange(n + 1) / (grid.step * n)
        self._smooth_mult = 1.0 / (1.0 + tau * freqs ** 2)

    def _smooth(self, rhs: np.ndarray) -> np.ndarray:
        """(I - tau d_ss)^(-1) rhs with reflective ends, via the even FFT
        extension; a symmetric positive operator on the grid."""
        ext = np.concatenate([rhs, rhs[::-1]])
        spec = np.fft.rfft(ext) * self._smooth_mult
        return np.fft.irfft(spec, 2 * self.n)[:self.n]

    def descent_direction(self, g: np.ndarray) -> np.ndarray:
        """-(M^1/2 S M^1/2) g with S, M symmetric positive: always a descent
        direction for the Euclidean gradient g."""
        d = -self._m_sqrt * self._smooth(self._m_sqrt * g)
        d[-1] = 0.0
        return d

    # -- derivative operator and its adjoint ------------------------------

    def deriv(self, v: np.ndarray) -> np.ndarray:
        d = np.empty_like(v)
        d[1:-1] = (v[2:] - v[:-2]) * self.c_int
        d[0] = (4.0 * (v[1] - v[0]) - (v[2] - v[0])) * self.a0
        d[-1] = -(4.0 * (v[-2] - v[-1]) - (v[-3] - v[-1])) * self.b1
        return d

    def deriv_adjoint(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros_like(z)
        core = self.c_int * z[1:-1]
        out[2:] += core
        out[:-2] -= core
        out[0] += -3.0 * self.a0 * z[0]
        out[1] += 4.0 * self.a0 * z[0]
        out[2] += -self.a0 * z[0]
        out[-1] += 3.0 * self.b1 * z[-1]
        out[-2] += -4.0 * self.b1 * z[-1]
        out[-3] += self.b1 * z[-1]
        return out

    # -- numerator / denominator ------------------------------------------

    def numerator(self, v: np.ndarray) -> float:
        return float(np.dot(self.V, np.abs(self.deriv(v)) ** self.p))

    def numerator_grad(self, v: np.ndarray) -> np.ndarray:
        dv = self.deriv(v)
        z = self.V * self.p * np.abs(dv) ** (self.p - 1.0) * np.sign(dv)
        return self.deriv_adjoint(z)

    def denominator(self, v: np.ndarray) -> float:
        raw = float(np.dot(self.den_w, np.abs(v) ** self.p_den))
        if self.spec.kind == "sobolev":
            return raw ** (self.p / self.p_den)
        return raw

    def denominator_grad(self, v: np.ndarray) -> np.ndarray:
        core = self.den_w * self.p_den * np.abs(v) ** (self.p_den - 1.0) * np.sign(v)
        if self.spec.kind == "sobolev":
            raw = float(np.dot(self.den_w, np.abs(v) ** self.p_den))
            return (self.p / self.p_den) * raw ** (self.p / self.p_den - 1.0) * core
        return core

    def value(self, v: np.ndarray) -> float:
        den = self.denominator(v)
        if den <= 0.0:
            raise DomainError("denominator functional vanishes")
        return self.numerator(v) / den

    def log_value(self, v: np.ndarray) -> float:
        return math.log(self.value(v))

    def log_grad(self, v: np.ndarray) -> np.ndarray:
        num = self.numerator(v)
        den = self.denominator(v)
        if den <= 0.0 or num <= 0.0:
            raise DomainError("quotient gradient needs positive functionals")
        g = self.numerator_grad(v) / num - self.denominator_grad(v) / den
        g[-1] = 0.0                     # zero boundary value stays zero
        return g

    def normalized(self, v: np.ndarray) -> np.ndarray:
        v = v.copy()
        v[-1] = 0.0
        den = self.denominator(v)
        if den <= 0.0:
            raise DomainError("cannot normalize: denominator vanishes")
        return v / den ** (1.0 / self.p)


def minimize_rayleigh(spec: QuotientSpec, init: RadialFn, max_iters: int = 5000,
                      tol: float = 1e-8) -> Tuple[float, RadialFn, SweepTable]:
    """Backtracking gradient descent on ln(quotient) from the given initializer.

    Returns (final quotient, minimizer, per-iteration trace).  The trace
    quotient is non-increasing by construction; a step collapse below 1e-14
    ends the run with a converged-by-stall status in the table metadata.
    """
    if init.grid is not spec.grid and init.grid != spec.grid:
        raise DomainError("initializer must live on the spec grid")
    q = DiscreteQuotient(spec)
    v = q.normalized(np.asarray(init.values, dtype=float))
    fv = q.log_value(v)
    rows: List[Tuple[float, ...]] = [(0.0, math.exp(fv), 0.0, 0.0)]
    status = "max_iters"
    step = 1.0
    for it in range(1, max_iters + 1):
        g = q.log_grad(v)
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"non-finite quotient gradient at iteration {it}")
        gnorm = float(np.linalg.norm(g))
        if gnorm == 0.0:
            status = "stationary"
            break
        d = q.descent_direction(g)
        scale = float(np.max(np.abs(d)))
        if scale == 0.0:
            status = "stationary"
            break
        d = d / scale
        slope = float(np.dot(g, d))      # <grad, d> < 0 by SPD preconditioning
        step = min(step * 2.0, 1e3)
        accepted = False
        while step >= MIN_STEP:
            trial = v + step * d
            trial[-1] = 0.0
            try:
                f_trial = q.log_value(trial)
            except DomainError:
                f_trial = math.inf
            if f_trial <= fv + ARMIJO * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            status = "stalled"
            break
        v = q.normalized(trial)
        f_new = q.log_value(v)
        rows.append((float(it), math.exp(f_new), step, gnorm))
        rel_change = abs(f_new - fv)
        fv = f_new
        if rel_change < tol:
            status = "converged"
            break
    table = SweepTable("iter", ("iter", "quotient", "step_size", "grad_norm"), rows,
                       {"status": status, "kind": spec.kind})
    minimizer = RadialFn(spec.grid, v, init.kind, init.radius)
    return math.exp(fv), minimizer, table


# ---------------------------------------------------------------------------
# minimizing sequences for non-attained constants
# ---------------------------------------------------------------------------

def minimizing_sequence_sweep(kind: str, params: Params,
                              eps_list: Sequence[float]) -> SweepTable:
    """Rayleigh quotients along the concentrating families, tabulated vs eps.

    hardy uses the truncated power spikes; critical_hardy uses truncated
    log-power profiles with exponent (N-1)/N - eps.  Quotients decrease as
    eps does and stay above the sharp constant (up to quadrature error).
    """
    if kind not in ("hardy", "critical_hardy"):
        raise DomainError(f"minimizing sequences implemented for hardy / critical_hardy, "
                          f"got {kind!r}")
    from .grid import ball_grid
    grid = ball_grid(params.N, params.R)
    rows = []
    for eps in eps_list:
        if kind == "hardy":
            u = test_family("hardy_seq", params, grid, eps=eps)
            rep = evaluate("hardy", u, params)
        else:
            theta = (params.N - 1.0) / params.N - eps
            if theta <= 0.0:
                raise DomainError(f"eps = {eps} leaves no admissible log exponent")
            u = test_family("log_power", params, grid, theta=theta)
            crit_params = Params(N=params.N, p=float(params.N), R=params.R,
                                 a=1.0, beta=float(params.N))
            rep = evaluate("critical_hardy", u, crit_params)
        raw = rep.diagnostics["raw_integral"]
        rows.append((float(eps), rep.rhs / raw))
    return SweepTable("eps", ("eps", "quotient"), rows, {"kind": kind})
