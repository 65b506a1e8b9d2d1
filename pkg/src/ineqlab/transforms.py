"""Equivalence transformations between radial inequality settings.

Two changes of radius are implemented:

  * ball_to_space: r on B_R mapped to t on (0, inf) by matching the
    fundamental solutions of the p-Laplacian, t = (r^-g - R^-g)^(-1/g) with
    g = (N-p)/(p-1).  It carries the gradient p-energy across unchanged and
    turns the plain potentials into boundary-weighted ones.
  * dim_shift: r on R^m mapped to t on R^N by t = r^((m-p)/(N-p)), trading
    dimension for a power weight; all three transported integrals pick up
    explicit constants.

Both maps are evaluated in log coordinates so they survive exponents of
order 1/(p-1) without overflow.  verify_identities recomputes each
transported integral on both sides by independent quadratures and reports
the relative mismatches.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import DomainError
from .functionals import grad_energy
from .grid import (BALL, WHOLE_SPACE, RadialFn, RadialGrid, derivative_values,
                   volume_integral)
from .specfun import log_sphere_area

BALL_TO_SPACE = "ball_to_space"
DIM_SHIFT = "dim_shift"

_PUSH_SPACE_RMAX = 1e9  # far enough out that the unmapped boundary sliver is ~1e-9


@dataclass(frozen=True)
class TransformSpec:
    """Parameters of one radius transformation."""

    kind: str
    N: int
    p: float
    R: float = 1.0
    m: Optional[int] = None

    def __post_init__(self):
        if self.kind == BALL_TO_SPACE:
            if not (1.0 < self.p < self.N):
                raise DomainError(f"ball_to_space needs 1 < p < N, got p = {self.p}, "
                                  f"N = {self.N}")
            if self.R <= 0.0:
                raise DomainError("ball_to_space needs R > 0")
        elif self.kind == DIM_SHIFT:
            if self.m is None or not (1.0 <= self.p < self.m <= self.N):
                raise DomainError(f"dim_shift needs 1 <= p < m <= N, got p = {self.p}, "
                                  f"m = {self.m}, N = {self.N}")
        else:
            raise DomainError(f"unknown transform kind {self.kind!r}")

    @property
    def gamma(self) -> float:
        """(N-p)/(p-1), the decay rate of the p-Laplacian fundamental solution."""
        return (self.N - self.p) / (self.p - 1.0)

    @property
    def shift_exponent(self) -> float:
        """(m-p)/(N-p) for dim_shift."""
        return (self.m - self.p) / (self.N - self.p)


def _softplus(x):
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def map_radius(spec: TransformSpec, r):
    """Forward map r -> t; strictly increasing, log-domain safe."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("radii must be positive")
    if spec.kind == BALL_TO_SPACE:
        if np.any(r >= spec.R):
            raise DomainError("ball_to_space is defined for r < R")
        g = spec.gamma
        ln_t = np.log(r) - np.log(-np.expm1(g * (np.log(r) - math.log(spec.R)))) / g
        out = np.exp(ln_t)
    else:
        out = np.exp(spec.shift_exponent * np.log(r))
    return float(out) if out.ndim == 0 else out


def inverse_map_radius(spec: TransformSpec, t):
    """Inverse map t -> r."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise DomainError("radii must be positive")
    if spec.kind == BALL_TO_SPACE:
        g = spec.gamma
        ln_r = np.log(t) - _softplus(g * (np.log(t) - math.log(spec.R))) / g
        out = np.exp(ln_r)
    else:
        out = np.exp(np.log(t) / spec.shift_exponent)
    return float(out) if out.ndim == 0 else out


def map_derivative(spec: TransformSpec, r):
    """Closed-form dr/dt evaluated at r (needs p > 1)."""
    r = np.asarray(r, dtype=float)
    if spec.p <= 1.0:
        raise DomainError("dr/dt closed form needs p > 1")
    t = map_radius(spec, r)
    if spec.kind == BALL_TO_SPACE:
        out = (r / t) ** ((spec.N - 1.0) / (spec.p - 1.0))
    else:
        out = (spec.N - spec.p) / (spec.m - spec.p) * \
            (r ** (spec.m - 1.0) / t ** (spec.N - 1.0)) ** (1.0 / (spec.p - 1.0))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# function transport
# ---------------------------------------------------------------------------

def _interp_in_log(source: RadialFn, radii: np.ndarray) -> np.ndarray:
    return np.interp(np.log(radii), source.grid.s, source.values)


def push_function(spec: TransformSpec, u: RadialFn,
                  target: Optional[RadialGrid] = None) -> RadialFn:
    """w(t) = u(r(t)) resampled on the target grid (built when not supplied)."""
    if spec.kind == BALL_TO_SPACE:
        if u.kind != BALL:
            raise DomainError("ball_to_space pushes ball functions")
        if not math.isclose(u.radius, spec.R, rel_tol=1e-12):
            raise DomainError(f"function radius {u.radius} does not match spec R = {spec.R}")
        if target is None:
            # match the source node density in ln r: the unbounded image spans
            # more decades than the ball
            t_min = map_radius(spec, u.grid.r_min)
            span_ratio = math.log(_PUSH_SPACE_RMAX / t_min) / \
                math.log(u.grid.r_max / u.grid.r_min)
            count = min(4 * u.grid.count, int(u.grid.count * span_ratio) + 1)
            target = RadialGrid(spec.N, t_min, _PUSH_SPACE_RMAX, count)
        r_of_t = inverse_map_radius(spec, target.nodes)
        vals = _interp_in_log(u, r_of_t)
        return RadialFn.whole_space(target, vals, tail_tol=math.inf)
    # dim_shift
    if u.kind != WHOLE_SPACE:
        raise DomainError("dim_shift pushes whole-space functions")
    if u.grid.N != spec.m:
        raise DomainError(f"dim_shift source must live in dimension m = {spec.m}, "
                          f"got {u.grid.N}")
    if target is None:
        # a deliberately incommensurate node count: the power map would
        # otherwise send nodes exactly onto nodes and the two quadratures in
        # verify_identities would coincide term by term
        count = int(u.grid.count * 4 / 3) + 1
        target = RadialGrid(spec.N, map_radius(spec, u.grid.r_min),
                            map_radius(spec, u.grid.r_max), count)
    r_of_t = inverse_map_radius(spec, target.nodes)
    vals = _interp_in_log(u, r_of_t)
    return RadialFn.whole_space(target, vals, tail_tol=math.inf)


def pull_function(spec: TransformSpec, w: RadialFn,
                  target: Optional[RadialGrid] = None) -> RadialFn:
    """u(r) = w(t(r)); inverse of push_function up to interpolation error."""
    if w.kind != WHOLE_SPACE or w.grid.N != spec.N:
        raise DomainError("pull_function expects a whole-space function in dimension N")
    if spec.kind == BALL_TO_SPACE:
        if target is None:
            r_min = inverse_map_radius(spec, w.grid.r_min)
            target = RadialGrid(spec.N, r_min, spec.R, w.grid.count)
        t_of_r = np.empty(target.count)
        t_of_r[:-1] = map_radius(spec, target.nodes[:-1])
        t_of_r[-1] = math.inf  # r = R maps to infinity; value is clamped then zeroed
        vals = np.interp(np.log(np.minimum(t_of_r, 1e300)), w.grid.s, w.values)
        return RadialFn.ball(target, vals)
    if target is None:
        target = RadialGrid(spec.m, inverse_map_radius(spec, w.grid.r_min),
                            inverse_map_radius(spec, w.grid.r_max), w.grid.count)
    t_of_r = map_radius(spec, target.nodes)
    vals = np.interp(np.log(t_of_r), w.grid.s, w.values)
    return RadialFn.whole_space(target, vals, tail_tol=math.inf)


# ---------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------

@dataclass
class IdentityCheck:
    name: str
    transformed: float
    original: float

    @property
    def mismatch(self) -> float:
        scale = max(abs(self.transformed), abs(self.original))
        if scale == 0.0:
            return 0.0
        return abs(self.transformed - self.original) / scale


@dataclass
class IdentityReport:
    spec: TransformSpec
    checks: List[IdentityCheck] = field(default_factory=list)

    @property
    def max_mismatch(self) -> float:
        return max((c.mismatch for c in self.checks), default=0.0)

    def check(self, name: str) -> IdentityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _boundary_weight_vals(grid: RadialGrid, R: float, gamma: float) -> np.ndarray:
    return -np.expm1(gamma * (grid.s - math.log(R)))


def verify_identities(spec: TransformSpec, u: RadialFn,
                      target: Optional[RadialGrid] = None) -> IdentityReport:
    """Recompute both sides of every transported integral identity.

    The transformed side is integrated on the pushed function's grid with a
    finite-difference gradient; the original side is integrated on u's own
    grid.  The two quadratures share nothing but the function itself.
    """
    w = push_function(spec, u, target)
    rep = IdentityReport(spec)
    p = spec.p
    if spec.kind == BALL_TO_SPACE:
        N = spec.N
        gamma = spec.gamma
        pstar = N * p / (N - p)
        wb = _boundary_weight_vals(u.grid, spec.R, gamma)

        rep.checks.append(IdentityCheck(
            "gradient", grad_energy(w, p), grad_energy(u, p)))

        lhs_pot = volume_integral(w.grid, np.abs(w.values) ** p * w.grid.nodes ** (-p))
        ratio = np.empty(u.grid.count)
        ratio[:-1] = np.abs(u.values[:-1]) / wb[:-1]
        ratio[-1] = max(2.0 * ratio[-2] - ratio[-3], 0.0)
        rhs_pot = volume_integral(u.grid, ratio ** p * u.grid.nodes ** (-p))
        rep.checks.append(IdentityCheck("hardy_potential", lhs_pot, rhs_pot))

        lhs_crit = volume_integral(w.grid, np.abs(w.values) ** pstar)
        weight_pow = (N - 1.0) * p / (N - p)
        integrand = np.zeros(u.grid.count)
        ok = (np.abs(u.values) > 0.0) & (wb > 0.0)
        integrand[ok] = np.abs(u.values[ok]) ** pstar * wb[ok] ** (-weight_pow)
        rhs_crit = volume_integral(u.grid, integrand)
        rep.checks.append(IdentityCheck("critical_norm", lhs_crit, rhs_crit))
        return rep

    # dim_shift
    N, m = spec.N, spec.m
    log_omega_ratio = log_sphere_area(N) - log_sphere_area(m)
    factor_grad = math.exp(log_omega_ratio + (p - 1.0) * math.log((N - p) / (m - p)))
    factor_norm = math.exp(log_omega_ratio + math.log((m - p) / (N - p)))
    q_exp = N * p / (N - p)
    weight_pow = (N - m) * p / (N - p)

    rep.checks.append(IdentityCheck(
        "gradient", grad_energy(w, p), factor_grad * grad_energy(u, p)))

    lhs_norm = volume_integral(w.grid, np.abs(w.values) ** q_exp)
    rhs_norm = factor_norm * volume_integral(
        u.grid, np.abs(u.values) ** q_exp * u.grid.nodes ** (-weight_pow))
    rep.checks.append(IdentityCheck("weighted_critical_norm", lhs_norm, rhs_norm))

    hardy_c_N = ((N - p) / p) ** p
    hardy_c_m = ((m - p) / p) ** p
    lhs_h = hardy_c_N * volume_integral(w.grid, np.abs(w.values) ** p * w.grid.nodes ** (-p))
    rhs_h = factor_grad * hardy_c_m * volume_integral(
        u.grid, np.abs(u.values) ** p * u.grid.nodes ** (-p))
    rep.checks.append(IdentityCheck("hardy_potential", lhs_h, rhs_h))
    return rep


# ---------------------------------------------------------------------------
# tensorization
# ---------------------------------------------------------------------------

@dataclass
class TensorReport:
    ell: int
    norm_mismatch: float
    entropy_mismatch: float
    grad_mismatch: float
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @property
    def max_mismatch(self) -> float:
        return max(self.norm_mismatch, self.entropy_mismatch, self.grad_mismatch)


def _line_extension(u: RadialFn):
    """Even extension of a 1-D radial profile to the full line.

    The per-node weights are the log-substituted trapezoid weights (dx = r ds)
    of each half-line, so the 1-D marginal of the tensor rule coincides with
    the radial quadrature and the product structure is tested exactly.
    """
    r = u.grid.nodes
    wr = u.grid.trapezoid_weights() * r
    x = np.concatenate([-r[::-1], r])
    vals = np.concatenate([u.values[::-1], u.values])
    dv = derivative_values(u)
    dvals = np.concatenate([-dv[::-1], dv])
    w = np.concatenate([wr[::-1], wr])
    return x, vals, dvals, w


def _rel_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def tensor_identity_check(u: RadialFn, ell: int) -> TensorReport:
    """Check the product-function identities by explicit tensor quadrature.

    For f(x) = prod_i u(x^i) on the ell-fold product of R^n (n = 1 here):
    the squared norm multiplies, the entropy and the gradient energy add.
    The product-side quantities are accumulated over the full tensor grid.
    """
    n = u.grid.N
    if n != 1 or ell not in (2, 3):
        raise DomainError("tensor check is implemented for n = 1 with ell in {2, 3}")
    if 2 * u.grid.count > 4096:
        raise DomainError("tensor grid too large; use a coarser radial grid")

    diags: Dict[str, object] = {}
    norm2 = volume_integral(u.grid, u.values ** 2)
    if abs(norm2 - 1.0) > 1e-8:
        diags["warning"] = f"input had unit-norm defect {norm2 - 1.0:.3e}; rescaled"
        u = u.with_values(u.values / math.sqrt(norm2),
                          None if u.deriv_values is None else
                          u.deriv_values / math.sqrt(norm2))

    # 1-D reference quantities on the radial (half-line) quadrature
    ref_norm = volume_integral(u.grid, u.values ** 2)
    v2 = u.values ** 2
    ent = np.zeros_like(v2)
    pos = v2 > 0.0
    ent[pos] = v2[pos] * np.log(v2[pos])
    ref_entropy = volume_integral(u.grid, ent)
    ref_grad = volume_integral(u.grid, derivative_values(u) ** 2)

    x, uv, duv, wl = _line_extension(u)
    A = uv ** 2                     # |u|^2 on the line
    D = duv ** 2                    # |u'|^2 on the line
    L = np.zeros_like(A)            # ln |u|^2, with 0 * ln 0 handled as 0
    posA = A > 0.0
    L[posA] = np.log(A[posA])
    WA = wl * A
    WD = wl * D

    if ell == 2:
        P = np.outer(WA, WA)
        t_norm = float(np.sum(P))
        Lsum = L[:, None] + L[None, :]
        t_entropy = float(np.sum(P * Lsum))
        PDA = np.outer(WD, WA) + np.outer(WA, WD)
        t_grad = float(np.sum(PDA))
    else:
        P = np.outer(WA, WA)
        Lsum = L[:, None] + L[None, :]
        PDA = np.outer(WD, WA) + np.outer(WA, WD)
        t_norm = 0.0
        t_entropy = 0.0
        t_grad = 0.0
        for k in range(len(x)):
            t_norm += float(np.sum(P * WA[k]))
            t_entropy += float(np.sum(P * WA[k] * (Lsum + L[k])))
            t_grad += float(np.sum(PDA * WA[k] + P * WD[k]))

    diags["tensor_norm"] = t_norm
    diags["tensor_entropy"] = t_entropy
    diags["tensor_grad"] = t_grad
    return TensorReport(
        ell,
        _rel_gap(t_norm, ref_norm ** ell),
        _rel_gap(t_entropy, ell * ref_entropy),
        _rel_gap(t_grad, ell * ref_grad),
        diags,
    )
