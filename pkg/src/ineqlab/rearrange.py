"""Decreasing rearrangement and Lorentz-Zygmund quasi-norms.

The rearrangement is computed from level-set measures: a descending scan
over the sampled values of |u|, with piecewise-linear (in ln r) root finding
for the super-level boundaries.  Plateaus of |u| produce jumps of u*, which
are represented by duplicated measure nodes so the rearranged graph stays a
faithful step curve.
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import DomainError
from .grid import BALL, RadialFn

OVERFLOW_GUARD = 1e300
_SCAN_CHUNK = 256


@dataclass(frozen=True)
class LZIndex:
    """Indices (p, q, r) of the quasi-norm scale; p and/or q may be math.inf."""

    p: float
    q: float
    r: float

    def validate(self) -> None:
        if not (self.p > 0.0):
            raise DomainError(f"index p must be positive (or inf), got {self.p}")
        if not (self.q >= 1.0):
            raise DomainError(f"index q must be >= 1 (or inf), got {self.q}")
        if not math.isfinite(self.r):
            raise DomainError(f"index r must be finite, got {self.r}")


@dataclass(frozen=True)
class RearrangedFn:
    """Nonincreasing rearrangement sampled at nondecreasing measures t."""

    t_nodes: np.ndarray
    values: np.ndarray

    def at(self, t):
        """Piecewise-linear evaluation; duplicated t-nodes encode jumps."""
        return np.interp(t, self.t_nodes, self.values)

    @property
    def total_measure(self) -> float:
        return float(self.t_nodes[-1])


def _superlevel_measures(u: RadialFn, taus: np.ndarray, strict: bool) -> np.ndarray:
    """|{|u| > tau}| (or >= tau) for a batch of thresholds, linear-in-s roots."""
    grid = u.grid
    s = grid.s
    v = np.abs(u.values)
    rN = np.exp(grid.N * s)
    cell = rN[1:] - rN[:-1]
    lo, hi = v[:-1], v[1:]
    dv = hi - lo
    cmp = np.greater if strict else np.greater_equal
    out = np.zeros(len(taus))
    for start in range(0, len(taus), _SCAN_CHUNK):
        tb = taus[start:start + _SCAN_CHUNK, None]
        above = cmp(v[None, :], tb)
        both = above[:, :-1] & above[:, 1:]
        enter = above[:, :-1] & ~above[:, 1:]
        leave = ~above[:, :-1] & above[:, 1:]
        acc = both @ cell
        partial = enter | leave
        if np.any(partial):
            with np.errstate(divide="ignore", invalid="ignore"):
                frac = np.where(dv[None, :] != 0.0, (tb - lo[None, :]) / dv[None, :], 0.5)
            frac = np.clip(frac, 0.0, 1.0)
            s_cross = s[:-1][None, :] + frac * (s[1:] - s[:-1])[None, :]
            rN_cross = np.exp(grid.N * s_cross)
            acc += np.sum(np.where(enter, rN_cross - rN[:-1][None, :], 0.0), axis=1)
            acc += np.sum(np.where(leave, rN[1:][None, :] - rN_cross, 0.0), axis=1)
        # the core ball (0, r_min) follows the innermost sample
        acc += np.where(above[:, 0], rN[0], 0.0)
        out[start:start + _SCAN_CHUNK] = acc
    return grid.omega / grid.N * out


def decreasing_rearrangement(u: RadialFn) -> RearrangedFn:
    """u*(t) = inf{tau : |{|u| > tau}| <= t}, sampled from a level-set scan.

    Thresholds run over the sampled values of |u| plus their midpoints (the
    midpoints keep the graph resolution tied to the value resolution, not
    only to the node resolution).
    """
    v = np.abs(u.values)
    base = np.unique(v)
    if base.size > 1:
        taus = np.unique(np.concatenate([base, 0.5 * (base[1:] + base[:-1])]))[::-1]
    else:
        taus = base[::-1]
    m_strict = _superlevel_measures(u, taus, strict=True)
    m_closed = _superlevel_measures(u, taus, strict=False)
    t_pts: List[float] = []
    v_pts: List[float] = []
    for tau, ms, mc in zip(taus, m_strict, m_closed):
        t_pts.append(float(ms))
        v_pts.append(float(tau))
        if mc > ms * (1.0 + 1e-12) + 1e-300:
            # plateau at level tau: duplicated node marks the jump
            t_pts.append(float(mc))
            v_pts.append(float(tau))
    total = u.domain_measure
    if v_pts[-1] > 0.0 or t_pts[-1] < total:
        # close the graph: u* vanishes at (and beyond) the domain measure
        t_pts.append(max(total, t_pts[-1]))
        v_pts.append(0.0)
    t = np.asarray(t_pts)
    vals = np.asarray(v_pts)
    order = np.argsort(t, kind="stable")
    t = t[order]
    vals = np.minimum.accumulate(vals[order])        # nonincreasing under ties
    return RearrangedFn(t, vals)


def _log_t_grid(star: RearrangedFn, omega_measure: float, count: int = 8192) -> np.ndarray:
    positive = star.t_nodes[star.t_nodes > 0.0]
    t_lo = omega_measure * 1e-12
    if positive.size:
        t_lo = min(t_lo, float(positive[0]))
    # stay left of the exact domain measure: the graph may jump to 0 there,
    # and the integral/sup sees the left-continuous version
    return np.geomspace(t_lo, omega_measure * (1.0 - 1e-12), count)


def lz_quasinorm(u: RadialFn, idx: LZIndex, omega_measure: float = None) -> float:
    """Quasi-norm of u in the scale L^{p,q}(log L)^r over a domain of measure |Omega|.

    q < inf:  (int_0^|Omega| s^(q/p - 1) (e + |ln s|)^(rq) u*(s)^q ds)^(1/q),
    with the convention s^(q/p - 1) == s^(-1) when p = inf.
    q = inf:  sup_s s^(1/p) (e + |ln s|)^r u*(s), with s^(1/p) == 1 when p = inf.
    The integral runs over ln s; math.inf is returned as an overflow sentinel.
    """
    idx.validate()
    if omega_measure is None:
        omega_measure = u.domain_measure
    if omega_measure <= 0.0:
        raise DomainError("domain measure must be positive")
    star = decreasing_rearrangement(u)
    if float(np.max(star.values)) == 0.0:
        return 0.0

    t = _log_t_grid(star, omega_measure)
    vals = star.at(t)
    lam = np.log(t)

    if math.isinf(idx.q):
        logfac = (math.e + np.abs(lam)) ** idx.r
        tfac = np.ones_like(t) if math.isinf(idx.p) else t ** (1.0 / idx.p)
        out = float(np.max(tfac * logfac * vals))
        return math.inf if out > OVERFLOW_GUARD else out

    # in lam = ln s the integrand is e^(lam q/p) (e + |lam|)^(rq) u*^q
    # (the s^-1 convention for p = inf makes the exponential factor 1)
    with np.errstate(divide="ignore"):
        log_core = np.where(vals > 0.0, idx.q * np.log(np.maximum(vals, 1e-320)), -math.inf)
    slope = 0.0 if math.isinf(idx.p) else idx.q / idx.p
    log_int = log_core + slope * lam + idx.r * idx.q * np.log(math.e + np.abs(lam))
    w = np.empty_like(lam)
    w[1:-1] = 0.5 * (lam[2:] - lam[:-2])
    w[0] = 0.5 * (lam[1] - lam[0])
    w[-1] = 0.5 * (lam[-1] - lam[-2])
    log_terms = log_int + np.log(w)
    m = float(np.max(log_terms))
    if m == -math.inf:
        return 0.0
    log_total = m + math.log(float(np.sum(np.exp(log_terms - m))))
    if log_total / idx.q > math.log(OVERFLOW_GUARD):
        return math.inf
    return math.exp(log_total / idx.q)


@dataclass
class ChainRecord:
    """Finiteness record along the critical-space embedding chain."""

    indices: Tuple[LZIndex, LZIndex, LZIndex]
    values: Tuple[float, float, float]

    @property
    def finite_flags(self) -> Tuple[bool, bool, bool]:
        return tuple(math.isfinite(v) for v in self.values)

    @property
    def monotone_finiteness(self) -> bool:
        """Once finite along the chain, later spaces must stay finite."""
        seen_finite = False
        for f in self.finite_flags:
            if seen_finite and not f:
                return False
            seen_finite = seen_finite or f
        return True


def embedding_chain_check(u: RadialFn, q: float) -> ChainRecord:
    """Evaluate the three chained quasi-norms for a ball function in W^{1,N}_0.

    Chain: (inf, N, -1) -> (inf, q, -1 + 1/N - 1/q) -> (inf, inf, -1 + 1/N),
    for any q in (N, inf).
    """
    if u.kind != BALL:
        raise DomainError("the embedding chain applies to ball functions")
    N = u.grid.N
    if not (q > N):
        raise DomainError(f"chain exponent must satisfy q > N, got q = {q}")
    idxs = (
        LZIndex(math.inf, float(N), -1.0),
        LZIndex(math.inf, float(q), -1.0 + 1.0 / N - 1.0 / q),
        LZIndex(math.inf, math.inf, -1.0 + 1.0 / N),
    )
    measure = u.domain_measure
    vals = tuple(lz_quasinorm(u, i, measure) for i in idxs)
    return ChainRecord(idxs, vals)
