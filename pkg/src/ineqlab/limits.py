"""Limit studies: exponent sweeps, coefficient asymptotics, decay-rate fits.

Sweeps tabulate one quantity against a monotone parameter list and, where a
closed-form limit exists, also the gap to that limit.  Quantities whose
exponents grow like 1/delta or like N are assembled in log domain and
exponentiated once per row; rows that overflow anyway are tagged with the
math.inf sentinel instead of aborting the sweep.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .constants import Params, constant, log_sobolev_constant
from .errors import DomainError
from .functionals import evaluate
from .grid import RadialFn
from .specfun import log_gamma

SWEEP_KINDS = (
    "sobolev_decay",
    "hardy_decay",
    "lower_dim_coeff",
    "logsob_coeff",
    "improved_hardy_lhs",
    "improved_sobolev_lhs",
    "weight_limit",
)


@dataclass
class SweepTable:
    """Ordered rows of (parameter value, quantities...) plus run metadata."""

    param_name: str
    columns: Tuple[str, ...]
    rows: Sequence[Tuple[float, ...]]
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.rows = [tuple(float(x) for x in row) for row in self.rows]
        params = self.param_values
        if len(params) >= 2:
            d = np.diff(params)
            if not (np.all(d > 0.0) or np.all(d < 0.0)):
                raise DomainError("sweep parameter values must be strictly monotone")

    @property
    def param_values(self) -> np.ndarray:
        return np.asarray([row[0] for row in self.rows])

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.asarray([row[idx] for row in self.rows])


def _logsob_coeff(N: int, n: int) -> float:
    """Pre-limit entropy coefficient 1/(n pi (N-2)) (Gamma(N)/Gamma(N/2))^(2/N)."""
    if N <= 2:
        raise DomainError(f"coefficient needs N > 2, got {N}")
    log_ratio = (2.0 / N) * (log_gamma(float(N)) - log_gamma(N / 2.0))
    return math.exp(log_ratio - math.log(n * math.pi * (N - 2.0)))


def _weight_limit_gap(params: Params, delta: float, r_lo: float) -> float:
    """Max relative gap of the log-domain boundary weights on [r_lo, 0.9 R].

    Compares ln[(1 - (r/R)^g)^((N-1)p/(N-p))] against
    ln[(g ln(R/r))^((N-1)p*/(N-p... the same exponent)], relative to the
    latter; direct powers overflow for small delta, so the comparison is
    made between the log-domain representations.
    """
    N = params.N
    p = N - delta
    if not (1.0 < p < N):
        raise DomainError(f"delta = {delta} leaves no admissible exponent")
    R = params.R
    g = (N - p) / (p - 1.0)
    expo = (N - 1.0) * p / (N - p)
    r = np.geomspace(r_lo, 0.9 * R, 4096)
    sig = np.log(R / r)
    log_a = expo * np.log(-np.expm1(-g * sig))
    log_b = expo * (math.log(g) + np.log(sig))
    denom = np.maximum(np.abs(log_b), 1e-300)
    return float(np.max(np.abs(log_a - log_b) / denom))


def sweep(kind: str, params: Params, values: Sequence[float],
          u: Optional[RadialFn] = None) -> SweepTable:
    """Tabulate the named quantity over the given parameter values."""
    if kind not in SWEEP_KINDS:
        raise DomainError(f"unknown sweep kind {kind!r}")
    vals = [float(v) for v in values]
    if len(vals) < 1:
        raise DomainError("sweep needs at least one parameter value")

    if kind in ("sobolev_decay", "hardy_decay"):
        const_kind = "sobolev" if kind == "sobolev_decay" else "hardy"
        rows = []
        for delta in vals:
            p = params.N - delta
            rows.append((delta, constant(const_kind, Params(N=params.N, p=p))))
        return SweepTable("delta", ("delta", "constant"), rows,
                          {"kind": kind, "N": params.N})

    if kind == "lower_dim_coeff":
        limit = ((params.m - params.p) / params.p) ** params.p
        rows = []
        for N in vals:
            c = constant("lower_dim_coeff",
                         Params(N=int(N), p=params.p, m=params.m))
            rows.append((N, c, abs(c - limit)))
        return SweepTable("N", ("N", "coefficient", "gap_to_limit"), rows,
                          {"kind": kind, "limit": limit, "m": params.m, "p": params.p})

    if kind == "logsob_coeff":
        n = params.n if params.n is not None else 1
        limit = 2.0 / (math.pi * math.e * n)
        rows = []
        for N in vals:
            c = _logsob_coeff(int(N), n)
            rows.append((N, c, abs(c - limit)))
        return SweepTable("N", ("N", "coefficient", "gap_to_limit"), rows,
                          {"kind": kind, "limit": limit, "n": n})

    if kind in ("improved_hardy_lhs", "improved_sobolev_lhs"):
        if u is None:
            raise DomainError(f"{kind} sweep needs a fixed test function")
        N = params.N
        if kind == "improved_hardy_lhs":
            lim_params = Params(N=N, p=float(N), R=params.R, a=1.0, beta=float(N))
            limit = evaluate("critical_hardy", u, lim_params).lhs
            ineq = "improved_hardy"
        else:
            limit = evaluate("alvino", u, Params(N=N, p=float(N), R=params.R)).lhs
            ineq = "improved_sobolev"
        rows = []
        for delta in vals:
            p = N - delta
            try:
                lhs = evaluate(ineq, u, Params(N=N, p=p, R=params.R)).lhs
            except (OverflowError, DomainError):
                lhs = math.inf
            gap = abs(lhs - limit) if math.isfinite(lhs) else math.inf
            rows.append((delta, lhs, gap))
        return SweepTable("delta", ("delta", "lhs", "gap_to_limit"), rows,
                          {"kind": kind, "limit": limit})

    # weight_limit
    if u is not None:
        r_lo = u.grid.r_min
    else:
        r_lo = 1e-6 * params.R
    rows = [(delta, _weight_limit_gap(params, delta, r_lo)) for delta in vals]
    return SweepTable("delta", ("delta", "max_rel_gap"), rows,
                      {"kind": kind, "r_lo": r_lo, "r_hi": 0.9 * params.R})


def fit_decay_exponent(table: SweepTable) -> float:
    """Least-squares slope of ln(value) vs ln(delta) over the smallest decade."""
    delta = table.param_values
    vals = table.column(table.columns[1])
    if len(delta) < 2:
        raise DomainError("decay fit needs at least two rows")
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        raise DomainError("decay fit needs positive finite values")
    d_min = float(np.min(delta))
    sel = delta <= 10.0 * d_min * (1.0 + 1e-12)
    if int(np.sum(sel)) < 2:
        sel = np.argsort(delta)[:2]
    return float(np.polyfit(np.log(delta[sel]), np.log(vals[sel]), 1)[0])


def tm_series_radius(N: int, C_probe: float) -> float:
    """Supremal exponent for which the exponential-series ratio test closes.

    The series sum_k alpha^k C^(Nk/(N-1)) (Nk/(N-1))^(k-1) / k! has ratio
    limit alpha C^(N/(N-1)) e N/(N-1); the radius is its reciprocal in
    alpha.  The closed form is cross-checked against the term ratio at
    k = 1000 before being returned.
    """
    if N < 2:
        raise DomainError(f"series radius needs N >= 2, got {N}")
    if C_probe <= 0.0:
        raise DomainError(f"probe constant must be positive, got {C_probe}")
    radius = (N - 1.0) / (math.e * N * C_probe ** (N / (N - 1.0)))
    emp = empirical_series_radius(N, C_probe, k=1000)
    if abs(emp - radius) / radius > 0.05:
        raise DomainError("ratio-test cross-check failed; closed form and empirical "
                          f"radius differ: {radius} vs {emp}")
    return radius


def _log_series_term(N: int, C_probe: float, log_alpha: float, k: int) -> float:
    kk = float(k)
    return (k * log_alpha + (N * kk / (N - 1.0)) * math.log(C_probe)
            + (kk - 1.0) * math.log(N * kk / (N - 1.0)) - log_gamma(kk + 1.0))


def empirical_series_radius(N: int, C_probe: float, k: int = 1000) -> float:
    """alpha at which the k-th to (k+1)-th term ratio crosses 1."""
    # log(t_{k+1}/t_k) = log(alpha) + log(C^(N/(N-1))) + [k-dependent factor]
    base = _log_series_term(N, C_probe, 0.0, k + 1) - _log_series_term(N, C_probe, 0.0, k)
    return math.exp(-base)
