"""Closed-form sharp constants and exponents.

Every Gamma ratio is assembled in log domain before a single final
exponentiation, so the dimension-sweep machinery can push N to 1e4 and
beyond without overflow.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .specfun import log_gamma, log_sphere_area

CONSTANT_KINDS = (
    "hardy",
    "sobolev",
    "critical_exponent",
    "critical_hardy",
    "moser_alpha",
    "logsob",
    "lower_dim_coeff",
)


@dataclass
class Params:
    """Parameter bundle shared by every inequality evaluation.

    N  -- ambient dimension (>= 2 for the geometric inequalities)
    p  -- integrability exponent, p < N in the subcritical regime
    m  -- lower dimension of the dimension-shift transform, p < m <= N
    R  -- ball radius (default 1, the standard normalization)
    a  -- log-weight shift, a >= 1
    beta -- log-weight exponent
    alpha -- exponential-integrability exponent
    n  -- dimension carrying the entropy inequality
    ell -- tensor factor count
    q  -- auxiliary Lebesgue exponent (> N) for the high-norm bound
    """

    N: int = 3
    p: float = 2.0
    m: Optional[int] = None
    R: float = 1.0
    a: float = 1.0
    beta: Optional[float] = None
    alpha: Optional[float] = None
    n: Optional[int] = None
    ell: Optional[int] = None
    q: Optional[float] = None

    def require_subcritical(self) -> None:
        if not (1.0 <= self.p < self.N):
            raise DomainError(f"need 1 <= p < N, got p = {self.p}, N = {self.N}")


def log_sobolev_constant(N: int, p: float) -> float:
    """ln of the sharp subcritical Sobolev constant in dimension N at exponent p.

    The p = 1 factor ((N-p)/(p-1))^(p-1) is taken as its continuity limit 1.
    """
    N = int(N)
    p = float(p)
    if not (1.0 <= p < N):
        raise DomainError(f"Sobolev constant needs 1 <= p < N, got p = {p}, N = {N}")
    out = 0.5 * p * math.log(math.pi) + math.log(N)
    if p > 1.0:
        out += (p - 1.0) * math.log((N - p) / (p - 1.0))
    out += (p / N) * (
        log_gamma(N / p)
        + log_gamma(N + 1.0 - N / p)
        - log_gamma(float(N))
        - log_gamma(1.0 + 0.5 * N)
    )
    return out


def constant(kind: str, params: Params) -> float:
    """Sharp constant / exponent of the named inequality for the given parameters."""
    N = params.N
    p = params.p
    if kind == "hardy":
        params.require_subcritical()
        return ((N - p) / p) ** p
    if kind == "sobolev":
        params.require_subcritical()
        return math.exp(log_sobolev_constant(N, p))
    if kind == "critical_exponent":
        params.require_subcritical()
        return N * p / (N - p)
    if kind == "critical_hardy":
        if N < 2:
            raise DomainError("critical Hardy constant needs N >= 2")
        return ((N - 1.0) / N) ** N
    if kind == "moser_alpha":
        if N < 2:
            raise DomainError("exponential-integrability exponent needs N >= 2")
        return N * math.exp(log_sphere_area(N) / (N - 1.0))
    if kind == "logsob":
        if params.n is None or params.n < 1:
            raise DomainError("entropy constant needs n >= 1")
        return 2.0 / (math.pi * math.e * params.n)
    if kind == "lower_dim_coeff":
        m = params.m
        if m is None or not (1.0 <= p < m <= N):
            raise DomainError(f"lower-dimension coefficient needs 1 <= p < m <= N, "
                              f"got p = {p}, m = {m}, N = {N}")
        log_c = log_sobolev_constant(N, p)
        log_c += (p / N) * (log_sphere_area(m) - log_sphere_area(N))
        log_c += (p - p / N) * math.log((m - p) / (N - p))
        return math.exp(log_c)
    raise DomainError(f"unknown constant kind {kind!r}")
