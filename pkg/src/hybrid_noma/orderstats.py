"""Distribution of the squared VLC gain for users uniform on the cell disc.

With ``C = Xi (m+1) L^(m+1)`` the squared gain is ``t = C^2 / (r^2 + L^2)^(m+3)``
and ``r^2`` is uniform on ``[0, r_e^2]``. Pushing that law through the gain map
gives, on ``[lambda_min, lambda_max]``,

    F(t) = 1 + L^2/r_e^2 - W t^(-1/(m+3))
    f(t) = W / (m+3) * t^(-1/(m+3) - 1)

where ``W = C^(2/(m+3)) / r_e^2``. Note the ``1/(m+3)`` exponent in both the
CDF and the density; the ``2/(m+3)`` variant of the density does not
integrate to one.

Rank ``k = 1`` is the weakest user.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import VlcApConfig, gain_sq_bounds
from .errors import DomainError
from .quadrature import adaptive_quad


@dataclass(frozen=True)
class GainSqDistribution:
    cfg: VlcApConfig
    lam_min: float = field(init=False)
    lam_max: float = field(init=False)
    W: float = field(init=False)
    ell: float = field(init=False)

    def __post_init__(self):
        cfg = self.cfg
        if not cfg.cell_inside_fov():
            raise DomainError(
                f"cell edge at {cfg.edge_incidence_deg:.2f} deg lies outside the "
                f"{cfg.fov_deg} deg field of view"
            )
        lo, hi = gain_sq_bounds(cfg)
        C = cfg.xi * (cfg.m + 1.0) * cfg.height_L ** (cfg.m + 1.0)
        object.__setattr__(self, "lam_min", lo)
        object.__setattr__(self, "lam_max", hi)
        object.__setattr__(self, "W", C ** (2.0 / (cfg.m + 3.0)) / cfg.cell_radius_re ** 2)
        object.__setattr__(self, "ell", cfg.height_L ** 2 / cfg.cell_radius_re ** 2)

    @property
    def shape_exp(self) -> float:
        return 1.0 / (self.cfg.m + 3.0)

    @property
    def support(self) -> tuple[float, float]:
        return self.lam_min, self.lam_max

    def radius_of(self, t):
        """Radius at which the squared gain equals ``t``."""
        cfg = self.cfg
        C = cfg.xi * (cfg.m + 1.0) * cfg.height_L ** (cfg.m + 1.0)
        r2 = (C * C / np.asarray(t, dtype=float)) ** self.shape_exp - cfg.height_L ** 2
        return np.sqrt(np.maximum(r2, 0.0))


def gain_sq_pdf(dist: GainSqDistribution, t):
    """Density of the squared gain; zero outside the support."""
    t = np.asarray(t, dtype=float)
    inside = (t >= dist.lam_min) & (t <= dist.lam_max)
    safe = np.where(inside, t, dist.lam_max)
    val = dist.W * dist.shape_exp * safe ** (-dist.shape_exp - 1.0)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def gain_sq_cdf(dist: GainSqDistribution, t):
    """CDF of the squared gain, clamped to [0, 1] outside the support."""
    t = np.asarray(t, dtype=float)
    safe = np.clip(t, dist.lam_min, dist.lam_max)
    val = 1.0 + dist.ell - dist.W * safe ** (-dist.shape_exp)
    val = np.where(t <= dist.lam_min, 0.0, np.where(t >= dist.lam_max, 1.0, np.clip(val, 0.0, 1.0)))
    return float(val) if val.ndim == 0 else val


def _check_rank(k, K):
    if not (1 <= k <= K) or int(k) != k or int(K) != K:
        raise DomainError(f"rank k={k} must satisfy 1 <= k <= K={K}")


def _order_log_coef(k, K):
    return math.lgamma(K + 1) - math.lgamma(k) - math.lgamma(K - k + 1)


def ordered_gain_sq_pdf(dist: GainSqDistribution, k: int, K: int, t):
    """Density of the k-th smallest of K i.i.d. squared gains."""
    _check_rank(k, K)
    f = np.asarray(gain_sq_pdf(dist, t))
    F = np.asarray(gain_sq_cdf(dist, t))
    coef = math.exp(_order_log_coef(k, K))
    out = coef * f * F ** (k - 1) * (1.0 - F) ** (K - k)
    return float(out) if out.ndim == 0 else out


def expect_over_ordered(
    dist: GainSqDistribution,
    k: int,
    K: int,
    integrand: Callable[[np.ndarray], np.ndarray],
    rtol: float = 1e-8,
) -> float:
    """``E[integrand(T_(k))]`` for the k-th order statistic, by quadrature in ``ln t``."""
    _check_rank(k, K)

    def g(u):
        t = np.exp(u)
        return integrand(t) * ordered_gain_sq_pdf(dist, k, K, t) * t

    return adaptive_quad(g, math.log(dist.lam_min), math.log(dist.lam_max), rtol=rtol * 1e-2)
