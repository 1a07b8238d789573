"""Aggregate hybrid VLC-RF sum rate and energy efficiency."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError
from .rates import RateEstimate


@dataclass(frozen=True)
class HybridConfig:
    """LOS availabilities, bandwidths and fixed/transmit power budget.

    ``P_rf_users`` defaults to 0.7 W split equally over ``K_rf`` users.
    """

    beta_vlc: float = 0.5
    beta_rf: float = 0.5
    B_vlc: float = 20e6
    B_rf: float = 20e6
    Q_vlc: float = 4.0
    Q_rf: float = 6.7
    P_rf_users: tuple[float, ...] = field(default_factory=lambda: (0.7 / 4,) * 4)

    def __post_init__(self):
        for name in ("beta_vlc", "beta_rf"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        for name in ("B_vlc", "B_rf"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("Q_vlc", "Q_rf"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        object.__setattr__(self, "P_rf_users", tuple(float(p) for p in self.P_rf_users))
        if any(p < 0 for p in self.P_rf_users):
            raise DomainError("per-user RF powers must be non-negative")

    @classmethod
    def equal_split(cls, K_rf: int, P_total: float = 0.7, **kw) -> "HybridConfig":
        if K_rf < 1:
            raise DomainError("K_rf must be >= 1")
        return cls(P_rf_users=(P_total / K_rf,) * K_rf, **kw)

    @property
    def total_power(self) -> float:
        return self.Q_vlc + self.Q_rf + sum(self.P_rf_users)


@dataclass(frozen=True)
class HybridRate:
    """A rate in bit/s with its propagated Monte Carlo standard error."""

    value: float
    std_error: float = 0.0


def _as_pair(r):
    if isinstance(r, RateEstimate):
        return r.sum_rate, r.std_error
    return float(r), 0.0


def hybrid_sum_rate(h: HybridConfig, r_vlc, r_rf) -> HybridRate:
    """``B_rf beta_rf R_rf + B_vlc beta_vlc R_vlc`` in bit/s.

    Rates are RateEstimates or plain floats in bit/s/Hz.
    """
    v, sv = _as_pair(r_vlc)
    f, sf = _as_pair(r_rf)
    if v < 0 or f < 0:
        raise DomainError("rate estimates must be non-negative")
    a, b = h.B_vlc * h.beta_vlc, h.B_rf * h.beta_rf
    return HybridRate(a * v + b * f, math.hypot(a * sv, b * sf))


def energy_efficiency(h: HybridConfig, r_sum) -> HybridRate:
    """Bits per joule: hybrid sum rate over total consumed power."""
    denom = h.total_power
    if not denom > 0:
        raise DomainError("total power consumption must be positive")
    if isinstance(r_sum, HybridRate):
        return HybridRate(r_sum.value / denom, r_sum.std_error / denom)
    return HybridRate(float(r_sum) / denom, 0.0)


def vlc_only_energy_efficiency(h: HybridConfig, r_vlc) -> HybridRate:
    """Standalone VLC: ``B_vlc beta_vlc R_vlc / Q_vlc``; RF hardware is not charged."""
    if not h.Q_vlc > 0:
        raise DomainError("Q_vlc must be positive for the standalone VLC scheme")
    v, sv = _as_pair(r_vlc)
    if v < 0:
        raise DomainError("rate estimates must be non-negative")
    a = h.B_vlc * h.beta_vlc / h.Q_vlc
    return HybridRate(a * v, a * sv)
