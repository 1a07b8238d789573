"""VLC line-of-sight gains, RF Rayleigh gains and uniform user placement.

Only the LOS optical path is modelled. Angles of irradiance and incidence
coincide for a ceiling-mounted AP facing down onto an upward-facing
photodetector, so ``cos(phi) = cos(psi) = L / d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


def lambertian_order(semi_angle_deg: float) -> float:
    """Lambertian order ``m = -1 / log2(cos(phi_half))``."""
    if not (0.0 < semi_angle_deg < 90.0):
        raise DomainError(f"semi-angle must lie in (0, 90) degrees, got {semi_angle_deg}")
    return -1.0 / math.log2(math.cos(math.radians(semi_angle_deg)))


@dataclass(frozen=True)
class VlcApConfig:
    """Geometry and receiver front-end of one VLC access point.

    Defaults follow the indoor scenario of the reference set-up (2.15 m
    height, 3.6 m cell radius, 45 degree LED, 1 cm^2 photodiode).
    """

    height_L: float = 2.15
    cell_radius_re: float = 3.6
    semi_angle_deg: float = 45.0
    pd_area_A: float = 1e-4
    responsivity_Rp: float = 0.4
    filter_gain_T: float = 1.0
    fov_deg: float = 60.0
    refractive_index: float = 1.5
    tx_elec_power_Pe: float = 0.25
    noise_psd_N0: float = 1e-21
    bandwidth_B: float = 20e6
    m: float = field(init=False, repr=False)
    xi: float = field(init=False, repr=False)

    def __post_init__(self):
        if not (0.0 < self.fov_deg <= 90.0):
            raise DomainError(f"fov_deg must lie in (0, 90], got {self.fov_deg}")
        for name in ("height_L", "cell_radius_re", "pd_area_A"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        object.__setattr__(self, "m", lambertian_order(self.semi_angle_deg))
        g = concentrator_gain(self, 0.0)
        xi = self.pd_area_A * self.responsivity_Rp * self.filter_gain_T * g / (2.0 * math.pi)
        if not xi > 0:
            raise DomainError("derived constant Xi must be positive")
        object.__setattr__(self, "xi", xi)

    @property
    def rho(self) -> float:
        """Transmit SNR implied by the electrical power, ``P_e / (N0 B)``."""
        return self.tx_elec_power_Pe / (self.noise_psd_N0 * self.bandwidth_B)

    @property
    def edge_incidence_deg(self) -> float:
        return math.degrees(math.atan2(self.cell_radius_re, self.height_L))

    def cell_inside_fov(self) -> bool:
        return self.edge_incidence_deg <= self.fov_deg


def concentrator_gain(cfg: VlcApConfig, incidence_deg: float) -> float:
    """Non-imaging concentrator gain ``n^2 / sin^2(fov)`` inside the FOV, else 0."""
    if incidence_deg < 0:
        raise DomainError("incidence angle must be non-negative")
    if incidence_deg > cfg.fov_deg:
        return 0.0
    return cfg.refractive_index ** 2 / math.sin(math.radians(cfg.fov_deg)) ** 2


def _los_gain(cfg: VlcApConfig, r):
    return cfg.xi * (cfg.m + 1.0) * cfg.height_L ** (cfg.m + 1.0) / (r * r + cfg.height_L ** 2) ** (
        (cfg.m + 3.0) / 2.0
    )


def vlc_los_gain(cfg: VlcApConfig, r):
    """LOS DC gain at radial distance ``r`` (scalar or array).

    ``h = Xi (m+1) L^(m+1) / (r^2 + L^2)^((m+3)/2)``. Users outside the
    receiver FOV get zero gain.
    """
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or np.any(arr > cfg.cell_radius_re * (1 + 1e-12)):
        raise DomainError(f"radius must lie in [0, {cfg.cell_radius_re}]")
    h = _los_gain(cfg, arr)
    incidence = np.degrees(np.arctan2(arr, cfg.height_L))
    h = np.where(incidence <= cfg.fov_deg, h, 0.0)
    return float(h) if np.ndim(arr) == 0 else h


def gain_sq_bounds(cfg: VlcApConfig) -> tuple[float, float]:
    """``(lambda_min, lambda_max)``: squared gain at the cell edge and at nadir."""
    c2 = (cfg.xi * (cfg.m + 1.0)) ** 2 * cfg.height_L ** (2.0 * cfg.m + 2.0)
    lam_max = c2 / cfg.height_L ** (2.0 * (cfg.m + 3.0))
    lam_min = c2 / (cfg.cell_radius_re ** 2 + cfg.height_L ** 2) ** (cfg.m + 3.0)
    return lam_min, lam_max


@dataclass(frozen=True)
class UserPlacement:
    radii: np.ndarray
    height_L: float | None = None

    @property
    def distances(self) -> np.ndarray:
        if self.height_L is None:
            return self.radii
        return np.sqrt(self.radii ** 2 + self.height_L ** 2)


def sample_user_radii(cell_radius: float, K: int, rng: np.random.Generator, height_L=None) -> UserPlacement:
    """K i.i.d. radii uniform over a disc, ``r = cell_radius * sqrt(U)``."""
    if K < 1:
        raise DomainError("K must be >= 1")
    radii = cell_radius * np.sqrt(rng.random(K))
    return UserPlacement(radii=radii, height_L=height_L)


@dataclass(frozen=True)
class RfApConfig:
    """RF cell: users uniform on a disc of radius ``cell_radius_D``."""

    path_loss_exp: float = 3.0
    cell_radius_D: float = 10.0
    chebyshev_order_n: int = 10
    tx_power_P: float = 0.7
    noise_var: float = 7e-4
    bandwidth_B_RF: float = 20e6

    def __post_init__(self):
        if self.path_loss_exp < 2:
            raise DomainError("path_loss_exp must be >= 2")
        if not self.cell_radius_D > 0:
            raise DomainError("cell_radius_D must be positive")
        if int(self.chebyshev_order_n) != self.chebyshev_order_n or self.chebyshev_order_n < 1:
            raise DomainError("chebyshev_order_n must be a positive integer")

    @property
    def rho(self) -> float:
        return self.tx_power_P / self.noise_var


def rf_gain_sample(cfg: RfApConfig, d, rng: np.random.Generator):
    """``|H| / d^(PL/2)`` with ``H ~ CN(0, 1)``; ``d`` scalar or array."""
    arr = np.asarray(d, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("distance must be positive")
    shape = np.shape(arr)
    H = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    g = np.abs(H) / arr ** (cfg.path_loss_exp / 2.0)
    return float(g) if np.ndim(arr) == 0 else g


@dataclass(frozen=True)
class CsiErrorModel:
    """Channel-estimation error variances (linear). Zero means perfect CSI."""

    sigma_e_sq_vlc: float = 0.0
    sigma_e_sq_rf: float = 0.0

    def __post_init__(self):
        if self.sigma_e_sq_vlc < 0 or self.sigma_e_sq_rf < 0:
            raise DomainError("error variances must be non-negative")
        if self.sigma_e_sq_rf >= 1:
            raise DomainError("sigma_e_sq_rf must be < 1")
