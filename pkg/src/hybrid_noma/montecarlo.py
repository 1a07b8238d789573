"""Monte Carlo estimates of the average sum rates.

Each trial places K users uniformly, draws channels and estimation errors,
ranks the users and applies the per-user rate formulas. Trials are grouped in
fixed-size batches; batch ``b`` draws from its own substream keyed by
``(seed, link, b)``, so the estimate depends only on ``(seed, trials, batch)``
and not on how many worker threads evaluate the batches.

By default the estimated gain carries the geometric (or Rayleigh) law and the
error is drawn independently of it, ``h = h_hat + e``; this is the reading
under which the analytic expressions (written in terms of the law of
``h_hat``) are exact. ``anchor="truth"`` instead draws the true gain from
geometry and sets ``h_hat = h - e``, for sensitivity runs. Ranking uses
``h_hat`` unless ``sort_by="true"``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import RfApConfig, VlcApConfig, vlc_los_gain
from .errors import DomainError
from .rates import (
    NomaAllocation,
    OfdmaAllocation,
    RateEstimate,
    noma_rf_user_rate,
    noma_vlc_user_rate,
    ofdma_vlc_user_rate,
)

_LINK_TAG = {"vlc": 0, "rf": 1}


@dataclass(frozen=True)
class McConfig:
    trials: int = 100_000
    seed: int = 12345
    batch: int = 50_000

    def __post_init__(self):
        if self.trials < 1 or self.batch < 1:
            raise DomainError("trials and batch must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def n_batches(self) -> int:
        return -(-self.trials // self.batch)

    def batch_size(self, b: int) -> int:
        return min(self.batch, self.trials - b * self.batch)


def batch_rng(mc: McConfig, link: str, b: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(mc.seed, spawn_key=(_LINK_TAG[link], b)))


def _sorted_by(key, *arrays):
    order = np.argsort(key, axis=1, kind="stable")
    return [np.take_along_axis(a, order, axis=1) for a in arrays]


def draw_vlc_batch(cfg: VlcApConfig, K: int, sigma_e_sq: float, n: int, rng, sort_by="estimated", anchor="estimate"):
    """One batch of ranked VLC users.

    Returns ``(h_hat_sq, h_true)``, both ``(n, K)`` and ordered by rank
    (column 0 weakest).
    """
    radii = cfg.cell_radius_re * np.sqrt(rng.random((n, K)))
    geo = vlc_los_gain(cfg, radii)
    err = rng.standard_normal((n, K)) * math.sqrt(sigma_e_sq)
    if anchor == "estimate":
        h_hat, h_true = geo, geo + err
    else:
        h_hat, h_true = geo - err, geo
    key = h_hat ** 2 if sort_by == "estimated" else h_true ** 2
    h_hat, h_true = _sorted_by(key, h_hat, h_true)
    return h_hat ** 2, h_true


def draw_rf_batch(cfg: RfApConfig, K: int, sigma_e_sq: float, n: int, rng, sort_by="estimated", anchor="estimate"):
    """One batch of ranked RF users: ``(|h_hat|^2, |h|^2)``, each ``(n, K)``.

    Small-scale fading is normalized so the true coefficient has unit power:
    ``H_hat ~ CN(0, 1 - s2)`` and ``E ~ CN(0, s2)`` with ``anchor="estimate"``.
    """
    radii = cfg.cell_radius_D * np.sqrt(rng.random((n, K)))
    radii = np.maximum(radii, 1e-12 * cfg.cell_radius_D)
    pl = radii ** (-cfg.path_loss_exp)
    scale = math.sqrt(0.5)
    G = (rng.standard_normal((n, K)) + 1j * rng.standard_normal((n, K))) * scale
    E = (rng.standard_normal((n, K)) + 1j * rng.standard_normal((n, K))) * scale * math.sqrt(sigma_e_sq)
    if anchor == "estimate":
        H_hat = G * math.sqrt(1.0 - sigma_e_sq)
        H = H_hat + E
    else:
        H = G
        H_hat = G - E
    est = np.abs(H_hat) ** 2 * pl
    true = np.abs(H) ** 2 * pl
    key = est if sort_by == "estimated" else true
    est, true = _sorted_by(key, est, true)
    return est, true


def _check_flags(sort_by, anchor):
    if sort_by not in ("estimated", "true"):
        raise DomainError("sort_by must be 'estimated' or 'true'")
    if anchor not in ("estimate", "truth"):
        raise DomainError("anchor must be 'estimate' or 'truth'")


def _run(mc: McConfig, link: str, batch_fn, workers: int) -> RateEstimate:
    def one(b):
        return batch_fn(mc.batch_size(b), batch_rng(mc, link, b))

    batches = range(mc.n_batches)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, batches))
    else:
        parts = [one(b) for b in batches]
    rates = np.concatenate(parts, axis=0)
    per_trial = rates.sum(axis=1)
    n = per_trial.size
    mean = float(per_trial.mean())
    se = float(per_trial.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    per_user = [float(x) for x in rates.mean(axis=0)]
    return RateEstimate(mean, per_user, "monte-carlo", std_error=se, trials=n)


def mc_noma_vlc_sum_rate(
    cfg: VlcApConfig,
    K: int,
    alloc: NomaAllocation | None = None,
    rho: float | None = None,
    sigma_e_sq: float = 0.0,
    mc: McConfig = McConfig(),
    strongest: str = "consistent",
    sort_by: str = "estimated",
    anchor: str = "estimate",
    workers: int = 1,
) -> RateEstimate:
    _check_flags(sort_by, anchor)
    alloc = alloc or NomaAllocation.geometric(K)
    rho = cfg.rho if rho is None else rho

    def batch(n, rng):
        h2, _ = draw_vlc_batch(cfg, K, sigma_e_sq, n, rng, sort_by, anchor)
        return np.column_stack(
            [noma_vlc_user_rate(h2[:, k - 1], k, alloc, rho, sigma_e_sq, strongest) for k in range(1, K + 1)]
        )

    return _run(mc, "vlc", batch, workers)


def mc_ofdma_vlc_sum_rate(
    cfg: VlcApConfig,
    K: int,
    alloc: OfdmaAllocation | None = None,
    rho: float | None = None,
    sigma_e_sq: float = 0.0,
    mc: McConfig = McConfig(),
    sort_by: str = "estimated",
    anchor: str = "estimate",
    workers: int = 1,
) -> RateEstimate:
    _check_flags(sort_by, anchor)
    alloc = alloc or OfdmaAllocation.equal(K)
    rho = cfg.rho if rho is None else rho

    def batch(n, rng):
        h2, _ = draw_vlc_batch(cfg, K, sigma_e_sq, n, rng, sort_by, anchor)
        return np.column_stack(
            [ofdma_vlc_user_rate(h2[:, k - 1], k, alloc, rho, sigma_e_sq) for k in range(1, K + 1)]
        )

    return _run(mc, "vlc", batch, workers)


def mc_noma_rf_sum_rate(
    cfg: RfApConfig,
    K: int,
    alloc: NomaAllocation | None = None,
    sigma_e_sq: float = 0.0,
    mc: McConfig = McConfig(),
    rho: float | None = None,
    strongest: str = "consistent",
    sort_by: str = "estimated",
    anchor: str = "estimate",
    workers: int = 1,
) -> RateEstimate:
    _check_flags(sort_by, anchor)
    if not 0 <= sigma_e_sq < 1:
        raise DomainError("RF error variance must lie in [0, 1)")
    alloc = alloc or NomaAllocation.geometric(K)
    rho = cfg.rho if rho is None else rho

    def batch(n, rng):
        y, _ = draw_rf_batch(cfg, K, sigma_e_sq, n, rng, sort_by, anchor)
        return np.column_stack(
            [noma_rf_user_rate(y[:, k - 1], k, alloc, rho, sigma_e_sq, strongest) for k in range(1, K + 1)]
        )

    return _run(mc, "rf", batch, workers)
