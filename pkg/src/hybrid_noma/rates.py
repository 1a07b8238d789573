"""Average sum rates of NOMA/OFDMA VLC and NOMA RF downlinks under imperfect CSI.

Every "analytic" evaluator here is deterministic: it integrates the per-user
rate against the order-statistic density of the estimated channel gain,
either by direct adaptive quadrature or through a finite binomial series of
``t^v ln(1 + z t)`` integrals.

SINR conventions
----------------
For user ``k < K`` (rank 1 weakest) the VLC rate is

    log2(1 + t a_k / (t * sum_{i>k} a_i + 1/rho + sigma^2)),   a_i = alpha_i^2

and by default the strongest user uses the same expression with an empty
interference sum, ``log2(1 + t a_K / (1/rho + sigma^2))``. Passing
``strongest="as_printed"`` selects ``log2(1 + rho t a_K + sigma^2)`` instead,
which never saturates in ``rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc, gammainc, gammaln

from .channel import RfApConfig, VlcApConfig
from .errors import DomainError, E1DomainError
from .orderstats import GainSqDistribution, expect_over_ordered
from .specialfn import (
    LogIntegralSpec,
    binom,
    composition_array,
    exp_scaled_e1,
    log_power_integral,
    multinomial_log,
    omega_as_printed,
)

LN2 = math.log(2.0)
STRONGEST_CHOICES = ("consistent", "as_printed")


# ---------------------------------------------------------------------------
# allocations and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NomaAllocation:
    """Amplitude coefficients ``alpha_1 >= ... >= alpha_K > 0`` with unit power."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.coefficients)
        object.__setattr__(self, "coefficients", a)
        if len(a) < 1:
            raise DomainError("allocation needs at least one user")
        if any(x <= 0 for x in a):
            raise DomainError("power coefficients must be positive")
        if abs(sum(x * x for x in a) - 1.0) > 1e-12:
            raise DomainError("sum of squared coefficients must be 1")
        if any(a[i] < a[i + 1] for i in range(len(a) - 1)):
            raise DomainError("coefficients must be non-increasing (weakest user first)")

    @classmethod
    def geometric(cls, K: int, mu: float = 0.4) -> "NomaAllocation":
        """``alpha_k^2 = mu^(k-1) (1 - mu) / (1 - mu^K)``."""
        if not (0 < mu < 1):
            raise DomainError("mu must lie in (0, 1)")
        p = np.array([mu ** (k - 1) for k in range(1, K + 1)])
        p = p / p.sum()
        return cls(tuple(np.sqrt(p)))

    @property
    def K(self) -> int:
        return len(self.coefficients)

    @property
    def powers(self) -> np.ndarray:
        return np.array(self.coefficients) ** 2

    def tail_power(self, k: int) -> float:
        """``sum_{i >= k} alpha_i^2`` for 1-based ``k``; zero past K."""
        return float(self.powers[k - 1:].sum()) if k <= self.K else 0.0


@dataclass(frozen=True)
class OfdmaAllocation:
    bandwidth_fractions: tuple[float, ...]
    power_fractions: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.bandwidth_fractions)
        b = tuple(float(x) for x in self.power_fractions)
        object.__setattr__(self, "bandwidth_fractions", w)
        object.__setattr__(self, "power_fractions", b)
        if len(w) != len(b) or not w:
            raise DomainError("bandwidth and power fractions need equal, non-zero length")
        if any(x <= 0 for x in w + b):
            raise DomainError("fractions must be positive")
        if abs(sum(w) - 1) > 1e-12 or abs(sum(b) - 1) > 1e-12:
            raise DomainError("fractions must each sum to 1")

    @classmethod
    def equal(cls, K: int) -> "OfdmaAllocation":
        return cls((1.0 / K,) * K, (1.0 / K,) * K)

    @property
    def K(self) -> int:
        return len(self.bandwidth_fractions)


@dataclass
class RateEstimate:
    sum_rate: float
    per_user: list[float]
    method: str
    std_error: float = 0.0
    trials: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("analytic-quadrature", "monte-carlo"):
            raise ValueError(f"unknown method tag {self.method!r}")


def _check_strongest(strongest):
    if strongest not in STRONGEST_CHOICES:
        raise ValueError(f"strongest must be one of {STRONGEST_CHOICES}")


# ---------------------------------------------------------------------------
# per-user rates
# ---------------------------------------------------------------------------

def noma_vlc_user_rate(h2, k, alloc: NomaAllocation, rho, sigma_e_sq, strongest="consistent"):
    """Rate (bpcu) of rank-``k`` user given its estimated squared gain."""
    _check_strongest(strongest)
    h2 = np.asarray(h2, dtype=float)
    K = alloc.K
    ak = alloc.powers[k - 1]
    if k == K and strongest == "as_printed":
        out = np.log1p(rho * h2 * ak + sigma_e_sq) / LN2
    else:
        interf = alloc.tail_power(k + 1)
        out = np.log1p(h2 * ak / (h2 * interf + 1.0 / rho + sigma_e_sq)) / LN2
    return float(out) if out.ndim == 0 else out


def ofdma_vlc_user_rate(t, k, alloc: OfdmaAllocation, rho, sigma_e_sq):
    """``(1/2) w_k log2(1 + rho w_k t / (b_k (1 + rho sigma^2)))``."""
    w = alloc.bandwidth_fractions[k - 1]
    b = alloc.power_fractions[k - 1]
    t = np.asarray(t, dtype=float)
    out = 0.5 * w * np.log1p(rho * w * t / (b * (1.0 + rho * sigma_e_sq))) / LN2
    return float(out) if out.ndim == 0 else out


def noma_rf_user_rate(y, k, alloc: NomaAllocation, rho, sigma_e_sq, strongest="consistent"):
    """RF rate of rank-``k`` user given estimated ``|h|^2``; power fractions ``alpha^2``."""
    return noma_vlc_user_rate(y, k, alloc, rho, sigma_e_sq, strongest)


def _rate_slopes(alloc: NomaAllocation, k, rho, sigma_e_sq, strongest):
    """Express the rank-k rate as sum of ``sign * log2(1 + slope * t)`` plus a constant."""
    c = 1.0 / rho + sigma_e_sq
    K = alloc.K
    if k == K:
        if strongest == "as_printed":
            return [(1.0, rho * alloc.powers[-1] / (1.0 + sigma_e_sq))], math.log1p(sigma_e_sq) / LN2
        return [(1.0, alloc.powers[-1] / c)], 0.0
    return [(1.0, alloc.tail_power(k) / c), (-1.0, alloc.tail_power(k + 1) / c)], 0.0


# ---------------------------------------------------------------------------
# VLC: order-statistic series
# ---------------------------------------------------------------------------

def _ordered_series_terms(dist: GainSqDistribution, k: int, K: int):
    """Expand the rank-k density (in ``tau = t / lambda_max``) as ``sum coef * tau^v``."""
    m = dist.cfg.m
    ell = dist.ell
    lead = math.exp(math.lgamma(K + 1) - math.lgamma(k) - math.lgamma(K - k + 1)) / (m + 3.0)
    terms = []
    for p in range(k):
        for q in range(K - k + 1):
            coef = (
                lead
                * binom(k - 1, p)
                * binom(K - k, q)
                * (1.0 + ell) ** (k - 1 - p)
                * (-1.0) ** p
                * ell ** (p + q + 1)
                * (-ell) ** (K - k - q)
            )
            v = -(p + q + 1.0) / (m + 3.0) - 1.0
            terms.append((coef, v))
    return terms


def _series_log_expectation(dist, k, K, slope):
    """``E[ln(1 + slope * T_(k))]`` via the binomial series."""
    if slope == 0:
        return 0.0
    lo = dist.lam_min / dist.lam_max
    z = slope * dist.lam_max
    total = 0.0
    for coef, v in _ordered_series_terms(dist, k, K):
        total += coef * log_power_integral(LogIntegralSpec(v, z, lo, 1.0))
    return total


def _vlc_setup(cfg, K, alloc):
    if K < 1:
        raise DomainError("K must be >= 1")
    if alloc is not None and alloc.K != K:
        raise DomainError(f"allocation has {alloc.K} users, expected K={K}")
    return GainSqDistribution(cfg)


def analytic_noma_vlc_sum_rate(
    cfg: VlcApConfig,
    K: int,
    alloc: NomaAllocation | None = None,
    rho: float | None = None,
    sigma_e_sq: float = 0.0,
    route: str = "quadrature",
    strongest: str = "consistent",
    rtol: float = 1e-8,
) -> RateEstimate:
    """Average NOMA-VLC sum rate in bpcu.

    ``route="quadrature"`` integrates each user's rate against its ordered
    density; ``route="series"`` uses the binomial expansion of the ordered
    density and closed integrals of ``t^v ln(1 + z t)``.
    """
    _check_strongest(strongest)
    alloc = alloc or NomaAllocation.geometric(K)
    dist = _vlc_setup(cfg, K, alloc)
    rho = cfg.rho if rho is None else rho
    per_user = []
    for k in range(1, K + 1):
        if route == "quadrature":
            val = expect_over_ordered(
                dist, k, K,
                lambda t, k=k: noma_vlc_user_rate(t, k, alloc, rho, sigma_e_sq, strongest),
                rtol=rtol,
            )
        elif route == "series":
            parts, const = _rate_slopes(alloc, k, rho, sigma_e_sq, strongest)
            val = const + sum(s * _series_log_expectation(dist, k, K, z) for s, z in parts) / LN2
        else:
            raise ValueError(f"unknown route {route!r}")
        per_user.append(max(val, 0.0))
    return RateEstimate(math.fsum(per_user), per_user, "analytic-quadrature", extra={"route": route})


def analytic_ofdma_vlc_sum_rate(
    cfg: VlcApConfig,
    K: int,
    alloc: OfdmaAllocation | None = None,
    rho: float | None = None,
    sigma_e_sq: float = 0.0,
    route: str = "quadrature",
    rtol: float = 1e-8,
) -> RateEstimate:
    """Average OFDMA-VLC sum rate in bpcu, including the 1/2 pre-log factor."""
    alloc = alloc or OfdmaAllocation.equal(K)
    dist = _vlc_setup(cfg, K, alloc)
    rho = cfg.rho if rho is None else rho
    per_user = []
    for k in range(1, K + 1):
        if route == "quadrature":
            val = expect_over_ordered(
                dist, k, K, lambda t, k=k: ofdma_vlc_user_rate(t, k, alloc, rho, sigma_e_sq), rtol=rtol
            )
        elif route == "series":
            w = alloc.bandwidth_fractions[k - 1]
            b = alloc.power_fractions[k - 1]
            slope = rho * w / (b * (1.0 + rho * sigma_e_sq))
            val = 0.5 * w * _series_log_expectation(dist, k, K, slope) / LN2
        else:
            raise ValueError(f"unknown route {route!r}")
        per_user.append(max(val, 0.0))
    return RateEstimate(math.fsum(per_user), per_user, "analytic-quadrature", extra={"route": route})


# ---------------------------------------------------------------------------
# VLC: literal transcriptions (no correctness claim)
# ---------------------------------------------------------------------------

def _omega_diff_printed(lam_min, lam_max, v, b):
    try:
        return omega_as_printed(lam_max, v, b) - omega_as_printed(lam_min, v, b)
    except (ValueError, ZeroDivisionError, OverflowError):
        return float("nan")


def printed_noma_vlc_sum_rate(cfg: VlcApConfig, K: int, alloc: NomaAllocation, rho: float, sigma_e_sq: float) -> float:
    """The closed form exactly as typeset, with ``Xi`` and the printed helper.

    Kept for comparison only. The printed helper's sum limit is non-integer
    and the leading constants mix ``Xi`` with the density constant, so the
    value is generally meaningless.
    """
    m, xi = cfg.m, cfg.xi
    lam_min, lam_max = GainSqDistribution(cfg).support
    ell = cfg.height_L ** 2 / cfg.cell_radius_re ** 2
    a = alloc.powers
    fact = math.factorial
    first = 0.0
    b1 = rho * a[-1] + sigma_e_sq
    for l in range(K):
        v1 = -(l + 1.0) / (m + 3.0) - 1.0
        first += (
            fact(K - 1) * (-xi) ** l / (fact(l) * fact(K - 1 - l) * (v1 + 1.0))
            * (ell + 1.0) ** (K - 1 - l)
            * _omega_diff_printed(lam_min, lam_max, v1, b1)
        )
    second = 0.0
    for k in range(1, K):
        tail = a[k:].sum()
        b2 = rho * (a[k - 1] - sigma_e_sq) / tail
        for p in range(k):
            for q in range(K - k + 1):
                v2 = -(p + q + 1.0) / (m + 3.0) - 1.0
                second += (
                    fact(K) * xi ** (p + q) * (-1.0) ** (p + K - k - q)
                    / (fact(p) * fact(k - 1 - p) * fact(q) * fact(K - k - q))
                    * (ell + 1.0) ** (k - 1 - p) * ell ** (K - k - q)
                    * _omega_diff_printed(lam_min, lam_max, v2, b2)
                )
    return xi * K / (LN2 * (m + 3.0)) * (first + second)


def printed_ofdma_vlc_sum_rate(cfg: VlcApConfig, K: int, alloc: OfdmaAllocation, rho: float, sigma_e_sq: float) -> float:
    """OFDMA closed form exactly as typeset; comparison only."""
    m, xi = cfg.m, cfg.xi
    lam_min, lam_max = GainSqDistribution(cfg).support
    ell = cfg.height_L ** 2 / cfg.cell_radius_re ** 2
    fact = math.factorial
    total = 0.0
    for k in range(1, K + 1):
        w = alloc.bandwidth_fractions[k - 1]
        bn = alloc.power_fractions[k - 1]
        b3 = rho * w / (bn * (1.0 + rho * sigma_e_sq))
        for p in range(k):
            for q in range(K - k + 1):
                v3 = -(p + q + 1.0) / (m + 3.0) - 1.0
                total += (
                    fact(K) * xi ** (p + q + 1) * (-1.0) ** (p + K - k - q)
                    * _omega_diff_printed(lam_min, lam_max, v3, b3)
                    / (2 * LN2 * fact(p) * fact(k - 1 - p) * fact(q) * fact(K - k - q) * (v3 + 1.0) * (m + 3.0))
                    * ell ** (K - k - q) * (ell + 1.0) ** (k - 1 - p)
                )
    return total


# ---------------------------------------------------------------------------
# RF
# ---------------------------------------------------------------------------

def chebyshev_nodes(cfg: RfApConfig):
    """Distances ``x_i`` and weights ``|sin((2i-1) pi / 2n)| x_i`` on ``(0, D)``."""
    n = int(cfg.chebyshev_order_n)
    theta = (2.0 * np.arange(1, n + 1) - 1.0) * math.pi / (2.0 * n)
    x = 0.5 * cfg.cell_radius_D * (1.0 + np.cos(theta))
    return x, np.abs(np.sin(theta)) * x


def _rf_node_rates(cfg: RfApConfig, sigma_e_sq, error_model):
    """Exponential rate ``1 / var(h_hat | x_i)`` at each Chebyshev node."""
    x, _ = chebyshev_nodes(cfg)
    pl = x ** (-cfg.path_loss_exp)
    if error_model == "normalized":
        var = (1.0 - sigma_e_sq) * pl
    elif error_model == "as_printed":
        var = pl - sigma_e_sq
    else:
        raise ValueError(f"unknown error_model {error_model!r}")
    for i, v in enumerate(var, start=1):
        if not v > 0:
            raise E1DomainError(i, v)
    return 1.0 / var


class _ChebyshevMixture:
    """Survival function of ``|h_hat|^2`` approximated as ``sum_i c_i exp(-mu_i y)``."""

    def __init__(self, cfg: RfApConfig, sigma_e_sq, error_model):
        n = int(cfg.chebyshev_order_n)
        _, w = chebyshev_nodes(cfg)
        self.prefactor = math.pi / (n * cfg.cell_radius_D)
        self.log_w = np.log(w)
        self.mu = _rf_node_rates(cfg, sigma_e_sq, error_model)
        self.n = n
        self._cache = {}

    def power_terms(self, N):
        """Weights and exponents of every term of ``G(y)^N``."""
        if N not in self._cache:
            rows = composition_array(N, self.n)
            logc = multinomial_log(rows) + rows @ self.log_w + N * math.log(self.prefactor)
            self._cache[N] = (np.exp(logc), rows @ self.mu)
        return self._cache[N]


def _psi_chebyshev(mix: _ChebyshevMixture, k, K, beta):
    """``E[log2(1 + beta Y_(k))]`` with the Chebyshev mixture survival function."""
    if beta == 0:
        return 0.0
    total = 0.0
    for r in range(k):
        N = r + K - k + 1
        weights, S = mix.power_terms(N)
        arg = S / beta
        if np.any(~(arg > 0)):
            raise DomainError("non-positive E1 argument")
        total += binom(k - 1, r) * (-1.0) ** r / N * float(np.dot(weights, exp_scaled_e1(arg)))
    return k * binom(K, k) * total / LN2


def rf_gain_sq_survival(cfg: RfApConfig, sigma_e_sq, y):
    """Exact ``P[|h_hat|^2 > y]`` for users uniform on the RF disc."""
    a = 2.0 / cfg.path_loss_exp
    y = np.asarray(y, dtype=float)
    X = y * cfg.cell_radius_D ** cfg.path_loss_exp / (1.0 - sigma_e_sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.exp(math.log(a) + gammaln(a) - a * np.log(X)) * gammainc(a, X)
    small = 1.0 - a * X / (a + 1.0)
    return np.where(X < 1e-8, small, big)


def _psi_exact(cfg: RfApConfig, sigma_e_sq, k, K, beta, rtol):
    if beta == 0:
        return 0.0
    from .quadrature import adaptive_quad

    y_scale = cfg.cell_radius_D ** (-cfg.path_loss_exp)
    a = 2.0 / cfg.path_loss_exp
    u_lo = min(-math.log(beta), math.log(y_scale)) - 42.0
    u_hi = max(-math.log(beta), math.log(y_scale)) + 42.0 / (a * (K - k + 1))

    def g(u):
        y = np.exp(u)
        surv = betainc(K - k + 1, k, np.clip(rf_gain_sq_survival(cfg, sigma_e_sq, y), 0.0, 1.0))
        return beta * y / (1.0 + beta * y) * surv

    return adaptive_quad(g, u_lo, u_hi, rtol=rtol * 1e-2, initial_panels=32) / LN2


def analytic_noma_rf_sum_rate(
    cfg: RfApConfig,
    K: int,
    alloc: NomaAllocation | None = None,
    sigma_e_sq: float = 0.0,
    rho: float | None = None,
    route: str = "chebyshev",
    strongest: str = "consistent",
    error_model: str = "normalized",
    rtol: float = 1e-8,
) -> RateEstimate:
    """Average NOMA-RF sum rate in bpcu.

    ``route="chebyshev"`` is the Gauss-Chebyshev / exponential-integral
    series (order ``cfg.chebyshev_order_n``); ``route="quadrature"``
    integrates the exact order-statistic survival function.

    ``error_model="normalized"`` draws the estimation error on the unit
    variance small-scale fading (estimated variance ``(1 - s) d^-PL``);
    ``"as_printed"`` subtracts the error variance from ``d^-PL`` directly and
    raises :class:`E1DomainError` at nodes where that is not positive.
    """
    _check_strongest(strongest)
    alloc = alloc or NomaAllocation.geometric(K)
    if alloc.K != K:
        raise DomainError(f"allocation has {alloc.K} users, expected K={K}")
    rho = cfg.rho if rho is None else rho
    if route == "chebyshev":
        mix = _ChebyshevMixture(cfg, sigma_e_sq, error_model)
        psi = lambda k, beta: _psi_chebyshev(mix, k, K, beta)
    elif route == "quadrature":
        if error_model != "normalized":
            raise ValueError("quadrature route supports the normalized error model only")
        if not sigma_e_sq < 1:
            raise DomainError("sigma_e_sq must be < 1")
        psi = lambda k, beta: _psi_exact(cfg, sigma_e_sq, k, K, beta, rtol)
    else:
        raise ValueError(f"unknown route {route!r}")

    per_user = []
    for k in range(1, K + 1):
        parts, const = _rate_slopes(alloc, k, rho, sigma_e_sq, strongest)
        val = const + sum(s * psi(k, z) for s, z in parts)
        per_user.append(max(val, 0.0))
    return RateEstimate(math.fsum(per_user), per_user, "analytic-quadrature", extra={"route": route})
