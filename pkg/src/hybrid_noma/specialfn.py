"""Special functions and enumerators used by the sum-rate expressions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DomainError
from .quadrature import adaptive_quad

EULER_GAMMA = 0.57721566490153286061


# ---------------------------------------------------------------------------
# exponential integral
# ---------------------------------------------------------------------------

def _e1_series(x):
    # -gamma - ln x - sum_{k>=1} (-x)^k / (k k!), alternating; x <= 1 only
    term = -x
    acc = term.copy()
    k = 1
    while True:
        k += 1
        term = -term * x / k
        inc = term / k
        acc += inc
        if np.all(np.abs(inc) <= 1e-17 * np.abs(acc)) or k > 60:
            break
    return -EULER_GAMMA - np.log(x) - acc


def _scaled_e1_cf(x):
    # modified Lentz evaluation of exp(x) * E1(x), valid for x > 1
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 500):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


def exp_integral_e1(x):
    """E1(x) = integral from x to infinity of exp(-t)/t, for x > 0.

    Power series on ``x <= 1``, continued fraction above. Accepts scalars or
    arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("E1 is only defined here for x > 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= 1.0
    if np.any(small):
        out[small] = _e1_series(flat[small])
    if np.any(~small):
        xs = flat[~small]
        out[~small] = _scaled_e1_cf(xs) * np.exp(-xs)
    out = out.reshape(np.shape(arr))
    return float(out) if np.ndim(arr) == 0 else out


def exp_scaled_e1(x):
    """exp(x) * E1(x) without overflow for large x."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("E1 is only defined here for x > 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= 1.0
    if np.any(small):
        out[small] = _e1_series(flat[small]) * np.exp(flat[small])
    if np.any(~small):
        out[~small] = _scaled_e1_cf(flat[~small])
    out = out.reshape(np.shape(arr))
    return float(out) if np.ndim(arr) == 0 else out


# ---------------------------------------------------------------------------
# combinatorics
# ---------------------------------------------------------------------------

def binom(n: int, k: int):
    """Binomial coefficient; exact int for n <= 60, float beyond, 0 off range."""
    if k < 0 or k > n or n < 0:
        return 0
    if n <= 60:
        return math.comb(n, k)
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def compositions(total_j: int, parts_n: int) -> Iterator[tuple[int, ...]]:
    """Yield every tuple of ``parts_n`` non-negative ints summing to ``total_j``."""
    if parts_n < 1:
        raise DomainError("parts_n must be >= 1")
    if total_j < 0:
        raise DomainError("total_j must be >= 0")
    if parts_n == 1:
        yield (total_j,)
        return
    for first in range(total_j + 1):
        for rest in compositions(total_j - first, parts_n - 1):
            yield (first,) + rest


def composition_array(total_j: int, parts_n: int) -> np.ndarray:
    """All compositions as an ``(count, parts_n)`` int array."""
    return np.array(list(compositions(total_j, parts_n)), dtype=np.int64).reshape(-1, parts_n)


def multinomial_log(rows: np.ndarray) -> np.ndarray:
    """log(j! / prod t_i!) for each composition row."""
    from scipy.special import gammaln

    j = rows.sum(axis=1)
    return gammaln(j + 1.0) - gammaln(rows + 1.0).sum(axis=1)


# ---------------------------------------------------------------------------
# integral of t^v ln(1 + z t)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogIntegralSpec:
    exponent_v: float
    slope_z: float
    lower_a: float
    upper_b: float

    def __post_init__(self):
        if not (self.slope_z > 0):
            raise DomainError("slope_z must be positive")
        if not (0 <= self.lower_a <= self.upper_b) or not self.upper_b > 0:
            raise DomainError("need 0 <= lower_a <= upper_b with upper_b > 0")
        if self.lower_a == 0 and self.exponent_v <= -2:
            raise DomainError("integral diverges at 0 for exponent_v <= -2")


# below this distance from v = -1 the by-parts form cancels badly
_NEAR_MINUS_ONE = 1e-3


def log_power_integral(spec: LogIntegralSpec, rtol: float = 1e-13) -> float:
    """Definite integral of ``t**v * ln(1 + z*t)`` over ``[a, b]``.

    Integrates by parts,

        t^(v+1)/(v+1) ln(1+zt) |_a^b  -  z/(v+1) * int t^(v+1)/(1+zt) dt,

    and evaluates the remaining rational integral adaptively in ``ln t``.
    Near ``v = -1`` the integrand itself is integrated instead. ``a = 0`` is
    accepted as a limit when ``v > -2``.
    """
    v, z, a, b = spec.exponent_v, spec.slope_z, spec.lower_a, spec.upper_b
    if a == b:
        return 0.0
    ub = math.log(b)
    if a == 0:
        ua = ub - 45.0 / (v + 2.0)
    else:
        ua = math.log(a)

    if abs(v + 1.0) < _NEAR_MINUS_ONE:
        def direct(u):
            t = np.exp(u)
            return t ** (v + 1.0) * np.log1p(z * t)
        return adaptive_quad(direct, ua, ub, rtol=rtol)

    def residual(u):
        # t^(v+1)/(1+zt) dt with dt = t du; z*t/(1+z*t) computed stably
        t = np.exp(u)
        return t ** (v + 2.0) / (1.0 + z * t)

    boundary = b ** (v + 1.0) * math.log1p(z * b)
    if a > 0:
        boundary -= a ** (v + 1.0) * math.log1p(z * a)
    rest = adaptive_quad(residual, ua, ub, rtol=rtol)
    return (boundary - z * rest) / (v + 1.0)


def omega_difference(a: float, b: float, v: float, z: float) -> float:
    """``Omega(b, v, z) - Omega(a, v, z)``, read as the definite integral it stands for."""
    return log_power_integral(LogIntegralSpec(v, z, a, b))


def omega_as_printed(x: float, y: float, z: float) -> float:
    """Literal transcription of the printed Omega helper.

    The finite sum's upper limit ``y + 1`` is generally not an integer (and
    is negative for the exponents that occur); it is truncated with
    ``floor`` so the sum is empty in that case. Documentation only: this is
    not a correct antiderivative.
    """
    val = (x * (y + 1.0) + 1.0 / z ** (y + 1.0)) * math.log1p(z * x)
    for i in range(1, int(math.floor(y + 1.0)) + 1):
        val += -(x ** (y - i + 2.0)) / ((y - i + 2.0) * z ** (i - 1.0))
    return val
