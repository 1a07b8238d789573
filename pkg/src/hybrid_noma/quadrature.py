"""Globally adaptive Gauss-Legendre quadrature.

Each panel is integrated with a fixed-order Gauss-Legendre rule; its error is
estimated by re-integrating the two half panels with the same rule. The panel
with the largest error estimate is split until the summed error drops below
the requested tolerance.
"""

from __future__ import annotations

import heapq
from typing import Callable

import numpy as np

from .errors import AccuracyError

_ORDER = 12
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


def _panel(func, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _NODES
    return half * float(np.dot(_WEIGHTS, func(x)))


def _refine(func, a, b):
    m = 0.5 * (a + b)
    left = _panel(func, a, m)
    right = _panel(func, m, b)
    return left, right


def adaptive_quad(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rtol: float = 1e-10,
    atol: float = 0.0,
    max_panels: int = 4000,
    initial_panels: int = 8,
) -> float:
    """Integrate a vectorised ``func`` over ``[a, b]``.

    Raises :class:`AccuracyError` when ``max_panels`` is exhausted before the
    error estimate satisfies ``max(atol, rtol * |I|)``.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    edges = np.linspace(a, b, initial_panels + 1)
    heap = []
    total = 0.0
    err_total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        coarse = _panel(func, lo, hi)
        left, right = _refine(func, lo, hi)
        fine = left + right
        err = abs(fine - coarse)
        total += fine
        err_total += err
        heapq.heappush(heap, (-err, lo, hi, fine, left, right))

    n_panels = initial_panels
    while err_total > max(atol, rtol * abs(total)):
        if n_panels >= max_panels:
            raise AccuracyError(
                "adaptive quadrature did not converge", achieved=err_total / max(abs(total), 1e-300)
            )
        neg_err, lo, hi, fine, left, right = heapq.heappop(heap)
        total -= fine
        err_total += neg_err
        mid = 0.5 * (lo + hi)
        for (p_lo, p_hi, coarse) in ((lo, mid, left), (mid, hi, right)):
            l2, r2 = _refine(func, p_lo, p_hi)
            f2 = l2 + r2
            e2 = abs(f2 - coarse)
            total += f2
            err_total += e2
            heapq.heappush(heap, (-e2, p_lo, p_hi, f2, l2, r2))
        n_panels += 1
        # guard against drift from repeated add/subtract
        if n_panels % 256 == 0:
            total = sum(item[3] for item in heap)
            err_total = sum(-item[0] for item in heap)

    return sign * total
