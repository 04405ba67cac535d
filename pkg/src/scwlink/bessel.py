"""Bessel functions of the first kind, integer order, real non-negative argument.

Small arguments use the ascending power series; everything else goes through
Miller's downward recurrence normalised with J0 + 2*sum(J_2k) = 1.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 200
MAX_ARGUMENT = 50.0

# series is used below this argument; above it, downward recurrence
_SERIES_LIMIT = 1.0
_RESCALE = 1e200


def _check_domain(order: int, m: float) -> None:
    if int(order) != order or order < 0 or order > MAX_ORDER:
        raise ValueError(f"order must be an integer in [0, {MAX_ORDER}], got {order!r}")
    if not (0.0 <= m <= MAX_ARGUMENT):
        raise ValueError(f"argument must lie in [0, {MAX_ARGUMENT}], got {m!r}")


def _series(order: int, m: float) -> float:
    if m == 0.0:
        return 1.0 if order == 0 else 0.0
    half = 0.5 * m
    if order == 0:
        term = 1.0
    elif half == 0.0:
        return 0.0
    else:
        log_lead = order * math.log(half) - math.lgamma(order + 1)
        term = math.exp(log_lead) if log_lead > -700.0 else 0.0
        if term == 0.0:
            return 0.0
    total = term
    x2 = -half * half
    k = 0
    while True:
        k += 1
        term *= x2 / (k * (k + order))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total


def _start_index(n_max: int, m: float) -> int:
    top = max(n_max, int(m) + 1)
    start = top + 20 + int(math.sqrt(60.0 * top))
    return start + (start % 2)


def _miller(n_max: int, m: float) -> np.ndarray:
    start = _start_index(n_max, m)
    out = np.zeros(n_max + 1)
    two_over_m = 2.0 / m
    j_next, j_cur = 0.0, 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        # J_{k-1} = (2k/m) J_k - J_{k+1}
        j_prev = k * two_over_m * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            out /= _RESCALE
            norm /= _RESCALE
        idx = k - 1
        if idx <= n_max:
            out[idx] = j_cur
        if idx % 2 == 0 and idx > 0:
            norm += 2.0 * j_cur
    norm += j_cur
    return out / norm


def bessel_j(order: int, m: float) -> float:
    """Return J_order(m) to ~1e-13 absolute accuracy."""
    _check_domain(order, m)
    m = float(m)
    if m <= _SERIES_LIMIT:
        return _series(int(order), m)
    return float(_miller(int(order), m)[int(order)])


def bessel_j_table(n_max: int, m: float) -> np.ndarray:
    """J_0(m) .. J_n_max(m) from a single recurrence pass.

    n_max is not capped at MAX_ORDER here because kernel tails are evaluated
    a little past the order where the values underflow.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if not (0.0 <= m <= MAX_ARGUMENT):
        raise ValueError(f"argument must lie in [0, {MAX_ARGUMENT}], got {m!r}")
    m = float(m)
    if m == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if m <= _SERIES_LIMIT:
        return np.array([_series(n, m) for n in range(n_max + 1)])
    return _miller(n_max, m)


def equality_index(lo: float = 1.0, hi: float = 2.0, tol: float = 1e-13) -> float:
    """Smallest positive m with J0(m) == J1(m), by bisection.

    At this index the carrier and each first-order sideband carry equal
    amplitude, which is how the receiver's strong modulation is chosen.
    """

    def diff(m: float) -> float:
        return bessel_j(0, m) - bessel_j(1, m)

    f_lo = diff(lo)
    if f_lo * diff(hi) > 0:
        raise ValueError("J0 - J1 does not change sign on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = diff(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
