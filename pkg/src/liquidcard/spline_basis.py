"""Cubic B-spline basis machinery for liquid characteristic scores.

A liquid characteristic's score is a linear combination of cubic B-spline
basis functions over its knot range.  This module builds the padded
breakpoint sequence for a knot set, evaluates basis functions and their
derivatives by the two-term recursion, and decomposes second derivatives
into per-interval linear ramps -- the form that makes exact curvature
integrals possible downstream.

Basis indices are 1-based throughout, matching the convention used by the
rest of the fitting stack: for m knots the order-4 (cubic) functions live
at i = 1..m+2, and the order-1 interval indicators at i = 1..m+5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

MAX_ORDER = 4


class KnotError(ValueError):
    """Raised for knot sequences the spline machinery cannot accept."""


def validate_knots(knots: ArrayLike) -> NDArray[np.float64]:
    """Return the knots as a float64 array, or raise :class:`KnotError`.

    Knots must be finite and strictly increasing, with at least two
    entries.  Sentinel codes and infinite bounds belong to discrete
    attributes one level up; they never reach the spline math.
    """
    arr = np.asarray(knots, dtype=float).ravel()
    if arr.size < 2:
        raise KnotError(f"need at least 2 knots, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise KnotError("knots must be finite")
    if not np.all(np.diff(arr) > 0.0):
        raise KnotError("knots must be strictly increasing")
    return arr


def build_t_vector(knots: ArrayLike) -> NDArray[np.float64]:
    """Pad m knots into the m+6 breakpoint sequence.

    The first and last knots are repeated four times around the interior
    knots, which pins the cubic basis down at both ends of the range.
    """
    k = validate_knots(knots)
    return np.concatenate([np.repeat(k[0], 4), k[1:-1], np.repeat(k[-1], 4)])


def num_coeffs(t: NDArray[np.float64]) -> int:
    """Number of order-4 basis functions (m+2) for a padded sequence."""
    return t.size - 4


def num_knots(t: NDArray[np.float64]) -> int:
    return t.size - 6


def greville_abscissae(t: NDArray[np.float64]) -> NDArray[np.float64]:
    """Per-basis knot averages (t(i+1)+t(i+2)+t(i+3))/3 for i = 1..m+2.

    Coefficients equal to these values reproduce the identity spline
    CS(x) = x, which is what makes them useful as a linearity probe.
    """
    q = num_coeffs(t)
    return (t[1 : q + 1] + t[2 : q + 2] + t[3 : q + 3]) / 3.0


def _indicator(t: NDArray[np.float64], k0: int, x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Order-1 indicator of [t_k, t_{k+1}), 0-based k0.

    Degenerate intervals are identically zero.  The last live interval
    (1-based index m+2) is closed on the right so the basis covers the
    full knot span including the right endpoint.
    """
    lo, hi = t[k0], t[k0 + 1]
    if hi <= lo:
        return np.zeros_like(x)
    if k0 == t.size - 5:  # 1-based m+2
        return ((x >= lo) & (x <= hi)).astype(float)
    return ((x >= lo) & (x < hi)).astype(float)


def _basis(t: NDArray[np.float64], i0: int, order: int, x: NDArray[np.float64]) -> NDArray[np.float64]:
    if order == 1:
        return _indicator(t, i0, x)
    out = np.zeros_like(x)
    den1 = t[i0 + order - 1] - t[i0]
    if den1 > 0.0:
        out += (x - t[i0]) / den1 * _basis(t, i0, order - 1, x)
    den2 = t[i0 + order] - t[i0 + 1]
    if den2 > 0.0:
        out += (t[i0 + order] - x) / den2 * _basis(t, i0 + 1, order - 1, x)
    return out


def _check_order(t: NDArray[np.float64], i: int, order: int) -> None:
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}, got {order}")
    hi = t.size - 1 if order == 1 else num_coeffs(t)
    if not 1 <= i <= hi:
        raise IndexError(f"basis index {i} out of range 1..{hi} for order {order}")


def basis_eval(t: NDArray[np.float64], i: int, order: int, x: float) -> float:
    """Evaluate B(x | i, order) for a padded breakpoint sequence.

    ``i`` is 1-based.  Orders 2..4 are defined for i = 1..m+2; order-1
    indicators additionally exist for i up to m+5 (they are identically
    zero past m+2 because their intervals are degenerate).
    """
    _check_order(t, i, order)
    return float(_basis(t, i - 1, order, np.asarray([x], dtype=float))[0])


def basis_matrix(t: NDArray[np.float64], order: int, xs: ArrayLike) -> NDArray[np.float64]:
    """Rows of basis values: entry [r, i-1] = B(xs[r] | i, order).

    Always returns m+2 columns; functions that are identically zero at
    the requested order come back as all-zero columns rather than being
    dropped, so column positions line up across orders.
    """
    q = num_coeffs(t)
    _check_order(t, 1, order)
    xs_arr = np.asarray(xs, dtype=float).ravel()
    out = np.empty((xs_arr.size, q))
    for i0 in range(q):
        out[:, i0] = _basis(t, i0, order, xs_arr)
    return out


def _basis_deriv(t: NDArray[np.float64], i0: int, order: int, x: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.zeros_like(x)
    den2 = t[i0 + order] - t[i0 + 1]
    if den2 > 0.0:
        out -= _basis(t, i0 + 1, order - 1, x) / den2
    den1 = t[i0 + order - 1] - t[i0]
    if den1 > 0.0:
        out += _basis(t, i0, order - 1, x) / den1
    return (order - 1) * out


def basis_derivative(t: NDArray[np.float64], i: int, order: int, x: float) -> float:
    """First derivative of B(x | i, order); requires order >= 2.

    Terms whose breakpoint span is degenerate are dropped, matching the
    convention used everywhere else in this module.
    """
    if order < 2:
        raise ValueError("order-1 indicators have no derivative; order must be >= 2")
    _check_order(t, i, order)
    return float(_basis_deriv(t, i - 1, order, np.asarray([x], dtype=float))[0])


def rising_ramp(t: NDArray[np.float64], k: int, x: ArrayLike) -> NDArray[np.float64]:
    """Linear ramp from 0 to 1 across [t_k, t_{k+1}] (1-based k); 0 if degenerate."""
    k0 = k - 1
    xs = np.asarray(x, dtype=float)
    den = t[k0 + 1] - t[k0]
    if den <= 0.0:
        return np.zeros_like(xs)
    return (xs - t[k0]) / den


def falling_ramp(t: NDArray[np.float64], k: int, x: ArrayLike) -> NDArray[np.float64]:
    """Linear ramp from 1 to 0 across [t_k, t_{k+1}] (1-based k); 0 if degenerate."""
    k0 = k - 1
    xs = np.asarray(x, dtype=float)
    den = t[k0 + 1] - t[k0]
    if den <= 0.0:
        return np.zeros_like(xs)
    return (t[k0 + 1] - xs) / den


@dataclass(frozen=True)
class SecondDerivCoeffs:
    """Per-interval linear decomposition of cubic second derivatives.

    On each breakpoint interval the second derivative of an order-4
    basis function is linear, so it can be written as
    ``a * rising_ramp + b * falling_ramp``.  Rows of ``a``/``b`` are the
    1-based basis index minus one; columns are the interval index minus
    one (m+5 intervals).  ``c, d, e, f`` are the raw carrier values with
    the zero-denominator convention already applied.
    """

    c: NDArray[np.float64]
    d: NDArray[np.float64]
    e: NDArray[np.float64]
    f: NDArray[np.float64]
    a: NDArray[np.float64]
    b: NDArray[np.float64]


def _six_over(d1: NDArray[np.float64], d2: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.zeros_like(d1)
    live = (d1 > 0.0) & (d2 > 0.0)
    out[live] = 6.0 / (d1[live] * d2[live])
    return out


def second_deriv_coeffs(t: NDArray[np.float64]) -> SecondDerivCoeffs:
    """Compute the ramp weights of every cubic basis second derivative.

    Any carrier whose denominator vanishes (coincident end breakpoints)
    is set to zero, which is exactly what drops the empty boundary
    intervals from downstream sums.
    """
    q = num_coeffs(t)
    i = np.arange(q)
    c = _six_over(t[i + 3] - t[i], t[i + 2] - t[i])
    d = -_six_over(t[i + 3] - t[i], t[i + 3] - t[i + 1])
    e = -_six_over(t[i + 4] - t[i + 1], t[i + 3] - t[i + 1])
    f = _six_over(t[i + 4] - t[i + 1], t[i + 4] - t[i + 2])

    n_int = t.size - 1
    a = np.zeros((q, n_int))
    b = np.zeros((q, n_int))
    a[i, i] = c
    a[i, i + 1] = d + e
    a[i, i + 2] = f
    b[i, i + 1] = c
    b[i, i + 2] = d + e
    b[i, i + 3] = f
    return SecondDerivCoeffs(c=c, d=d, e=e, f=f, a=a, b=b)


def second_derivative(
    t: NDArray[np.float64],
    i: int,
    x: ArrayLike,
    coeffs: SecondDerivCoeffs | None = None,
) -> NDArray[np.float64]:
    """Evaluate B''(x | i, 4) from the ramp decomposition (1-based i).

    Summing ``(a * rising + b * falling) * indicator`` over the four
    intervals a cubic function can touch reproduces the second
    derivative everywhere the indicator convention is defined.
    """
    _check_order(t, i, MAX_ORDER)
    if coeffs is None:
        coeffs = second_deriv_coeffs(t)
    i0 = i - 1
    xs = np.asarray(x, dtype=float)
    out = np.zeros_like(xs)
    for k0 in range(i0, min(i0 + 4, t.size - 1)):
        ak = coeffs.a[i0, k0]
        bk = coeffs.b[i0, k0]
        if ak == 0.0 and bk == 0.0:
            continue
        ramp = ak * rising_ramp(t, k0 + 1, xs) + bk * falling_ramp(t, k0 + 1, xs)
        out += ramp * _indicator(t, k0, xs)
    return out
