"""Exact roughness-penalty matrices for liquid characteristics.

The curvature penalty of a cubic characteristic score is the quadratic
form beta' R beta with R_ij the integral of the product of second
derivatives of basis functions i and j.  Because those second
derivatives are linear on every breakpoint interval, each entry reduces
to a weighted sum of interval lengths -- computed here in closed form,
with an independent quadrature implementation kept alongside as an
oracle.

A characteristic's discrete (step) attributes are unpenalized: their
rows and columns of R are zero padding around the liquid block, and a
whole model's matrix is the block-diagonal stack over characteristics.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .spline_basis import (
    build_t_vector,
    falling_ramp,
    num_coeffs,
    rising_ramp,
    second_deriv_coeffs,
)

if TYPE_CHECKING:
    from .scorecard import CharacteristicSpec


def _pad(inner: NDArray[np.float64], n_leading: int, n_trailing: int) -> NDArray[np.float64]:
    if n_leading == 0 and n_trailing == 0:
        return inner
    dim = n_leading + inner.shape[0] + n_trailing
    out = np.zeros((dim, dim))
    out[n_leading : n_leading + inner.shape[0], n_leading : n_leading + inner.shape[0]] = inner
    return out


def char_roughness_matrix(
    knots: ArrayLike,
    n_leading_discrete: int = 0,
    n_trailing_discrete: int = 0,
) -> NDArray[np.float64]:
    """Closed-form roughness matrix for one characteristic.

    The inner (m+2) x (m+2) block integrates products of basis second
    derivatives over the knot span; it is padded with zero rows/columns
    for any leading/trailing discrete score coefficients.  Degenerate
    boundary intervals are skipped outright.  Symmetry is enforced by
    mirroring the upper triangle.
    """
    if n_leading_discrete < 0 or n_trailing_discrete < 0:
        raise ValueError("discrete attribute counts must be >= 0")
    t = build_t_vector(knots)
    sd = second_deriv_coeffs(t)
    dt = np.diff(t)
    live = dt > 0.0
    a = sd.a[:, live]
    b = sd.b[:, live]
    aw = a * dt[live]
    bw = b * dt[live]
    m = aw @ a.T / 3.0 + aw @ b.T / 6.0 + bw @ a.T / 6.0 + bw @ b.T / 3.0
    inner = np.triu(m) + np.triu(m, 1).T
    return _pad(inner, n_leading_discrete, n_trailing_discrete)


def roughness_quadrature_oracle(knots: ArrayLike) -> NDArray[np.float64]:
    """Roughness matrix by per-interval Gauss-Legendre quadrature.

    Second derivatives are piecewise linear, so their pairwise products
    are quadratic and two Gauss points per interval integrate them
    exactly up to rounding.  Kept deliberately separate from the closed
    form as a verification route; returns the unpadded liquid block.
    """
    t = build_t_vector(knots)
    sd = second_deriv_coeffs(t)
    q = num_coeffs(t)
    nodes, weights = np.polynomial.legendre.leggauss(2)
    r = np.zeros((q, q))
    for s0 in range(t.size - 1):
        lo, hi = t[s0], t[s0 + 1]
        if hi <= lo:
            continue
        xs = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        ws = 0.5 * (hi - lo) * weights
        # Inside interval s only that interval's indicator is live, so
        # B'' of every basis function is a_is * P + b_is * N there.
        p = rising_ramp(t, s0 + 1, xs)
        n = falling_ramp(t, s0 + 1, xs)
        d2 = np.outer(sd.a[:, s0], p) + np.outer(sd.b[:, s0], n)
        r += (d2 * ws) @ d2.T
    return r


def model_roughness_matrix(chars: Iterable["CharacteristicSpec"]) -> NDArray[np.float64]:
    """Block-diagonal roughness matrix over a model's characteristics.

    Characteristics without a liquid range contribute all-zero blocks of
    their coefficient count, so discrete score coefficients are never
    penalized.
    """
    blocks = []
    for ch in chars:
        if ch.liquid_knots is None:
            blocks.append(np.zeros((ch.n_coeffs, ch.n_coeffs)))
        else:
            block = char_roughness_matrix(ch.liquid_knots, ch.n_leading, ch.n_trailing)
            if block.shape[0] != ch.n_coeffs:
                raise ValueError(
                    f"characteristic {ch.name!r}: roughness block is {block.shape[0]} "
                    f"coefficients but the spec declares {ch.n_coeffs}"
                )
            blocks.append(block)
    dim = sum(b.shape[0] for b in blocks)
    out = np.zeros((dim, dim))
    at = 0
    for b in blocks:
        out[at : at + b.shape[0], at : at + b.shape[0]] = b
        at += b.shape[0]
    return out
