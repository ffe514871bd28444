"""Vectorized integration over domain bands on the generating cylinder.

Every double integral the analytic layers need has the form

    int_0^pi  int_{l in I(theta)}  g(l)  dl dtheta,

where ``l = r0*cos(theta) - r`` is the signed line-to-test-point distance
and the interval ``I(theta)`` is the band ``|l| <= t`` intersected with the
domain constraint ``r in [-R, R]`` (i.e. ``l in [r0*cos(theta)-R,
r0*cos(theta)+R]``).  Since the integrands depend on ``(theta, r)`` only
through ``l``, the inner integral collapses to one dimension; these
helpers exploit that with tensorized Gauss-Legendre rules.

Integrands with a square-root edge at ``|l| = t`` (chord lengths, PGFL
kernels) are integrated under the substitution ``l = t*sin(phi)``, which
removes the derivative singularity and restores spectral convergence.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import gauss_legendre

__all__ = [
    "band_l_limits",
    "integrate_band",
    "integrate_domain",
    "theta_weight",
    "offset_grid",
]

N_THETA = 96
N_L = 64


def theta_weight(l: np.ndarray, r0: float, radius: float) -> np.ndarray:
    """Measure of theta in [0, pi) whose domain strip reaches offset l,
    i.e. the angular weight w(l) with int g(l) w(l) dl equal to the
    cylinder double integral of g."""
    if r0 < 1e-12:
        return np.where(np.abs(l) <= radius, math.pi, 0.0)
    lo = np.clip((l - radius) / r0, -1.0, 1.0)
    hi = np.clip((l + radius) / r0, -1.0, 1.0)
    return np.arccos(lo) - np.arccos(hi)


def _panel_nodes(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss-Legendre under l = a + (b-a)*sin^2(phi); the substitution
    # absorbs square-root behavior at either panel endpoint (band edges,
    # arccos kinks of the angular weight).
    phi, wphi = gauss_legendre(0.0, 0.5 * math.pi, n)
    l = a + (b - a) * np.sin(phi) ** 2
    w = wphi * (b - a) * np.sin(2.0 * phi)
    return l, w


def offset_grid(
    r0: float, radius: float, t: float, n_l: int = 48
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Weighted offset nodes for the band |l| <= t and the full domain.

    Returns (l_nodes, band_weights, domain_weights); band weights vanish
    on nodes outside the band, so band and domain integrals share one
    kernel evaluation.  Panels split at the weight kinks and band edges.
    """
    span = r0 + radius
    kinks = (-abs(radius - r0), abs(radius - r0), -t, t)
    pts = sorted({-span, span, *(k for k in kinks if -span < k < span)})
    nodes = []
    weights = []
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        l, w = _panel_nodes(a, b, n_l)
        nodes.append(l)
        weights.append(w)
    l = np.concatenate(nodes)
    w = np.concatenate(weights) * theta_weight(l, r0, radius)
    in_band = np.abs(l) <= t
    return l, np.where(in_band, w, 0.0), w


def band_l_limits(theta: np.ndarray, r0: float, radius: float, t: float):
    """Clipped l-interval of the band at each theta (may be empty: lo >= hi)."""
    c = r0 * np.cos(theta)
    lo = np.maximum(-t, c - radius)
    hi = np.minimum(t, c + radius)
    return lo, hi


def integrate_band(
    g,
    r0: float,
    radius: float,
    t: float,
    n_theta: int = N_THETA,
    n_l: int = N_L,
    sin_substitution: bool = True,
) -> float:
    """``int_0^pi int_{|l|<=t, clipped} g(l) dl dtheta`` for vectorized ``g``."""
    if t <= 0:
        return 0.0
    th, wth = gauss_legendre(0.0, math.pi, n_theta)
    lo, hi = band_l_limits(th, r0, radius, t)
    empty = lo >= hi
    lo = np.where(empty, 0.0, lo)
    hi = np.where(empty, 0.0, hi)
    if sin_substitution:
        plo = np.arcsin(np.clip(lo / t, -1.0, 1.0))
        phi_, wphi = gauss_legendre(plo, np.arcsin(np.clip(hi / t, -1.0, 1.0)), n_l)
        l_nodes = t * np.sin(phi_)
        w_l = wphi * t * np.cos(phi_)
    else:
        l_nodes, w_l = gauss_legendre(lo, hi, n_l)
    vals = g(l_nodes)
    inner = np.sum(vals * w_l, axis=-1)
    inner = np.where(empty, 0.0, inner)
    return float(np.sum(inner * wth))


def integrate_domain(
    g,
    r0: float,
    radius: float,
    n_theta: int = N_THETA,
    n_l: int = N_L,
) -> float:
    """``int_0^pi int_{r in [-R,R]} g(l) dl dtheta`` for vectorized ``g``."""
    th, wth = gauss_legendre(0.0, math.pi, n_theta)
    c = r0 * np.cos(th)
    l_nodes, w_l = gauss_legendre(c - radius, c + radius, n_l)
    vals = g(l_nodes)
    inner = np.sum(vals * w_l, axis=-1)
    return float(np.sum(inner * wth))
