"""Closed-form statistics of the binomial line process.

Covers the domain-band area of a disk, void probability and nearest-line
CDF, line length density/measure (radial and per annulus), intersection
density/measure (radial and per annulus), the stationary Poisson-line
intersection density for comparison, and the distance distribution to the
nearest intersection seen from a point on a line of the process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BlpModel
from .quadrature import GEOMETRY_SPEC, QuadSpec, gauss_legendre, integrate_1d

__all__ = [
    "AnnulusSpec",
    "IntersectionQuery",
    "domain_band_area",
    "void_prob_blp",
    "cdf_nearest_line",
    "line_length_density",
    "line_length_measure_ball",
    "annulus_line_density",
    "line_length_measure_disk",
    "intersection_density",
    "intersection_measure_disk",
    "intersection_measure_ball",
    "intersection_measure_plane",
    "annulus_intersection_density",
    "plp_intersection_density",
    "nearest_intersection_band",
    "intersection_band_area",
    "cdf_nearest_intersection",
]


@dataclass(frozen=True)
class AnnulusSpec:
    """The i-th annulus of a family of concentric annuli of equal width w."""

    w: float
    i: int

    def __post_init__(self) -> None:
        if self.w <= 0:
            raise ValueError("annulus width must be positive")
        if self.i < 0:
            raise ValueError("annulus index must be >= 0")

    @property
    def inner(self) -> float:
        return self.i * self.w

    @property
    def outer(self) -> float:
        return (self.i + 1) * self.w

    @property
    def area(self) -> float:
        return math.pi * (self.outer**2 - self.inner**2)


@dataclass(frozen=True)
class IntersectionQuery:
    """Nearest-intersection query: an on-line test point at radius ``r0``
    whose host line makes angle ``omega0`` with the x-axis; ``t`` is the
    query distance along the host line."""

    r0: float
    omega0: float
    t: float

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("t must be nonnegative")
        if not 0.0 <= self.omega0 < math.pi:
            raise ValueError("omega0 must lie in [0, pi)")


def domain_band_area(r0: float, t: float, radius: float) -> float:
    """Measure of the set of generating points whose lines meet the ball of
    radius ``t`` around the test point at radial distance ``r0``.

    Piecewise closed form; the extra branch ``r0 <= t - radius`` (the ball
    swallows the whole generating disk, so every line qualifies) returns
    the full domain measure ``2*pi*radius``.
    """
    if r0 < 0 or t < 0 or radius <= 0:
        raise ValueError("need r0 >= 0, t >= 0, radius > 0")
    return float(_domain_band_area_vec(np.asarray(r0, dtype=float), t, radius))


def _domain_band_area_vec(r0: np.ndarray, t, radius: float) -> np.ndarray:
    r0 = np.asarray(r0, dtype=float)
    t = np.asarray(t, dtype=float)
    r0, t = np.broadcast_arrays(r0, t)
    out = np.full(r0.shape, 2.0 * math.pi * radius)

    full_band = r0 + t <= radius
    out = np.where(full_band, 2.0 * math.pi * t, out)
    covered = r0 <= t - radius

    safe_r0 = np.where(r0 > 0, r0, 1.0)

    def clip_term(c):
        # integral over theta of the band overflow past one domain edge;
        # subnormal r0 may overflow the ratio before the clip, harmlessly
        with np.errstate(over="ignore"):
            x = np.clip(c / safe_r0, -1.0, 1.0)
        return safe_r0 * np.sqrt(1.0 - x * x) - c * np.arccos(x)

    mid = ~full_band & ~covered & (r0 - t <= radius)
    upper = clip_term(radius - t)
    out = np.where(mid, 2.0 * math.pi * t - 2.0 * upper, out)

    far = ~full_band & ~covered & (r0 - t > radius)
    out = np.where(far, 2.0 * math.pi * t - 2.0 * (upper - clip_term(radius + t)), out)
    return np.clip(out, 0.0, 2.0 * math.pi * radius)


def void_prob_blp(model: BlpModel, r0: float, t: float) -> float:
    """Probability that no line of the process meets the t-ball around the
    test point."""
    a = domain_band_area(r0, t, model.radius)
    return ((model.domain_measure - a) / model.domain_measure) ** model.n_b


def cdf_nearest_line(model: BlpModel, r0: float, t: float) -> float:
    """CDF of the distance from the test point to the nearest line."""
    return 1.0 - void_prob_blp(model, r0, t)


def line_length_density(model: BlpModel, r: float) -> float:
    """Expected line length per unit area at radius ``r`` from the origin."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    n, R = model.n_b, model.radius
    if r <= R:
        return n / (2.0 * R)
    return n / (math.pi * R) * math.asin(R / r)


def line_length_measure_ball(model: BlpModel, u: float) -> float:
    """Expected total chord length inside the origin-centered ball of
    radius ``u`` (radial integral of the line length density)."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    n, R = model.n_b, model.radius
    if u <= R:
        return n * math.pi * u * u / (2.0 * R)
    return n * (u * u * math.asin(R / u) / R + math.sqrt(u * u - R * R))


def annulus_line_density(model: BlpModel, spec: AnnulusSpec) -> float:
    """Expected chord length per unit area in the i-th annulus of width w."""
    num = line_length_measure_ball(model, spec.outer) - line_length_measure_ball(
        model, spec.inner
    )
    return num / spec.area


def line_length_measure_disk(
    model: BlpModel, r0: float, t: float, spec: QuadSpec = GEOMETRY_SPEC
) -> float:
    """Expected total chord length inside the t-ball around the test point.

    Computed as the per-line chord expectation over the clipped band times
    the expected number of intersecting lines; the inner chord integral has
    an exact antiderivative, leaving one adaptive integral over theta.
    """
    if t <= 0:
        if t < 0:
            raise ValueError("t must be nonnegative")
        return 0.0

    def chord_antideriv(l: float) -> float:
        x = min(max(l / t, -1.0), 1.0)
        return l * math.sqrt(max(t * t - l * l, 0.0)) + t * t * math.asin(x)

    def per_theta(theta: float) -> float:
        c = r0 * math.cos(theta)
        lo = max(-t, c - model.radius)
        hi = min(t, c + model.radius)
        if hi <= lo:
            return 0.0
        return chord_antideriv(hi) - chord_antideriv(lo)

    res = integrate_1d(per_theta, 0.0, math.pi, spec)
    if not res.converged:
        raise ArithmeticError(
            f"chord-length quadrature did not converge (err={res.error_estimate:g})"
        )
    return model.n_b / model.domain_measure * res.value


def intersection_density(model: BlpModel, r: float) -> float:
    """Radial density of pairwise line intersections at radius ``r``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    n, R = model.n_b, model.radius
    pairs = n * (n - 1)
    if r <= R:
        return pairs / (4.0 * math.pi * R * R)
    return (
        pairs
        / (4.0 * math.pi**2 * R * R * r)
        * (2.0 * r * math.asin(R / r) - 2.0 * R / r * math.sqrt(r * r - R * R))
    )


def intersection_measure_ball(model: BlpModel, t: float) -> float:
    """Expected number of pairwise intersections inside the origin-centered
    t-ball."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    n, R = model.n_b, model.radius
    pairs = n * (n - 1)
    if t <= R:
        return pairs / 4.0 * (t / R) ** 2
    return (
        pairs
        / (2.0 * math.pi * R * R)
        * (
            t * t * math.asin(R / t)
            + R * (2.0 * R * math.acos(R / t) - math.sqrt(t * t - R * R))
        )
    )


# The disk- and ball-centered measures coincide: intersections are counted
# around the origin.
intersection_measure_disk = intersection_measure_ball


def intersection_measure_plane(model: BlpModel, n_nodes: int = 256) -> float:
    """Integral of the intersection density over the whole plane.

    Quadrature of density * 2*pi*r on [0, 4R], plus the tail under the
    substitution r = 1/u (the tail integrand decays like r**-2, so it is
    polynomial in u near 0).  Converges to n_b*(n_b-1)/2.
    """
    R = model.radius
    split = 4.0 * R

    def body(r):
        return intersection_density(model, float(r)) * 2.0 * math.pi * float(r)

    # [0, R]: the density is constant, integrate exactly
    head = model.n_b * (model.n_b - 1) / 4.0
    # [R, 4R]: sin^2 substitution absorbs the sqrt(r - R) derivative kink
    phi, wphi = gauss_legendre(0.0, math.pi / 2.0, n_nodes)
    r_nodes = R + (split - R) * np.sin(phi) ** 2
    jac = (split - R) * np.sin(2.0 * phi) * wphi
    head += sum(w * body(r) for r, w in zip(r_nodes, jac))
    u_nodes, u_weights = gauss_legendre(0.0, 1.0 / split, n_nodes)
    tail = sum(w * body(1.0 / u) / (u * u) for u, w in zip(u_nodes, u_weights))
    return head + tail


def annulus_intersection_density(model: BlpModel, spec: AnnulusSpec) -> float:
    """Expected intersection count per unit area in the i-th annulus."""
    num = intersection_measure_ball(model, spec.outer) - intersection_measure_ball(
        model, spec.inner
    )
    return num / spec.area


def plp_intersection_density(lambda_ppp: float) -> float:
    """Intersection density of a stationary Poisson line process."""
    if lambda_ppp < 0:
        raise ValueError("lambda_ppp must be nonnegative")
    return math.pi * lambda_ppp**2


def nearest_intersection_band(
    query: IntersectionQuery, theta: float, radius: float
) -> tuple[float, float]:
    """Range [r_L, r_U] of signed distances r such that a line with angle
    ``theta`` crosses the host line within ``query.t`` of the test point.

    Four-case clipping; guarantees r_L <= r_U, both inside [-R, R].  A line
    parallel to the host (theta - omega0 = pi/2) yields a width-0 band.
    """
    r0, w0, t = query.r0, query.omega0, query.t
    c = r0 * math.cos(theta)
    proj = t * math.cos(theta - w0)
    half = math.pi / 2.0

    def clip_lo_hi(v):
        return max(-radius, min(radius, v))

    def clip_hi_lo(v):
        return min(radius, max(-radius, v))

    if w0 <= half and theta <= w0 + half:
        r_l = clip_lo_hi(c - proj)
        r_u = clip_lo_hi(c + proj)
    elif w0 <= half:
        r_l = clip_lo_hi(c + proj)
        r_u = clip_lo_hi(c - proj)
    elif theta <= w0 - half:
        r_l = clip_hi_lo(c + proj)
        r_u = clip_hi_lo(c - proj)
    else:
        r_l = clip_lo_hi(c - proj)
        r_u = clip_lo_hi(c + proj)
    return r_l, r_u


def intersection_band_area(
    r0: float,
    t,
    radius: float,
    n_theta: int = 192,
    n_omega: int = 192,
):
    """Orientation-averaged band area for the nearest-intersection event.

    The raw double integral of the band width over (theta, omega0) in
    [0, pi)^2 carries an extra factor pi relative to the domain measure;
    averaging over a uniform host-line orientation (a 1/pi normalization)
    makes it a proper sub-measure of the generating cylinder.  Accepts a
    scalar or array of query distances ``t``.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    th, wth = gauss_legendre(0.0, math.pi, n_theta)
    om, wom = gauss_legendre(0.0, math.pi, n_omega)
    center = r0 * np.cos(th)[:, None]  # (theta, 1)
    absc = np.abs(np.cos(th[:, None] - om[None, :]))  # (theta, omega)
    proj = t_arr[:, None, None] * absc[None, :, :]  # (t, theta, omega)
    hi = np.clip(center[None] + proj, -radius, radius)
    lo = np.clip(center[None] - proj, -radius, radius)
    width = hi - lo
    area = np.einsum("tio,i,o->t", width, wth, wom) / math.pi
    if np.isscalar(t) or np.ndim(t) == 0:
        return float(area[0])
    return area


def cdf_nearest_intersection(
    model: BlpModel,
    r0: float,
    t,
    exponent: int | None = None,
):
    """CDF of the distance to the nearest intersection along a line of the
    process through the test point, averaged over the host orientation.

    ``exponent`` is the number of other lines that could create the
    intersection; under the conditioning (one line already passes through
    the test point) it defaults to ``n_b - 1``.
    """
    m = model.n_b - 1 if exponent is None else exponent
    if m < 0:
        raise ValueError("exponent must be nonnegative")
    area = intersection_band_area(r0, t, model.radius)
    if np.any(np.asarray(area) > model.domain_measure * (1.0 + 1e-9)):
        raise ArithmeticError("band area exceeds the domain measure")
    frac = np.clip(np.asarray(area) / model.domain_measure, 0.0, 1.0)
    cdf = 1.0 - (1.0 - frac) ** m
    if np.isscalar(t) or np.ndim(t) == 0:
        return float(cdf)
    return cdf
