"""Wireless-network metrics for access points forming a binomial line
Cox process, seen from a receiver at distance ``r0`` from the center.

The receiver attaches to the nearest process point (distance ``d1``) and
treats every other point as an interferer with unit-rate exponential
fading; interferers may be thinned by an ALOHA transmit probability.

All conditional quantities share one structure: a noise factor times the
PGFL-style mixture of per-line kernels, where each kernel integrates a
moment of the per-interferer factor

    base(s) = p / (1 + gamma * (d1 / s)**alpha) + 1 - p

along the line.  Moments of complex order b enter through base**b =
exp(b * log(base)), which vectorizes over a whole Gil-Pelaez frequency
grid at once.

The cylinder double integrals collapse to one dimension: an integrand
depending only on the line offset ``l = r0*cos(theta) - r`` integrates to
``int g(l) w(l) dl`` with the angular weight ``w(l)`` = measure of theta
whose domain strip covers offset l.  Panels are split at the kinks of w
and at the band edge, each under a sin^2 substitution that absorbs the
square-root endpoint behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._bands import integrate_band, offset_grid
from .blcp import (
    RadialFunctional,
    conditional_pgfl,
    expect_over_nearest_distance,
    nearest_distance_quadrature,
)
from .blp import domain_band_area
from .geometry import BlcpModel
from .quadrature import gauss_legendre

__all__ = [
    "RadioParams",
    "MomentOrder",
    "MetaQuery",
    "DIVERGENT",
    "success_probability",
    "pgfl_closed_form_alpha2_nb1",
    "rate_ccdf",
    "conditional_success_moment",
    "moment",
    "meta_distribution",
    "mean_local_delay",
    "successful_transmission_density",
    "optimal_transmit_probability",
]

# Marker value for a mean local delay whose d1-average does not converge.
DIVERGENT = math.inf

# |Re(exponent)| cap before exp(); beyond this the kernel is saturated and
# the divergence detector upstream takes over.
_EXP_CAP = 700.0

# Integrand magnitude at which the d1-average is declared divergent.
_DIVERGENCE_THRESHOLD = 1e12


@dataclass(frozen=True)
class RadioParams:
    """Link-level parameters.

    ``xi0`` absorbs transmit power, noise power, path-loss constant and
    antenna gains into one scale; the SINR denominator carries "1 +", so
    no separate noise power parameter exists.  ``p`` is the ALOHA
    transmit probability of each interferer (the moment kernels use it;
    plain success_probability does not).
    """

    alpha: float = 2.0
    xi0: float = 2.9858e-8
    gamma: float = 0.1
    p: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha <= 1.0:
            raise ValueError("alpha must exceed 1 for integrable interference")
        if self.xi0 <= 0:
            raise ValueError("xi0 must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")


@dataclass(frozen=True)
class MomentOrder:
    """Order of a conditional success-probability moment; complex orders
    b = j*u feed the Gil-Pelaez inversion."""

    b: complex

    def __post_init__(self) -> None:
        if not (math.isfinite(self.b.real) and math.isfinite(self.b.imag)):
            raise ValueError("b must be finite")


@dataclass(frozen=True)
class MetaQuery:
    """A meta-distribution evaluation point: SINR threshold ``gamma`` and
    reliability level ``beta``."""

    gamma: float
    beta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")


def _safe_exp(z: np.ndarray) -> np.ndarray:
    """exp with the real part capped at +-_EXP_CAP to avoid overflow;
    saturated values are judged by the divergence detector upstream."""
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.exp(np.clip(z.real, -_EXP_CAP, _EXP_CAP) + 1j * z.imag)
    return np.exp(np.clip(z, -_EXP_CAP, _EXP_CAP))


def _log_base(
    radio: RadioParams, d1: float, dist: np.ndarray
) -> np.ndarray:
    """log of the per-interferer slot factor at distance ``dist``."""
    f = 1.0 / (1.0 + radio.gamma * (d1 / dist) ** radio.alpha)
    return np.log(radio.p * f + 1.0 - radio.p)


def _conditional_moment_vec(
    model: BlcpModel,
    radio: RadioParams,
    r0: float,
    d1: float,
    b: np.ndarray,
    n_l: int = 48,
    n_y: int = 64,
) -> np.ndarray:
    """M_b(d1) for an array of (possibly complex) orders b."""
    lam = model.intensity
    R = model.blp.radius
    n_b = model.blp.n_b
    b = np.asarray(b)
    if d1 <= 0:
        return np.ones(b.shape, dtype=b.dtype)

    l, w_band, w_dom = offset_grid(r0, R, d1, n_l)
    a_d = domain_band_area(r0, d1, R)

    # semi-infinite y-integral under y = y0 + c*v/(1-v); the kernel
    # 1 - base**b decays like s**-alpha (alpha > 1), so the transformed
    # integrand vanishes at v = 1.
    v, wv = gauss_legendre(0.0, 1.0, n_y)
    scale = max(1.0, d1)
    stretch = scale * v / (1.0 - v)
    jac = wv * scale / (1.0 - v) ** 2

    y0_band = np.sqrt(np.clip(d1 * d1 - l * l, 0.0, None))
    y0_band[np.abs(l) > d1] = 0.0

    def kernel_integrals(y0: np.ndarray) -> np.ndarray:
        # returns exp(-2 lam * int_{y0}^inf (1 - base**b) dy), shape (l, b)
        y = y0[:, None] + stretch[None, :]
        lb = _log_base(radio, d1, np.sqrt(y * y + (l * l)[:, None]))
        kern = 1.0 - np.exp(lb[:, :, None] * b[None, None, :])
        expo = 2.0 * lam * np.einsum("y,lyb->lb", jac, kern)
        return _safe_exp(-expo)

    g_i = kernel_integrals(y0_band)
    g_ni = kernel_integrals(np.zeros_like(l))
    band_i = w_band @ g_i
    band_ni = w_band @ g_ni
    total_ni = w_dom @ g_ni
    comp_ni = total_ni - band_ni

    noise = _safe_exp(-b * radio.gamma * d1**radio.alpha / radio.xi0)
    mix = (band_i + comp_ni) / model.blp.domain_measure
    # negative orders can overflow here; the divergence detector in the
    # d1-average turns the inf into the DIVERGENT marker
    with np.errstate(over="ignore"):
        return noise * (band_i / a_d) * mix ** (n_b - 1)


def _order_array(order) -> tuple[np.ndarray, bool]:
    b = order.b if isinstance(order, MomentOrder) else order
    b = complex(b)
    if b.imag == 0.0:
        return np.asarray([b.real]), True
    return np.asarray([b], dtype=complex), False


def conditional_success_moment(
    model: BlcpModel, radio: RadioParams, r0: float, d1: float, order
) -> complex:
    """b-th moment of the conditional success probability given the
    serving distance ``d1``.

    ``order`` may be a MomentOrder, float, or complex.  Real negative
    orders can blow up (see mean_local_delay); the value is returned
    as-is and divergence is judged by the d1-average.
    """
    b, real = _order_array(order)
    val = _conditional_moment_vec(model, radio, r0, d1, b)[0]
    return float(np.real(val)) if real else complex(val)


def moment(
    model: BlcpModel,
    radio: RadioParams,
    r0: float,
    order,
    n_panel_nodes: int = 32,
) -> complex:
    """Unconditional b-th moment: the conditional moment averaged over
    the nearest-point distance."""
    b, real = _order_array(order)
    nodes, weights = _d1_rule(model, radio, r0, n_panel_nodes)
    total = 0.0 + 0.0j
    for t, w in zip(nodes, weights):
        if w == 0.0:
            continue
        val = _conditional_moment_vec(model, radio, r0, float(t), b)[0]
        if abs(val) > _DIVERGENCE_THRESHOLD:
            return DIVERGENT
        total += w * val
    return total.real if real else total


def _d1_rule(
    model: BlcpModel, radio: RadioParams, r0: float, n_panel_nodes: int = 32
) -> tuple[np.ndarray, np.ndarray]:
    R = model.blp.radius
    return nearest_distance_quadrature(
        model, r0, n_panel_nodes, extra_breaks=(abs(R - r0), R + r0)
    )


def success_probability(
    model: BlcpModel, radio: RadioParams, r0: float, n_panel_nodes: int = 32
) -> float:
    """SINR CCDF at threshold gamma for nearest-point association with
    all interferers active (the ALOHA probability is ignored here).

    Averages exp(-gamma * d1**alpha / xi0) times the conditional PGFL of
    the interference factor over the serving distance.
    """
    if radio.gamma == 0.0:
        return 1.0
    R = model.blp.radius

    def integrand(d1: float) -> float:
        f = RadialFunctional(
            lambda r: 1.0 / (1.0 + radio.gamma * (d1 / r) ** radio.alpha),
            tail_exponent=radio.alpha,
        )
        noise = math.exp(
            -min(radio.gamma * d1**radio.alpha / radio.xi0, _EXP_CAP)
        )
        return noise * conditional_pgfl(model, r0, d1, f)

    val = expect_over_nearest_distance(
        model, r0, integrand, n_panel_nodes, extra_breaks=(abs(R - r0), R + r0)
    )
    return float(np.clip(val, 0.0, 1.0))


def pgfl_closed_form_alpha2_nb1(
    model: BlcpModel, radio: RadioParams, r0: float, d1: float
) -> float:
    """Single-line, alpha = 2 conditional PGFL of the interference
    factor, with the along-line integral in closed form:

        exp(-2 lam * g*d1^2 / sqrt(g*d1^2 + l^2)
             * arctan(sqrt((g*d1^2 + l^2) / (d1^2 - l^2))))

    averaged over the band.  Cross-checks the general quadrature.
    """
    if radio.alpha != 2.0:
        raise ValueError("closed form requires alpha = 2")
    if model.blp.n_b != 1:
        raise ValueError("closed form requires a single line")
    if d1 <= 0:
        return 1.0
    g = radio.gamma
    if g == 0.0:
        return 1.0
    lam = model.intensity
    R = model.blp.radius

    def kernel(l):
        c = np.sqrt(g * d1 * d1 + l * l)
        inner = np.sqrt((g * d1 * d1 + l * l) / np.clip(d1 * d1 - l * l, 1e-300, None))
        return np.exp(-2.0 * lam * g * d1 * d1 / c * np.arctan(inner))

    band = integrate_band(kernel, r0, R, d1)
    a_d = domain_band_area(r0, d1, R)
    return float(np.clip(band / a_d, 0.0, 1.0))


def rate_ccdf(
    model: BlcpModel,
    radio: RadioParams,
    r0: float,
    bandwidth: float,
    filesize: float,
    deadline: float,
) -> float:
    """Probability that the instantaneous Shannon capacity sustains the
    rate filesize/deadline: the success probability at threshold
    2**(filesize / (deadline * bandwidth)) - 1."""
    if bandwidth <= 0 or deadline <= 0 or filesize < 0:
        raise ValueError("bandwidth and deadline must be positive, filesize >= 0")
    threshold = 2.0 ** (filesize / (deadline * bandwidth)) - 1.0
    if threshold == 0.0:
        return 1.0
    return success_probability(model, replace(radio, gamma=threshold), r0)


class _MomentGrid:
    """Cached values of M_{ju} on a growing frequency grid, organized in
    octave segments (0, 1], (1, 2], (2, 4], ... for the Gil-Pelaez
    integral."""

    def __init__(self, model: BlcpModel, radio: RadioParams, r0: float,
                 nodes_per_unit: int = 4, min_nodes: int = 64):
        self.model = model
        self.radio = radio
        self.r0 = r0
        self.nodes_per_unit = nodes_per_unit
        self.min_nodes = min_nodes
        self.segments: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self.d1_nodes, self.d1_weights = _d1_rule(model, radio, r0)

    def _eval_m(self, u: np.ndarray) -> np.ndarray:
        b = 1j * u
        total = np.zeros(u.shape, dtype=complex)
        for t, w in zip(self.d1_nodes, self.d1_weights):
            if w == 0.0:
                continue
            total += w * _conditional_moment_vec(
                self.model, self.radio, self.r0, float(t), b
            )
        return total

    def segment(self, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        while len(self.segments) <= k:
            i = len(self.segments)
            lo, hi = (0.0, 1.0) if i == 0 else (2.0 ** (i - 1), 2.0**i)
            if i == 0:
                lo = 1e-6  # Gil-Pelaez integrand is finite at u -> 0
            n = max(self.min_nodes, int(self.nodes_per_unit * (hi - lo)))
            u, w = gauss_legendre(lo, hi, n)
            self.segments.append((u, w, self._eval_m(u)))
        return self.segments[k]


def _meta_from_grid(grid: _MomentGrid, beta: float, tail_tol: float = 1e-4,
                    max_segments: int = 10) -> float:
    """Gil-Pelaez sum over octave segments.

    |M_{ju}| decays roughly like 1/u here, so octave contributions fall
    slowly; the sum stops only after two consecutive octaves are below
    tail_tol, and a Shanks extrapolation of the last partial sums mops up
    the residual geometric-ish tail beyond the last octave.
    """
    if beta <= 0.0:
        return 1.0
    if beta >= 1.0:
        return 0.0
    log_beta = math.log(beta)
    partials = []
    total = 0.0
    prev_small = False
    for k in range(max_segments):
        u, w, m = grid.segment(k)
        contrib = float(np.sum(w * np.imag(np.exp(-1j * u * log_beta) * m) / u))
        total += contrib
        partials.append(total)
        small = abs(contrib) < tail_tol
        if k >= 4 and small and prev_small:
            break
        prev_small = small
    if len(partials) >= 3:
        d1 = partials[-2] - partials[-3]
        d2 = partials[-1] - partials[-2]
        denom = d2 - d1
        # Shanks transform; skip when the differences are not contracting
        if abs(denom) > 1e-15 and abs(d2) < 0.5 * abs(d1) + tail_tol:
            accel = partials[-1] - d2 * d2 / denom
            if abs(accel - total) < 0.01:
                total = accel
    return float(np.clip(0.5 + total / math.pi, 0.0, 1.0))


def meta_distribution(
    model: BlcpModel, radio: RadioParams, r0: float, query
) -> float | np.ndarray:
    """Meta distribution of the SINR: the probability, over process
    realizations, that the conditional (fading- and ALOHA-averaged)
    success probability reaches the reliability level beta.

    Gil-Pelaez inversion of the imaginary moments M_{ju}; ``query`` is a
    MetaQuery or a sequence of them (sharing one gamma), and the moment
    grid is computed once and reused across beta values.
    """
    queries = [query] if isinstance(query, MetaQuery) else list(query)
    if not queries:
        return np.asarray([])
    gammas = {q.gamma for q in queries}
    if len(gammas) > 1:
        raise ValueError("one meta_distribution call handles a single gamma")
    radio_q = replace(radio, gamma=queries[0].gamma)
    grid = _MomentGrid(model, radio_q, r0)
    vals = np.asarray([_meta_from_grid(grid, q.beta) for q in queries])
    if isinstance(query, MetaQuery):
        return float(vals[0])
    return vals


def mean_local_delay(
    model: BlcpModel, radio: RadioParams, r0: float
) -> float:
    """Expected number of slots until the first successful transmission,
    M_{-1} / p.  Returns DIVERGENT (math.inf) when the d1-average blows
    up (the delay phase transition); detection threshold 1e12 on the
    integrand."""
    if radio.p <= 0.0:
        raise ValueError("p must be positive for a finite delay")
    if radio.gamma == 0.0:
        return 1.0 / radio.p
    m = float(np.real(moment(model, radio, r0, -1.0)))
    if not math.isfinite(m):
        return DIVERGENT
    return m / radio.p


def successful_transmission_density(
    model: BlcpModel, radio: RadioParams, r0: float
) -> float:
    """Density of simultaneously transmitting and succeeding nodes,
    p * lambda * M_1 (M_1 carries the ALOHA thinning)."""
    if radio.p == 0.0:
        return 0.0
    m1 = moment(model, radio, r0, 1.0)
    return radio.p * model.intensity * float(np.real(m1))


def optimal_transmit_probability(
    model: BlcpModel, radio: RadioParams, r0: float, tol: float = 1e-3
) -> float:
    """ALOHA probability minimizing the mean local delay: a 16-point grid
    scan refined by golden-section search, deterministic by design."""
    def delay(p: float) -> float:
        return mean_local_delay(model, replace(radio, p=p), r0)

    grid = np.linspace(1.0 / 16.0, 1.0, 16)
    values = [delay(float(p)) for p in grid]
    if all(math.isinf(v) for v in values):
        raise ArithmeticError("mean local delay diverges on the whole grid")
    k = int(np.argmin(values))
    lo = float(grid[max(k - 1, 0)])
    hi = float(grid[min(k + 1, len(grid) - 1)])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = delay(c), delay(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = delay(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = delay(d)
    return float(0.5 * (a + b))
