"""Monte Carlo oracle: empirical estimates of every analytic quantity.

Trials are partitioned into fixed-size blocks; block i draws its
generator from ``SeedSequence([master_seed, i])`` and blocks are merged
in index order, so results are bit-identical for any worker count.
Workers share nothing; merging sums sufficient statistics.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .blcp import RadialFunctional, nearest_point_quantile
from .geometry import BlcpModel, BlpModel
from .quadrature import gauss_legendre

__all__ = [
    "McConfig",
    "Estimate",
    "mc_band_area",
    "mc_void_blp",
    "mc_void_blcp",
    "mc_nearest_line_distances",
    "mc_nearest_point_distances",
    "mc_nearest_intersection_distances",
    "mc_radial_histogram",
    "mc_sinr_success",
    "mc_noise_only_success",
    "mc_meta_samples",
    "mc_local_delay",
    "mc_conditional_pgfl",
    "mc_pgfl",
    "mc_plp_intersection_density",
]


@dataclass(frozen=True)
class McConfig:
    """Simulation budget and reproducibility knobs.

    ``materialize_radius`` bounds the region in which Cox points are
    generated; None lets each estimator pick a radius from its own
    truncation-bias bound.
    """

    trials: int
    master_seed: int = 0
    workers: int = 1
    materialize_radius: float | None = None
    confidence: float = 0.99
    block_size: int = 1024

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        if self.block_size < 1:
            raise ValueError("block_size must be at least 1")


@dataclass(frozen=True)
class Estimate:
    """Sample mean with a normal-approximation confidence interval."""

    mean: float
    std_error: float
    ci_low: float
    ci_high: float
    trials: int

    def covers(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high


def _blocks(cfg: McConfig) -> list[tuple[int, int]]:
    sizes = []
    left = cfg.trials
    i = 0
    while left > 0:
        n = min(cfg.block_size, left)
        sizes.append((i, n))
        left -= n
        i += 1
    return sizes


def _block_rng(cfg: McConfig, block_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([cfg.master_seed, block_index])
    )


def _map_blocks(cfg: McConfig, fn: Callable[[np.random.Generator, int], object]) -> list:
    """Run fn(rng, n) over all blocks, results in block-index order."""
    blocks = _blocks(cfg)
    if cfg.workers == 1:
        return [fn(_block_rng(cfg, i), n) for i, n in blocks]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(fn, _block_rng(cfg, i), n) for i, n in blocks]
        return [f.result() for f in futures]


def _estimate_from_sums(s: float, s2: float, n: int, confidence: float) -> Estimate:
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0)
    se = math.sqrt(var / n)
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    return Estimate(mean, se, mean - z * se, mean + z * se, n)


def _mean_estimator(cfg: McConfig, sampler: Callable[[np.random.Generator, int], np.ndarray]) -> Estimate:
    parts = _map_blocks(cfg, lambda rng, n: (s := sampler(rng, n), float(s.sum()), float((s * s).sum()))[1:])
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    return _estimate_from_sums(s, s2, cfg.trials, cfg.confidence)


def _collect_samples(cfg: McConfig, sampler: Callable[[np.random.Generator, int], np.ndarray]) -> np.ndarray:
    return np.concatenate(_map_blocks(cfg, sampler))


def _line_offsets(rng: np.random.Generator, n: int, model: BlpModel, r0: float) -> np.ndarray:
    """Signed distances l = r0*cos(theta) - r for n fresh line sets."""
    theta = rng.uniform(0.0, math.pi, (n, model.n_b))
    r = rng.uniform(-model.radius, model.radius, (n, model.n_b))
    return r0 * np.cos(theta) - r


def mc_band_area(model: BlpModel, r0: float, t: float, cfg: McConfig) -> Estimate:
    """Area of the generating-cylinder band within distance t of the test
    point, by conditioning on theta: for each sampled angle the exact
    r-extent of the band is known, so only the angle is random."""
    R = model.radius

    def sampler(rng, n):
        theta = rng.uniform(0.0, math.pi, n)
        c = r0 * np.cos(theta)
        lo = np.maximum(c - t, -R)
        hi = np.minimum(c + t, R)
        return math.pi * np.clip(hi - lo, 0.0, None)

    return _mean_estimator(cfg, sampler)


def mc_void_blp(model: BlpModel, r0: float, t: float, cfg: McConfig) -> Estimate:
    """Fraction of realizations with no line within distance t."""
    def sampler(rng, n):
        l = _line_offsets(rng, n, model, r0)
        return (np.abs(l).min(axis=1) > t).astype(float)

    return _mean_estimator(cfg, sampler)


def mc_void_blcp(model: BlcpModel, r0: float, t: float, cfg: McConfig) -> Estimate:
    """Fraction of realizations whose t-ball holds no Cox point: one
    Poisson draw on the total chord length per realization."""
    def sampler(rng, n):
        l = _line_offsets(rng, n, model.blp, r0)
        chord = 2.0 * np.sqrt(np.clip(t * t - l * l, 0.0, None))
        counts = rng.poisson(model.intensity * chord.sum(axis=1))
        return (counts == 0).astype(float)

    return _mean_estimator(cfg, sampler)


def mc_nearest_line_distances(model: BlpModel, r0: float, cfg: McConfig) -> np.ndarray:
    """Per-realization distance from the test point to the nearest line."""
    def sampler(rng, n):
        return np.abs(_line_offsets(rng, n, model, r0)).min(axis=1)

    return _collect_samples(cfg, sampler)


def _points_per_line(rng, l: np.ndarray, intensity: float, radius: float):
    """Poisson points on each line, parameterized by the signed offset
    from the projection of the test point, within the radius-ball around
    the test point.  Returns (counts, distances flat)."""
    half = np.sqrt(np.clip(radius * radius - l * l, 0.0, None))
    counts = rng.poisson(intensity * 2.0 * half)
    tot = int(counts.sum())
    l_flat = np.repeat(l.ravel(), counts.ravel())
    h_flat = np.repeat(half.ravel(), counts.ravel())
    y = rng.uniform(-1.0, 1.0, tot) * h_flat
    return counts, np.hypot(y, l_flat)


def mc_nearest_point_distances(model: BlcpModel, r0: float, cfg: McConfig) -> np.ndarray:
    """Per-realization distance to the nearest Cox point.

    Points are materialized in a ball chosen so large that an empty ball
    happens with probability far below 1/trials; empty realizations get
    the ball radius (flagged by a warning if any occur).
    """
    radius = cfg.materialize_radius
    if radius is None:
        radius = nearest_point_quantile(model, r0, 1.0 - min(1e-4 / cfg.trials, 1e-6))

    def sampler(rng, n):
        l = _line_offsets(rng, n, model.blp, r0)
        counts, d = _points_per_line(rng, l, model.intensity, radius)
        per_trial = counts.sum(axis=1)
        starts = np.concatenate(([0], np.cumsum(per_trial)[:-1]))
        out = np.full(n, radius)
        nonempty = per_trial > 0
        if d.size:
            mins = np.minimum.reduceat(d, np.minimum(starts, d.size - 1))
            out[nonempty] = mins[nonempty]
        return out

    samples = _collect_samples(cfg, sampler)
    if np.any(samples >= radius):
        warnings.warn("some realizations had no point within the materialize radius")
    return samples


def mc_nearest_intersection_distances(
    model: BlpModel, r0: float, cfg: McConfig, rho: float | None = None
) -> np.ndarray:
    """Distance from a point on a line to the nearest intersection with
    the other lines, under the conditional construction: a host line
    through the test point with uniform orientation, plus the remaining
    n_b - 1 lines.  ``rho`` overrides the host count reduction (None
    keeps n_b - 1 other lines)."""
    n_other = model.n_b - 1 if rho is None else int(rho)
    R = model.radius

    def sampler(rng, n):
        omega = rng.uniform(0.0, math.pi, n)
        theta = rng.uniform(0.0, math.pi, (n, n_other))
        r = rng.uniform(-R, R, (n, n_other))
        # signed position along the host line of each intersection
        denom = np.cos(theta - omega[:, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (r - r0 * np.cos(theta)) / denom
        s = np.where(np.abs(denom) < 1e-14, np.inf, s)
        return np.abs(s).min(axis=1)

    return _collect_samples(cfg, sampler)


def mc_radial_histogram(
    kind: str,
    model: BlpModel,
    w: float,
    r_max: float,
    cfg: McConfig,
):
    """Empirical radial density profile around the origin.

    kind "line_length": total chord length per annulus over annulus area
    (the chord lengths are computed exactly per line, no point sampling).
    kind "intersections": intersection counts per annulus over area.
    Returns a CurveTable with one row per annulus and CI columns.
    """
    from .curves import CurveTable

    if kind not in ("line_length", "intersections"):
        raise ValueError("kind must be line_length or intersections")
    edges = np.arange(0.0, r_max + w, w)
    edges = edges[edges <= r_max + 1e-12]
    n_bins = len(edges) - 1
    areas = math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)

    def chord_sampler(rng, n):
        totals = np.zeros((n, n_bins))
        l = np.abs(_line_offsets(rng, n, model, 0.0))
        for k in range(n_bins):
            inner, outer = edges[k], edges[k + 1]
            c_out = 2.0 * np.sqrt(np.clip(outer**2 - l * l, 0.0, None))
            c_in = 2.0 * np.sqrt(np.clip(inner**2 - l * l, 0.0, None))
            totals[:, k] = (c_out - c_in).sum(axis=1)
        return totals

    def intersection_sampler(rng, n):
        totals = np.zeros((n, n_bins))
        theta = rng.uniform(0.0, math.pi, (n, model.n_b))
        r = rng.uniform(-model.radius, model.radius, (n, model.n_b))
        iu = np.triu_indices(model.n_b, k=1)
        ta, tb = theta[:, iu[0]], theta[:, iu[1]]
        ra, rb = r[:, iu[0]], r[:, iu[1]]
        det = np.sin(tb - ta)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (ra * np.sin(tb) - rb * np.sin(ta)) / det
            y = (-ra * np.cos(tb) + rb * np.cos(ta)) / det
        dist = np.hypot(x, y)
        dist = np.where(np.abs(det) < 1e-14, np.inf, dist)
        for k in range(n_bins):
            totals[:, k] = ((dist >= edges[k]) & (dist < edges[k + 1])).sum(axis=1)
        return totals

    sampler = chord_sampler if kind == "line_length" else intersection_sampler
    parts = _map_blocks(
        cfg, lambda rng, n: (lambda t: (t.sum(axis=0), (t * t).sum(axis=0)))(sampler(rng, n))
    )
    s = np.sum([p[0] for p in parts], axis=0)
    s2 = np.sum([p[1] for p in parts], axis=0)
    n = cfg.trials
    mean = s / n
    se = np.sqrt(np.clip(s2 / n - mean * mean, 0.0, None) / n)
    z = float(stats.norm.ppf(0.5 + cfg.confidence / 2.0))
    centers = 0.5 * (edges[:-1] + edges[1:])
    density = mean / areas
    half_ci = z * se / areas
    return CurveTable(
        series=[kind] * n_bins,
        x=centers,
        y=density,
        ci_low=density - half_ci,
        ci_high=density + half_ci,
        metadata={
            "kind": kind,
            "n_b": model.n_b,
            "radius": model.radius,
            "annulus_width": w,
            "r_max": r_max,
            "trials": cfg.trials,
            "master_seed": cfg.master_seed,
        },
    )


def mc_plp_intersection_density(
    lambda_ppp: float, count_radius: float, cfg: McConfig
) -> Estimate:
    """Intersection density of a Poisson line process, estimated by
    counting pairwise intersections inside a disk.

    The process puts a Poisson number of generating points on the
    parameter cylinder with intensity lambda_ppp per unit area; only
    lines with |r| <= count_radius can intersect inside the disk, so
    sampling that window is exact, not a truncation.
    """
    rho = count_radius
    mean_lines = lambda_ppp * math.pi * 2.0 * rho
    area = math.pi * rho * rho

    def sampler(rng, n):
        out = np.zeros(n)
        for i in range(n):
            k = rng.poisson(mean_lines)
            if k < 2:
                continue
            theta = rng.uniform(0.0, math.pi, k)
            r = rng.uniform(-rho, rho, k)
            iu = np.triu_indices(k, k=1)
            det = np.sin(theta[iu[1]] - theta[iu[0]])
            with np.errstate(divide="ignore", invalid="ignore"):
                x = (r[iu[0]] * np.sin(theta[iu[1]]) - r[iu[1]] * np.sin(theta[iu[0]])) / det
                y = (-r[iu[0]] * np.cos(theta[iu[1]]) + r[iu[1]] * np.cos(theta[iu[0]])) / det
            dist2 = x * x + y * y
            dist2 = np.where(np.abs(det) < 1e-14, np.inf, dist2)
            out[i] = np.count_nonzero(dist2 <= rho * rho)
        return out / area

    return _mean_estimator(cfg, sampler)


def _auto_radius(model: BlcpModel, radio, noise_fraction: float = 1e-3,
                 cap: float = 4000.0) -> float:
    """Materialize radius such that the expected truncated interference
    (xi0-scaled) is below noise_fraction of the unit noise floor.

    The expected line length density beyond radius M falls like
    n_b/(pi*M), giving a mean tail of 2*lam*n_b*xi0*M**(1-alpha)/(alpha-1).
    """
    lam = model.intensity
    n_b = model.blp.n_b
    target = noise_fraction / (2.0 * lam * n_b * radio.xi0 / (radio.alpha - 1.0))
    radius = target ** (1.0 / (1.0 - radio.alpha)) if target > 0 else cap
    radius = max(radius, 4.0 * model.blp.radius)
    if radius > cap:
        warnings.warn(
            "interference truncation bound not met at the radius cap %.0f; "
            "estimates may carry truncation bias" % cap
        )
        radius = cap
    return radius


def mc_sinr_success(
    model: BlcpModel, radio, r0: float, cfg: McConfig
) -> Estimate:
    """Full SINR simulation: fresh lines, points, fading, and ALOHA marks
    per trial; fraction of trials with SINR above gamma."""
    radius = cfg.materialize_radius or _auto_radius(model, radio)
    lam = model.intensity
    g, al, xi0, p = radio.gamma, radio.alpha, radio.xi0, radio.p

    def sampler(rng, n):
        l = _line_offsets(rng, n, model.blp, r0)
        counts, d = _points_per_line(rng, l, lam, radius)
        per_trial = counts.sum(axis=1)
        starts = np.concatenate(([0], np.cumsum(per_trial)[:-1]))
        ok = np.zeros(n)
        if d.size == 0:
            return ok
        safe_starts = np.minimum(starts, d.size - 1)
        d1 = np.minimum.reduceat(d, safe_starts)
        nonempty = per_trial > 0
        # interference: every point except the nearest, exp fading, ALOHA
        h = rng.exponential(1.0, d.size)
        mark = rng.uniform(0.0, 1.0, d.size) < p
        contrib = np.where(mark, h * d ** (-al), 0.0)
        totals = np.add.reduceat(contrib, safe_starts)
        trial_idx = np.repeat(np.arange(n), per_trial)
        # remove the serving point's own contribution
        d1_pt = np.repeat(np.where(nonempty, d1, np.inf), per_trial)
        # mark one minimal-distance point per trial as the serving node
        min_idx = np.full(n, -1)
        cand = np.flatnonzero(d == d1_pt)
        min_idx[trial_idx[cand[::-1]]] = cand[::-1]
        serving = min_idx[nonempty]
        totals[nonempty] -= contrib[serving]
        h1 = rng.exponential(1.0, n)
        sinr = np.where(
            nonempty,
            xi0 * np.where(nonempty, d1, 1.0) ** (-al) * h1 / (1.0 + xi0 * totals),
            0.0,
        )
        ok[:] = (sinr > g) & nonempty
        return ok.astype(float)

    return _mean_estimator(cfg, sampler)


def mc_noise_only_success(model: BlcpModel, radio, r0: float, cfg: McConfig) -> Estimate:
    """Noise-limited control case: interferers removed, success is
    P(h1 > gamma * d1**alpha / xi0)."""
    radius = cfg.materialize_radius or _auto_radius(model, radio)

    def sampler(rng, n):
        l = _line_offsets(rng, n, model.blp, r0)
        counts, d = _points_per_line(rng, l, model.intensity, radius)
        per_trial = counts.sum(axis=1)
        starts = np.concatenate(([0], np.cumsum(per_trial)[:-1]))
        out = np.zeros(n)
        if d.size == 0:
            return out
        d1 = np.minimum.reduceat(d, np.minimum(starts, d.size - 1))
        nonempty = per_trial > 0
        h1 = rng.exponential(1.0, n)
        ok = h1 > radio.gamma * d1**radio.alpha / radio.xi0
        out[:] = ok & nonempty
        return out.astype(float)

    return _mean_estimator(cfg, sampler)


def mc_meta_samples(
    model: BlcpModel, radio, r0: float, fading_draws: int, cfg: McConfig
) -> np.ndarray:
    """Per-realization conditional success probability samples.

    fading_draws = 0 evaluates the conditional probability in closed form
    (exponential fading averaged exactly per interferer); a positive
    count estimates it by simulating that many fading/ALOHA slots.
    """
    radius = cfg.materialize_radius or _auto_radius(model, radio)
    lam = model.intensity
    g, al, xi0, p = radio.gamma, radio.alpha, radio.xi0, radio.p

    def sampler(rng, n):
        l = _line_offsets(rng, n, model.blp, r0)
        counts, d = _points_per_line(rng, l, lam, radius)
        per_trial = counts.sum(axis=1)
        starts = np.concatenate(([0], np.cumsum(per_trial)[:-1]))
        out = np.zeros(n)
        if d.size == 0:
            return out
        safe_starts = np.minimum(starts, d.size - 1)
        d1 = np.minimum.reduceat(d, safe_starts)
        nonempty = per_trial > 0
        trial_idx = np.repeat(np.arange(n), per_trial)
        d1_pt = np.repeat(np.where(nonempty, d1, np.inf), per_trial)
        noise = np.exp(-g * d1**al / xi0)
        if fading_draws == 0:
            logf = np.log(p / (1.0 + g * (d1_pt / d) ** al) + 1.0 - p)
            sums = np.add.reduceat(logf, safe_starts)
            own = np.log(p / (1.0 + g) + 1.0 - p)
            out[nonempty] = (noise * np.exp(sums - own))[nonempty]
            return out
        succ = np.zeros(n)
        for _ in range(fading_draws):
            h = rng.exponential(1.0, d.size)
            mark = rng.uniform(0.0, 1.0, d.size) < p
            contrib = np.where(mark & (d > d1_pt), h * d ** (-al), 0.0)
            totals = np.add.reduceat(contrib, safe_starts)
            h1 = rng.exponential(1.0, n)
            sinr = xi0 * d1 ** (-al) * h1 / (1.0 + xi0 * totals)
            succ += (sinr >= g) & nonempty
        out[:] = succ / fading_draws
        return out

    return _collect_samples(cfg, sampler)


def mc_local_delay(
    model: BlcpModel, radio, r0: float, max_slots: int, cfg: McConfig
) -> tuple[Estimate, float]:
    """Slotted transmission simulation: per realization, count slots
    until the first success (serving node gated by the ALOHA probability,
    fresh fading and interferer marks each slot).

    Returns (Estimate of the slot count, censoring fraction); censored
    realizations contribute max_slots, biasing the mean low, so a
    censoring fraction above 1% triggers a warning.
    """
    radius = cfg.materialize_radius or _auto_radius(model, radio)
    lam = model.intensity
    g, al, xi0, p = radio.gamma, radio.alpha, radio.xi0, radio.p

    def sampler(rng, n):
        l = _line_offsets(rng, n, model.blp, r0)
        counts, d = _points_per_line(rng, l, lam, radius)
        per_trial = counts.sum(axis=1)
        starts = np.concatenate(([0], np.cumsum(per_trial)[:-1]))
        slots = np.full(n, float(max_slots))
        if d.size == 0:
            return np.concatenate([slots, np.ones(n)])
        safe_starts = np.minimum(starts, d.size - 1)
        d1 = np.minimum.reduceat(d, safe_starts)
        nonempty = per_trial > 0
        d1_pt = np.repeat(np.where(nonempty, d1, np.inf), per_trial)
        alive = nonempty.copy()
        censored = np.ones(n)
        censored[~nonempty] = 1.0
        for slot in range(1, max_slots + 1):
            if not alive.any():
                break
            transmit = rng.uniform(0.0, 1.0, n) < p
            h = rng.exponential(1.0, d.size)
            mark = rng.uniform(0.0, 1.0, d.size) < p
            contrib = np.where(mark & (d > d1_pt), h * d ** (-al), 0.0)
            totals = np.add.reduceat(contrib, safe_starts)
            h1 = rng.exponential(1.0, n)
            sinr = xi0 * np.where(nonempty, d1, 1.0) ** (-al) * h1 / (1.0 + xi0 * totals)
            success = alive & transmit & (sinr >= g)
            slots[success] = float(slot)
            censored[success] = 0.0
            alive &= ~success
        return np.concatenate([slots, censored])

    parts = _map_blocks(cfg, lambda rng, n: (lambda a: (a[: len(a) // 2].sum(),
                                                        (a[: len(a) // 2] ** 2).sum(),
                                                        a[len(a) // 2 :].sum()))(sampler(rng, n)))
    s = sum(p_[0] for p_ in parts)
    s2 = sum(p_[1] for p_ in parts)
    n_censored = sum(p_[2] for p_ in parts)
    est = _estimate_from_sums(s, s2, cfg.trials, cfg.confidence)
    frac = n_censored / cfg.trials
    if frac > 0.01:
        warnings.warn(
            "censoring fraction %.3f exceeds 1%%; the mean delay may diverge" % frac
        )
    return est, frac


def _tail_log_factor(f: RadialFunctional, lam: float, l: np.ndarray, ymax: np.ndarray,
                     n_nodes: int = 48) -> np.ndarray:
    """Exact Poisson tail beyond the materialize window on each line:
    -2*lam*int_{ymax}^inf (1 - f(sqrt(y^2 + l^2))) dy."""
    u, w = gauss_legendre(0.0, 1.0, n_nodes)
    scale = np.maximum(ymax, 1.0)
    y = ymax[..., None] + scale[..., None] * u / (1.0 - u)
    jac = scale[..., None] * w / (1.0 - u) ** 2
    vals = (1.0 - f.f(np.sqrt(y * y + (l * l)[..., None]))) * jac
    return -2.0 * lam * vals.sum(axis=-1)


def mc_conditional_pgfl(
    model: BlcpModel, r0: float, d1: float, f: RadialFunctional, cfg: McConfig
) -> Estimate:
    """Product estimate of the conditional PGFL under the Palm-style
    construction: the host line is drawn uniformly from the band, other
    lines uniformly from the domain; band lines carry points only beyond
    the d1-ball.  Points outside the materialize window contribute an
    exact per-line tail factor."""
    R = model.blp.radius
    lam = model.intensity
    radius = cfg.materialize_radius or max(10.0 * (R + r0), 50.0 * d1)

    def sampler(rng, n):
        logs = np.zeros(n)
        # host line: uniform over the band via rejection
        host = np.empty(n)
        filled = 0
        while filled < n:
            theta = rng.uniform(0.0, math.pi, 2 * n)
            r = rng.uniform(-R, R, 2 * n)
            l = r0 * np.cos(theta) - r
            good = l[np.abs(l) <= d1]
            take = min(n - filled, good.size)
            host[filled : filled + take] = good[:take]
            filled += take
        others = _line_offsets(rng, n, model.blp, r0)[:, : model.blp.n_b - 1]
        all_l = np.column_stack([host, others])
        y_min = np.where(
            np.abs(all_l) <= d1,
            np.sqrt(np.clip(d1 * d1 - all_l * all_l, 0.0, None)),
            0.0,
        )
        y_max = np.sqrt(np.clip(radius * radius - all_l * all_l, 0.0, None))
        y_max = np.maximum(y_max, y_min)
        length = 2.0 * (y_max - y_min)
        counts = rng.poisson(lam * length)
        tot = int(counts.sum())
        l_flat = np.repeat(all_l.ravel(), counts.ravel())
        lo_flat = np.repeat(y_min.ravel(), counts.ravel())
        hi_flat = np.repeat(y_max.ravel(), counts.ravel())
        y = lo_flat + rng.uniform(0.0, 1.0, tot) * (hi_flat - lo_flat)
        dist = np.hypot(y, l_flat)
        vals = np.log(np.clip(f.f(dist), 1e-300, None))
        rows = np.repeat(
            np.repeat(np.arange(n)[:, None], all_l.shape[1], axis=1).ravel(),
            counts.ravel(),
        )
        np.add.at(logs, rows, vals)
        logs += _tail_log_factor(f, lam, all_l, y_max).sum(axis=1)
        return np.exp(logs)

    return _mean_estimator(cfg, sampler)


def mc_pgfl(
    model: BlcpModel, r0: float, f: RadialFunctional, cfg: McConfig,
    n_quantiles: int = 512,
) -> Estimate:
    """Unconditional PGFL estimate: d1 drawn per trial by inverse-CDF
    from the nearest-point law, then the Palm-construction product."""
    probs = (np.arange(n_quantiles) + 0.5) / n_quantiles
    table = np.asarray([nearest_point_quantile(model, r0, float(q)) for q in probs])

    def one_block(rng, n):
        d1s = np.interp(rng.uniform(0.0, 1.0, n), probs, table)
        vals = np.empty(n)
        for i, d1 in enumerate(d1s):
            vals[i] = _palm_product_single(model, r0, float(d1), f, rng,
                                           cfg.materialize_radius)
        return float(vals.sum()), float((vals * vals).sum())

    parts = _map_blocks(cfg, one_block)
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    return _estimate_from_sums(s, s2, cfg.trials, cfg.confidence)


def _palm_product_single(
    model: BlcpModel, r0: float, d1: float, f: RadialFunctional,
    rng: np.random.Generator, materialize_radius: float | None,
) -> float:
    R = model.blp.radius
    lam = model.intensity
    radius = materialize_radius or max(10.0 * (R + r0), 50.0 * max(d1, 1.0))
    if d1 <= 0:
        return 1.0
    while True:
        theta = rng.uniform(0.0, math.pi)
        r = rng.uniform(-R, R)
        host = r0 * math.cos(theta) - r
        if abs(host) <= d1:
            break
    others = _line_offsets(rng, 1, model.blp, r0)[0, : model.blp.n_b - 1]
    all_l = np.concatenate([[host], others])
    y_min = np.where(
        np.abs(all_l) <= d1, np.sqrt(np.clip(d1 * d1 - all_l**2, 0.0, None)), 0.0
    )
    y_max = np.maximum(np.sqrt(np.clip(radius**2 - all_l**2, 0.0, None)), y_min)
    counts = rng.poisson(lam * 2.0 * (y_max - y_min))
    log_val = 0.0
    for l, lo, hi, k in zip(all_l, y_min, y_max, counts):
        if k:
            y = lo + rng.uniform(0.0, 1.0, k) * (hi - lo)
            log_val += float(
                np.log(np.clip(f.f(np.hypot(y, l)), 1e-300, None)).sum()
            )
    log_val += float(_tail_log_factor(f, lam, all_l, y_max).sum())
    return math.exp(log_val)
