import math
import warnings

import numpy as np
import pytest

from blinecox import blcp, blp, metrics
from blinecox.blcp import RadialFunctional
from blinecox.geometry import BlcpModel, BlpModel
from blinecox.metrics import RadioParams
from blinecox.montecarlo import (
    Estimate,
    McConfig,
    mc_band_area,
    mc_conditional_pgfl,
    mc_local_delay,
    mc_meta_samples,
    mc_nearest_intersection_distances,
    mc_nearest_line_distances,
    mc_nearest_point_distances,
    mc_noise_only_success,
    mc_pgfl,
    mc_plp_intersection_density,
    mc_radial_histogram,
    mc_sinr_success,
    mc_void_blcp,
    mc_void_blp,
)

CFG = McConfig(trials=20000, master_seed=7, workers=4)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(trials=0)
    with pytest.raises(ValueError):
        McConfig(trials=1, workers=0)
    with pytest.raises(ValueError):
        McConfig(trials=1, confidence=1.0)
    with pytest.raises(ValueError):
        McConfig(trials=1, block_size=0)


def test_estimate_interval():
    e = Estimate(mean=1.0, std_error=0.1, ci_low=0.7, ci_high=1.3, trials=100)
    assert e.covers(1.2)
    assert not e.covers(0.5)


def test_band_area_estimator(blp10):
    est = mc_band_area(blp10, 25.0, 40.0, CFG)
    exact = blp.domain_band_area(25.0, 40.0, 50.0)
    assert abs(est.mean - exact) <= 4.0 * est.std_error
    # unclipped band: the theta-conditioned width is constant, variance 0
    est = mc_band_area(blp10, 25.0, 10.0, CFG)
    assert est.std_error == 0.0
    assert est.mean == pytest.approx(2.0 * math.pi * 10.0)


def test_void_estimators(blp10, blcp10):
    est = mc_void_blp(blp10, 25.0, 10.0, CFG)
    assert abs(est.mean - blp.void_prob_blp(blp10, 25.0, 10.0)) <= 4.0 * est.std_error
    est = mc_void_blcp(blcp10, 0.0, 3.0, CFG)
    assert abs(est.mean - blcp.void_prob_blcp(blcp10, 0.0, 3.0)) <= 4.0 * est.std_error
    est = mc_void_blp(blp10, 0.0, 0.0, CFG)
    assert est.mean == 1.0 and est.std_error == 0.0


def test_worker_determinism(blp10, blcp10):
    base = dict(trials=4000, master_seed=11)
    r1 = mc_nearest_line_distances(blp10, 25.0, McConfig(workers=1, **base))
    r4 = mc_nearest_line_distances(blp10, 25.0, McConfig(workers=4, **base))
    r16 = mc_nearest_line_distances(blp10, 25.0, McConfig(workers=16, **base))
    assert np.array_equal(r1, r4) and np.array_equal(r1, r16)
    e1 = mc_void_blcp(blcp10, 0.0, 3.0, McConfig(workers=1, **base))
    e16 = mc_void_blcp(blcp10, 0.0, 3.0, McConfig(workers=16, **base))
    assert e1 == e16


def test_block_size_changes_nothing_for_sample_collectors(blp10):
    a = mc_nearest_line_distances(
        blp10, 0.0, McConfig(trials=3000, master_seed=3, block_size=1024)
    )
    b = mc_nearest_line_distances(
        blp10, 0.0, McConfig(trials=3000, master_seed=3, block_size=1024, workers=8)
    )
    assert np.array_equal(a, b)


def test_nearest_line_distances_match_cdf(blp10):
    d = mc_nearest_line_distances(blp10, 25.0, CFG)
    for t in (5.0, 12.0, 30.0):
        emp = (d <= t).mean()
        exact = blp.cdf_nearest_line(blp10, 25.0, t)
        se = math.sqrt(max(exact * (1 - exact), 1e-12) / len(d))
        assert abs(emp - exact) <= 4.0 * se


def test_nearest_point_distances_match_cdf(blcp10):
    d = mc_nearest_point_distances(blcp10, 0.0, CFG)
    for t in (1.0, 3.0, 8.0):
        emp = (d <= t).mean()
        exact = blcp.cdf_nearest_blcp_point(blcp10, 0.0, t)
        se = math.sqrt(max(exact * (1 - exact), 1e-12) / len(d))
        assert abs(emp - exact) <= 4.0 * se


def test_nearest_intersection_distances_match_cdf(blp10):
    d = mc_nearest_intersection_distances(blp10, 0.0, CFG)
    for t in (2.0, 6.0, 15.0):
        emp = (d <= t).mean()
        exact = blp.cdf_nearest_intersection(blp10, 0.0, t)
        se = math.sqrt(max(exact * (1 - exact), 1e-12) / len(d))
        assert abs(emp - exact) <= 4.0 * se


def test_radial_histograms(blp10):
    cfg = McConfig(trials=20000, master_seed=2, workers=4)
    hist = mc_radial_histogram("line_length", blp10, 5.0, 25.0, cfg)
    assert np.all(np.abs(hist.y - 0.1) < 0.01)  # plateau inside the disk
    hist = mc_radial_histogram("intersections", blp10, 5.0, 25.0, cfg)
    plateau = 10 * 9 / (4 * math.pi * 50.0**2)
    assert np.all(np.abs(hist.y - plateau) < 0.1 * plateau)
    with pytest.raises(ValueError):
        mc_radial_histogram("bogus", blp10, 5.0, 25.0, cfg)


def test_plp_intersection_density():
    cfg = McConfig(trials=3000, master_seed=19, workers=4)
    est = mc_plp_intersection_density(0.1, 20.0, cfg)
    exact = blp.plp_intersection_density(0.1)
    assert abs(est.mean - exact) <= max(3.0 * est.std_error, 0.02 * exact)


def test_conditional_pgfl_product_estimate(blcp10):
    f = RadialFunctional(
        f=lambda r: 1.0 / (1.0 + 25.0 / np.clip(r, 1e-300, None) ** 2),
        tail_exponent=2.0,
    )
    est = mc_conditional_pgfl(blcp10, 0.0, 5.0, f, CFG)
    exact = blcp.conditional_pgfl(blcp10, 0.0, 5.0, f)
    assert abs(est.mean - exact) <= 3.0 * est.std_error


def test_pgfl_product_estimate(blcp10):
    f = RadialFunctional(
        f=lambda r: 1.0 / (1.0 + 25.0 / np.clip(r, 1e-300, None) ** 2),
        tail_exponent=2.0,
    )
    cfg = McConfig(trials=4000, master_seed=9, workers=4, block_size=256)
    est = mc_pgfl(blcp10, 0.0, f, cfg)
    exact = blcp.pgfl(blcp10, 0.0, f)
    assert abs(est.mean - exact) <= 3.0 * est.std_error


def test_noise_only_success(blcp10):
    # without interferers the success probability is E[exp(-gamma d1^2 / xi0)]
    radio = RadioParams(alpha=2.0, xi0=10.0, gamma=0.1, p=1.0)
    cfg = McConfig(trials=30000, master_seed=13, workers=4, materialize_radius=500.0)
    est = mc_noise_only_success(blcp10, radio, 0.0, cfg)
    exact = blcp.expect_over_nearest_distance(
        blcp10, 0.0, lambda d1: math.exp(-radio.gamma * d1**2 / radio.xi0)
    )
    assert abs(est.mean - exact) <= 4.0 * est.std_error


def test_sinr_success_trivial_threshold(blcp10):
    radio = RadioParams(alpha=2.0, xi0=2.9858e8, gamma=1e-12, p=1.0)
    cfg = McConfig(trials=2000, master_seed=1, workers=2, materialize_radius=500.0)
    est = mc_sinr_success(blcp10, radio, 0.0, cfg)
    assert est.mean == pytest.approx(1.0, abs=1e-3)


def test_meta_samples_tower_property(blcp10):
    # the mean conditional success probability equals the success rate
    radio = RadioParams(alpha=2.0, xi0=2.9858e8, gamma=0.1, p=1.0)
    cfg = McConfig(trials=10000, master_seed=21, workers=4, block_size=512,
                   materialize_radius=1000.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        samples = mc_meta_samples(blcp10, radio, 0.0, 0, cfg)
        inner = mc_meta_samples(blcp10, radio, 0.0, 25, cfg)
        full = mc_sinr_success(blcp10, radio, 0.0, cfg)
    assert np.all((samples >= 0.0) & (samples <= 1.0))
    assert np.all((inner >= 0.0) & (inner <= 1.0))
    se = full.std_error + samples.std(ddof=1) / math.sqrt(len(samples))
    assert abs(samples.mean() - full.mean) <= 4.0 * se
    assert abs(inner.mean() - samples.mean()) <= 0.02


def test_local_delay_estimator():
    model = BlcpModel(BlpModel(n_b=2, radius=20.0), intensity=0.05)
    radio = RadioParams(alpha=2.0, xi0=10.0, gamma=0.01, p=0.5)
    cfg = McConfig(trials=8000, master_seed=17, workers=4, block_size=512,
                   materialize_radius=400.0)
    est, censored = mc_local_delay(model, radio, 0.0, 200, cfg)
    analytic = metrics.mean_local_delay(model, radio, 0.0)
    assert censored < 0.001
    assert est.mean == pytest.approx(analytic, rel=0.05)


def test_local_delay_gamma_zero():
    model = BlcpModel(BlpModel(n_b=2, radius=20.0), intensity=0.05)
    radio = RadioParams(alpha=2.0, xi0=10.0, gamma=0.0, p=1.0)
    cfg = McConfig(trials=2000, master_seed=17, workers=2, materialize_radius=200.0)
    est, censored = mc_local_delay(model, radio, 0.0, 50, cfg)
    assert est.mean == pytest.approx(1.0, abs=1e-9)
    assert censored == 0.0
