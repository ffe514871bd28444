import math
from dataclasses import replace

import numpy as np
import pytest

from blinecox.geometry import BlcpModel, BlpModel
from blinecox.metrics import (
    DIVERGENT,
    MetaQuery,
    RadioParams,
    _MomentGrid,
    conditional_success_moment,
    mean_local_delay,
    meta_distribution,
    moment,
    optimal_transmit_probability,
    pgfl_closed_form_alpha2_nb1,
    rate_ccdf,
    success_probability,
    successful_transmission_density,
)

# interference-limited regime: the link constant large enough that noise
# is negligible and the metrics are non-degenerate
XI0 = 2.9858e8
RADIO = RadioParams(alpha=2.0, xi0=XI0, gamma=0.1, p=1.0)


@pytest.fixture(scope="module")
def model():
    return BlcpModel(BlpModel(n_b=10, radius=50.0), intensity=0.1)


def test_radio_params_validation():
    with pytest.raises(ValueError):
        RadioParams(alpha=1.0)
    with pytest.raises(ValueError):
        RadioParams(p=1.5)
    with pytest.raises(ValueError):
        RadioParams(gamma=-0.1)
    with pytest.raises(ValueError):
        RadioParams(xi0=0.0)


def test_success_probability_range_and_gamma_monotonicity(model):
    prev = 1.1
    for gamma in (0.01, 0.1, 1.0, 10.0):
        radio = replace(RADIO, gamma=gamma)
        v = success_probability(model, radio, 25.0)
        assert 0.0 <= v <= 1.0
        assert v <= prev + 1e-12
        prev = v


def test_success_probability_gamma_zero_limit(model):
    v = success_probability(model, replace(RADIO, gamma=1e-12), 0.0)
    assert v == pytest.approx(1.0, abs=1e-6)


def test_success_probability_unimodal_in_r0(model):
    vals = [success_probability(model, RADIO, float(r0)) for r0 in np.linspace(0, 120, 13)]
    k = int(np.argmax(vals))
    assert 0 < k < 12  # interior maximum near the edge of the generation disk
    assert all(b >= a - 1e-12 for a, b in zip(vals[: k + 1], vals[1 : k + 1]))
    assert all(b <= a + 1e-12 for a, b in zip(vals[k:], vals[k + 1 :]))


def test_closed_form_matches_general_quadrature():
    model = BlcpModel(BlpModel(n_b=1, radius=50.0), intensity=0.1)
    radio = RadioParams(alpha=2.0, xi0=10.0, gamma=0.1, p=1.0)
    for d1 in (1.0, 5.0, 20.0):
        general = conditional_success_moment(model, radio, 0.0, d1, 1.0)
        closed = math.exp(-radio.gamma * d1**2 / radio.xi0) * pgfl_closed_form_alpha2_nb1(
            model, radio, 0.0, d1
        )
        assert general == pytest.approx(closed, abs=1e-6)


def test_closed_form_rejects_wrong_regime(model):
    with pytest.raises(ValueError):
        pgfl_closed_form_alpha2_nb1(model, RADIO, 0.0, 5.0)  # n_b != 1
    single = BlcpModel(BlpModel(n_b=1, radius=50.0), intensity=0.1)
    with pytest.raises(ValueError):
        pgfl_closed_form_alpha2_nb1(single, replace(RADIO, alpha=3.0), 0.0, 5.0)


def test_moment_order_one_matches_success_probability(model):
    # two independent integration paths for the same quantity
    a = success_probability(model, RADIO, 25.0)
    b = float(np.real(moment(model, RADIO, 25.0, 1.0)))
    assert a == pytest.approx(b, abs=1e-9)


def test_moment_at_zero_is_one(model):
    # the d1 averaging rule drops tail mass beyond its 1e-7 quantile
    assert float(np.real(moment(model, RADIO, 0.0, 0.0))) == pytest.approx(1.0, abs=1e-6)


def test_imaginary_moments_bounded(model):
    grid = _MomentGrid(model, RADIO, 0.0)
    u = np.linspace(0.5, 100.0, 80)
    m = grid._eval_m(u)
    assert np.all(np.abs(m) <= 1.0 + 1e-9)


def test_meta_distribution_is_valid_ccdf(model):
    betas = np.linspace(0.005, 0.995, 64)
    vals = meta_distribution(
        model, RADIO, 0.0, [MetaQuery(RADIO.gamma, float(b)) for b in betas]
    )
    assert np.all((0.0 <= vals) & (vals <= 1.0))
    assert np.all(np.diff(vals) <= 1e-4)  # nonincreasing up to quadrature noise


def test_meta_distribution_beta_limits(model):
    assert meta_distribution(model, RADIO, 0.0, MetaQuery(RADIO.gamma, 0.0)) == 1.0
    assert meta_distribution(model, RADIO, 0.0, MetaQuery(RADIO.gamma, 1.0)) == 0.0


def test_meta_rejects_mixed_gammas(model):
    with pytest.raises(ValueError):
        meta_distribution(model, RADIO, 0.0, [MetaQuery(0.1, 0.5), MetaQuery(0.2, 0.5)])


def test_mean_local_delay_limits(model):
    assert mean_local_delay(model, replace(RADIO, gamma=0.0), 0.0) == 1.0
    assert mean_local_delay(model, replace(RADIO, gamma=0.0, p=0.5), 0.0) == 2.0
    with pytest.raises(ValueError):
        mean_local_delay(model, replace(RADIO, p=0.0), 0.0)


def test_mean_local_delay_u_shape(model):
    ps = [0.2, 0.5, 0.9, 1.0]
    vals = [mean_local_delay(model, replace(RADIO, p=p), 0.0) for p in ps]
    assert vals[1] < vals[0]  # decreasing at small p
    assert vals[3] > vals[1]  # increasing toward p = 1


def test_delay_jensen_bound(model):
    for p in (0.3, 0.6, 1.0):
        radio = replace(RADIO, p=p)
        d = mean_local_delay(model, radio, 0.0)
        m1 = float(np.real(moment(model, radio, 0.0, 1.0)))
        if math.isfinite(d):
            assert d >= 1.0 / m1 - 1e-9


def test_delay_divergence_marker(model):
    # a very aggressive threshold forces the heavy tail to blow up
    radio = RadioParams(alpha=2.0, xi0=XI0, gamma=1e4, p=1.0)
    d = mean_local_delay(model, radio, 0.0)
    assert d == DIVERGENT or d > 1e6


def test_successful_transmission_density_definition(model):
    for p in (0.25, 0.7):
        radio = replace(RADIO, p=p)
        expected = p * model.intensity * float(np.real(moment(model, radio, 0.0, 1.0)))
        assert successful_transmission_density(model, radio, 0.0) == pytest.approx(
            expected, rel=1e-10
        )
    assert successful_transmission_density(
        model, replace(RADIO, p=1e-12), 0.0
    ) == pytest.approx(0.0, abs=1e-10)


def test_std_increasing_in_p_at_small_intensity():
    model = BlcpModel(BlpModel(n_b=10, radius=50.0), intensity=0.01)
    vals = [
        successful_transmission_density(model, replace(RADIO, p=p), 0.0)
        for p in (0.2, 0.5, 0.8)
    ]
    assert vals[0] < vals[1] < vals[2]


def test_optimal_transmit_probability(model):
    pstar = optimal_transmit_probability(model, RADIO, 0.0)
    assert 0.0 < pstar <= 1.0
    d_star = mean_local_delay(model, replace(RADIO, p=pstar), 0.0)
    for p in (max(pstar - 0.1, 0.05), min(pstar + 0.1, 1.0)):
        assert d_star <= mean_local_delay(model, replace(RADIO, p=p), 0.0) + 1e-6


def test_optimal_p_is_one_without_interference_penalty(model):
    radio = replace(RADIO, gamma=1e-9)
    assert optimal_transmit_probability(model, radio, 0.0) == pytest.approx(1.0, abs=1e-2)


def test_rate_ccdf(model):
    radio = replace(RADIO, gamma=999.0)  # gamma is overridden by the rate threshold
    v = rate_ccdf(model, radio, 0.0, bandwidth=1.0, filesize=1.0, deadline=1.0)
    direct = success_probability(model, replace(RADIO, gamma=1.0), 0.0)
    assert v == pytest.approx(direct, rel=1e-12)
    assert rate_ccdf(model, radio, 0.0, 1.0, 0.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        rate_ccdf(model, radio, 0.0, 0.0, 1.0, 1.0)
