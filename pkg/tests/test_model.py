from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from droneplan.errors import (
    DegenerateDesignError,
    InsufficientDataError,
    InvalidDurationError,
    InvalidSampleError,
    NonPhysicalRateError,
)
from droneplan.model import (
    PRESETS,
    CruiseState,
    MotionSample,
    PowerCoefficients,
    cruise_energy_rate,
    estimate_energy,
    estimate_power,
    features,
    fit_coefficients,
    read_telemetry_csv,
    synthesize_samples,
    write_telemetry_csv,
)

SOLO = PRESETS["3dr-solo"]
DJI = PRESETS["dji-matrice-100"]

finite = st.floats(-50, 50, allow_nan=False)


def test_hover_power_is_intercept():
    assert estimate_power(SOLO, MotionSample()) == pytest.approx(433.9, abs=1e-12)
    assert estimate_power(DJI, MotionSample()) == pytest.approx(251.7, abs=1e-12)


def test_payload_adds_linear_term():
    assert estimate_power(SOLO, MotionSample(payload_mass=500)) == pytest.approx(543.9)


def test_energy_is_power_times_duration():
    assert estimate_energy(SOLO, MotionSample(payload_mass=500), 60) == pytest.approx(32634.0)
    assert estimate_energy(SOLO, MotionSample(), 0) == 0


@pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan])
def test_energy_rejects_bad_duration(bad):
    with pytest.raises(InvalidDurationError):
        estimate_energy(SOLO, MotionSample(), bad)


@pytest.mark.parametrize(
    "sample",
    [
        MotionSample(v_xy=(math.nan, 0.0)),
        MotionSample(wind_xy=(0.0, math.inf)),
        MotionSample(payload_mass=-1.0),
    ],
)
def test_invalid_samples(sample):
    with pytest.raises(InvalidSampleError):
        estimate_power(SOLO, sample)


def test_cruise_rate_solo_at_five():
    rate = cruise_energy_rate(SOLO, CruiseState(5.0, (1.0, 0.0)))
    assert rate == pytest.approx((433.9 - 1.526 * 5) / 5)
    assert rate == pytest.approx(85.254, abs=1e-3)


def test_cruise_rate_tailwind_costs_more_under_presets():
    # b8 > 0, so wind along the heading raises power
    head = cruise_energy_rate(SOLO, CruiseState(5.0, (1.0, 0.0), (-3.0, 0.0)))
    tail = cruise_energy_rate(SOLO, CruiseState(5.0, (1.0, 0.0), (3.0, 0.0)))
    assert tail - head == pytest.approx(1.332 * 5 * 6 / 5)


def test_nonphysical_rate():
    coeffs = PowerCoefficients((0, 0, 0, 0, 0, 0, 0, 0, -1.0))
    with pytest.raises(NonPhysicalRateError):
        cruise_energy_rate(coeffs, CruiseState(5.0, (0.0, 1.0)))


def test_cruise_state_validation():
    with pytest.raises(ValueError):
        CruiseState(0.0, (1.0, 0.0))
    with pytest.raises(ValueError):
        CruiseState(5.0, (1.0, 1.0))


@given(
    vx=finite, vy=finite, ax=finite, ay=finite, vz=finite, az=finite,
    m=st.floats(0, 1000), wx=finite, wy=finite,
)
def test_power_matches_feature_dot_product(vx, vy, ax, ay, vz, az, m, wx, wy):
    s = MotionSample((vx, vy), (ax, ay), vz, az, m, (wx, wy))
    phi = features(s)
    assert phi[2] == pytest.approx(phi[0] * phi[1])
    assert phi[5] == pytest.approx(phi[3] * phi[4])
    assert estimate_power(DJI, s) == pytest.approx(float(DJI.as_array() @ phi), abs=1e-9)


@given(st.floats(0, 2 * math.pi), st.floats(0, 20))
def test_power_invariant_to_heading_without_wind(theta, v):
    a = MotionSample(v_xy=(v, 0.0))
    b = MotionSample(v_xy=(v * math.cos(theta), v * math.sin(theta)))
    assert estimate_power(SOLO, a) == pytest.approx(estimate_power(SOLO, b), abs=1e-9)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_fit_recovers_noiseless(name):
    truth = PRESETS[name]
    samples = synthesize_samples(truth, 50, np.random.default_rng(7))
    fit = fit_coefficients(samples)
    np.testing.assert_allclose(fit.coeffs.as_array(), truth.as_array(), rtol=1e-6)
    assert fit.n_samples == 50
    assert fit.residual_norm < 1e-6


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_fit_under_noise_close_in_norm(name):
    truth = PRESETS[name].as_array()
    samples = synthesize_samples(PRESETS[name], 2000, np.random.default_rng(3), noise_std=1.0)
    got = fit_coefficients(samples).coeffs.as_array()
    assert np.linalg.norm(got - truth) / np.linalg.norm(truth) < 0.01


def test_fit_needs_enough_samples():
    samples = synthesize_samples(SOLO, 8, np.random.default_rng(0))
    with pytest.raises(InsufficientDataError) as info:
        fit_coefficients(samples)
    assert (info.value.required, info.value.given) == (9, 8)


def test_fit_reports_dependent_columns():
    # level flight only: vertical columns are all zero
    rng = np.random.default_rng(1)
    samples = [
        MotionSample(s.v_xy, s.a_xy, 0.0, 0.0, s.payload_mass, s.wind_xy, s.measured_power)
        for s in synthesize_samples(SOLO, 40, rng)
    ]
    with pytest.raises(DegenerateDesignError) as info:
        fit_coefficients(samples)
    assert set(info.value.dependent) == {"v_z", "a_z", "v_z*a_z"}


def test_fit_requires_measured_power():
    samples = [MotionSample(v_xy=(float(k), 0.0)) for k in range(12)]
    with pytest.raises(InvalidSampleError):
        fit_coefficients(samples)


def test_telemetry_round_trip(tmp_path):
    samples = synthesize_samples(DJI, 30, np.random.default_rng(5))
    path = tmp_path / "t.csv"
    write_telemetry_csv(path, samples)
    assert read_telemetry_csv(path) == samples


def test_telemetry_missing_column(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("vx,vy\n1,2\n")
    with pytest.raises(InvalidSampleError, match="missing columns"):
        read_telemetry_csv(path)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_fit_reproduces_random_coefficients(seed):
    rng = np.random.default_rng(seed)
    truth = PowerCoefficients(tuple(rng.uniform(-5, 5, 9)))
    fit = fit_coefficients(synthesize_samples(truth, 30, rng))
    np.testing.assert_allclose(fit.coeffs.as_array(), truth.as_array(), rtol=1e-6, atol=1e-8)
