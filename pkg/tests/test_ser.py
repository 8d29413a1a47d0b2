#!/usr/bin/env python
# -*- coding: utf-8 -*-

import numpy as np
import pytest
from scipy import integrate, special

from analysis.ser import (
    UNIFORM, UNNORMALIZED, angle_density, conditional_ser, count_errors, mc_ser, polar_density,
    sector_error, ser_above_target, ser_offset_quadrature, ser_relaxed_average, ser_strict_quadrature,
    simulate_until, wilson_interval,
)
from errors import ParameterError
from precoders.fixed_phase import TargetSpec, cipm
from precoders.baselines import zf_baseline
from signals.channel_model import RngStream
from signals.constellation import Constellation, SymbolFrame
from signals.units import db_to_linear
from tests.conftest import random_channels


def _q(x):
    return 0.5 * special.erfc(x / np.sqrt(2.0))


def test_zero_signal_is_a_uniform_guess():
    assert sector_error(0.0, 1.0, 4) == pytest.approx(0.75, rel=1e-8)
    assert sector_error(0.0, 2.0, 8) == pytest.approx(7.0 / 8.0, rel=1e-8)


@pytest.mark.parametrize("snr_db", [0.0, 3.0, 6.0, 10.0, 13.01])
def test_bpsk_closed_form(snr_db):
    omega = float(db_to_linear(snr_db))
    assert abs(ser_strict_quadrature(omega, 1.0, 2) - 0.5 * special.erfc(np.sqrt(omega))) < 1e-9


@pytest.mark.parametrize("snr_db", [0.0, 6.0, 10.0])
def test_qpsk_closed_form(snr_db):
    omega = float(db_to_linear(snr_db))
    q = _q(np.sqrt(omega))
    assert ser_strict_quadrature(omega, 1.0, 4) == pytest.approx(2 * q - q ** 2, rel=1e-7)


def test_densities_normalize():
    for omega, sigma2 in [(0.0, 1.0), (3.0, 1.0), (20.0, 0.5)]:
        total, _ = integrate.quad(lambda t: angle_density(t, omega, sigma2), -np.pi, np.pi,
                                  epsabs=1e-13, epsrel=1e-12, limit=200)
        assert total == pytest.approx(1.0, abs=1e-8)
    total, _ = integrate.dblquad(lambda v, t: polar_density(v, t, 3.0, 1.0, 0.3), -np.pi, np.pi, 0.0, 12.0,
                                 epsabs=1e-10, epsrel=1e-10)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_offset_even_and_increasing():
    omega = 3.0
    assert ser_offset_quadrature(omega, 1.0, 4, 0.2) == pytest.approx(ser_offset_quadrature(omega, 1.0, 4, -0.2),
                                                                     rel=1e-9)
    values = [ser_offset_quadrature(omega, 1.0, 4, o) for o in (0.0, 0.1, 0.3, 0.5, np.pi / 4)]
    assert all(a < b for a, b in zip(values, values[1:]))
    with pytest.raises(ParameterError):
        ser_offset_quadrature(omega, 1.0, 4, 1.0)


def test_strict_ser_decreases_with_power():
    values = [ser_strict_quadrature(w, 1.0, 4) for w in (0.5, 1.0, 3.0, 10.0, 20.0)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_noiseless_cases():
    assert sector_error(1.0, 0.0, 4, 0.2) == 0.0
    assert sector_error(1.0, 0.0, 4, 1.0) == 1.0


def test_relaxed_average_modes():
    omega, phi = 3.0, np.pi / 8
    strict = ser_strict_quadrature(omega, 1.0, 4)
    uniform = ser_relaxed_average(omega, 1.0, 4, phi, phi, weighting=UNIFORM)
    assert uniform >= strict
    unnormalized = ser_relaxed_average(omega, 1.0, 4, phi, phi, weighting=UNNORMALIZED)
    assert unnormalized == pytest.approx(2 * phi * uniform, rel=1e-8)
    assert ser_relaxed_average(omega, 1.0, 4, 0.0, 0.0, weighting=UNIFORM) == strict
    assert ser_relaxed_average(omega, 1.0, 4, phi, phi, offsets=[0.0, 0.0]) == pytest.approx(strict)
    with pytest.raises(ParameterError):
        ser_relaxed_average(omega, 1.0, 4, phi, phi)
    with pytest.raises(ParameterError):
        ser_relaxed_average(omega, 1.0, 4, phi, phi, offsets=[0.5])


def test_above_target_probability():
    zeta = float(db_to_linear(4.7712))
    values = [ser_above_target(zeta, 1.0, 4, phi) for phi in (0.0, np.pi / 16, np.pi / 8, np.pi / 5)]
    assert all(a <= b for a, b in zip(values, values[1:]))
    assert values[0] < ser_strict_quadrature(zeta, 1.0, 4)
    assert ser_above_target(zeta, 1.0, 4, np.pi / 8, omega=4 * zeta) < values[2]


def test_conditional_ser_of_strict_solution(qpsk):
    H = random_channels(1)[0]
    frame = SymbolFrame.from_indices([0, 1], qpsk)
    solution = cipm(H, frame, TargetSpec.strict(3.0))
    expected = [ser_strict_quadrature(abs(y) ** 2, 1.0, 4) for y in solution.received]
    assert np.allclose(conditional_ser(solution, frame, 1.0), expected, rtol=1e-6, atol=1e-12)


def test_wilson_interval():
    assert wilson_interval(50, 100) == pytest.approx(0.0962, rel=1e-2)
    assert wilson_interval(0, 100) > 0
    with pytest.raises(ParameterError):
        wilson_interval(0, 0)


def _zf_at(snr_db, qpsk):
    omega = float(db_to_linear(snr_db))
    H = random_channels(1, seed=61)[0]
    frame = SymbolFrame.from_indices([0, 3], qpsk)
    return zf_baseline(H, frame, TargetSpec.strict(omega)), frame, omega


@pytest.mark.parametrize("snr_db", [6.0, 10.0])
def test_monte_carlo_matches_quadrature(snr_db, qpsk):
    solution, frame, omega = _zf_at(snr_db, qpsk)
    report = mc_ser(solution, frame, 1.0, 200000, RngStream(71))
    analytic = ser_strict_quadrature(omega, 1.0, 4)
    assert report.errors >= 100
    assert report.ser_analytic == pytest.approx(analytic, rel=1e-6)
    n = 2 * 200000
    assert abs(report.ser_mc - analytic) <= 3 * np.sqrt(analytic * (1 - analytic) / n)


@pytest.mark.slow
def test_monte_carlo_matches_quadrature_high_snr(qpsk):
    solution, frame, omega = _zf_at(13.01, qpsk)
    report = simulate_until(lambda stream: (solution, frame), 1.0, RngStream(73), min_errors=100,
                            max_symbols=10 ** 8, draws_per_trial=100000)
    analytic = ser_strict_quadrature(omega, 1.0, 4)
    assert report.errors >= 100
    assert abs(report.ser_mc - analytic) <= 3 * np.sqrt(analytic * (1 - analytic) / report.trials)


def test_noiseless_detection_is_error_free(qpsk):
    solution, frame, _ = _zf_at(6.0, qpsk)
    assert np.all(count_errors(solution, frame, 0.0, 10, np.random.default_rng(0)) == 0)


def test_simulate_until_reproducible(qpsk):
    c = Constellation(4)

    def draw(stream):
        H = random_channels(1, seed=stream.path[0] + 100)[0]
        frame = SymbolFrame.from_indices([0, 2], c)
        return zf_baseline(H, frame, TargetSpec.strict(2.0)), frame

    first = simulate_until(draw, 1.0, RngStream(5), min_errors=50, max_symbols=10 ** 5, draws_per_trial=500)
    second = simulate_until(draw, 1.0, RngStream(5), min_errors=50, max_symbols=10 ** 5, draws_per_trial=500)
    assert first.errors == second.errors >= 50
    assert first.ser_mc == second.ser_mc
