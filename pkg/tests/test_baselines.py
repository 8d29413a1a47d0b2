#!/usr/bin/env python
# -*- coding: utf-8 -*-

import itertools

import numpy as np
import pytest

from analysis.interference import coupling_matrix, matched_filter_precoders
from errors import InfeasibleError, ParameterError
from precoders.baselines import matched_filter_baseline, mrt_baseline, mrt_powers, scale_to_budget, zf_baseline
from precoders.fixed_phase import TargetSpec, cipm
from signals.constellation import SymbolFrame
from signals.units import db_to_linear
from tests.conftest import random_channels

ZETA = float(db_to_linear(4.7712))


def test_zero_forcing_hits_the_constellation_points(qpsk):
    spec = TargetSpec.strict([2.0, 4.0], noise_power=0.5)
    generator = np.random.default_rng(3)
    for H in random_channels(30):
        frame = SymbolFrame.from_indices(generator.integers(0, 4, size=2), qpsk)
        solution = zf_baseline(H, frame, spec)
        assert np.allclose(solution.received, np.sqrt([1.0, 2.0]) * frame.symbols, atol=1e-10)
        assert solution.power >= cipm(H, frame, spec).power * (1 - 1e-10)


def test_single_user_zf_equals_mrt(qpsk):
    h = np.array([[1.0 + 0.5j, -0.3, 0.8j]])
    frame = SymbolFrame.from_indices([1], qpsk)
    spec = TargetSpec.strict(ZETA)
    zf = zf_baseline(h, frame, spec)
    mrt = mrt_baseline(h, frame, spec)
    assert mrt.power == pytest.approx(zf.power, rel=1e-12)
    assert np.allclose(mrt.x, zf.x, atol=1e-12)


def test_mrt_meets_worst_case_amplitudes():
    for H in random_channels(30, n_antennas=4, seed=12):
        powers = mrt_powers(H, np.array([1.0, 1.0]), 1.0)
        norms = np.linalg.norm(H, axis=1)
        cross = np.abs(coupling_matrix(H, matched_filter_precoders(H)))
        np.fill_diagonal(cross, 0.0)
        q = np.sqrt(powers)
        assert np.allclose(norms * (q - cross @ q), 1.0, rtol=1e-9)


def test_mrt_thresholds_hold_for_every_symbol_combination(qpsk):
    spec = TargetSpec.strict(ZETA)
    for H in random_channels(10, n_antennas=4, seed=24):
        powers = mrt_powers(H, np.full(2, ZETA), 1.0)
        for first, second in itertools.product(range(4), repeat=2):
            frame = SymbolFrame.from_indices([first, second], qpsk)
            solution = mrt_baseline(H, frame, spec)
            assert solution.iterations["user_powers"] == pytest.approx(powers.tolist())
            assert np.all(np.abs(solution.received) >= np.sqrt(ZETA) * (1 - 1e-9))


def test_mrt_outage(qpsk):
    H = np.array([[1.0, 0.0], [1.0, 0.0]])
    frame = SymbolFrame.from_indices([0, 1], qpsk)
    with pytest.raises(InfeasibleError):
        mrt_baseline(H, frame, TargetSpec.strict(3.0))


def test_matched_filter_and_budget_scaling(qpsk):
    H = random_channels(1)[0]
    frame = SymbolFrame.from_indices([0, 2], qpsk)
    solution = matched_filter_baseline(H, frame, 1.0)
    assert solution.power > 0
    scaled = scale_to_budget(solution, 100.0)
    assert scaled.power == pytest.approx(100.0)
    assert np.vdot(scaled.x, scaled.x).real == pytest.approx(100.0)
    assert np.allclose(scaled.received, H @ scaled.x)
    with pytest.raises(ParameterError):
        matched_filter_baseline(H, frame, [-1.0, 1.0])
    with pytest.raises(ParameterError):
        scale_to_budget(solution, 0.0)
